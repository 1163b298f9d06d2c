#include "relmodes/chief_orbit.hpp"

#include <cmath>
#include <sstream>

namespace relmodes {

std::string to_string(IndepVar v) { return v == IndepVar::Time ? "time" : "theta"; }

std::string to_string(Domain d) {
  switch (d) {
    case Domain::Qns:
      return "qns";
    case Domain::Cartesian:
      return "cartesian";
    case Domain::Spherical:
      return "spherical";
  }
  return "unknown";
}

Domain parse_domain(const std::string& s) {
  if (s == "qns") return Domain::Qns;
  if (s == "cart" || s == "cartesian") return Domain::Cartesian;
  if (s == "sph" || s == "spherical") return Domain::Spherical;
  throw InvalidInput("unknown representation '" + s + "' (expected qns, cart or sph)");
}

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w -= kTwoPi;
  // Values a few ulp below 2 pi come from angles that are 0 mod 2 pi.
  if (kTwoPi - w < 1e-12) w = 0.0;
  return w;
}

ChiefOrbit::ChiefOrbit(double a, double q1, double q2, double inc, double raan, double theta0,
                       double mu)
    : a_(a), q1_(q1), q2_(q2), inc_(inc), raan_(raan), theta0_(theta0), mu_(mu) {
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidInput("semimajor axis must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw InvalidInput("gravitational parameter must be positive");
  const double e2 = q1 * q1 + q2 * q2;
  if (!(e2 < 1.0)) throw InvalidInput("orbit is not closed (e >= 1)");
  if (!std::isfinite(inc) || !std::isfinite(raan) || !std::isfinite(theta0))
    throw InvalidInput("orbit angles must be finite");
  eta_ = std::sqrt(1.0 - e2);
  p_ = a * eta_ * eta_;
  h_ = std::sqrt(mu * p_);
  n_ = std::sqrt(mu / (a * a * a));
}

double ChiefOrbit::argp() const {
  if (q1_ == 0.0 && q2_ == 0.0) return 0.0;
  return std::atan2(q2_, q1_);
}

ChiefOrbit ChiefOrbit::with_theta0(double theta0) const {
  return ChiefOrbit(a_, q1_, q2_, inc_, raan_, theta0, mu_);
}

ChiefOrbit ChiefOrbit::with_q(double q1, double q2) const {
  return ChiefOrbit(a_, q1, q2, inc_, raan_, theta0_, mu_);
}

ChiefOrbit make_chief(double a, double e, double inc, double raan, double argp, double f0,
                      double mu) {
  if (!(e >= 0.0) || !(e < 1.0)) {
    std::ostringstream os;
    os << "eccentricity " << e << " outside [0, 1): orbit not closed";
    throw InvalidInput(os.str());
  }
  return ChiefOrbit(a, e * std::cos(argp), e * std::sin(argp), inc, raan,
                    wrap_two_pi(argp + f0), mu);
}

OrbitStateAtTheta eval_at_theta(const ChiefOrbit& chief, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  OrbitStateAtTheta st{};
  st.theta = theta;
  st.kappa = 1.0 + chief.q1() * c + chief.q2() * s;
  st.r = chief.p() / st.kappa;
  st.vr = chief.h() / chief.p() * (chief.q1() * s - chief.q2() * c);
  st.vt = chief.h() / st.r;
  st.thetadot = chief.h() / (st.r * st.r);
  return st;
}

Shorthands shorthand_abc(const ChiefOrbit& chief) {
  const double th0 = chief.theta0();
  const double q1 = chief.q1();
  const double q2 = chief.q2();
  const double r0 = eval_at_theta(chief, th0).r;
  Shorthands sh{};
  sh.gamma = q1 * q1 + q2 * q2 - 1.0;
  sh.A = q2 * std::cos(th0) - q1 * std::sin(th0);
  sh.B = q1 * std::cos(th0) + q2 * std::sin(th0);
  sh.C = chief.h() * r0 * r0 / (chief.a() * chief.mu() * sh.gamma);
  return sh;
}

double solve_kepler(double mean_anomaly, double e) {
  // Work on the wrapped anomaly; the caller re-adds whole revolutions.
  const double M = std::remainder(mean_anomaly, kTwoPi);
  if (e == 0.0) return mean_anomaly;
  const double sgn = std::sin(M) >= 0.0 ? 1.0 : -1.0;
  double E = M + 0.85 * e * sgn;  // Danby
  constexpr int kMaxIter = 50;
  for (int it = 0; it < kMaxIter; ++it) {
    const double f = E - e * std::sin(E) - M;
    const double fp = 1.0 - e * std::cos(E);
    const double dE = f / fp;
    E -= dE;
    if (std::abs(dE) < 1e-13) return E + (mean_anomaly - M);
  }
  std::ostringstream os;
  os << "Kepler solver did not converge for M = " << mean_anomaly << ", e = " << e;
  throw ConvergenceError(os.str());
}

namespace {

// Eccentric anomaly from true anomaly, continuous across revolutions.
double eccentric_from_true(double f, double e) {
  const double k = std::round(f / kTwoPi);
  const double fw = f - k * kTwoPi;  // in [-pi, pi]
  const double E = 2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * fw),
                                    std::sqrt(1.0 + e) * std::cos(0.5 * fw));
  return E + k * kTwoPi;
}

double true_from_eccentric(double E, double e) {
  const double k = std::round(E / kTwoPi);
  const double Ew = E - k * kTwoPi;
  const double f = 2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * Ew),
                                    std::sqrt(1.0 - e) * std::cos(0.5 * Ew));
  return f + k * kTwoPi;
}

}  // namespace

double mean_anomaly_unwrapped(const ChiefOrbit& chief, double theta) {
  const double e = chief.e();
  const double E = eccentric_from_true(theta - chief.argp(), e);
  return E - e * std::sin(E);
}

double theta_to_time(const ChiefOrbit& chief, double theta) {
  const double M = mean_anomaly_unwrapped(chief, theta);
  const double M0 = mean_anomaly_unwrapped(chief, chief.theta0());
  return (M - M0) / chief.n();
}

double time_to_theta(const ChiefOrbit& chief, double t) {
  const double M0 = mean_anomaly_unwrapped(chief, chief.theta0());
  const double M = M0 + chief.n() * t;
  const double E = solve_kepler(M, chief.e());
  return chief.argp() + true_from_eccentric(E, chief.e());
}

}  // namespace relmodes
