#include "relmodes/linear_dynamics.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <sstream>

namespace relmodes {

Mat4 cw_planar_plant(double n) {
  Mat4 A = Mat4::Zero();
  A(0, 2) = 1.0;
  A(1, 3) = 1.0;
  A(2, 0) = 3.0 * n * n;
  A(2, 3) = 2.0 * n;
  A(3, 2) = -2.0 * n;
  return A;
}

Mat4 cw_stm_planar(double n, double t) {
  if (!(n > 0.0)) throw InvalidInput("mean motion must be positive");
  const double s = std::sin(n * t);
  const double c = std::cos(n * t);
  Mat4 P;
  P << 4.0 - 3.0 * c, 0.0, s / n, 2.0 / n * (1.0 - c),
      6.0 * (s - n * t), 1.0, -2.0 / n * (1.0 - c), 4.0 / n * s - 3.0 * t,
      3.0 * n * s, 0.0, c, 2.0 * s,
      -6.0 * n * (1.0 - c), 0.0, -2.0 * s, 4.0 * c - 3.0;
  return P;
}

Mat6 cw_plant(double n) {
  Mat6 A = Mat6::Zero();
  A.topRightCorner<3, 3>() = Mat3::Identity();
  A(3, 0) = 3.0 * n * n;
  A(3, 4) = 2.0 * n;
  A(4, 3) = -2.0 * n;
  A(5, 2) = -n * n;
  return A;
}

PlantMatrix qns_plant_theta(const ChiefOrbit& chief, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  const double q1 = chief.q1();
  const double q2 = chief.q2();
  const double kappa = 1.0 + q1 * c + q2 * s;
  const double eta2 = chief.eta() * chief.eta();
  PlantMatrix P{Mat6::Zero(), IndepVar::Theta};
  P.entries(1, 0) = -3.0 / (2.0 * chief.a());
  P.entries(1, 1) = 2.0 * (q2 * c - q1 * s) / kappa;
  P.entries(1, 3) = 3.0 * q1 / eta2 + 2.0 * c / kappa;
  P.entries(1, 4) = 3.0 * q2 / eta2 + 2.0 * s / kappa;
  return P;
}

Mat6 lvlh_plant(const Vec3& omega, const Vec3& omega_dot, const Mat3& gravity_gradient) {
  auto skew = [](const Vec3& w) {
    Mat3 m;
    m << 0.0, -w(2), w(1), w(2), 0.0, -w(0), -w(1), w(0), 0.0;
    return m;
  };
  const Mat3 W = skew(omega);
  Mat6 A = Mat6::Zero();
  A.topRightCorner<3, 3>() = Mat3::Identity();
  A.bottomLeftCorner<3, 3>() = gravity_gradient - skew(omega_dot) - W * W;
  A.bottomRightCorner<3, 3>() = -2.0 * W;
  return A;
}

PlantMatrix cartesian_plant_keplerian(const ChiefOrbit& chief, double theta) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  const double r3 = st.r * st.r * st.r;
  const double mu_r3 = chief.mu() / r3;
  const Vec3 omega(0.0, 0.0, st.thetadot);
  const Vec3 omega_dot(0.0, 0.0, -2.0 * st.vr * chief.h() / r3);
  const Mat3 grad = mu_r3 * Vec3(2.0, -1.0, -1.0).asDiagonal();
  return {lvlh_plant(omega, omega_dot, grad), IndepVar::Time};
}

Mat6 cartesian_plant_theta(const ChiefOrbit& chief, double theta) {
  return cartesian_plant_keplerian(chief, theta).entries / eval_at_theta(chief, theta).thetadot;
}

Mat6 cartesian_plant_at_time(const ChiefOrbit& chief, double t) {
  return cartesian_plant_keplerian(chief, time_to_theta(chief, t)).entries;
}

Vec6 gauss_rates(const ChiefOrbit& chief, double theta, const Vec3& accel) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  const double ar = accel(0), at = accel(1), an = accel(2);
  const double a = chief.a(), q1 = chief.q1(), q2 = chief.q2();
  const double h = chief.h(), p = chief.p(), r = st.r;
  const double s = std::sin(theta), c = std::cos(theta);
  const double si = std::sin(chief.inc()), ci = std::cos(chief.inc());
  double an_over_si = 0.0;
  double an_ci_over_si = 0.0;
  if (an != 0.0) {
    if (std::abs(si) < 1e-9)
      throw SingularConfiguration(
          "Gauss equations: normal acceleration on an equatorial chief (node undefined)");
    an_over_si = an / si;
    an_ci_over_si = an * ci / si;
  }
  Vec6 rates;
  rates(0) = 2.0 * a * a / h * ((q1 * s - q2 * c) * ar + p / r * at);
  rates(1) = h / (r * r) - r * s / h * an_ci_over_si;
  rates(2) = r * c / h * an;
  rates(3) = p * s / h * ar + ((p + r) * c + r * q1) / h * at + r * q2 * s / h * an_ci_over_si;
  rates(4) = -p * c / h * ar + ((p + r) * s + r * q2) / h * at - r * q1 * s / h * an_ci_over_si;
  rates(5) = r * s / h * an_over_si;
  return rates;
}

std::vector<std::vector<double>> integrate_samples(const OdeRhs& rhs, std::vector<double> x0,
                                                   const std::vector<double>& samples,
                                                   const IntegratorOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  using State = std::vector<double>;
  std::vector<State> out;
  if (samples.empty()) return out;
  out.reserve(samples.size());
  if (samples.size() == 1) {
    out.push_back(x0);
    return out;
  }
  const double dir = samples.back() >= samples.front() ? 1.0 : -1.0;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (dir * (samples[i] - samples[i - 1]) < 0.0)
      throw InvalidInput("integration samples must be monotone");
  }
  const double span = std::abs(samples.back() - samples.front());
  double dt = dir * std::max(span * 1e-6, 1e-12);

  auto system = [&rhs](const State& x, State& dxdt, double s) { rhs(s, x, dxdt); };
  auto observer = [&out](const State& x, double) {
    for (double v : x) {
      if (!std::isfinite(v)) throw IntegrationError("non-finite state during integration");
    }
    out.push_back(x);
  };
  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol,
                                         odeint::runge_kutta_fehlberg78<State>());
  try {
    odeint::integrate_times(stepper, system, x0, samples.begin(), samples.end(), dt, observer,
                            odeint::max_step_checker(opts.max_steps));
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::exception& ex) {
    std::ostringstream os;
    os << "integration failed: " << ex.what();
    throw IntegrationError(os.str());
  }
  return out;
}

std::vector<double> uniform_grid(double s0, double s1, int steps) {
  if (steps < 2) throw InvalidInput("a grid needs at least two points");
  if (!std::isfinite(s0) || !std::isfinite(s1)) throw InvalidInput("grid span must be finite");
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    g[static_cast<std::size_t>(i)] = s0 + (s1 - s0) * static_cast<double>(i) / (steps - 1);
  g.back() = s1;
  return g;
}

Trajectory propagate_linear_at(const PlantFn& plant, IndepVar indep, const Vec6& x0,
                               const std::vector<double>& samples, const IntegratorOptions& opts,
                               const ForcingFn& forcing) {
  OdeRhs rhs = [&](double s, const std::vector<double>& x, std::vector<double>& dx) {
    const Eigen::Map<const Vec6> xv(x.data());
    Vec6 d = plant(s) * xv;
    if (forcing) d += forcing(s, xv);
    dx.assign(d.data(), d.data() + 6);
  };
  const auto raw = integrate_samples(rhs, std::vector<double>(x0.data(), x0.data() + 6), samples,
                                     opts);
  Trajectory traj{indep, samples, {}};
  traj.x.reserve(raw.size());
  for (const auto& v : raw) traj.x.emplace_back(Eigen::Map<const Vec6>(v.data()));
  return traj;
}

Trajectory propagate_linear(const PlantFn& plant, IndepVar indep, const Vec6& x0, double s0,
                            double s1, int steps, const IntegratorOptions& opts,
                            const ForcingFn& forcing) {
  return propagate_linear_at(plant, indep, x0, uniform_grid(s0, s1, steps), opts, forcing);
}

}  // namespace relmodes
