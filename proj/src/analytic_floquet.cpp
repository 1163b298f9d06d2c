#include "relmodes/analytic_floquet.hpp"

#include "relmodes/linear_dynamics.hpp"

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <sstream>

namespace relmodes {

namespace {

struct QnsScalars {
  double a, q1, q2, eta, gamma;
};

double kappa_of(const QnsScalars& s, double theta) {
  return 1.0 + s.q1 * std::cos(theta) + s.q2 * std::sin(theta);
}

// F21 and F25 carry 1/q1 terms. Only differences F(theta0) - F(theta) enter P,
// so the constants 3 q2 / (q1 gamma) and 4 / q1 are dropped, which leaves
// expressions without the q1 = 0 singularity. The arctan(tan(theta/2)) term is
// continued across theta = pi + 2 k pi by adding k pi.
double f21(const QnsScalars& s, double theta) {
  const double k = std::ceil((theta - kPi) / kTwoPi);
  const double tw = theta - k * kTwoPi;  // (-pi, pi]
  const double sh = std::sin(0.5 * tw);
  const double ch = std::cos(0.5 * tw);  // >= 0
  const double at = std::atan2(s.q2 * ch + (1.0 - s.q1) * sh, s.eta * ch) + k * kPi;
  const double eta3 = s.eta * s.eta * s.eta;
  const double sn = std::sin(theta), cs = std::cos(theta);
  return 6.0 / eta3 * (at - 0.5 * theta) +
         3.0 * (s.q1 * sn - s.q2 * cs) / (s.gamma * kappa_of(s, theta));
}

double f24(const QnsScalars& s, double theta) {
  const double k = kappa_of(s, theta);
  const double sn = std::sin(theta);
  return 4.0 * (s.q2 + sn) / (k * k) + 4.0 * sn / k;
}

double f25(const QnsScalars& s, double theta) {
  const double k = kappa_of(s, theta);
  const double sn = std::sin(theta), cs = std::cos(theta);
  return -4.0 * ((2.0 + s.q2 * sn) * cs + s.q1 * (1.0 + cs * cs)) / (k * k);
}

Mat6 lf_qns_from(const QnsScalars& s, double theta0, double theta, IndepVar indep) {
  const double k = kappa_of(s, theta);
  const double k0 = kappa_of(s, theta0);
  const double k2 = k * k;
  Mat6 P = Mat6::Identity();
  P(1, 0) = indep == IndepVar::Theta ? k2 / (2.0 * s.a) * (f21(s, theta0) - f21(s, theta)) : 0.0;
  P(1, 1) = k2 / (k0 * k0);
  P(1, 3) = k2 / (4.0 * s.gamma) * (f24(s, theta0) - f24(s, theta));
  P(1, 4) = k2 / (4.0 * s.gamma) * (f25(s, theta0) - f25(s, theta));
  return P;
}

QnsScalars scalars_with_q1(const ChiefOrbit& chief, double q1) {
  const double q2 = chief.q2();
  const double e2 = q1 * q1 + q2 * q2;
  return {chief.a(), q1, q2, std::sqrt(1.0 - e2), e2 - 1.0};
}

}  // namespace

Mat6 lf_qns(const ChiefOrbit& chief, double theta, IndepVar indep, bool* regularized) {
  if (regularized) *regularized = std::abs(chief.q1()) < kQ1Threshold;
  return lf_qns_from(scalars_with_q1(chief, chief.q1()), chief.theta0(), theta, indep);
}

Mat6 lf_qns_printed(const ChiefOrbit& chief, double theta, IndepVar indep) {
  const double q1 = chief.q1(), q2 = chief.q2();
  if (q1 == 0.0) throw SingularConfiguration("printed P21/P25 forms divide by q1 = 0");
  const double gamma = q1 * q1 + q2 * q2 - 1.0;
  const double e2 = gamma + 1.0;
  const double eta3 = std::pow(-gamma, 1.5);
  auto F21 = [&](double th) {
    const double k = 1.0 + q1 * std::cos(th) + q2 * std::sin(th);
    const double base = std::ceil((th - kPi) / kTwoPi);
    const double tw = th - base * kTwoPi;
    const double at = std::atan((q2 + (1.0 - q1) * std::tan(0.5 * tw)) / std::sqrt(-gamma)) + base * kPi;
    return 6.0 / eta3 * (at - 0.5 * th) + 3.0 * (q2 + e2 * std::sin(th)) / (q1 * gamma * k);
  };
  auto F25 = [&](double th) {
    const double k = 1.0 + q1 * std::cos(th) + q2 * std::sin(th);
    const double sn = std::sin(th);
    return 4.0 * (1.0 - q1 * q1 + q2 * sn) / (q1 * k * k) + 4.0 * q2 * sn / (q1 * k);
  };
  const double th0 = chief.theta0();
  const double k = 1.0 + q1 * std::cos(theta) + q2 * std::sin(theta);
  Mat6 P = lf_qns(chief, theta, indep);
  if (indep == IndepVar::Theta) P(1, 0) = k * k / (2.0 * chief.a()) * (F21(th0) - F21(theta));
  P(1, 4) = k * k / (4.0 * gamma) * (F25(th0) - F25(theta));
  return P;
}

LfTransform lf_qns_transform(const ChiefOrbit& chief, IndepVar indep) {
  LfTransform lf;
  lf.eval = [chief, indep](double theta) { return lf_qns(chief, theta, indep); };
  lf.theta0 = chief.theta0();
  lf.domain = Domain::Qns;
  lf.indep = indep;
  lf.regularized = std::abs(chief.q1()) < kQ1Threshold;
  return lf;
}

double p21_mean_anomaly(const ChiefOrbit& chief, double theta) {
  const double k = eval_at_theta(chief, theta).kappa;
  const double eta3 = chief.eta() * chief.eta() * chief.eta();
  const double m0 = mean_anomaly_unwrapped(chief, chief.theta0()) - chief.theta0();
  const double m = mean_anomaly_unwrapped(chief, theta) - theta;
  return k * k / (2.0 * chief.a()) * 3.0 / eta3 * (m0 - m);
}

double r21(const ChiefOrbit& chief) {
  const double r0 = eval_at_theta(chief, chief.theta0()).r;
  return -3.0 * chief.a() * chief.eta() / (2.0 * r0 * r0);
}

LtiSystem lti_qns(const ChiefOrbit& chief, IndepVar indep) {
  const double scale = indep == IndepVar::Theta ? 1.0 : chief.n();
  LtiSystem sys;
  sys.R = Mat6::Zero();
  sys.R(1, 0) = scale * r21(chief);
  sys.V = eigvecs_for_domain(regularize_chief(chief), Domain::Qns);
  sys.J = Mat6::Zero();
  sys.J(4, 5) = scale;
  sys.domain = Domain::Qns;
  sys.indep = indep;
  return sys;
}

double delta_theta_solution(const ChiefOrbit& chief, double theta, double dt, double da,
                            double dtheta0, double dq1, double dq2, bool* regularized) {
  const Mat6 P = lf_qns(chief, theta, IndepVar::Time, regularized);
  const double lam21 = chief.n() * r21(chief);
  return P(1, 1) * lam21 * dt * da + P(1, 1) * dtheta0 + P(1, 3) * dq1 + P(1, 4) * dq2;
}

Mat6 map_lti(const Mat6& G0, const Mat6& R_src) { return G0 * R_src * g_inverse(G0); }

LfTransform map_lf(std::function<Mat6(double)> G, const LfTransform& P_src, const Mat6& G0,
                   Domain target) {
  const Mat6 G0inv = g_inverse(G0);
  LfTransform lf;
  lf.eval = [G = std::move(G), src = P_src.eval, G0inv](double theta) {
    return Mat6(G(theta) * src(theta) * G0inv);
  };
  lf.theta0 = P_src.theta0;
  lf.domain = target;
  lf.indep = P_src.indep;
  lf.regularized = P_src.regularized;
  return lf;
}

LfTransform lf_for_domain(const ChiefOrbit& chief, Domain domain, IndepVar indep) {
  LfTransform src = lf_qns_transform(chief, indep);
  if (domain == Domain::Qns) return src;
  auto G = [chief, domain](double theta) { return g_for_domain(chief, theta, domain).entries; };
  return map_lf(G, src, G(chief.theta0()), domain);
}

double alpha_scale(const ChiefOrbit& chief) {
  return 2.0 * r21(chief) * chief.a() / shorthand_abc(chief).gamma;
}

LtiSystem lti_cartesian_closed(const ChiefOrbit& chief) {
  const Shorthands sh = shorthand_abc(chief);
  const double A = sh.A, B = sh.B, C = sh.C;
  const double al = alpha_scale(chief);
  LtiSystem sys;
  sys.R << A * (B + 2.0), A * A, 0.0, A * A * C, -A * (B + 1.0) * C, 0.0,
      -(B + 1.0) * (B + 2.0), -A * (B + 1.0), 0.0, -A * (B + 1.0) * C, (B + 1.0) * (B + 1.0) * C, 0.0,
      0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
      B * (B + 2.0) / C, A * B / C, 0.0, A * B, -B * (B + 1.0), 0.0,
      A * (B + 2.0) / C, A * A / C, 0.0, A * A, -A * (B + 1.0), 0.0,
      0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  sys.R *= al;
  sys.V << 0.0, 0.0, 0.0, 0.0, -al * A * (B + 1.0) * C, 0.0,
      1.0, 0.0, 0.0, 0.0, al * (B + 1.0) * (B + 1.0) * C, 0.0,
      0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
      -1.0 / C, 0.0, 1.0, 0.0, -al * B * (B + 1.0), 0.0,
      0.0, 0.0, A / (B + 1.0), 0.0, -al * A * (B + 1.0), 1.0,
      0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  sys.J = Mat6::Zero();
  sys.J(4, 5) = 1.0;
  sys.domain = Domain::Cartesian;
  sys.indep = IndepVar::Theta;
  return sys;
}

LtiSystem lti_spherical_closed(const ChiefOrbit& chief) {
  const Shorthands sh = shorthand_abc(chief);
  const double A = sh.A, B = sh.B, C = sh.C;
  const double ga = sh.gamma * chief.a();
  const double al = alpha_scale(chief);
  const double b1 = B + 1.0;
  LtiSystem sys;
  sys.R << A * (B + 2.0), 0.0, 0.0, A * A * C, ga * A * C, 0.0,
      b1 * b1 * (B + 2.0) / ga, 0.0, 0.0, A * C * b1 * b1 / ga, b1 * b1 * C, 0.0,
      0.0, 0.0, 0.0, 0.0, 0.0, 0.0,
      B * (B + 2.0) / C, 0.0, 0.0, A * B, ga * B, 0.0,
      -2.0 * A * b1 * (B + 2.0) / (ga * C), 0.0, 0.0, -2.0 * A * A * b1 / ga, -2.0 * A * b1, 0.0,
      0.0, 0.0, 0.0, 0.0, 0.0, 0.0;
  sys.R *= al;
  sys.V << 0.0, 0.0, 0.0, 0.0, al * A * C * ga, 0.0,
      1.0, 0.0, 0.0, 0.0, al * b1 * b1 * C, 0.0,
      0.0, 1.0, 0.0, 0.0, 0.0, 0.0,
      0.0, 0.0, 1.0, 0.0, al * B * ga, 0.0,
      0.0, 0.0, -A / ga, 0.0, -2.0 * al * A * b1, 1.0,
      0.0, 0.0, 0.0, 1.0, 0.0, 0.0;
  sys.J = Mat6::Zero();
  sys.J(4, 5) = 1.0;
  sys.domain = Domain::Spherical;
  sys.indep = IndepVar::Theta;
  return sys;
}

Mat6 eigvecs_closed(const ChiefOrbit& chief, Domain domain) {
  const Shorthands sh = shorthand_abc(chief);
  if (std::abs(sh.A) < kASingular) {
    std::ostringstream os;
    os << "eigenvector matrix is singular: e sin f0 = " << sh.A
       << " (choose f0 away from k*180 deg or use the regularized chief)";
    throw SingularConfiguration(os.str());
  }
  switch (domain) {
    case Domain::Cartesian:
      return lti_cartesian_closed(chief).V;
    case Domain::Spherical:
      return lti_spherical_closed(chief).V;
    case Domain::Qns:
      break;
  }
  throw InvalidInput("closed-form eigenvectors exist for cartesian and spherical only");
}

ChiefOrbit regularize_chief(const ChiefOrbit& chief, bool* changed) {
  const double A = shorthand_abc(chief).A;
  const bool reg = std::abs(A) < kASingular;
  if (changed) *changed = reg;
  if (!reg) return chief;
  // Land slightly above the threshold so the result is not flagged again.
  const double target = (A < 0.0 ? -1.0 : 1.0) * kASingular * (1.0 + 1e-6);
  const double th0 = chief.theta0();
  const double d = target - A;
  return chief.with_q(chief.q1() - d * std::sin(th0), chief.q2() + d * std::cos(th0));
}

Mat6 eigvecs_for_domain(const ChiefOrbit& chief, Domain domain) {
  if (domain != Domain::Qns) return eigvecs_closed(chief, domain);
  return g_inverse(g_cartesian(chief, chief.theta0())) * eigvecs_closed(chief, Domain::Cartesian);
}

Vec6 balanced_solve(const Mat6& V, const Vec6& x) {
  Vec6 scale;
  for (int j = 0; j < 6; ++j) {
    const double nrm = V.col(j).norm();
    scale(j) = nrm > 0.0 ? nrm : 1.0;
  }
  const Mat6 Vb = V * scale.cwiseInverse().asDiagonal();
  const Vec6 cb = Eigen::FullPivLU<Mat6>(Vb).solve(x);
  return cb.cwiseQuotient(scale);
}

double drift_constant(const ChiefOrbit& chief, const Vec6& state0, Domain domain) {
  const OrbitStateAtTheta st = eval_at_theta(chief, chief.theta0());
  const double r0 = st.r, vr0 = st.vr, vt0 = st.vt, p = chief.p();
  switch (domain) {
    case Domain::Cartesian: {
      const Shorthands sh = shorthand_abc(chief);
      const double eta3 = chief.eta() * chief.eta() * chief.eta();
      return (p / r0 + 1.0) * (p / r0) * chief.n() / eta3 * state0(0) +
             vr0 / (sh.C * vt0) * state0(1) + vr0 / vt0 * state0(3) + state0(4);
    }
    case Domain::Spherical:
      return chief.mu() / (chief.h() * r0 * r0) * (1.0 + p / r0) * state0(0) +
             vr0 / (vt0 * r0) * state0(3) + state0(4);
    case Domain::Qns:
      break;
  }
  return drift_constant(chief, g_cartesian(chief, chief.theta0()).entries * state0,
                        Domain::Cartesian);
}

Vec6 modal_constants_closed(const ChiefOrbit& chief, const Vec6& x, Domain domain) {
  const Shorthands sh = shorthand_abc(chief);
  const OrbitStateAtTheta st = eval_at_theta(chief, chief.theta0());
  const double r0 = st.r, vr0 = st.vr, vt0 = st.vt, p = chief.p(), n = chief.n();
  const double C = sh.C;
  Vec6 c;
  if (domain == Domain::Cartesian) {
    const double eta2 = chief.eta() * chief.eta();
    c(0) = -vt0 / vr0 * x(0) + x(1);
    c(1) = x(2);
    c(2) = (-vt0 * r0 / (vr0 * p) * x(0) + x(1) + C * x(3)) / C;
    c(3) = x(5);
    c(4) = -eta2 * vt0 / (3.0 * vr0) * n * (r0 / p) * (r0 / p) * x(0);
  } else if (domain == Domain::Spherical) {
    c(0) = -vt0 / (vr0 * r0) * x(0) + x(1);
    c(1) = x(2);
    c(2) = ((1.0 - r0 / p) * vt0 / vr0 * x(0) + C * x(3)) / C;
    c(3) = x(5);
    c(4) = -vt0 / (3.0 * vr0 * chief.a()) * n * (r0 / p) * x(0);
  } else {
    return modal_constants_closed(chief, g_cartesian(chief, chief.theta0()).entries * x,
                                  Domain::Cartesian);
  }
  c(5) = drift_constant(chief, x, domain);
  return c;
}

ModalConstants modal_constants(const ChiefOrbit& chief, const Vec6& state0, Domain domain) {
  ModalConstants out;
  out.domain = domain;
  bool reg = false;
  const ChiefOrbit eff = regularize_chief(chief, &reg);
  out.regularized = reg;
  if (!reg && std::abs(shorthand_abc(chief).A) >= kAClosedForm) {
    out.c = modal_constants_closed(chief, state0, domain);
    return out;
  }
  out.numeric_fallback = true;
  out.c = balanced_solve(eigvecs_for_domain(eff, domain), state0);
  // The drift constant has a nonsingular closed form; keep it exact.
  out.c(5) = drift_constant(chief, state0, domain);
  return out;
}

Eigen::Matrix<Complex, 4, 4> cw_eigvecs(double n) {
  const Complex I(0.0, 1.0);
  Eigen::Matrix<Complex, 4, 4> V;
  V << 0.0, -2.0 / (3.0 * n), -1.0 / (2.0 * n), -1.0 / (2.0 * n),
      1.0, 0.0, -I / n, I / n,
      0.0, 0.0, -I / 2.0, I / 2.0,
      0.0, 1.0, 1.0, 1.0;
  return V;
}

CwModal cw_modal_decomp(double n, const Vec4& x0) {
  if (!(n > 0.0)) throw InvalidInput("mean motion must be positive");
  CwModal m;
  m.n = n;
  m.c1 = x0(1) - 2.0 / n * x0(2);
  m.c2 = -6.0 * n * x0(0) - 3.0 * x0(3);
  m.cR = 3.0 * n * x0(0) + 2.0 * x0(3);
  m.cI = x0(2);
  return m;
}

Vec4 CwModal::mode(int k, double t) const {
  const Vec4 v1(0.0, 1.0, 0.0, 0.0);
  const Vec4 v2(-2.0 / (3.0 * n), 0.0, 0.0, 1.0);
  const Vec4 vR(-1.0 / (2.0 * n), 0.0, 0.0, 1.0);
  const Vec4 vI(0.0, -1.0 / n, -0.5, 0.0);
  const double c = std::cos(n * t), s = std::sin(n * t);
  switch (k) {
    case 1:
      return c1 * v1;
    case 2:
      return c2 * (v1 * t + v2);
    case 3:
      return 2.0 * cR * (vR * c - vI * s);
    case 4:
      return -2.0 * cI * (vR * s + vI * c);
    default:
      throw InvalidInput("CW mode index must be 1..4");
  }
}

Vec4 CwModal::state(double t) const { return mode(1, t) + mode(2, t) + mode(3, t) + mode(4, t); }

double lf_ode_residual(const ChiefOrbit& chief, double theta, double h) {
  const Mat6 P = lf_qns(chief, theta);
  const Mat6 dP = (lf_qns(chief, theta + h) - lf_qns(chief, theta - h)) / (2.0 * h);
  const Mat6 A = qns_plant_theta(chief, theta).entries;
  const Mat6 R = lti_qns(chief).R;
  return (P.partialPivLu().solve(A * P - dP) - R).cwiseAbs().maxCoeff();
}

}  // namespace relmodes
