#include "relmodes/modal_engine.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>

namespace relmodes {

ModalBasis::ModalBasis(const ChiefOrbit& chief, Domain domain)
    : chief_(chief), eff_(chief), domain_(domain) {
  // regularized_ has a default initializer that runs after eff_, so set it here
  eff_ = regularize_chief(chief, &regularized_);
  lf_ = lf_for_domain(eff_, domain_);
  V_ = eigvecs_for_domain(eff_, domain_);
}

Vec6 ModalBasis::mode(int i, double theta) const {
  if (i < 1 || i > 6) throw InvalidInput("mode index must be in 1..6");
  if (i < 6) return P(theta) * V_.col(i - 1);
  return P(theta) * (V_.col(5) + (theta - eff_.theta0()) * V_.col(4));
}

Mat6 ModalBasis::psi(double theta) const {
  Mat6 W = V_;
  W.col(5) += (theta - eff_.theta0()) * V_.col(4);
  return P(theta) * W;
}

Mat6 ModalBasis::psi_prime(double theta, double h) const {
  return (-psi(theta + 2.0 * h) + 8.0 * psi(theta + h) - 8.0 * psi(theta - h) +
          psi(theta - 2.0 * h)) /
         (12.0 * h);
}

ModalConstants ModalBasis::constants(const Vec6& state0) const {
  return modal_constants(chief_, state0, domain_);
}

Vec6 reconstruct(const ChiefOrbit& chief, const ModalConstants& constants, double theta) {
  return ModalBasis(chief, constants.domain).reconstruct(constants.c, theta);
}

ModeSampler mode_sampler(const ModalBasis& basis, int mode_index) {
  if (mode_index < 1 || mode_index > 6) throw InvalidInput("mode index must be in 1..6");
  ModeSampler s;
  s.mode_index = mode_index;
  s.secular = mode_index == 6;
  s.eval = [basis, mode_index](double theta) { return basis.mode(mode_index, theta); };
  return s;
}

std::vector<double> theta_grid(const ChiefOrbit& chief, double periods, int steps) {
  if (!(periods > 0.0)) throw InvalidInput("number of periods must be positive");
  return uniform_grid(chief.theta0(), chief.theta0() + periods * kTwoPi, steps);
}

SampledCurve mode_trajectory(const ChiefOrbit& chief, int mode_index,
                             const std::vector<double>& grid, Domain domain, bool normalize) {
  const ModalBasis basis(chief, domain);
  SampledCurve out;
  out.theta = grid;
  out.t.reserve(grid.size());
  out.x.reserve(grid.size());
  double max_pos = 0.0;
  for (double th : grid) {
    out.t.push_back(theta_to_time(chief, th));
    out.x.push_back(basis.mode(mode_index, th));
    max_pos = std::max(max_pos, out.x.back().head<3>().norm());
  }
  if (normalize && max_pos > 0.0) {
    out.scale = max_pos;
    for (auto& v : out.x) v /= max_pos;
  }
  return out;
}

ModalConstants remap_epoch(const ChiefOrbit& chief, const ModalConstants& constants,
                           double theta0_new) {
  // x(theta0') = Phi(theta0', theta0) V(theta0) c, then c' = V(theta0')^-1 x(theta0').
  const Vec6 x = reconstruct(chief, constants, theta0_new);
  const ChiefOrbit moved = chief.with_theta0(theta0_new);
  if (std::abs(shorthand_abc(moved).A) < kASingular) {
    std::ostringstream os;
    os << "target epoch theta0 = " << theta0_new << " rad is singular (e sin f0 ~ 0)";
    throw SingularConfiguration(os.str());
  }
  return modal_constants(moved, x, constants.domain);
}

Vec2 no_drift_maneuver_line(const ChiefOrbit& chief, double theta) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  return Vec2(1.0, -st.vr / st.vt).normalized();
}

StationaryPlane stationary_plane(const ChiefOrbit& chief) {
  const Shorthands sh = shorthand_abc(chief);
  const double A = sh.A, B = sh.B, C = sh.C;
  const double ga = sh.gamma * chief.a();
  StationaryPlane sp;
  sp.alpha = alpha_scale(chief);
  sp.n_vec = Vec3((B + 2.0) / C, A, ga);
  sp.zeta = Vec3(A * C, B, -2.0 * A * (B + 1.0) / ga);
  sp.R_f << A * C, C * (B + 1.0) * (B + 1.0) / ga, 0.0, B, -2.0 * A * (B + 1.0) / ga, 0.0;
  sp.R_f *= sp.alpha;
  sp.chi2_rate = sp.alpha * C * (B + 1.0) * (B + 1.0) / ga;
  return sp;
}

std::vector<FamilyMember> sweep_bounded_family(const ChiefOrbit& chief, double x0, double y0,
                                               const std::vector<double>& xdot0_list) {
  // c6 is affine in ydot0 with unit coefficient.
  Vec6 base = Vec6::Zero();
  base(0) = x0;
  base(1) = y0;
  const double c6_pos = drift_constant(chief, base, Domain::Cartesian);
  Vec6 unit_xdot = Vec6::Zero();
  unit_xdot(3) = 1.0;
  const double c6_per_xdot = drift_constant(chief, unit_xdot, Domain::Cartesian);
  std::vector<FamilyMember> family;
  family.reserve(xdot0_list.size());
  for (double xd : xdot0_list) {
    FamilyMember m;
    m.xdot0 = xd;
    m.ydot0 = -(c6_pos + c6_per_xdot * xd);
    m.state0 = base;
    m.state0(3) = xd;
    m.state0(4) = m.ydot0;
    m.constants = modal_constants(chief, m.state0, Domain::Cartesian);
    family.push_back(m);
  }
  return family;
}

Vec6 constants_dynamics(const Mat6& psi, const Mat6& A, const Vec6& x, const Vec6& f) {
  const Eigen::PartialPivLU<Mat6> lu(psi);
  if (!(std::abs(lu.determinant()) > 0.0)) throw NearSingular("modal matrix Psi is singular");
  return lu.solve(f - A * x);
}

Vec6 constants_dynamics_control(const Mat6& psi, const Vec3& u) {
  Vec6 Bu = Vec6::Zero();
  Bu.tail<3>() = u;
  const Eigen::PartialPivLU<Mat6> lu(psi);
  if (!(std::abs(lu.determinant()) > 0.0)) throw NearSingular("modal matrix Psi is singular");
  return lu.solve(Bu);
}

std::vector<Vec6> integrate_constants(const ModalBasis& basis, const Vec6& c0,
                                      const std::vector<double>& times, const ControlFn& control,
                                      const PerturbationFn& perturbation,
                                      const IntegratorOptions& opts) {
  if (basis.domain() != Domain::Cartesian)
    throw InvalidInput("constant integration is implemented for Cartesian bases");
  const ChiefOrbit& chief = basis.effective_chief();
  OdeRhs rhs = [&](double t, const std::vector<double>& cv, std::vector<double>& dc) {
    const Eigen::Map<const Vec6> c(cv.data());
    const Mat6 psi = basis.psi(time_to_theta(chief, t));
    const Vec6 x = psi * c;
    Vec6 extra = Vec6::Zero();
    if (control) extra.tail<3>() += control(t, x);
    if (perturbation) extra += perturbation(t, x);
    const Vec6 d = Eigen::PartialPivLU<Mat6>(psi).solve(extra);
    dc.assign(d.data(), d.data() + 6);
  };
  const auto raw =
      integrate_samples(rhs, std::vector<double>(c0.data(), c0.data() + 6), times, opts);
  std::vector<Vec6> out;
  out.reserve(raw.size());
  for (const auto& v : raw) out.emplace_back(Eigen::Map<const Vec6>(v.data()));
  return out;
}

}  // namespace relmodes
