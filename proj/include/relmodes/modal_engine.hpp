// Keplerian modal solutions: reconstruction from modal constants, mode sampling,
// epoch remapping, maneuver constraints, stationary-plane geometry, bounded
// families and the variation of the modal constants.
#pragma once

#include "relmodes/analytic_floquet.hpp"
#include "relmodes/linear_dynamics.hpp"

#include <functional>
#include <vector>

namespace relmodes {

/// Modal basis of one chief in one representation. Internally works with the
/// regularized chief when e sin f0 is (near) zero.
class ModalBasis {
 public:
  ModalBasis(const ChiefOrbit& chief, Domain domain);

  const ChiefOrbit& chief() const { return chief_; }
  /// Chief actually used for P and V (differs from chief() only when regularized).
  const ChiefOrbit& effective_chief() const { return eff_; }
  Domain domain() const { return domain_; }
  bool regularized() const { return regularized_; }
  bool q1_regularized() const { return lf_.regularized; }
  const Mat6& V() const { return V_; }
  const LfTransform& lf() const { return lf_; }

  Mat6 P(double theta) const { return lf_(theta); }
  /// Fundamental solution i (1..6) with unit constant.
  Vec6 mode(int i, double theta) const;
  /// Columns are the six fundamental solutions: P(theta) V exp(J (theta - theta0)).
  Mat6 psi(double theta) const;
  /// d psi / d theta by a five-point central stencil.
  Mat6 psi_prime(double theta, double h = 1e-3) const;
  Vec6 reconstruct(const Vec6& c, double theta) const { return psi(theta) * c; }
  ModalConstants constants(const Vec6& state0) const;

 private:
  ChiefOrbit chief_;
  ChiefOrbit eff_;
  Domain domain_;
  bool regularized_ = false;
  LfTransform lf_;
  Mat6 V_;
};

/// One-shot reconstruction.
Vec6 reconstruct(const ChiefOrbit& chief, const ModalConstants& constants, double theta);

struct ModeSampler {
  int mode_index = 1;
  std::function<Vec6(double)> eval;
  bool secular = false;  ///< true only for the drift mode
};

ModeSampler mode_sampler(const ModalBasis& basis, int mode_index);

/// Sampled curve in one representation.
struct SampledCurve {
  std::vector<double> theta;
  std::vector<double> t;  ///< seconds since epoch
  std::vector<Vec6> x;
  double scale = 1.0;  ///< factor the samples were divided by
};

/// Mode on a theta grid. With normalize, every component is divided by the
/// maximum position norm over the grid.
SampledCurve mode_trajectory(const ChiefOrbit& chief, int mode_index,
                             const std::vector<double>& theta_grid, Domain domain,
                             bool normalize);

/// Grid of `steps` points covering `periods` orbits from theta0.
std::vector<double> theta_grid(const ChiefOrbit& chief, double periods, int steps);

/// Constants of the same physical motion referred to a new epoch theta0_new.
ModalConstants remap_epoch(const ChiefOrbit& chief, const ModalConstants& constants,
                           double theta0_new);

/// Unit in-plane impulse direction (dvx, dvy) at theta that leaves the drift
/// constant unchanged: dvy = -(vr/vt) dvx.
Vec2 no_drift_maneuver_line(const ChiefOrbit& chief, double theta);

struct StationaryPlane {
  Vec3 n_vec;
  Vec3 zeta;
  double alpha = 0.0;
  Vec6 R_f;
  /// chi2' = chi2_rate * (rho . n)
  double chi2_rate = 0.0;
};

StationaryPlane stationary_plane(const ChiefOrbit& chief);

/// rho = (chi1, chi4, chi5) of a spherical LTI state.
inline Vec3 stationary_rho(const Vec6& chi) { return Vec3(chi(0), chi(3), chi(4)); }

struct FamilyMember {
  double xdot0 = 0.0;
  double ydot0 = 0.0;
  Vec6 state0;
  ModalConstants constants;
};

/// Bounded planar family through (x0, y0): ydot0 is solved from c6 = 0 for
/// each xdot0.
std::vector<FamilyMember> sweep_bounded_family(const ChiefOrbit& chief, double x0, double y0,
                                               const std::vector<double>& xdot0_list);

/// dc/dt = Psi^-1 (f - A x).
Vec6 constants_dynamics(const Mat6& psi, const Mat6& A, const Vec6& x, const Vec6& f);
/// Control-only form Psi^-1 B u with B = [0; I] (Cartesian states).
Vec6 constants_dynamics_control(const Mat6& psi, const Vec3& u);

/// Control acceleration (km/s^2, LVLH) at time t and Cartesian state x.
using ControlFn = std::function<Vec3(double t, const Vec6& x)>;
/// Extra state rate f - A x - B u (e.g. a perturbation) at time t.
using PerturbationFn = std::function<Vec6(double t, const Vec6& x)>;

/// Integrates the modal constants in time for a Cartesian basis. Returns c at
/// each requested time (seconds since epoch).
std::vector<Vec6> integrate_constants(const ModalBasis& basis, const Vec6& c0,
                                      const std::vector<double>& times,
                                      const ControlFn& control,
                                      const PerturbationFn& perturbation = nullptr,
                                      const IntegratorOptions& opts = {});

}  // namespace relmodes
