// Closed-form Keplerian Lyapunov-Floquet transformations and LTI systems in QNS,
// Cartesian and spherical coordinates, with eigenstructure and modal constants.
#pragma once

#include "relmodes/coordinate_maps.hpp"

#include <functional>
#include <vector>

namespace relmodes {

/// Orbit-periodic transformation x = P(theta) chi. The evaluator always takes
/// the argument of latitude, also for time-domain transforms.
struct LfTransform {
  std::function<Mat6(double)> eval;
  double theta0 = 0.0;
  Domain domain = Domain::Qns;
  IndepVar indep = IndepVar::Theta;
  bool regularized = false;

  Mat6 operator()(double theta) const { return eval(theta); }
};

/// Constant plant with its (generalized) eigenvector matrix and Jordan form
/// R V = V J.
struct LtiSystem {
  Mat6 R;
  Mat6 V;
  Mat6 J;
  Domain domain = Domain::Qns;
  IndepVar indep = IndepVar::Theta;
};

/// Modal constants weighting the six fundamental solutions.
struct ModalConstants {
  Vec6 c = Vec6::Zero();
  Domain domain = Domain::Cartesian;
  bool regularized = false;       ///< e sin f0 was replaced by a small epsilon
  bool numeric_fallback = false;  ///< closed forms skipped (v_r0 too small)
};

/// |q1| below this flags lf_qns results as regularized (the printed P21 and
/// P25 forms are singular there).
inline constexpr double kQ1Threshold = 1e-6;
/// |e sin f0| below this makes the closed-form eigenvectors singular.
inline constexpr double kASingular = 1e-8;
/// |e sin f0| below this makes the printed constants (1/v_r0 terms) unreliable.
inline constexpr double kAClosedForm = 1e-6;

/// QNS LF transformation at theta. For indep = Time the (2,1) entry is zero.
/// Evaluated in a form without 1/q1 factors; sets *regularized when |q1| < kQ1Threshold.
Mat6 lf_qns(const ChiefOrbit& chief, double theta, IndepVar indep = IndepVar::Theta,
            bool* regularized = nullptr);
/// Same matrix from the printed P21/P25 expressions (with their 1/q1 factors).
/// Throws SingularConfiguration for q1 = 0. Used as a cross-check.
Mat6 lf_qns_printed(const ChiefOrbit& chief, double theta, IndepVar indep = IndepVar::Theta);
LfTransform lf_qns_transform(const ChiefOrbit& chief, IndepVar indep = IndepVar::Theta);

/// (2,1) entry of the theta-domain transform written through the mean anomaly.
/// Free of the 1/q1 factor of the printed form.
double p21_mean_anomaly(const ChiefOrbit& chief, double theta);

/// max |P^-1 (A P - P') - R| for the theta-domain QNS transform at theta, with
/// P' by central differences of step h.
double lf_ode_residual(const ChiefOrbit& chief, double theta, double h = 1e-6);

/// -3 a eta / (2 r0^2), the only nonzero entry of the theta-domain QNS plant.
double r21(const ChiefOrbit& chief);

LtiSystem lti_qns(const ChiefOrbit& chief, IndepVar indep = IndepVar::Theta);

/// Element-difference solution for delta theta at theta, dt seconds after epoch.
double delta_theta_solution(const ChiefOrbit& chief, double theta, double dt, double da,
                            double dtheta0, double dq1, double dq2,
                            bool* regularized = nullptr);

/// G0 R G0^-1. Throws NearSingular when G0 is.
Mat6 map_lti(const Mat6& G0, const Mat6& R_src);

/// theta -> G(theta) P_src(theta) G0^-1.
LfTransform map_lf(std::function<Mat6(double)> G, const LfTransform& P_src, const Mat6& G0,
                   Domain target);

/// QNS transform mapped into the requested representation.
LfTransform lf_for_domain(const ChiefOrbit& chief, Domain domain,
                          IndepVar indep = IndepVar::Theta);

/// Closed-form LTI matrices (theta domain) with the printed eigenvectors.
LtiSystem lti_cartesian_closed(const ChiefOrbit& chief);
LtiSystem lti_spherical_closed(const ChiefOrbit& chief);

/// 2 R21 a / gamma.
double alpha_scale(const ChiefOrbit& chief);

/// Printed eigenvector matrices; throws SingularConfiguration when |e sin f0| < 1e-8.
Mat6 eigvecs_closed(const ChiefOrbit& chief, Domain domain);

/// Same orbit with e sin f0 nudged to kASingular when it is smaller; sets
/// *changed accordingly. The eccentricity vector moves perpendicular to the
/// epoch radius direction.
ChiefOrbit regularize_chief(const ChiefOrbit& chief, bool* changed = nullptr);

/// Eigenvector matrix in any representation. For QNS it is G_xc(theta0)^-1 V_xc,
/// so mode numbering is shared by all representations.
Mat6 eigvecs_for_domain(const ChiefOrbit& chief, Domain domain);

/// Modal constants of state0 (given in `domain`) at the chief epoch.
ModalConstants modal_constants(const ChiefOrbit& chief, const Vec6& state0, Domain domain);

/// Printed closed-form constants; the chief must satisfy |e sin f0| >= kAClosedForm.
Vec6 modal_constants_closed(const ChiefOrbit& chief, const Vec6& state0, Domain domain);

/// No-drift constant alone (nonsingular, valid for e = 0).
double drift_constant(const ChiefOrbit& chief, const Vec6& state0, Domain domain);

/// Balanced solve V c = x (columns scaled to unit norm first).
Vec6 balanced_solve(const Mat6& V, const Vec6& x);

/// Planar CW modal decomposition.
struct CwModal {
  double n = 0.0;
  double c1 = 0.0, c2 = 0.0, cR = 0.0, cI = 0.0;

  /// Contribution of mode k (1: offset, 2: drift, 3: cR, 4: cI) at time t.
  Vec4 mode(int k, double t) const;
  /// Sum of all four contributions.
  Vec4 state(double t) const;
};

/// Columns of the printed complex eigenvector matrix are (v1, v2, v3, conj v3).
Eigen::Matrix<Complex, 4, 4> cw_eigvecs(double n);

CwModal cw_modal_decomp(double n, const Vec4& planar_state0);

}  // namespace relmodes
