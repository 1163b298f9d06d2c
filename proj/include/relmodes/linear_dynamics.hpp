// Linearized relative-motion plants (Clohessy-Wiltshire, Keplerian LVLH, QNS in
// theta), Gauss planetary equations and the linear propagation oracle.
#pragma once

#include "relmodes/chief_orbit.hpp"

#include <functional>
#include <vector>

namespace relmodes {

/// 6x6 plant with the independent variable it differentiates with respect to.
struct PlantMatrix {
  Mat6 entries;
  IndepVar indep;
};

/// Planar CW plant for the state (x, y, xdot, ydot).
Mat4 cw_planar_plant(double n);
/// Planar CW state transition matrix from epoch t0 = 0.
Mat4 cw_stm_planar(double n, double t);
/// Full 6x6 CW plant for (x, y, z, xdot, ydot, zdot).
Mat6 cw_plant(double n);

/// Keplerian QNS plant d(doe)/dtheta. Only the delta-theta row is nonzero.
PlantMatrix qns_plant_theta(const ChiefOrbit& chief, double theta);

/// Time-domain Keplerian LVLH plant at argument of latitude theta.
PlantMatrix cartesian_plant_keplerian(const ChiefOrbit& chief, double theta);

/// The same plant per unit argument of latitude (A / theta_dot); states keep
/// their km/s velocities.
Mat6 cartesian_plant_theta(const ChiefOrbit& chief, double theta);

/// Same plant as a function of time since epoch.
Mat6 cartesian_plant_at_time(const ChiefOrbit& chief, double t);

/// General LVLH plant from chief angular velocity, angular acceleration and the
/// gravity-gradient block (all resolved in LVLH). The Keplerian plant is the
/// special case omega = (0, 0, h/r^2), omega_dot = (0, 0, -2 rdot h/r^3),
/// gradient = mu/r^3 diag(2, -1, -1).
Mat6 lvlh_plant(const Vec3& omega, const Vec3& omega_dot, const Mat3& gravity_gradient);

/// Gauss planetary equations in QNS elements: d/dt (a, theta, i, q1, q2, raan)
/// under an LVLH acceleration (a_r, a_t, a_n) [km/s^2].
/// Throws SingularConfiguration when |sin i| < 1e-9 and a_n != 0.
Vec6 gauss_rates(const ChiefOrbit& chief, double theta, const Vec3& accel);

struct IntegratorOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  std::size_t max_steps = 2'000'000;
};

/// Right-hand side of a first-order system: writes dx/ds into dxds.
using OdeRhs =
    std::function<void(double s, const std::vector<double>& x, std::vector<double>& dxds)>;

/// Integrates the system with an adaptive Runge-Kutta-Fehlberg 7(8) scheme and
/// returns the state at each requested abscissa (monotone, first = initial).
/// Throws IntegrationError on step-size underflow or non-finite state.
std::vector<std::vector<double>> integrate_samples(const OdeRhs& rhs, std::vector<double> x0,
                                                   const std::vector<double>& samples,
                                                   const IntegratorOptions& opts = {});

using PlantFn = std::function<Mat6(double)>;
using ForcingFn = std::function<Vec6(double s, const Vec6& x)>;

/// Sampled trajectory of a linear system.
struct Trajectory {
  IndepVar indep;
  std::vector<double> s;  ///< independent variable at each sample
  std::vector<Vec6> x;
};

/// Uniform grid of `steps` points covering [s0, s1] inclusive. steps >= 2.
std::vector<double> uniform_grid(double s0, double s1, int steps);

/// Propagates dx/ds = A(s) x (+ forcing(s, x)) and samples on a uniform grid of
/// `steps` points over [s0, s1].
Trajectory propagate_linear(const PlantFn& plant, IndepVar indep, const Vec6& x0, double s0,
                            double s1, int steps, const IntegratorOptions& opts = {},
                            const ForcingFn& forcing = nullptr);

/// Same, sampled at explicit abscissae.
Trajectory propagate_linear_at(const PlantFn& plant, IndepVar indep, const Vec6& x0,
                               const std::vector<double>& samples,
                               const IntegratorOptions& opts = {},
                               const ForcingFn& forcing = nullptr);

}  // namespace relmodes
