// Closed two-body reference (chief) orbit in quasi-nonsingular elements.
#pragma once

#include "relmodes/types.hpp"

namespace relmodes {

/// Orbit quantities evaluated at one argument of latitude.
struct OrbitStateAtTheta {
  double theta;     ///< argument of latitude [rad]
  double kappa;     ///< 1 + q1 cos(theta) + q2 sin(theta)
  double r;         ///< radius [km]
  double vr;        ///< radial velocity [km/s]
  double vt;        ///< transverse velocity r*thetadot [km/s]
  double thetadot;  ///< h / r^2 [rad/s]
};

/// Epoch shorthands gamma, A, B, C used by the Cartesian and spherical LTI forms.
struct Shorthands {
  double gamma;  ///< q1^2 + q2^2 - 1
  double A;      ///< q2 cos(theta0) - q1 sin(theta0)  (= e sin f0)
  double B;      ///< q1 cos(theta0) + q2 sin(theta0)  (= e cos f0)
  double C;      ///< h r0^2 / (a mu gamma) [s]
};

/// Closed chief orbit. Immutable; construction validates a > 0, mu > 0 and
/// q1^2 + q2^2 < 1.
///
/// theta0 is the epoch argument of latitude. The epoch time is fixed at t = 0.
class ChiefOrbit {
 public:
  ChiefOrbit(double a, double q1, double q2, double inc, double raan, double theta0,
             double mu = kMuEarth);

  double a() const { return a_; }
  double q1() const { return q1_; }
  double q2() const { return q2_; }
  double inc() const { return inc_; }
  double raan() const { return raan_; }
  double theta0() const { return theta0_; }
  double mu() const { return mu_; }

  double e() const { return std::sqrt(q1_ * q1_ + q2_ * q2_); }
  /// Argument of periapsis; 0 for a circular orbit.
  double argp() const;
  /// True anomaly at epoch.
  double f0() const { return theta0_ - argp(); }
  double eta() const { return eta_; }
  double p() const { return p_; }
  double h() const { return h_; }
  double n() const { return n_; }
  double period() const { return kTwoPi / n_; }

  /// Same orbit, different epoch argument of latitude.
  ChiefOrbit with_theta0(double theta0) const;
  /// Same epoch and orientation, different eccentricity vector.
  ChiefOrbit with_q(double q1, double q2) const;

 private:
  double a_, q1_, q2_, inc_, raan_, theta0_, mu_;
  double eta_, p_, h_, n_;
};

/// Builds a chief from classical elements; q1 = e cos(argp), q2 = e sin(argp),
/// theta0 = argp + f0 wrapped to [0, 2 pi). Throws InvalidInput for e >= 1, a <= 0, mu <= 0.
ChiefOrbit make_chief(double a, double e, double inc, double raan, double argp, double f0,
                      double mu = kMuEarth);

OrbitStateAtTheta eval_at_theta(const ChiefOrbit& chief, double theta);

Shorthands shorthand_abc(const ChiefOrbit& chief);

/// Time since epoch at argument of latitude theta. theta is an unwrapped real, so
/// theta0 + 2 pi k maps to k periods.
double theta_to_time(const ChiefOrbit& chief, double theta);

/// Inverse of theta_to_time. Solves Kepler's equation by Newton iteration
/// (tolerance 1e-13 rad, at most 50 iterations); throws ConvergenceError otherwise.
double time_to_theta(const ChiefOrbit& chief, double t);

/// Mean anomaly at theta, continuous in theta (not wrapped).
double mean_anomaly_unwrapped(const ChiefOrbit& chief, double theta);

/// Solves M = E - e sin E for E.
double solve_kepler(double mean_anomaly, double e);

/// Wraps an angle to [0, 2 pi).
double wrap_two_pi(double angle);

}  // namespace relmodes
