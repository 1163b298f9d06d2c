// Nonlinear two-body machinery: element/inertial conversions, analytic Kepler
// propagation and LVLH relative states. Serves as the independent propagation
// oracle for the linearized models.
#pragma once

#include "relmodes/chief_orbit.hpp"

#include <vector>

namespace relmodes {

struct InertialState {
  Vec3 r;  ///< km
  Vec3 v;  ///< km/s
};

/// QNS element set (a, theta, i, q1, q2, raan) as a 6-vector, angles in rad.
using QnsElements = Vec6;

InertialState inertial_from_qns(const QnsElements& oe, double mu);
QnsElements qns_from_inertial(const InertialState& s, double mu);

/// Chief QNS elements at argument of latitude theta.
QnsElements chief_elements(const ChiefOrbit& chief, double theta);
InertialState chief_inertial(const ChiefOrbit& chief, double theta);

/// Propagates a closed two-body orbit by dt seconds (analytic, via Kepler's equation).
InertialState kepler_propagate(const InertialState& s, double dt, double mu);

/// Rotation whose rows are the LVLH unit vectors (e_r, e_t, e_n) of the chief.
Mat3 lvlh_rotation(const InertialState& chief);

/// Deputy state relative to the chief, resolved and differentiated in LVLH.
Vec6 lvlh_relative_state(const InertialState& chief, const InertialState& deputy);
InertialState deputy_from_lvlh(const InertialState& chief, const Vec6& rel);

/// Exact relative motion: deputy and chief propagated separately with Kepler's
/// equation, differenced and rotated into LVLH at each theta.
std::vector<Vec6> nonlinear_relative_trajectory(const ChiefOrbit& chief, const Vec6& x0_lvlh,
                                                const std::vector<double>& thetas);

}  // namespace relmodes
