// Geometric maps from QNS element differences to local Cartesian and spherical
// relative states, plus the Cartesian <-> spherical conversions.
#pragma once

#include "relmodes/chief_orbit.hpp"

namespace relmodes {

/// Linear map x = G(theta) doe into a local representation.
struct GeoMap {
  Mat6 entries;
  double theta;
  Domain target;
};

GeoMap g_cartesian(const ChiefOrbit& chief, double theta);
GeoMap g_spherical(const ChiefOrbit& chief, double theta);
/// Identity for Domain::Qns, otherwise one of the two maps above.
GeoMap g_for_domain(const ChiefOrbit& chief, double theta, Domain target);

/// d/dtheta of G by central differences (step h rad).
Mat6 g_theta_derivative(const ChiefOrbit& chief, double theta, Domain target, double h = 1e-6);

/// Condition number of the map after row/column equilibration.
double g_condition(const Mat6& m);

/// Numeric inverse by partial-pivot LU. Throws NearSingular when the
/// equilibrated condition number exceeds 1e12.
Mat6 g_inverse(const Mat6& m);
inline Mat6 g_inverse(const GeoMap& map) { return g_inverse(map.entries); }

/// Spherical state (dr, theta_r, phi_r, drdot, theta_r_dot, phi_r_dot).
using SphState = Vec6;
/// Cartesian LVLH state (x, y, z, xdot, ydot, zdot).
using CartState = Vec6;

/// Exact conversion from local Cartesian to local spherical coordinates.
/// Throws InvalidInput when the deputy sits at the central body.
SphState cart_to_sph(double rc, double rc_dot, const CartState& x);

/// Exact inverse of cart_to_sph. Requires |phi_r| < pi/2.
CartState sph_to_cart(double rc, double rc_dot, const SphState& s);

/// Linearized Cartesian -> spherical map L and its inverse.
Mat6 cart_sph_linear(double rc, double rc_dot);
Mat6 cart_sph_linear_inverse(double rc, double rc_dot);

/// L evaluated on the chief at theta.
Mat6 cart_sph_linear_at(const ChiefOrbit& chief, double theta);

}  // namespace relmodes
