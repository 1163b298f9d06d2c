#include "relmodes/coordinate_maps.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <sstream>

namespace relmodes {

GeoMap g_cartesian(const ChiefOrbit& chief, double theta) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  const double a = chief.a(), q1 = chief.q1(), q2 = chief.q2();
  const double p = chief.p(), h = chief.h();
  const double r = st.r, vr = st.vr, vt = st.vt;
  const double s = std::sin(theta), c = std::cos(theta);
  const double si = std::sin(chief.inc()), ci = std::cos(chief.inc());
  Mat6 G;
  G << r / a, vr / vt * r, 0.0, -r / p * (2.0 * a * q1 + r * c), -r / p * (2.0 * a * q2 + r * s), 0.0,
      0.0, r, 0.0, 0.0, 0.0, r * ci,
      0.0, 0.0, r * s, 0.0, 0.0, -r * c * si,
      -vr / (2.0 * a), (1.0 / r - 1.0 / p) * h, 0.0, (vr * a * q1 + h * s) / p, (vr * a * q2 - h * c) / p, 0.0,
      -3.0 * vt / (2.0 * a), -vr, 0.0, (3.0 * vt * a * q1 + 2.0 * h * c) / p, (3.0 * vt * a * q2 + 2.0 * h * s) / p, vr * ci,
      0.0, 0.0, vt * c + vr * s, 0.0, 0.0, (vt * s - vr * c) * si;
  return {G, theta, Domain::Cartesian};
}

GeoMap g_spherical(const ChiefOrbit& chief, double theta) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  const double a = chief.a(), q1 = chief.q1(), q2 = chief.q2();
  const double p = chief.p(), h = chief.h();
  const double r = st.r, vr = st.vr, vt = st.vt, td = st.thetadot;
  const double s = std::sin(theta), c = std::cos(theta);
  const double si = std::sin(chief.inc()), ci = std::cos(chief.inc());
  Mat6 G;
  G << r / a, vr / vt * r, 0.0, -r / p * (2.0 * a * q1 + r * c), -r / p * (2.0 * a * q2 + r * s), 0.0,
      0.0, 1.0, 0.0, 0.0, 0.0, ci,
      0.0, 0.0, s, 0.0, 0.0, -c * si,
      -vr / (2.0 * a), (1.0 / r - 1.0 / p) * h, 0.0, (vr * a * q1 + h * s) / p, (vr * a * q2 - h * c) / p, 0.0,
      -3.0 * td / (2.0 * a), -2.0 * vr / r, 0.0, td / p * (3.0 * a * q1 + 2.0 * r * c), td / p * (3.0 * a * q2 + 2.0 * r * s), 0.0,
      0.0, 0.0, td * c, 0.0, 0.0, td * s * si;
  return {G, theta, Domain::Spherical};
}

GeoMap g_for_domain(const ChiefOrbit& chief, double theta, Domain target) {
  switch (target) {
    case Domain::Cartesian:
      return g_cartesian(chief, theta);
    case Domain::Spherical:
      return g_spherical(chief, theta);
    case Domain::Qns:
      break;
  }
  return {Mat6::Identity(), theta, Domain::Qns};
}

Mat6 g_theta_derivative(const ChiefOrbit& chief, double theta, Domain target, double h) {
  return (g_for_domain(chief, theta + h, target).entries -
          g_for_domain(chief, theta - h, target).entries) /
         (2.0 * h);
}

namespace {

// Alternating row/column max-abs scaling; returns D_r M D_c.
Mat6 equilibrate(const Mat6& m) {
  Mat6 s = m;
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (int i = 0; i < 6; ++i) {
      const double mx = s.row(i).cwiseAbs().maxCoeff();
      if (mx > 0.0) s.row(i) /= mx;
    }
    for (int j = 0; j < 6; ++j) {
      const double mx = s.col(j).cwiseAbs().maxCoeff();
      if (mx > 0.0) s.col(j) /= mx;
    }
  }
  return s;
}

}  // namespace

double g_condition(const Mat6& m) {
  const Eigen::JacobiSVD<Mat6> svd(equilibrate(m));
  const auto& sv = svd.singularValues();
  if (sv(5) == 0.0) return std::numeric_limits<double>::infinity();
  return sv(0) / sv(5);
}

Mat6 g_inverse(const Mat6& m) {
  const double cond = g_condition(m);
  if (!(cond <= 1e12)) {
    std::ostringstream os;
    os << "geometric map is near-singular (equilibrated condition number " << cond << ")";
    throw NearSingular(os.str());
  }
  return Eigen::PartialPivLU<Mat6>(m).inverse();
}

SphState cart_to_sph(double rc, double rc_dot, const CartState& x) {
  const double X = rc + x(0), y = x(1), z = x(2);
  const double Xd = rc_dot + x(3), yd = x(4), zd = x(5);
  const double R = std::sqrt(X * X + y * y + z * z);
  if (!(R > 0.0)) throw InvalidInput("deputy radius is zero: spherical direction undefined");
  SphState s;
  s(0) = R - rc;
  s(1) = std::atan2(y, X);
  s(2) = std::asin(z / R);
  s(3) = (X * Xd + y * yd + z * zd) / R - rc_dot;
  s(4) = (X * yd - y * Xd) / (X * X + y * y);
  const double Rd = rc + s(0);
  const double Rdd = rc_dot + s(3);
  s(5) = (Rd * zd - Rdd * z) / (Rd * Rd * std::sqrt(1.0 - z * z / (Rd * Rd)));
  return s;
}

CartState sph_to_cart(double rc, double rc_dot, const SphState& s) {
  if (!(std::abs(s(2)) < 0.5 * kPi)) throw InvalidInput("|phi_r| must be below pi/2");
  const double R = rc + s(0), Rd = rc_dot + s(3);
  const double ct = std::cos(s(1)), st = std::sin(s(1));
  const double cp = std::cos(s(2)), sp = std::sin(s(2));
  const double td = s(4), pd = s(5);
  CartState x;
  x(0) = R * ct * cp - rc;
  x(1) = R * st * cp;
  x(2) = R * sp;
  x(3) = Rd * ct * cp - R * st * cp * td - R * ct * sp * pd - rc_dot;
  x(4) = Rd * st * cp + R * ct * cp * td - R * st * sp * pd;
  x(5) = Rd * sp + R * cp * pd;
  return x;
}

Mat6 cart_sph_linear(double rc, double rc_dot) {
  if (!(rc > 0.0)) throw InvalidInput("chief radius must be positive");
  Mat6 L = Mat6::Zero();
  L(0, 0) = 1.0;
  L(1, 1) = 1.0 / rc;
  L(2, 2) = 1.0 / rc;
  L(3, 3) = 1.0;
  L(4, 4) = 1.0 / rc;
  L(5, 5) = 1.0 / rc;
  L(4, 1) = -rc_dot / (rc * rc);
  L(5, 2) = -rc_dot / (rc * rc);
  return L;
}

Mat6 cart_sph_linear_inverse(double rc, double rc_dot) {
  if (!(rc > 0.0)) throw InvalidInput("chief radius must be positive");
  Mat6 Li = Mat6::Zero();
  Li(0, 0) = 1.0;
  Li(1, 1) = rc;
  Li(2, 2) = rc;
  Li(3, 3) = 1.0;
  Li(4, 4) = rc;
  Li(5, 5) = rc;
  Li(4, 1) = rc_dot;
  Li(5, 2) = rc_dot;
  return Li;
}

Mat6 cart_sph_linear_at(const ChiefOrbit& chief, double theta) {
  const OrbitStateAtTheta st = eval_at_theta(chief, theta);
  return cart_sph_linear(st.r, st.vr);
}

}  // namespace relmodes
