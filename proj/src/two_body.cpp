#include "relmodes/two_body.hpp"

#include <cmath>

namespace relmodes {

namespace {

Mat3 rot1(double x) {
  Mat3 m;
  m << 1, 0, 0, 0, std::cos(x), -std::sin(x), 0, std::sin(x), std::cos(x);
  return m;
}

Mat3 rot3(double x) {
  Mat3 m;
  m << std::cos(x), -std::sin(x), 0, std::sin(x), std::cos(x), 0, 0, 0, 1;
  return m;
}

}  // namespace

InertialState inertial_from_qns(const QnsElements& oe, double mu) {
  const double a = oe(0), th = oe(1), inc = oe(2), q1 = oe(3), q2 = oe(4), raan = oe(5);
  const double p = a * (1.0 - q1 * q1 - q2 * q2);
  const double h = std::sqrt(mu * p);
  const double kappa = 1.0 + q1 * std::cos(th) + q2 * std::sin(th);
  const double r = p / kappa;
  const double vr = h / p * (q1 * std::sin(th) - q2 * std::cos(th));
  const double vt = h / r;
  const Mat3 C = rot3(raan) * rot1(inc) * rot3(th);
  InertialState s;
  s.r = C * Vec3(r, 0.0, 0.0);
  s.v = C * Vec3(vr, vt, 0.0);
  return s;
}

QnsElements qns_from_inertial(const InertialState& s, double mu) {
  const Vec3 hv = s.r.cross(s.v);
  const double r = s.r.norm();
  const double a = 1.0 / (2.0 / r - s.v.squaredNorm() / mu);
  const double inc = std::atan2(std::hypot(hv(0), hv(1)), hv(2));
  const double raan = std::atan2(hv(0), -hv(1));
  const Vec3 evec = s.v.cross(hv) / mu - s.r / r;
  // Resolve in the node frame: x toward the ascending node, z along h.
  const Mat3 to_node = (rot3(raan) * rot1(inc)).transpose();
  const Vec3 rn = to_node * s.r;
  const Vec3 en = to_node * evec;
  QnsElements oe;
  oe << a, std::atan2(rn(1), rn(0)), inc, en(0), en(1), raan;
  return oe;
}

QnsElements chief_elements(const ChiefOrbit& chief, double theta) {
  QnsElements oe;
  oe << chief.a(), theta, chief.inc(), chief.q1(), chief.q2(), chief.raan();
  return oe;
}

InertialState chief_inertial(const ChiefOrbit& chief, double theta) {
  return inertial_from_qns(chief_elements(chief, theta), chief.mu());
}

InertialState kepler_propagate(const InertialState& s, double dt, double mu) {
  QnsElements oe = qns_from_inertial(s, mu);
  const ChiefOrbit orbit(oe(0), oe(3), oe(4), oe(2), oe(5), oe(1), mu);
  oe(1) = time_to_theta(orbit, dt);
  return inertial_from_qns(oe, mu);
}

Mat3 lvlh_rotation(const InertialState& chief) {
  const Vec3 er = chief.r.normalized();
  const Vec3 en = chief.r.cross(chief.v).normalized();
  const Vec3 et = en.cross(er);
  Mat3 Q;
  Q.row(0) = er.transpose();
  Q.row(1) = et.transpose();
  Q.row(2) = en.transpose();
  return Q;
}

Vec6 lvlh_relative_state(const InertialState& chief, const InertialState& deputy) {
  const Mat3 Q = lvlh_rotation(chief);
  const Vec3 omega = chief.r.cross(chief.v) / chief.r.squaredNorm();
  const Vec3 dr = deputy.r - chief.r;
  const Vec3 dv = deputy.v - chief.v - omega.cross(dr);
  Vec6 x;
  x << Q * dr, Q * dv;
  return x;
}

InertialState deputy_from_lvlh(const InertialState& chief, const Vec6& rel) {
  const Mat3 Q = lvlh_rotation(chief);
  const Vec3 omega = chief.r.cross(chief.v) / chief.r.squaredNorm();
  const Vec3 dr = Q.transpose() * rel.head<3>();
  InertialState d;
  d.r = chief.r + dr;
  d.v = chief.v + Q.transpose() * rel.tail<3>() + omega.cross(dr);
  return d;
}

std::vector<Vec6> nonlinear_relative_trajectory(const ChiefOrbit& chief, const Vec6& x0_lvlh,
                                                const std::vector<double>& thetas) {
  const InertialState c0 = chief_inertial(chief, chief.theta0());
  const InertialState d0 = deputy_from_lvlh(c0, x0_lvlh);
  std::vector<Vec6> out;
  out.reserve(thetas.size());
  for (double th : thetas) {
    const double t = theta_to_time(chief, th);
    const InertialState c = chief_inertial(chief, th);
    const InertialState d = kepler_propagate(d0, t, chief.mu());
    out.push_back(lvlh_relative_state(c, d));
  }
  return out;
}

}  // namespace relmodes
