// Common linear-algebra aliases, tags and the error hierarchy.
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace relmodes {

using Vec2 = Eigen::Matrix<double, 2, 1>;
using Vec3 = Eigen::Matrix<double, 3, 1>;
using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix<double, 3, 3>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Complex = std::complex<double>;
using CVec6 = Eigen::Matrix<Complex, 6, 1>;
using CMat6 = Eigen::Matrix<Complex, 6, 6>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kMuEarth = 398600.4418;  // km^3/s^2

/// Independent variable of a plant, transformation or trajectory.
enum class IndepVar { Time, Theta };

/// Relative-state representation.
enum class Domain { Qns, Cartesian, Spherical };

std::string to_string(IndepVar v);
std::string to_string(Domain d);

/// Parses "qns", "cart"/"cartesian", "sph"/"spherical".
Domain parse_domain(const std::string& s);

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an input value was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A closed-form evaluation hit a singular configuration (A = 0, sin i = 0, ...).
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is numerically singular.
class NearSingular : public Error {
 public:
  using Error::Error;
};

/// ODE integration failed (step-size underflow, step budget exhausted, non-finite state).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Error raised inside the numeric Floquet pipeline, tagged with the failing stage.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error("[" + stage + "] " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

}  // namespace relmodes
