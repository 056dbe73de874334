#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace modal {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat63 = Eigen::Matrix<double, 6, 3>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

/// Bad user input (malformed scenario, unsupported configuration, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A solver or propagation failed to meet its tolerance contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace consts {
// Earth gravitational parameter [km^3/s^2], equatorial radius [km], J2.
inline constexpr double mu_earth = 398600.4418;
inline constexpr double r_earth = 6378.137;
inline constexpr double j2_earth = 1.082626e-3;
// Earth-Moon circular restricted three-body problem.
inline constexpr double em_mass_ratio = 0.012150585609624;
inline constexpr double em_lu_km = 384400.0;
inline constexpr double em_tu_s = 375190.26;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double deg = pi / 180.0;
}  // namespace consts

/// Inertial Cartesian state of one spacecraft.
struct InertialState {
  Vec3 r;
  Vec3 v;

  Vec6 vec() const {
    Vec6 y;
    y << r, v;
    return y;
  }
  static InertialState from_vec(const Vec6& y) {
    return {y.head<3>(), y.tail<3>()};
  }
};

/// Relative state in the chief's LVLH frame: (x radial, y along-track,
/// z cross-track, and the frame-relative rates).
using LvlhState = Vec6;

inline Mat3 cross_matrix(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

}  // namespace modal
