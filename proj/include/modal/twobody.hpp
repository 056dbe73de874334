#pragma once

#include "modal/types.hpp"

namespace modal {

inline Vec3 twobody_accel(double mu, const Vec3& r) {
  const double rn = r.norm();
  return -mu / (rn * rn * rn) * r;
}

/// Gravity gradient of the point-mass field: mu (3 rhat rhat^T - I) / r^3.
inline Mat3 twobody_gradient(double mu, const Vec3& r) {
  const double rn = r.norm();
  const Vec3 rhat = r / rn;
  return mu / (rn * rn * rn) *
         (3.0 * rhat * rhat.transpose() - Mat3::Identity());
}

inline double specific_energy(double mu, const InertialState& s) {
  return 0.5 * s.v.squaredNorm() - mu / s.r.norm();
}

}  // namespace modal
