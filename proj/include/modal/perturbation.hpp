#pragma once

#include <functional>
#include <string>

#include "modal/types.hpp"

namespace modal {

/// Inertial acceleration model evaluated at one state: total acceleration
/// (point-mass term included), its position gradient, and the jerk
/// gradient * v. The gradient is symmetric for conservative fields.
struct PerturbationEval {
  Vec3 accel = Vec3::Zero();
  Mat3 gradient = Mat3::Zero();
  Vec3 jerk = Vec3::Zero();
};

struct PerturbationModel {
  std::string name;
  std::function<PerturbationEval(const Vec3& r, const Vec3& v)> eval;
};

/// Point-mass acceleration, gradient, and jerk.
PerturbationEval kepler_eval(const Vec3& r, const Vec3& v, double mu);

/// Oblateness-perturbed acceleration about the polar axis K = +z, its
/// gradient, and the jerk (gradient * v). Includes the point-mass term.
PerturbationEval j2_eval(const Vec3& r, const Vec3& v,
                         double mu = consts::mu_earth,
                         double j2 = consts::j2_earth,
                         double req = consts::r_earth);

PerturbationModel kepler_model(double mu = consts::mu_earth);
PerturbationModel j2_model(double mu = consts::mu_earth,
                           double j2 = consts::j2_earth,
                           double req = consts::r_earth);

}  // namespace modal
