#include "modal/plant.hpp"

#include <memory>

#include "modal/cr3bp.hpp"
#include "modal/twobody.hpp"

namespace modal {

Mat6 plant_matrix_lvlh(const LvlhFrame& frame, const Mat3& grad_inertial) {
  const Mat3 c = frame.rot * grad_inertial * frame.rot.transpose();
  const Mat3 wx = cross_matrix(frame.omega);
  Mat6 a = Mat6::Zero();
  a.topRightCorner<3, 3>() = Mat3::Identity();
  a.bottomLeftCorner<3, 3>() = c - cross_matrix(frame.omega_dot) - wx * wx;
  a.bottomRightCorner<3, 3>() = -2.0 * wx;
  return a;
}

Mat6 plant_matrix_lvlh(const InertialState& chief, double mu) {
  return plant_matrix_lvlh(lvlh_frame(chief), twobody_gradient(mu, chief.r));
}

Mat6 cw_plant(double n) {
  Mat6 a = Mat6::Zero();
  a.topRightCorner<3, 3>() = Mat3::Identity();
  a(3, 0) = 3.0 * n * n;
  a(3, 4) = 2.0 * n;
  a(4, 3) = -2.0 * n;
  a(5, 2) = -n * n;
  return a;
}

PlantFn canonical_plant(const PeriodicOrbit& orbit) {
  auto cache = std::make_shared<OrbitCache>(orbit);
  const double mu = orbit.mu;
  if (orbit.kind == PeriodicOrbit::Kind::cr3bp) {
    return [cache, mu](double t) {
      return cr3bp::jacobian(mu, cache->state_at(t));
    };
  }
  return [cache, mu](double t) {
    return plant_matrix_lvlh(InertialState::from_vec(cache->state_at(t)), mu);
  };
}

}  // namespace modal
