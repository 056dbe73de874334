#pragma once

#include "modal/frames.hpp"
#include "modal/periodic_orbit.hpp"
#include "modal/stm.hpp"

namespace modal {

/// Linearized relative motion in the chief's LVLH frame:
///   A = [[0, I], [C - [wdot]x - [w]x [w]x, -2 [w]x]]
/// where C is the inertial gravity gradient at the chief rotated into LVLH
/// axes and w the frame rate (already resolved in LVLH axes).
Mat6 plant_matrix_lvlh(const LvlhFrame& frame, const Mat3& grad_inertial);

/// Two-body convenience overload: frame and gradient from the chief state.
Mat6 plant_matrix_lvlh(const InertialState& chief, double mu);

/// Clohessy-Wiltshire plant (circular chief with mean motion n).
Mat6 cw_plant(double n);

/// Plant used when a basis is built without an explicit one: the two-body
/// LVLH plant along a keplerian chief, or the rotating-frame flow jacobian
/// along a CR3BP orbit. The callable owns a shared chief sampler and is safe
/// to copy and call concurrently.
PlantFn canonical_plant(const PeriodicOrbit& orbit);

}  // namespace modal
