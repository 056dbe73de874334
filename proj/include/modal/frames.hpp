#pragma once

#include "modal/types.hpp"

namespace modal {

/// Chief-centred LVLH frame: x radial, z along the angular momentum,
/// y = z cross x (along-track). `rot` maps inertial to LVLH components;
/// omega/omega_dot are the frame rates resolved in LVLH axes.
struct LvlhFrame {
  Mat3 rot;
  Vec3 omega;
  Vec3 omega_dot;
};

/// Frame for a two-body chief (no transverse/normal acceleration):
/// omega = (0, 0, h/r^2), omega_dot = (0, 0, -2 h rdot / r^3).
LvlhFrame lvlh_frame(const InertialState& chief);

/// General frame: `accel` is the chief's total inertial acceleration and
/// `jerk` its time derivative. The out-of-plane acceleration tilts the frame
/// (omega_x = r a_n / h) and the jerk feeds omega_dot.
LvlhFrame lvlh_frame(const InertialState& chief, const Vec3& accel,
                     const Vec3& jerk);

/// Exact (nonlinear) differencing of two inertial states into the chief's
/// LVLH frame, and its exact inverse. The frame-rate convention must match
/// between the two calls; the accel overloads use the general frame.
LvlhState relative_state(const InertialState& chief,
                         const InertialState& deputy);
LvlhState relative_state(const InertialState& chief,
                         const InertialState& deputy, const Vec3& chief_accel);
InertialState deputy_from_relative(const InertialState& chief,
                                   const LvlhState& x);
InertialState deputy_from_relative(const InertialState& chief,
                                   const LvlhState& x, const Vec3& chief_accel);

}  // namespace modal
