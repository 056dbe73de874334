#pragma once

#include "modal/types.hpp"

namespace modal {

/// Circular restricted three-body problem in the standard rotating frame
/// (nondimensional: distance between primaries 1, mean motion 1, total mass
/// 1). The larger primary sits at (-mu, 0, 0), the smaller at (1 - mu, 0, 0).
namespace cr3bp {

Vec6 rhs(double mass_ratio, const Vec6& y);

/// Jacobian of the flow, d(rhs)/d(state); also the plant matrix for
/// rotating-frame relative motion about a reference trajectory.
Mat6 jacobian(double mass_ratio, const Vec6& y);

/// Jacobi constant C = 2U - v^2.
double jacobi_constant(double mass_ratio, const Vec6& y);

/// x-coordinate of the collinear libration point (1 or 2) on the x-axis,
/// found by Newton iteration on the collinear equilibrium equation.
double libration_point_x(double mass_ratio, int point, double tol = 1e-14);

}  // namespace cr3bp

}  // namespace modal
