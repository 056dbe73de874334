#pragma once

#include "modal/periodic_orbit.hpp"
#include "modal/types.hpp"

namespace modal {

/// Third-order analytic halo seed (Richardson-style expansion about a
/// collinear point), used only to enter the corrector's basin.
struct HaloSeed {
  Vec6 state;       // rotating frame, perpendicular x-z plane crossing
  double period;    // estimate
  double z_amplitude;
};

HaloSeed halo_seed(double mass_ratio, int point, double z_amplitude_lu,
                   bool northern);

/// Single-shooting differential correction of a halo orbit with fixed z0.
/// The state is a perpendicular x-z plane crossing (y = xdot = zdot = 0);
/// x0 and ydot0 are adjusted until the half-period crossing is again
/// perpendicular. Throws NumericalError if the iteration or the full-period
/// closure check fails.
struct CorrectedOrbit {
  Vec6 state;
  double period;
  double closure_error;
  int iterations;
};

CorrectedOrbit correct_halo(double mass_ratio, const Vec6& guess,
                            double period_guess, double tol = 1e-12);

/// Pseudo-arclength continuation along the halo family until the target
/// period is bracketed, then bisection on arclength. When two family
/// members share the target period the smaller-amplitude one is returned
/// (the walk starts near the planar bifurcation and takes the first
/// bracket). Periods in nondimensional time.
///
/// The returned orbit is anchored at the perpendicular crossing with
/// negative y-velocity, and northern members have z > 0 there. Anchoring is
/// part of the contract: modal constants and maneuver epochs are measured
/// from this point.
struct HaloTarget {
  double mass_ratio = consts::em_mass_ratio;
  int point = 2;             // L1 or L2
  bool northern = true;
  double period = 0.0;       // nondimensional
  double period_tol = 1e-6;
  double z_start = 0.01;     // LU, family walk start
  double z_step = 0.005;     // LU, initial walk step
  double z_max = 0.95;       // LU, walk limit
};

PeriodicOrbit find_halo_orbit(const HaloTarget& target);

}  // namespace modal
