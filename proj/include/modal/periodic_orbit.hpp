#pragma once

#include <json.hpp>

#include "modal/elements.hpp"
#include "modal/integrate.hpp"
#include "modal/types.hpp"

namespace modal {

/// A periodic reference (chief) orbit: either a two-body ellipse (period
/// analytic) or a corrected CR3BP periodic orbit in the rotating frame.
struct PeriodicOrbit {
  enum class Kind { keplerian, cr3bp };

  Kind kind = Kind::keplerian;
  /// km^3/s^2 for keplerian, mass ratio for cr3bp.
  double mu = 0.0;
  double epoch = 0.0;
  /// Inertial state (keplerian) or rotating-frame state (cr3bp) at epoch.
  Vec6 initial_state = Vec6::Zero();
  double period = 0.0;

  struct Tolerances {
    double corrector = 1e-12;
    double closure = 1e-10;
    double integ_rtol = 1e-12;
    double integ_atol = 1e-12;
    double period_match = 1e-6;
  } tol;

  /// Provenance of the generator (family walk, corrector iterations, ...).
  nlohmann::json metadata;
};

PeriodicOrbit keplerian_orbit(const OrbitElements& oe, double mu,
                              double epoch = 0.0);

nlohmann::json orbit_to_json(const PeriodicOrbit& orbit);
PeriodicOrbit orbit_from_json(const nlohmann::json& j);

/// Read-only sampler for the chief trajectory. Keplerian orbits evaluate
/// analytically (Kepler solve); CR3BP orbits integrate one period once and
/// then evaluate the dense solution with periodic wrapping. Evaluation is
/// safe to share across threads.
class OrbitCache {
 public:
  explicit OrbitCache(const PeriodicOrbit& orbit);

  const PeriodicOrbit& orbit() const { return orbit_; }
  Vec6 state_at(double t) const;
  /// Time derivative of the state (the dynamics right-hand side).
  Vec6 rate_at(double t) const;

 private:
  PeriodicOrbit orbit_;
  OrbitElements oe_;           // keplerian only
  DenseSolution flow_;         // cr3bp only
};

}  // namespace modal
