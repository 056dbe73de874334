#pragma once

#include "modal/types.hpp"

namespace modal {

/// Classical orbit elements. Angles in radians; f is true anomaly.
struct OrbitElements {
  double a = 0.0;     // semimajor axis [km]
  double e = 0.0;     // eccentricity
  double i = 0.0;     // inclination
  double raan = 0.0;  // right ascension of ascending node
  double argp = 0.0;  // argument of periapsis
  double f = 0.0;     // true anomaly
};

InertialState elements_to_state(const OrbitElements& oe, double mu);

/// Inverse map. Near-circular orbits (e < e_tol) report argp = 0 and fold the
/// in-plane longitude into f; near-equatorial orbits (i < i_tol) report
/// raan = 0 and fold the node into argp.
OrbitElements state_to_elements(const InertialState& s, double mu,
                                double e_tol = 1e-12, double i_tol = 1e-12);

/// Kepler's equation E - e sin E = M solved by Newton iteration.
/// Works for unbounded (continuous, multi-revolution) M.
double eccentric_from_mean(double M, double e, double tol = 1e-13);

/// Anomaly conversions, continuous across revolutions (no 2*pi wrapping).
double true_from_eccentric(double E, double e);
double eccentric_from_true(double f, double e);
double mean_from_true(double f, double e);
double true_from_mean(double M, double e, double tol = 1e-13);

/// Mean motion and period.
double mean_motion(double a, double mu);
double orbit_period(double a, double mu);

/// True anomaly at time t for an orbit with true anomaly f0 at t0.
double true_anomaly_at(const OrbitElements& oe, double mu, double t0, double t,
                       double tol = 1e-13);

/// Chief state at time t from elements pinned at t0 (two-body motion).
InertialState kepler_state_at(const OrbitElements& oe, double mu, double t0,
                              double t, double tol = 1e-13);

}  // namespace modal
