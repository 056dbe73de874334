#include "modal/periodic_orbit.hpp"

#include <cmath>

#include "modal/cr3bp.hpp"
#include "modal/twobody.hpp"

namespace modal {

PeriodicOrbit keplerian_orbit(const OrbitElements& oe, double mu,
                              double epoch) {
  PeriodicOrbit orbit;
  orbit.kind = PeriodicOrbit::Kind::keplerian;
  orbit.mu = mu;
  orbit.epoch = epoch;
  orbit.initial_state = elements_to_state(oe, mu).vec();
  orbit.period = orbit_period(oe.a, mu);
  orbit.metadata = {{"generator", "keplerian-elements"}};
  return orbit;
}

nlohmann::json orbit_to_json(const PeriodicOrbit& orbit) {
  nlohmann::json j;
  const bool kep = orbit.kind == PeriodicOrbit::Kind::keplerian;
  j["kind"] = kep ? "keplerian" : "cr3bp";
  j[kep ? "mu" : "mu_ratio"] = orbit.mu;
  j["epoch"] = orbit.epoch;
  j["initial_state"] = std::vector<double>(
      orbit.initial_state.data(), orbit.initial_state.data() + 6);
  j["period"] = orbit.period;
  j["tolerances"] = {{"corrector", orbit.tol.corrector},
                     {"closure", orbit.tol.closure},
                     {"integ_rtol", orbit.tol.integ_rtol},
                     {"integ_atol", orbit.tol.integ_atol},
                     {"period_match", orbit.tol.period_match}};
  j["generator_metadata"] = orbit.metadata;
  return j;
}

PeriodicOrbit orbit_from_json(const nlohmann::json& j) {
  PeriodicOrbit orbit;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "keplerian") {
    orbit.kind = PeriodicOrbit::Kind::keplerian;
    orbit.mu = j.at("mu").get<double>();
  } else if (kind == "cr3bp") {
    orbit.kind = PeriodicOrbit::Kind::cr3bp;
    orbit.mu = j.at("mu_ratio").get<double>();
  } else {
    throw ValidationError("orbit_from_json: unknown kind '" + kind + "'");
  }
  orbit.epoch = j.at("epoch").get<double>();
  const auto state = j.at("initial_state").get<std::vector<double>>();
  if (state.size() != 6) {
    throw ValidationError("orbit_from_json: initial_state must have 6 entries");
  }
  for (int i = 0; i < 6; ++i) orbit.initial_state[i] = state[i];
  orbit.period = j.at("period").get<double>();
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    orbit.tol.corrector = t.value("corrector", orbit.tol.corrector);
    orbit.tol.closure = t.value("closure", orbit.tol.closure);
    orbit.tol.integ_rtol = t.value("integ_rtol", orbit.tol.integ_rtol);
    orbit.tol.integ_atol = t.value("integ_atol", orbit.tol.integ_atol);
    orbit.tol.period_match = t.value("period_match", orbit.tol.period_match);
  }
  orbit.metadata = j.value("generator_metadata", nlohmann::json::object());
  return orbit;
}

OrbitCache::OrbitCache(const PeriodicOrbit& orbit) : orbit_(orbit) {
  if (orbit_.kind == PeriodicOrbit::Kind::keplerian) {
    oe_ = state_to_elements(InertialState::from_vec(orbit_.initial_state),
                            orbit_.mu);
  } else {
    IntegratorOptions opts;
    opts.rtol = orbit_.tol.integ_rtol;
    opts.atol = orbit_.tol.integ_atol;
    const double mu = orbit_.mu;
    flow_ = integrate(
        [mu](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
          dy = cr3bp::rhs(mu, Vec6(y));
        },
        orbit_.initial_state, orbit_.epoch, orbit_.epoch + orbit_.period, opts);
  }
}

Vec6 OrbitCache::state_at(double t) const {
  if (orbit_.kind == PeriodicOrbit::Kind::keplerian) {
    return kepler_state_at(oe_, orbit_.mu, orbit_.epoch, t).vec();
  }
  double s = std::fmod(t - orbit_.epoch, orbit_.period);
  if (s < 0.0) s += orbit_.period;
  return Vec6(flow_.eval(orbit_.epoch + s));
}

Vec6 OrbitCache::rate_at(double t) const {
  const Vec6 y = state_at(t);
  if (orbit_.kind == PeriodicOrbit::Kind::keplerian) {
    Vec6 dy;
    dy << y.tail<3>(), twobody_accel(orbit_.mu, y.head<3>());
    return dy;
  }
  return cr3bp::rhs(orbit_.mu, y);
}

}  // namespace modal
