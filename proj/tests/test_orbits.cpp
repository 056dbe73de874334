#include <doctest.h>

#include <cmath>

#include "modal/elements.hpp"
#include "modal/frames.hpp"
#include "modal/periodic_orbit.hpp"
#include "modal/twobody.hpp"

using namespace modal;

TEST_CASE("element <-> state round trip") {
  const double mu = consts::mu_earth;
  for (double e : {0.0, 1e-9, 0.01, 0.2, 0.7}) {
    for (double inc : {0.0, 1e-9, 0.4, 1.2, 3.0}) {
      for (double f : {-2.0, 0.0, 0.5, 3.0, 6.0}) {
        OrbitElements oe;
        oe.a = 9000.0;
        oe.e = e;
        oe.i = inc;
        oe.raan = 1.1;
        oe.argp = 4.9;
        oe.f = f;
        const auto s = elements_to_state(oe, mu);
        const auto back = state_to_elements(s, mu);
        // The recovered angles may be folded; the state must agree.
        const auto s2 = elements_to_state(back, mu);
        CHECK((s2.r - s.r).norm() < 1e-6);
        CHECK((s2.v - s.v).norm() < 1e-9);
        CHECK(back.a == doctest::Approx(oe.a).epsilon(1e-10));
        CHECK(back.e == doctest::Approx(oe.e).epsilon(1e-8).scale(1.0));
      }
    }
  }
}

TEST_CASE("element validation") {
  OrbitElements oe;
  oe.a = -1.0;
  CHECK_THROWS_AS(elements_to_state(oe, consts::mu_earth), ValidationError);
  oe.a = 9000.0;
  oe.e = 1.2;
  CHECK_THROWS_AS(elements_to_state(oe, consts::mu_earth), ValidationError);
}

TEST_CASE("Kepler solve over multiple revolutions") {
  for (double e : {0.0, 0.1, 0.5, 0.9, 0.99}) {
    for (int k = -3; k <= 3; ++k) {
      for (double m : {0.0, 0.3, 1.5, 3.0, 5.9}) {
        const double M = m + 2.0 * consts::pi * k;
        const double E = eccentric_from_mean(M, e);
        CHECK(std::abs(E - e * std::sin(E) - M) < 1e-12);
        // Continuity: E stays within one half-revolution of M.
        CHECK(std::abs(E - M) <= consts::pi);
      }
    }
  }
}

TEST_CASE("anomaly conversions are continuous and inverse to each other") {
  const double e = 0.35;
  double prev = -1e9;
  for (double f = -10.0; f <= 10.0; f += 0.05) {
    const double E = eccentric_from_true(f, e);
    CHECK(std::abs(true_from_eccentric(E, e) - f) < 1e-12);
    CHECK(E > prev);  // monotone, so no branch jumps
    prev = E;
    const double M = mean_from_true(f, e);
    CHECK(std::abs(true_from_mean(M, e) - f) < 1e-11);
  }
}

TEST_CASE("kepler_state_at is periodic and satisfies vis-viva") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.argp = 270.001 * consts::deg;
  oe.f = 90.0 * consts::deg;
  const double mu = consts::mu_earth;
  const double T = orbit_period(oe.a, mu);

  const auto s0 = kepler_state_at(oe, mu, 0.0, 0.0);
  const auto sT = kepler_state_at(oe, mu, 0.0, T);
  CHECK((sT.r - s0.r).norm() < 1e-6);
  CHECK((sT.v - s0.v).norm() < 1e-9);

  for (double t : {123.0, 1000.0, 4321.0, 2.5 * T}) {
    const auto s = kepler_state_at(oe, mu, 0.0, t);
    const double vis = 2.0 * (s.v.squaredNorm() / 2.0 - mu / s.r.norm());
    CHECK(vis == doctest::Approx(-mu / oe.a).epsilon(1e-12));
  }

  // Against direct numerical integration.
  auto rhs = [mu](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(6);
    dy.head<3>() = y.segment<3>(3);
    dy.tail<3>() = twobody_accel(mu, y.head<3>());
  };
  auto sol = integrate(rhs, s0.vec(), 0.0, 0.7 * T);
  const auto sk = kepler_state_at(oe, mu, 0.0, 0.7 * T);
  CHECK((sol.eval(0.7 * T) - sk.vec()).norm() < 1e-6);
}

TEST_CASE("LVLH frame is orthonormal and rotates at the reported rate") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.f = 1.0;
  const double mu = consts::mu_earth;

  const auto frame_at = [&](double t) {
    return lvlh_frame(kepler_state_at(oe, mu, 0.0, t));
  };

  const auto F = frame_at(500.0);
  CHECK((F.rot * F.rot.transpose() - Mat3::Identity()).norm() < 1e-13);

  // Rdot R^T = -[omega]_x for the inertial->LVLH map.
  const double h = 1e-3;
  const Mat3 Rdot = (frame_at(500.0 + h).rot - frame_at(500.0 - h).rot) /
                    (2.0 * h);
  CHECK((Rdot * F.rot.transpose() + cross_matrix(F.omega)).norm() < 1e-6);

  // omega_dot by finite differences of omega.
  const Vec3 wdot_fd =
      (frame_at(500.0 + h).omega - frame_at(500.0 - h).omega) / (2.0 * h);
  CHECK((wdot_fd - F.omega_dot).norm() < 1e-9);
}

TEST_CASE("general LVLH frame reduces to the two-body one") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.f = 2.2;
  const auto chief = elements_to_state(oe, consts::mu_earth);

  const Vec3 a = twobody_accel(consts::mu_earth, chief.r);
  const Vec3 j = twobody_gradient(consts::mu_earth, chief.r) * chief.v;
  const auto Fg = lvlh_frame(chief, a, j);
  const auto Fk = lvlh_frame(chief);
  CHECK((Fg.rot - Fk.rot).norm() < 1e-13);
  CHECK((Fg.omega - Fk.omega).norm() < 1e-15);
  CHECK((Fg.omega_dot - Fk.omega_dot).norm() < 1e-15);
}

TEST_CASE("relative state differencing inverts exactly") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.f = 0.7;
  const auto chief = elements_to_state(oe, consts::mu_earth);

  InertialState deputy = chief;
  deputy.r += Vec3(1.3, -0.4, 0.8);
  deputy.v += Vec3(-1e-3, 2e-3, 5e-4);

  const LvlhState x = relative_state(chief, deputy);
  const auto back = deputy_from_relative(chief, x);
  CHECK((back.r - deputy.r).norm() < 1e-10);
  CHECK((back.v - deputy.v).norm() < 1e-13);

  CHECK(relative_state(chief, chief).norm() == 0.0);

  // Same round trip with the general (accelerated-chief) frame.
  const Vec3 a = twobody_accel(consts::mu_earth, chief.r) +
                 Vec3(1e-6, -2e-6, 3e-6);
  const LvlhState xg = relative_state(chief, deputy, a);
  const auto backg = deputy_from_relative(chief, xg, a);
  CHECK((backg.r - deputy.r).norm() < 1e-10);
  CHECK((backg.v - deputy.v).norm() < 1e-13);
  // Out-of-plane chief acceleration changes the frame rates, so the
  // velocity part must differ from the two-body convention.
  CHECK((xg - x).norm() > 0.0);
}

TEST_CASE("periodic orbit JSON round trip") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.argp = 270.001 * consts::deg;
  oe.f = 90.0 * consts::deg;
  const auto orbit = keplerian_orbit(oe, consts::mu_earth);
  CHECK(orbit.period ==
        doctest::Approx(orbit_period(oe.a, consts::mu_earth)).epsilon(1e-14));

  const auto j = orbit_to_json(orbit);
  const auto back = orbit_from_json(j);
  CHECK(back.kind == orbit.kind);
  CHECK(back.mu == orbit.mu);
  CHECK(back.period == orbit.period);
  CHECK((back.initial_state - orbit.initial_state).norm() == 0.0);

  auto bad = j;
  bad["kind"] = "parabolic";
  CHECK_THROWS_AS(orbit_from_json(bad), ValidationError);
  bad = j;
  bad["initial_state"] = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(orbit_from_json(bad), ValidationError);
}

TEST_CASE("orbit cache matches the analytic propagator") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  oe.f = 90.0 * consts::deg;
  const auto orbit = keplerian_orbit(oe, consts::mu_earth);
  OrbitCache cache(orbit);

  for (double t : {0.0, 100.0, 5000.0, 1.7 * orbit.period}) {
    const auto s = kepler_state_at(oe, consts::mu_earth, 0.0, t);
    CHECK((cache.state_at(t) - s.vec()).norm() < 1e-8);
    Vec6 rate;
    rate << s.v, twobody_accel(consts::mu_earth, s.r);
    CHECK((cache.rate_at(t) - rate).norm() < 1e-11);
  }
}
