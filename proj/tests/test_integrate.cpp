#include <doctest.h>

#include <cmath>

#include "modal/elements.hpp"
#include "modal/integrate.hpp"
#include "modal/twobody.hpp"
#include "modal/types.hpp"

using namespace modal;

namespace {

// y'' = -y as a first-order system; exact solution is a rotation.
void oscillator(double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
  dy.resize(2);
  dy[0] = y[1];
  dy[1] = -y[0];
}

void twobody_rhs(double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
  dy.resize(6);
  dy.head<3>() = y.segment<3>(3);
  dy.tail<3>() = twobody_accel(consts::mu_earth, y.head<3>());
}

}  // namespace

TEST_CASE("dense output tracks the exact oscillator solution") {
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  const double tf = 20.0;
  auto sol = integrate(oscillator, y0, 0.0, tf);

  CHECK(sol.t_begin() == 0.0);
  CHECK(sol.t_end() == tf);
  CHECK(sol.dim() == 2);

  // Sample between the accepted nodes, not just on them.
  for (int k = 0; k <= 1000; ++k) {
    const double t = tf * k / 1000.0;
    const auto y = sol.eval(t);
    CHECK(std::abs(y[0] - std::cos(t)) < 1e-10);
    CHECK(std::abs(y[1] + std::sin(t)) < 1e-10);
    CHECK(sol.eval_component(t, 1) == y[1]);
  }
}

TEST_CASE("tightening the tolerance tightens the answer") {
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  const double tf = 50.0;

  IntegratorOptions loose;
  loose.rtol = loose.atol = 1e-6;
  IntegratorOptions tight;
  tight.rtol = tight.atol = 1e-13;

  const double err_loose =
      std::abs(integrate(oscillator, y0, 0.0, tf, loose).eval(tf)[0] -
               std::cos(tf));
  const double err_tight =
      std::abs(integrate(oscillator, y0, 0.0, tf, tight).eval(tf)[0] -
               std::cos(tf));
  CHECK(err_tight < err_loose);
  CHECK(err_tight < 1e-11);
}

TEST_CASE("two-body integration conserves energy and angular momentum") {
  OrbitElements oe;
  oe.a = 8600.0;
  oe.e = 0.2;
  oe.i = 25.0 * consts::deg;
  const auto s0 = elements_to_state(oe, consts::mu_earth);
  const double T = orbit_period(oe.a, consts::mu_earth);

  auto sol = integrate(twobody_rhs, s0.vec(), 0.0, 10.0 * T);

  const double E0 = specific_energy(consts::mu_earth, s0);
  const Vec3 h0 = s0.r.cross(s0.v);
  for (int k = 0; k <= 40; ++k) {
    const auto y = sol.eval(10.0 * T * k / 40.0);
    const auto s = InertialState::from_vec(y);
    CHECK(std::abs(specific_energy(consts::mu_earth, s) - E0) <
          1e-9 * std::abs(E0));
    CHECK((s.r.cross(s.v) - h0).norm() < 1e-9 * h0.norm());
  }
}

TEST_CASE("event location finds the first zero crossing") {
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  auto sol = integrate(oscillator, y0, 0.0, 10.0);

  double t_event = 0.0;
  // First zero of y[0] is at pi/2.
  const bool found = find_event(
      sol, [](double, const Eigen::VectorXd& y) { return y[0]; }, 0.0, 10.0,
      &t_event);
  REQUIRE(found);
  CHECK(std::abs(t_event - consts::pi / 2.0) < 1e-11);

  // No crossing of y[0] - 2 anywhere.
  CHECK_FALSE(find_event(
      sol, [](double, const Eigen::VectorXd& y) { return y[0] - 2.0; }, 0.0,
      10.0, &t_event));
}

TEST_CASE("step budget violations are reported, not silently truncated") {
  Eigen::VectorXd y0(2);
  y0 << 1.0, 0.0;
  IntegratorOptions opts;
  opts.max_steps = 3;
  CHECK_THROWS_AS(integrate(oscillator, y0, 0.0, 100.0, opts), NumericalError);
}
