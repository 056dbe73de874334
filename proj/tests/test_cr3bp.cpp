#include <doctest.h>

#include <cmath>

#include "modal/corrector.hpp"
#include "modal/cr3bp.hpp"
#include "modal/integrate.hpp"
#include "modal/periodic_orbit.hpp"

using namespace modal;

namespace {

const double kMu = consts::em_mass_ratio;

void flow_rhs(double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
  dy = cr3bp::rhs(kMu, y);
}

}  // namespace

TEST_CASE("collinear points are equilibria") {
  for (int point : {1, 2}) {
    const double x = cr3bp::libration_point_x(kMu, point);
    Vec6 y = Vec6::Zero();
    y[0] = x;
    CHECK(cr3bp::rhs(kMu, y).norm() < 1e-12);
  }
  // Earth-Moon L1/L2 sit near 0.8369 and 1.1557.
  CHECK(cr3bp::libration_point_x(kMu, 1) == doctest::Approx(0.8369).epsilon(1e-3));
  CHECK(cr3bp::libration_point_x(kMu, 2) == doctest::Approx(1.1557).epsilon(1e-3));
}

TEST_CASE("dynamics Jacobian matches finite differences") {
  Vec6 y;
  y << 0.9, 0.05, 0.1, 0.02, -0.1, 0.03;
  const Mat6 J = cr3bp::jacobian(kMu, y);

  const double h = 1e-7;
  Mat6 Jfd;
  for (int c = 0; c < 6; ++c) {
    Vec6 yp = y, ym = y;
    yp[c] += h;
    ym[c] -= h;
    Jfd.col(c) = (cr3bp::rhs(kMu, yp) - cr3bp::rhs(kMu, ym)) / (2.0 * h);
  }
  CHECK((J - Jfd).norm() < 1e-6 * (1.0 + J.norm()));
}

TEST_CASE("Jacobi constant is conserved along the flow") {
  Vec6 y0;
  y0 << 1.05, 0.0, 0.18, 0.0, -0.22, 0.0;
  const double C0 = cr3bp::jacobi_constant(kMu, y0);
  auto sol = integrate(flow_rhs, y0, 0.0, 6.0);
  for (int k = 0; k <= 30; ++k) {
    const Vec6 y = sol.eval(6.0 * k / 30.0);
    CHECK(std::abs(cr3bp::jacobi_constant(kMu, y) - C0) < 1e-10);
  }
}

TEST_CASE("halo corrector closes an orbit from the analytic seed") {
  const auto seed = halo_seed(kMu, 2, 0.06, true);
  CHECK(seed.period > 0.0);
  CHECK(seed.state[1] == 0.0);  // plane crossing
  CHECK(seed.state[3] == 0.0);
  CHECK(seed.state[5] == 0.0);

  const auto fixed = correct_halo(kMu, seed.state, seed.period);
  CHECK(fixed.closure_error < 1e-8);
  CHECK(fixed.iterations < 20);
  // Fixed-z correction keeps the amplitude.
  CHECK(fixed.state[2] == seed.state[2]);

  // Full-period return, independently of the corrector's own check.
  auto sol = integrate(flow_rhs, fixed.state, 0.0, fixed.period);
  CHECK((sol.eval(fixed.period) - Vec6(fixed.state)).norm() < 1e-7);
}

TEST_CASE("amplitudes far outside the seed's basin are rejected, not mangled") {
  const auto seed = halo_seed(kMu, 2, 0.10, true);
  CHECK_THROWS_AS(correct_halo(kMu, seed.state, seed.period), NumericalError);
}

TEST_CASE("family walk finds the member with a requested period") {
  // Correct one member, then ask the walk to find that same period.
  const auto seed = halo_seed(kMu, 2, 0.06, false);
  const auto fixed = correct_halo(kMu, seed.state, seed.period);

  HaloTarget target;
  target.point = 2;
  target.northern = false;
  target.period = fixed.period;
  const auto orbit = find_halo_orbit(target);

  CHECK(orbit.kind == PeriodicOrbit::Kind::cr3bp);
  CHECK(std::abs(orbit.period - fixed.period) < 1e-6);
  CHECK(orbit.metadata.contains("z_amplitude_lu"));

  // Canonical anchor: perpendicular crossing, vy < 0, southern hemisphere.
  CHECK(std::abs(orbit.initial_state[1]) < 1e-10);
  CHECK(std::abs(orbit.initial_state[3]) < 1e-9);
  CHECK(std::abs(orbit.initial_state[5]) < 1e-9);
  CHECK(orbit.initial_state[4] < 0.0);
  CHECK(orbit.initial_state[2] < 0.0);

  // Same family member regardless of which crossing anchors it: the
  // cross-track amplitude over one period must match the reference.
  PeriodicOrbit ref;
  ref.kind = PeriodicOrbit::Kind::cr3bp;
  ref.mu = kMu;
  ref.initial_state = fixed.state;
  ref.period = fixed.period;
  OrbitCache ref_cache(ref);
  OrbitCache cache(orbit);
  double zmax_ref = 0.0, zmax = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = fixed.period * i / 400.0;
    zmax_ref = std::max(zmax_ref, std::abs(ref_cache.state_at(t)[2]));
    zmax = std::max(zmax, std::abs(cache.state_at(t)[2]));
  }
  CHECK(std::abs(zmax - zmax_ref) < 1e-4);

  CHECK((cache.state_at(0.0) - orbit.initial_state).norm() < 1e-12);
  CHECK((cache.state_at(orbit.period) - orbit.initial_state).norm() < 1e-7);
  // Periodic wrap.
  CHECK((cache.state_at(orbit.period + 0.3) - cache.state_at(0.3)).norm() <
        1e-7);
}
