#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "modal/corrector.hpp"
#include "modal/cw.hpp"
#include "modal/lti.hpp"
#include "modal/modal_basis.hpp"
#include "modal/monodromy.hpp"
#include "modal/plant.hpp"
#include "modal/stm.hpp"

using namespace modal;

namespace {

Vec6 random_vec6(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec6 v;
  for (int i = 0; i < 6; ++i) v[i] = u(rng);
  return v;
}

struct HaloFixture {
  PeriodicOrbit orbit;
  std::unique_ptr<FloquetBasis> basis;
};

HaloFixture make_halo(const Vec6& seed, double period_guess) {
  const CorrectedOrbit co =
      correct_halo(consts::em_mass_ratio, seed, period_guess, 1e-13);
  HaloFixture fx;
  fx.orbit.kind = PeriodicOrbit::Kind::cr3bp;
  fx.orbit.mu = consts::em_mass_ratio;
  fx.orbit.initial_state = co.state;
  fx.orbit.period = co.period;
  fx.basis = std::make_unique<FloquetBasis>(fx.orbit,
                                            canonical_plant(fx.orbit), false);
  return fx;
}

// L2 halo with two center pairs (marginally stable member of the family),
// anchored at the perpendicular crossing with vy < 0 and z > 0.
const HaloFixture& stable_halo() {
  static const HaloFixture fx = make_halo(
      (Vec6() << 1.070066, 0.0, 0.201561, 0.0, -0.186037, 0.0).finished(),
      2.188621);
  return fx;
}

// Larger-period L2 member with a stable/unstable real pair.
const HaloFixture& unstable_halo() {
  static const HaloFixture fx = make_halo(
      (Vec6() << 1.176117, 0.0, 0.065491, 0.0, -0.176593, 0.0).finished(),
      3.379632);
  return fx;
}

// Closed-form solution of the circular-chief relative motion equations.
Mat6 cw_stm_closed_form(double n, double t) {
  const double c = std::cos(n * t);
  const double s = std::sin(n * t);
  Mat6 phi = Mat6::Zero();
  phi(0, 0) = 4.0 - 3.0 * c;
  phi(0, 3) = s / n;
  phi(0, 4) = 2.0 * (1.0 - c) / n;
  phi(1, 0) = 6.0 * (s - n * t);
  phi(1, 1) = 1.0;
  phi(1, 3) = -2.0 * (1.0 - c) / n;
  phi(1, 4) = (4.0 * s - 3.0 * n * t) / n;
  phi(2, 2) = c;
  phi(2, 5) = s / n;
  phi(3, 0) = 3.0 * n * s;
  phi(3, 3) = c;
  phi(3, 4) = 2.0 * s;
  phi(4, 0) = -6.0 * n * (1.0 - c);
  phi(4, 3) = -2.0 * s;
  phi(4, 4) = 4.0 * c - 3.0;
  phi(5, 2) = -n * s;
  phi(5, 5) = c;
  return phi;
}

std::string kinds_string(const std::array<ModeKind, 6>& kinds) {
  std::string s;
  for (ModeKind k : kinds) s += std::to_string(static_cast<int>(k));
  return s;
}

}  // namespace

TEST_CASE("stm of the zero plant stays at identity") {
  PlantFn zero = [](double) { return Mat6::Zero(); };
  const StmSolution sol = propagate_stm(zero, 0.0, 10.0);
  for (double t : {0.0, 3.7, 10.0}) {
    CHECK((sol.at(t) - Mat6::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("stm of a constant plant matches the matrix exponential") {
  std::mt19937 rng(11);
  Mat6 a;
  for (int i = 0; i < 6; ++i) a.row(i) = random_vec6(rng).transpose();
  a *= 0.4;
  PlantFn plant = [a](double) { return a; };
  const StmSolution sol = propagate_stm(plant, 0.0, 2.0);
  for (double t : {0.5, 1.3, 2.0}) {
    const Mat6 ref = (a * t).exp();
    CHECK((sol.at(t) - ref).norm() < 1e-9 * ref.norm());
  }
}

TEST_CASE("stm of the circular-chief plant matches the closed form") {
  const double n = 1.1e-3;
  const double period = 2.0 * consts::pi / n;
  const Mat6 a = cw_plant(n);
  const StmSolution sol = propagate_stm([a](double) { return a; }, 0.0,
                                        period);
  for (double f : {0.11, 0.5, 0.93, 1.0}) {
    const double t = f * period;
    const Mat6 ref = cw_stm_closed_form(n, t);
    CHECK((sol.at(t) - ref).norm() < 1e-8 * ref.norm());
  }
}

TEST_CASE("identity monodromy is rejected as degenerate") {
  try {
    analyze_monodromy(Mat6::Identity(), Vec6::Unit(1), 2.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("identity") != std::string::npos);
  }
}

TEST_CASE("negative real multipliers are rejected") {
  // V J V^-1 with J = chain + rotation + diag(-2, -1/2); det = 1 but the
  // real logarithm does not exist.
  std::srand(5);
  Mat6 j = Mat6::Zero();
  j(0, 0) = 1.0;
  j(0, 1) = 1.0;
  j(1, 1) = 1.0;
  const double w = 1.3;
  j(2, 2) = std::cos(w);
  j(2, 3) = -std::sin(w);
  j(3, 2) = std::sin(w);
  j(3, 3) = std::cos(w);
  j(4, 4) = -2.0;
  j(5, 5) = -0.5;
  const Mat6 v = Mat6::Random() + 3.0 * Mat6::Identity();
  const Mat6 phi = v * j * v.inverse();
  try {
    analyze_monodromy(phi, v.col(0), 2.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("logarithm") != std::string::npos);
  }
}

TEST_CASE("multiple defective unity blocks are rejected") {
  std::srand(6);
  Mat6 j = Mat6::Identity();
  j(0, 1) = 1.0;
  j(2, 3) = 1.0;  // second chain
  const double w = 0.9;
  j(4, 4) = std::cos(w);
  j(4, 5) = -std::sin(w);
  j(5, 4) = std::sin(w);
  j(5, 5) = std::cos(w);
  const Mat6 v = Mat6::Random() + 3.0 * Mat6::Identity();
  CHECK_THROWS_AS(analyze_monodromy(v * j * v.inverse(), v.col(0), 2.0),
                  NumericalError);
}

TEST_CASE("near-unity nontrivial multipliers are rejected") {
  std::srand(7);
  Mat6 j = Mat6::Identity();
  j(0, 1) = 1.0;
  const double w = 1.1;
  j(2, 2) = std::cos(w);
  j(2, 3) = -std::sin(w);
  j(3, 2) = std::sin(w);
  j(3, 3) = std::cos(w);
  j(4, 4) = 1.0005;  // inside the unity band but not part of the chain
  j(5, 5) = 1.0 / 1.0005;
  const Mat6 v = Mat6::Random() + 3.0 * Mat6::Identity();
  CHECK_THROWS_AS(analyze_monodromy(v * j * v.inverse(), v.col(0), 2.0),
                  NumericalError);
}

TEST_CASE("synthetic mixed spectrum is recovered") {
  std::srand(8);
  const double period = 2.0;
  const double w = 1.3;
  const double lam = 0.2;
  Mat6 j = Mat6::Zero();
  j(0, 0) = 1.0;
  j(0, 1) = 0.3;
  j(1, 1) = 1.0;
  j(2, 2) = std::cos(w);
  j(2, 3) = -std::sin(w);
  j(3, 2) = std::sin(w);
  j(3, 3) = std::cos(w);
  j(4, 4) = lam;
  j(5, 5) = 1.0 / lam;
  const Mat6 v = Mat6::Random() + 3.0 * Mat6::Identity();
  const Mat6 phi = v * j * v.inverse();
  const MonodromyAnalysis an = analyze_monodromy(phi, v.col(0), period);

  CHECK(kinds_string(an.kinds) == "013345");
  REQUIRE(an.blocks.size() == 3);

  // Chain relation M v2 = v2 + s v1 with the recovered scalar.
  const ModeBlock& chain = an.blocks[0];
  REQUIRE(chain.kind == ModeBlock::Kind::chain);
  const Vec6 v1 = an.vbar.col(0);
  const Vec6 v2 = an.vbar.col(1);
  const double s = chain.k(0, 1) * period;
  CHECK((phi * v2 - v2 - s * v1).norm() < 1e-8 * v2.norm());

  // Center frequency and saddle exponent match the injected blocks.
  const ModeBlock& center = an.blocks[1];
  REQUIRE(center.kind == ModeBlock::Kind::center);
  CHECK(center.omega == doctest::Approx(w / period).epsilon(1e-9));
  const ModeBlock& saddle = an.blocks[2];
  REQUIRE(saddle.kind == ModeBlock::Kind::real_pair);
  CHECK(saddle.sigma == doctest::Approx(std::log(1.0 / lam) / period)
                            .epsilon(1e-9));

  const LtiForm lti = compute_lti(an);
  CHECK((lti.exp_lambda(period) - phi).norm() < 1e-8 * phi.norm());
}

TEST_CASE("ill-conditioned generator columns are rejected") {
  MonodromyAnalysis an;
  an.phi = Mat6::Identity();
  an.period = 1.0;
  an.vbar = Mat6::Identity();
  an.vbar(5, 5) = 1e-14;
  an.kinds.fill(ModeKind::periodic);
  for (int i = 0; i < 6; ++i) {
    ModeBlock b;
    b.kind = ModeBlock::Kind::periodic;
    b.col = i;
    b.size = 1;
    an.blocks.push_back(b);
  }
  CHECK_THROWS_AS(compute_lti(an), NumericalError);
}

TEST_CASE("marginally stable halo classification") {
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;

  CHECK(kinds_string(fb.kinds()) == "013333");

  // Two center pairs; frequencies in rad per nondimensional time unit.
  std::vector<double> omegas;
  for (const ModeBlock& b : fb.blocks()) {
    if (b.kind == ModeBlock::Kind::center) omegas.push_back(b.omega);
  }
  REQUIRE(omegas.size() == 2);
  std::sort(omegas.begin(), omegas.end());
  CHECK(omegas[1] == doctest::Approx(1.2511).epsilon(1e-2));
  CHECK(omegas[0] == doctest::Approx(0.7604).epsilon(1e-2));

  const Mat6& m = fb.monodromy();
  CHECK(std::abs(m.determinant() - 1.0) < 1e-6);

  // Multipliers come in reciprocal pairs (symplectic flow).
  const Eigen::EigenSolver<Mat6> es(m);
  for (int i = 0; i < 6; ++i) {
    double best = 1e9;
    for (int k = 0; k < 6; ++k) {
      best = std::min(best,
                      std::abs(es.eigenvalues()[i] * es.eigenvalues()[k] - 1.0));
    }
    CHECK(best < 1e-6);
  }
}

TEST_CASE("stable halo periodic transformation and closure") {
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;
  const LtiForm& lti = fb.lti();
  const double t0 = fx.orbit.epoch;
  const double T = fx.orbit.period;

  // exp(Lambda T) reproduces the monodromy matrix.
  const double scale = 1.0 + fb.monodromy().cwiseAbs().maxCoeff();
  CHECK((lti.exp_lambda(T) - fb.monodromy()).cwiseAbs().maxCoeff() <
        1e-6 * scale);

  // P(t) = Phi(t) exp(-Lambda t) wraps periodically, so P at epoch and at
  // epoch + T are both identity.
  CHECK((lf_transform(fb.stm_cache(), lti, t0) - Mat6::Identity()).norm() <
        1e-9);
  CHECK((lf_transform(fb.stm_cache(), lti, t0 + T) - Mat6::Identity()).norm() <
        1e-8);

  // The unwrapped product carries the closure defect of the cached flow.
  const Mat6 raw = fb.stm(T) * lti.exp_lambda(-T);
  CHECK((raw - Mat6::Identity()).norm() < 5e-8);
}

TEST_CASE("unstable halo classification") {
  const HaloFixture& fx = unstable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double T = fx.orbit.period;

  CHECK(kinds_string(fb.kinds()) == "013345");

  double omega = -1.0, sigma = -1.0;
  for (const ModeBlock& b : fb.blocks()) {
    if (b.kind == ModeBlock::Kind::center) omega = b.omega;
    if (b.kind == ModeBlock::Kind::real_pair) sigma = b.sigma;
  }
  CHECK(omega == doctest::Approx(0.1288).epsilon(5e-3 / 0.1288));
  CHECK(sigma > 0.0);

  const double scale = 1.0 + fb.monodromy().cwiseAbs().maxCoeff();
  CHECK((fb.lti().exp_lambda(T) - fb.monodromy()).cwiseAbs().maxCoeff() <
        1e-6 * scale);
  const Mat6 raw = fb.stm(T) * fb.lti().exp_lambda(-T);
  CHECK((raw - Mat6::Identity()).norm() < 1e-8);
  CHECK(std::abs(fb.monodromy().determinant() - 1.0) < 1e-6);
}

TEST_CASE("halo basis is complete and invertible") {
  for (const HaloFixture* fxp : {&stable_halo(), &unstable_halo()}) {
    const FloquetBasis& fb = *fxp->basis;
    const double t0 = fxp->orbit.epoch;
    const double T = fxp->orbit.period;
    std::mt19937 rng(21);
    for (int trial = 0; trial < 100; ++trial) {
      const Vec6 c = random_vec6(rng);
      const double t = t0 + T * (trial / 99.0);
      const LvlhState x = fb.state_from_constants(c, t);
      const Vec6 back = fb.constants_from_state(x, t).c;
      CHECK((back - c).norm() < 1e-6 * c.norm());
    }
    for (double f : {0.0, 0.31, 0.77}) {
      const double t = t0 + f * T;
      CHECK((fb.psi_inverse(t) * fb.psi(t) - Mat6::Identity()).norm() < 1e-8);
    }
  }
}

TEST_CASE("halo modes solve the linearized dynamics") {
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;
  const PlantFn plant = canonical_plant(fx.orbit);
  const double t0 = fx.orbit.epoch;
  const double T = fx.orbit.period;
  std::mt19937 rng(33);
  for (int trial = 0; trial < 3; ++trial) {
    const Vec6 c = random_vec6(rng);
    const LvlhState x0 = fb.state_from_constants(c, t0);
    const DenseSolution ref = integrate_linear(plant, x0, t0, t0 + T);
    for (double f : {0.4, 1.0}) {
      const double t = t0 + f * T;
      const Vec6 x_modal = fb.state_from_constants(c, t);
      const Vec6 x_ref = ref.eval(t);
      CHECK((x_modal - x_ref).norm() < 1e-6 * x_ref.norm());
    }
  }
}

TEST_CASE("trivial mode is periodic and drift mode grows linearly") {
  const HaloFixture& fx = unstable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double t0 = fx.orbit.epoch;
  const double T = fx.orbit.period;

  for (double f : {0.0, 0.37, 0.81}) {
    const Vec6 a = fb.psi(t0 + f * T).col(0);
    const Vec6 b = fb.psi(t0 + f * T + T).col(0);
    CHECK((b - a).norm() < 1e-8 * a.norm());
  }

  const Vec6 step = fb.psi(t0 + T).col(1) - fb.psi(t0).col(1);
  for (int k = 2; k <= 5; ++k) {
    const Vec6 dk = fb.psi(t0 + k * T).col(1) - fb.psi(t0).col(1);
    CHECK((dk - double(k) * step).norm() < 1e-6 * k * step.norm());
  }
}

TEST_CASE("normalized modes peak at unit position excursion") {
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double t0 = fx.orbit.epoch;
  const double T = fx.orbit.period;

  for (int mode = 0; mode < 6; ++mode) {
    double peak = 0.0;
    for (int i = 0; i <= 1024; ++i) {
      const Mat6 psin = fb.psi_normalized(t0 + T * i / 1024.0);
      peak = std::max(peak, psin.col(mode).head<3>().norm());
    }
    CHECK(peak < 1.0 + 1e-9);
    CHECK(peak > 0.99);  // sampling may sit just off the true peak
  }

  // cbar_i psi_hat_i = c_i psi_i: normalization moves scale, not content.
  std::mt19937 rng(44);
  const Vec6 c = random_vec6(rng);
  const Vec6 cbar = fb.normalized_constants(c);
  const double t = t0 + 0.4 * T;
  const Vec6 xa = fb.psi(t) * c;
  const Vec6 xb = fb.psi_normalized(t) * cbar;
  CHECK((xa - xb).norm() < 1e-12 * xa.norm());
  CHECK((fb.raw_from_normalized(cbar) - c).norm() < 1e-12 * c.norm());
}

TEST_CASE("stable halo constants recover a reference formation state") {
  // Frozen checkpoint: a formation offset with known modal content on the
  // marginally stable halo, stated in raw basis weights.
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double t0 = fx.orbit.epoch;
  const double alpha = 5.2e-6;

  Vec6 x0;
  x0 << -0.01, 0.309, -0.005, 0.168, -0.002, 0.362;
  x0 *= alpha;
  Vec6 c_ref;
  c_ref << 0.0, 0.0, 0.2, 0.1, 0.08, 0.0;
  c_ref *= alpha;

  // Forward: the checkpoint state is quoted to 3 digits, which injects a
  // ~1e-3 alpha error into the recovered weights.
  const Vec6 c = fb.constants_from_state(x0, t0).c;
  CHECK((c - c_ref).norm() < 2e-2 * c_ref.norm());
  CHECK(c[2] == doctest::Approx(0.2 * alpha).epsilon(1e-2));

  // Reverse: exact weights, compare against the quoted state.
  const Vec6 x = fb.state_from_constants(c_ref, t0);
  CHECK((x - x0).norm() < 1e-2 * x0.norm());
}

TEST_CASE("unstable halo constants recover a reference formation state") {
  const HaloFixture& fx = unstable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double t0 = fx.orbit.epoch;
  const double alpha = 5.2e-6;

  Vec6 x0;
  x0 << 0.0, -0.127, 0.0, -0.117, 0.0, -0.1;
  x0 *= alpha;
  const Vec6 c = fb.constants_from_state(x0, t0).c;
  Vec6 c_ref = Vec6::Zero();
  c_ref[0] = 0.2 * alpha;
  CHECK((c - c_ref).cwiseAbs().maxCoeff() < 1e-2 * 0.2 * alpha);
}

TEST_CASE("floquet basis serialization round trip") {
  const HaloFixture& fx = stable_halo();
  const FloquetBasis& fb = *fx.basis;
  const double t0 = fx.orbit.epoch;
  const double T = fx.orbit.period;

  const nlohmann::json j = fb.to_json();
  const auto rebuilt = FloquetBasis::from_json(j);
  CHECK(rebuilt->kinds() == fb.kinds());
  for (double f : {0.13, 0.77, 1.9}) {
    const Mat6 a = fb.psi(t0 + f * T);
    const Mat6 b = rebuilt->psi(t0 + f * T);
    CHECK((a - b).norm() < 1e-12 * a.norm());
  }

  const auto generic = basis_from_json(j);
  CHECK(generic->kinds() == fb.kinds());
}

TEST_CASE("custom-plant basis cannot be rebuilt from JSON") {
  const HaloFixture& fx = stable_halo();
  const PlantFn plant = canonical_plant(fx.orbit);
  const FloquetBasis fb(fx.orbit, plant, true);
  const nlohmann::json j = fb.to_json();
  CHECK_THROWS_AS(FloquetBasis::from_json(j), ValidationError);
}

TEST_CASE("circular chief through the generic route matches the closed form") {
  // All six multipliers are unity at the orbit period; the rank-one
  // defective branch must classify this as trivial + drift + 4 periodic.
  OrbitElements oe;
  oe.a = 8000.0;
  oe.e = 0.0;
  oe.i = 0.6;
  oe.raan = 0.2;
  oe.argp = 0.0;
  oe.f = 0.0;
  const PeriodicOrbit orbit = keplerian_orbit(oe, consts::mu_earth, 0.0);
  const FloquetBasis fb(orbit, canonical_plant(orbit), false);
  CHECK(kinds_string(fb.kinds()) == "012222");

  const double n = std::sqrt(consts::mu_earth / (oe.a * oe.a * oe.a));
  const CwBasis cw(n, consts::mu_earth, 0.0);
  // Both bases span the same flow: Psi(t) Psi(0)^-1 is the transition
  // matrix for each.
  for (double f : {0.23, 0.71, 1.0}) {
    const double t = f * orbit.period;
    const Mat6 a = fb.psi(t) * fb.psi_inverse(0.0);
    const Mat6 b = cw.psi(t) * cw.psi(0.0).inverse();
    CHECK((a - b).norm() < 1e-6 * b.norm());
  }
}
