#include "modal/cw.hpp"

#include <cmath>

namespace modal {

CwBasis::CwBasis(double n, double mu, double epoch) : n_(n) {
  if (!(n > 0.0)) {
    throw ValidationError("cw_basis: mean motion must be positive");
  }
  OrbitElements oe;
  oe.a = std::cbrt(mu / (n * n));
  orbit_ = keplerian_orbit(oe, mu, epoch);

  kinds_ = {ModeKind::trivial, ModeKind::drift,  ModeKind::center,
            ModeKind::center,  ModeKind::center, ModeKind::center};
  ModeBlock chain;
  chain.kind = ModeBlock::Kind::chain;
  chain.col = 0;
  chain.size = 2;
  chain.k(0, 1) = 1.0;  // psi2(t+T) = psi2(t) + T psi1
  blocks_.push_back(chain);
  for (int col : {2, 4}) {
    ModeBlock b;
    b.kind = ModeBlock::Kind::center;
    b.col = col;
    b.size = 2;
    b.omega = n;
    b.k(0, 1) = -n;
    b.k(1, 0) = n;
    blocks_.push_back(b);
  }

  Mat6 k = Mat6::Zero();
  for (const ModeBlock& b : blocks_) {
    k.block(b.col, b.col, b.size, b.size) = b.k.topLeftCorner(b.size, b.size);
  }
  const Mat6 vbar = psi(epoch);
  lambda_ = vbar * k * vbar.fullPivLu().inverse();

  compute_normalization();
}

Mat6 CwBasis::psi(double t) const {
  const double tau = t - epoch();
  const double s = std::sin(n_ * tau);
  const double c = std::cos(n_ * tau);
  Mat6 m;
  m << 0.0, -2.0 / (3.0 * n_), -c / n_, s / n_, 0.0, 0.0,
       1.0, tau, 2.0 * s / n_, 2.0 * c / n_, 0.0, 0.0,
       0.0, 0.0, 0.0, 0.0, 2.0 * s / n_, 2.0 * c / n_,
       0.0, 0.0, s, c, 0.0, 0.0,
       0.0, 1.0, 2.0 * c, -2.0 * s, 0.0, 0.0,
       0.0, 0.0, 0.0, 0.0, 2.0 * c, -2.0 * s;
  return m;
}

nlohmann::json CwBasis::to_json() const {
  nlohmann::json j = structure_to_json();
  j["type"] = "cw";
  j["orbit"] = orbit_to_json(orbit_);
  j["epoch"] = epoch();
  j["period"] = period();
  j["mean_motion"] = n_;
  return j;
}

std::unique_ptr<ModalBasis> cw_basis(double n, double mu, double epoch) {
  return std::make_unique<CwBasis>(n, mu, epoch);
}

ModalConstants cw_constants(const LvlhState& x0, double n) {
  if (!(n > 0.0)) {
    throw ValidationError("cw_constants: mean motion must be positive");
  }
  Vec6 c;
  c << x0[1] - 2.0 / n * x0[3],
       -6.0 * n * x0[0] - 3.0 * x0[4],
       3.0 * n * x0[0] + 2.0 * x0[4],
       x0[3],
       0.5 * x0[5],
       0.5 * n * x0[2];
  return {c, 0.0};
}

std::unique_ptr<ModalBasis> cw_basis_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "cw") {
    throw ValidationError("basis JSON: not a CW basis");
  }
  const PeriodicOrbit orbit = orbit_from_json(j.at("orbit"));
  return std::make_unique<CwBasis>(j.at("mean_motion").get<double>(), orbit.mu,
                                   orbit.epoch);
}

}  // namespace modal
