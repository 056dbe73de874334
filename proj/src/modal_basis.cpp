#include "modal/modal_basis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "modal/cr3bp.hpp"
#include "modal/cw.hpp"
#include "modal/eccentric.hpp"
#include "modal/plant.hpp"
#include "modal/twobody.hpp"

namespace modal {

namespace {

double golden_max(const std::function<double(double)>& f, double lo,
                  double hi) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while ((b - a) > 1e-12 * (std::abs(a) + std::abs(b) + 1.0)) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    }
  }
  return std::max(f1, f2);
}

std::vector<double> flatten_row_major(const Mat6& m) {
  std::vector<double> v(36);
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c) v[static_cast<std::size_t>(6 * r + c)] = m(r, c);
  return v;
}

Mat6 unflatten_row_major(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 36) {
    throw ValidationError(std::string("basis JSON: ") + what +
                          " must be 36 numbers (row-major)");
  }
  Mat6 m;
  for (int r = 0; r < 6; ++r)
    for (int c = 0; c < 6; ++c)
      m(r, c) = j.at(static_cast<std::size_t>(6 * r + c)).get<double>();
  return m;
}

}  // namespace

Mat6 ModalBasis::psi_inverse(double t) const {
  return psi(t).fullPivLu().inverse();
}

ModalConstants ModalBasis::constants_from_state(const LvlhState& x,
                                                double t) const {
  return {psi_inverse(t) * x, t};
}

LvlhState ModalBasis::state_from_constants(const Vec6& c, double t) const {
  return psi(t) * c;
}

Mat6 ModalBasis::psi_normalized(double t) const {
  return psi(t) * norms_.cwiseInverse().asDiagonal();
}

Vec6 ModalBasis::normalized_constants(const Vec6& c) const {
  return c.cwiseProduct(norms_);
}

Vec6 ModalBasis::raw_from_normalized(const Vec6& cbar) const {
  return cbar.cwiseQuotient(norms_);
}

void ModalBasis::compute_normalization() {
  const int n = 768;
  const double t0 = epoch();
  const double span = period();
  Eigen::Matrix<double, 6, Eigen::Dynamic> samples(6, n + 1);
  for (int j = 0; j <= n; ++j) {
    const Mat6 m = psi(t0 + span * j / n);
    for (int i = 0; i < 6; ++i) samples(i, j) = m.col(i).head<3>().norm();
  }
  for (int i = 0; i < 6; ++i) {
    int jmax = 0;
    double best = samples.row(i).maxCoeff(&jmax);
    const double lo = t0 + span * std::max(0, jmax - 1) / n;
    const double hi = t0 + span * std::min(n, jmax + 1) / n;
    best = std::max(best, golden_max(
                              [&](double t) {
                                return psi(t).col(i).head<3>().norm();
                              },
                              lo, hi));
    if (!(best > 0.0)) {
      throw NumericalError("modal basis: a mode has no position content");
    }
    norms_[i] = best;
  }
}

nlohmann::json ModalBasis::structure_to_json() const {
  nlohmann::json j;
  j["lambda"] = flatten_row_major(lambda_);
  nlohmann::json jb = nlohmann::json::array();
  for (const ModeBlock& b : blocks_) {
    jb.push_back({{"kind", to_string(b.kind)},
                  {"col", b.col},
                  {"size", b.size},
                  {"omega", b.omega},
                  {"sigma", b.sigma},
                  {"k", {b.k(0, 0), b.k(0, 1), b.k(1, 0), b.k(1, 1)}}});
  }
  j["blocks"] = jb;
  nlohmann::json jk = nlohmann::json::array();
  for (ModeKind k : kinds_) jk.push_back(to_string(k));
  j["kinds"] = jk;
  j["normalization"] = std::vector<double>(norms_.data(), norms_.data() + 6);
  return j;
}

void ModalBasis::structure_from_json(const nlohmann::json& j) {
  lambda_ = unflatten_row_major(j.at("lambda"), "lambda");
  blocks_.clear();
  for (const auto& jb : j.at("blocks")) {
    ModeBlock b;
    b.kind = block_kind_from_string(jb.at("kind").get<std::string>());
    b.col = jb.at("col").get<int>();
    b.size = jb.at("size").get<int>();
    b.omega = jb.at("omega").get<double>();
    b.sigma = jb.at("sigma").get<double>();
    const auto& k = jb.at("k");
    b.k << k.at(0).get<double>(), k.at(1).get<double>(), k.at(2).get<double>(),
        k.at(3).get<double>();
    if (b.col < 0 || b.size < 1 || b.col + b.size > 6) {
      throw ValidationError("basis JSON: block column layout out of range");
    }
    blocks_.push_back(b);
  }
  const auto& jk = j.at("kinds");
  if (!jk.is_array() || jk.size() != 6) {
    throw ValidationError("basis JSON: kinds must list six entries");
  }
  for (int i = 0; i < 6; ++i) {
    kinds_[static_cast<std::size_t>(i)] =
        mode_kind_from_string(jk.at(static_cast<std::size_t>(i)).get<std::string>());
  }
  const auto& jn = j.at("normalization");
  if (!jn.is_array() || jn.size() != 6) {
    throw ValidationError("basis JSON: normalization must list six factors");
  }
  for (int i = 0; i < 6; ++i) {
    norms_[i] = jn.at(static_cast<std::size_t>(i)).get<double>();
    if (!(norms_[i] > 0.0)) {
      throw ValidationError("basis JSON: normalization factors must be positive");
    }
  }
}

FloquetBasis::FloquetBasis(const PeriodicOrbit& orbit, const PlantFn& plant,
                           bool custom_plant) {
  if (!(orbit.period > 0.0)) {
    throw ValidationError("modal basis: orbit period must be positive");
  }
  if (!plant) {
    throw ValidationError("modal basis: plant callback is empty");
  }
  orbit_ = orbit;
  custom_plant_ = custom_plant;

  IntegratorOptions opts;
  opts.rtol = orbit.tol.integ_rtol;
  opts.atol = orbit.tol.integ_atol;
  stm_ = propagate_stm(plant, orbit.epoch, orbit.period, opts);
  monodromy_ = stm_.final();

  // Chain anchor for a defective unity pair: the chief rate, valid for
  // plants expressed in the same frame as the chief state (the CR3BP
  // rotating frame). All-unity spectra ignore it.
  Vec6 rate0;
  if (orbit.kind == PeriodicOrbit::Kind::cr3bp) {
    rate0 = cr3bp::rhs(orbit.mu, orbit.initial_state);
  } else {
    rate0.head<3>() = orbit.initial_state.tail<3>();
    rate0.tail<3>() = twobody_accel(orbit.mu, orbit.initial_state.head<3>());
  }

  const MonodromyAnalysis analysis =
      analyze_monodromy(monodromy_, rate0, orbit.period);
  lti_ = compute_lti(analysis);
  blocks_ = analysis.blocks;
  kinds_ = analysis.kinds;
  lambda_ = lti_.lambda;
  compute_normalization();
}

void FloquetBasis::split_span(double t, int* periods, double* offset) const {
  const double span = period();
  const double tau = t - epoch();
  double k = std::floor(tau / span);
  double s = tau - k * span;
  if (s < 0.0) {
    s += span;
    k -= 1.0;
  } else if (s >= span) {
    s -= span;
    k += 1.0;
  }
  *periods = static_cast<int>(k);
  *offset = s;
}

Mat6 FloquetBasis::psi(double t) const {
  int k = 0;
  double s = 0.0;
  split_span(t, &k, &s);
  const Mat6 phi_s = stm_.at(epoch() + s);
  if (k == 0) return phi_s * lti_.vbar;
  return phi_s * lti_.vbar * lti_.exp_k(k * period());
}

Mat6 FloquetBasis::psi_inverse(double t) const {
  int k = 0;
  double s = 0.0;
  split_span(t, &k, &s);
  // Keeps the growth of unstable blocks in the analytic factor instead of
  // inverting a numerically wild product.
  const Mat6 phi_inv = stm_.at(epoch() + s).fullPivLu().inverse();
  if (k == 0) return lti_.vbar_inv * phi_inv;
  return lti_.exp_k(-k * period()) * lti_.vbar_inv * phi_inv;
}

Mat6 FloquetBasis::stm(double tau) const {
  if (tau < -1e-9 || tau > period() * (1.0 + 1e-9)) {
    throw ValidationError("FloquetBasis::stm: tau outside [0, T]");
  }
  return stm_.at(epoch() + std::clamp(tau, 0.0, period()));
}

nlohmann::json FloquetBasis::to_json() const {
  nlohmann::json j = structure_to_json();
  j["type"] = "floquet";
  j["orbit"] = orbit_to_json(orbit_);
  j["epoch"] = epoch();
  j["period"] = period();
  j["plant"] = custom_plant_ ? "custom" : "canonical";
  j["vbar"] = flatten_row_major(lti_.vbar);
  j["stm_nodes"] = stm_.flow().step_count() + 1;
  return j;
}

std::unique_ptr<FloquetBasis> FloquetBasis::from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "floquet") {
    throw ValidationError("basis JSON: not a numeric (floquet) basis");
  }
  if (j.at("plant").get<std::string>() != "canonical") {
    throw ValidationError(
        "basis JSON: a custom-plant basis cannot be rebuilt from JSON; "
        "reconstruct it in code with its plant callback");
  }
  std::unique_ptr<FloquetBasis> b(new FloquetBasis());
  b->orbit_ = orbit_from_json(j.at("orbit"));
  b->custom_plant_ = false;

  IntegratorOptions opts;
  opts.rtol = b->orbit_.tol.integ_rtol;
  opts.atol = b->orbit_.tol.integ_atol;
  b->stm_ = propagate_stm(canonical_plant(b->orbit_), b->orbit_.epoch,
                          b->orbit_.period, opts);
  b->monodromy_ = b->stm_.final();

  b->structure_from_json(j);
  b->lti_.period = b->orbit_.period;
  b->lti_.vbar = unflatten_row_major(j.at("vbar"), "vbar");
  b->lti_.vbar_inv = b->lti_.vbar.fullPivLu().inverse();
  b->lti_.blocks = b->blocks_;
  b->lti_.kinds = b->kinds_;
  b->lti_.lambda = b->lambda_;

  // The stored structure must still describe the re-integrated flow.
  const Mat6 elt = b->lti_.exp_lambda(b->orbit_.period);
  const double err = (elt - b->monodromy_).cwiseAbs().maxCoeff();
  if (err > 1e-6 * (1.0 + b->monodromy_.cwiseAbs().maxCoeff())) {
    throw NumericalError(
        "basis JSON: stored modal structure does not reproduce the "
        "re-integrated monodromy matrix");
  }
  return b;
}

std::unique_ptr<ModalBasis> build_modal_basis(const PeriodicOrbit& orbit) {
  return std::make_unique<FloquetBasis>(orbit, canonical_plant(orbit), false);
}

std::unique_ptr<ModalBasis> build_modal_basis(const PeriodicOrbit& orbit,
                                              const PlantFn& plant) {
  return std::make_unique<FloquetBasis>(orbit, plant, true);
}

std::unique_ptr<ModalBasis> basis_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "floquet") return FloquetBasis::from_json(j);
  if (type == "cw") return cw_basis_from_json(j);
  if (type == "eccentric") return eccentric_basis_from_json(j);
  throw ValidationError("basis JSON: unknown basis type \"" + type + "\"");
}

}  // namespace modal
