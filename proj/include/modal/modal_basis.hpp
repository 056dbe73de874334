#pragma once

#include <array>
#include <memory>
#include <vector>

#include <json.hpp>

#include "modal/lti.hpp"
#include "modal/monodromy.hpp"
#include "modal/periodic_orbit.hpp"
#include "modal/stm.hpp"

namespace modal {

/// Weights of the fundamental modal solutions, x(t) = Psi(t) c, and the time
/// they were extracted at. For unforced motion c is constant; under forcing
/// the weights become the osculating state.
struct ModalConstants {
  Vec6 c = Vec6::Zero();
  double epoch = 0.0;
};

/// Six fundamental modal solutions of linearized relative motion about a
/// periodic chief orbit. Columns of psi(t) are stored raw (as constructed);
/// the normalized views divide each column by its peak position excursion
/// over one chief period, so normalized constants carry the motion scale.
class ModalBasis {
 public:
  virtual ~ModalBasis() = default;

  const PeriodicOrbit& orbit() const { return orbit_; }
  double epoch() const { return orbit_.epoch; }
  double period() const { return orbit_.period; }

  /// Basis matrix Psi(t); valid for any t (periodicity handled internally).
  virtual Mat6 psi(double t) const = 0;
  virtual Mat6 psi_inverse(double t) const;

  ModalConstants constants_from_state(const LvlhState& x, double t) const;
  LvlhState state_from_constants(const Vec6& c, double t) const;
  LvlhState state_from_constants(const ModalConstants& mc, double t) const {
    return state_from_constants(mc.c, t);
  }

  Mat6 psi_normalized(double t) const;
  /// cbar_i = c_i * N_i; invariant under rescaling of the raw columns.
  Vec6 normalized_constants(const Vec6& c) const;
  Vec6 raw_from_normalized(const Vec6& cbar) const;

  const std::array<ModeKind, 6>& kinds() const { return kinds_; }
  const std::vector<ModeBlock>& blocks() const { return blocks_; }
  /// Peak position norm of each raw mode over one chief period.
  const Vec6& normalization() const { return norms_; }
  /// Constant-coefficient generator: exp(Lambda T) is the monodromy matrix.
  const Mat6& lambda_matrix() const { return lambda_; }

  virtual nlohmann::json to_json() const = 0;

 protected:
  ModalBasis() = default;
  /// Scans each mode over one period and refines the peak position norm to
  /// ~1e-10 relative; endpoints included (drift modes peak there).
  void compute_normalization();
  /// Shared serialization of the modal structure (blocks, kinds, Lambda,
  /// normalization factors).
  nlohmann::json structure_to_json() const;
  void structure_from_json(const nlohmann::json& j);

  PeriodicOrbit orbit_;
  std::array<ModeKind, 6> kinds_{};
  std::vector<ModeBlock> blocks_;
  Mat6 lambda_ = Mat6::Zero();
  Vec6 norms_ = Vec6::Ones();
};

/// Numerically constructed basis: integrates the STM over one period,
/// classifies the monodromy matrix, and evaluates
///   Psi(t) = Phi(s) Vbar exp(K kT),  t - t0 = kT + s, s in [0, T),
/// which stays continuous across period boundaries and keeps the unstable
/// growth in the analytic factor.
class FloquetBasis : public ModalBasis {
 public:
  FloquetBasis(const PeriodicOrbit& orbit, const PlantFn& plant,
               bool custom_plant = true);

  Mat6 psi(double t) const override;
  Mat6 psi_inverse(double t) const override;
  nlohmann::json to_json() const override;

  const LtiForm& lti() const { return lti_; }
  const Mat6& monodromy() const { return monodromy_; }
  /// One-period transition matrix Phi(t0 + tau, t0), tau in [0, T].
  Mat6 stm(double tau) const;
  /// The cached dense STM over one period (input to lf_transform).
  const StmSolution& stm_cache() const { return stm_; }

  /// Rebuilds from JSON: the STM is re-integrated deterministically and the
  /// stored modal structure is reused verbatim, so evaluations reproduce the
  /// original to full precision. Custom-plant bases cannot be rebuilt.
  static std::unique_ptr<FloquetBasis> from_json(const nlohmann::json& j);

 private:
  FloquetBasis() = default;
  void split_span(double t, int* periods, double* offset) const;

  StmSolution stm_;
  Mat6 monodromy_ = Mat6::Identity();
  LtiForm lti_;
  bool custom_plant_ = false;
};

/// Basis over the plant implied by the orbit kind (two-body LVLH plant for
/// keplerian chiefs, rotating-frame jacobian for CR3BP chiefs).
std::unique_ptr<ModalBasis> build_modal_basis(const PeriodicOrbit& orbit);
/// Basis over a caller-supplied plant A(t) (must be T-periodic).
std::unique_ptr<ModalBasis> build_modal_basis(const PeriodicOrbit& orbit,
                                              const PlantFn& plant);

/// Factory over the serialized form of any basis type.
std::unique_ptr<ModalBasis> basis_from_json(const nlohmann::json& j);

}  // namespace modal
