#pragma once

#include "modal/modal_basis.hpp"

namespace modal {

/// Closed-form modal basis of the Clohessy-Wiltshire system. The plant is
/// already LTI, so the periodic transformation is identity and the basis
/// matrix is exact for all t. Columns: along-track offset, drift, in-plane
/// oscillation pair, out-of-plane pair.
class CwBasis : public ModalBasis {
 public:
  explicit CwBasis(double n, double mu = consts::mu_earth, double epoch = 0.0);

  Mat6 psi(double t) const override;
  nlohmann::json to_json() const override;

  double mean_motion() const { return n_; }

 private:
  double n_ = 0.0;
};

std::unique_ptr<ModalBasis> cw_basis(double n, double mu = consts::mu_earth,
                                     double epoch = 0.0);

/// Modal weights of a relative state at the basis epoch (closed form).
ModalConstants cw_constants(const LvlhState& x0, double n);

std::unique_ptr<ModalBasis> cw_basis_from_json(const nlohmann::json& j);

}  // namespace modal
