#pragma once

#include <vector>

#include "modal/monodromy.hpp"
#include "modal/stm.hpp"
#include "modal/types.hpp"

namespace modal {

/// Constant-coefficient form extracted from a monodromy analysis:
/// Lambda = Vbar K Vbar^-1 with exp(Lambda T) equal to the monodromy matrix.
struct LtiForm {
  double period = 0.0;
  Mat6 lambda = Mat6::Zero();
  Mat6 vbar = Mat6::Identity();
  Mat6 vbar_inv = Mat6::Identity();
  std::vector<ModeBlock> blocks;
  std::array<ModeKind, 6> kinds{};

  /// Block-diagonal exp(K tau), assembled from the analytic block forms.
  Mat6 exp_k(double tau) const;

  /// exp(Lambda tau) = Vbar exp(K tau) Vbar^-1.
  Mat6 exp_lambda(double tau) const;
};

/// Builds the LTI form and verifies exp(Lambda T) against the monodromy
/// matrix. Rejects bases too ill-conditioned to invert reliably.
LtiForm compute_lti(const MonodromyAnalysis& analysis);

/// Periodic coordinate change P(t) = Phi(t, t0) exp(-Lambda (t - t0)).
/// t - t0 is wrapped into [0, T) before evaluation, so P is periodic by
/// construction and P(t0 + kT) = I exactly; the residual of the unwrapped
/// product at t0 + T equals the monodromy closure defect and is reported by
/// compute_lti instead. The cached STM must cover one full period.
Mat6 lf_transform(const StmSolution& stm, const LtiForm& lti, double t);

}  // namespace modal
