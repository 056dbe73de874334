#include "modal/lti.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

namespace modal {

Mat6 LtiForm::exp_k(double tau) const {
  Mat6 e = Mat6::Zero();
  for (const ModeBlock& b : blocks) {
    e.block(b.col, b.col, b.size, b.size) =
        b.exp_k(tau).topLeftCorner(b.size, b.size);
  }
  return e;
}

Mat6 LtiForm::exp_lambda(double tau) const {
  return vbar * exp_k(tau) * vbar_inv;
}

LtiForm compute_lti(const MonodromyAnalysis& analysis) {
  LtiForm lti;
  lti.period = analysis.period;
  lti.vbar = analysis.vbar;
  lti.blocks = analysis.blocks;
  lti.kinds = analysis.kinds;

  Eigen::JacobiSVD<Mat6> svd(lti.vbar,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double cond =
      svd.singularValues()[0] / svd.singularValues()[5];
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "compute_lti: basis condition number " << cond
        << " is too large to invert reliably";
    throw NumericalError(msg.str());
  }
  lti.vbar_inv = lti.vbar.fullPivLu().inverse();

  Mat6 k = Mat6::Zero();
  for (const ModeBlock& b : lti.blocks) {
    k.block(b.col, b.col, b.size, b.size) = b.k.topLeftCorner(b.size, b.size);
  }
  lti.lambda = lti.vbar * k * lti.vbar_inv;

  const Mat6 elt = lti.exp_lambda(lti.period);
  const double err = (elt - analysis.phi).cwiseAbs().maxCoeff();
  if (err > 1e-6 * (1.0 + analysis.phi.cwiseAbs().maxCoeff())) {
    std::ostringstream msg;
    msg << "compute_lti: exp(Lambda T) misses the monodromy matrix by " << err;
    throw NumericalError(msg.str());
  }
  return lti;
}

Mat6 lf_transform(const StmSolution& stm, const LtiForm& lti, double t) {
  if (!(lti.period > 0.0)) {
    throw ValidationError("lf_transform: LTI form has no period");
  }
  if (stm.t_end() - stm.t_begin() < lti.period * (1.0 - 1e-12)) {
    throw ValidationError("lf_transform: STM cache shorter than one period");
  }
  double s = std::fmod(t - stm.t_begin(), lti.period);
  if (s < 0.0) s += lti.period;
  // Half-ulp spill past the cache end maps back to the start of the period.
  if (stm.t_begin() + s > stm.t_end()) s = 0.0;
  return stm.at(stm.t_begin() + s) * lti.exp_lambda(-s);
}

}  // namespace modal
