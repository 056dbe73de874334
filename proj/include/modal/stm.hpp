#pragma once

#include <functional>

#include "modal/integrate.hpp"
#include "modal/types.hpp"

namespace modal {

/// Time-varying plant of a linear relative-motion system.
using PlantFn = std::function<Mat6(double t)>;

/// Dense state-transition matrix history Phi(t, t0) over one interval,
/// produced by integrating dPhi/dt = A(t) Phi columnwise as a 36-dim system.
/// Evaluation is read-only and safe to share across threads.
class StmSolution {
 public:
  StmSolution() = default;

  double t_begin() const { return flow_.t_begin(); }
  double t_end() const { return flow_.t_end(); }

  Mat6 at(double t) const;

  /// Phi(t_end, t_begin); for a periodic plant over one period this is the
  /// monodromy matrix.
  Mat6 final() const { return at(flow_.t_end()); }

  const DenseSolution& flow() const { return flow_; }

 private:
  friend StmSolution propagate_stm(const PlantFn&, double, double,
                                   const IntegratorOptions&);
  DenseSolution flow_;
};

/// Integrate Phi(t, t0) from identity over [t0, t0 + span].
StmSolution propagate_stm(const PlantFn& a, double t0, double span,
                          const IntegratorOptions& opts = {});

/// Integrate one trajectory of dx/dt = A(t) x (used by oracles and the
/// variation-of-parameters residual checks).
DenseSolution integrate_linear(const PlantFn& a, const Vec6& x0, double t0,
                               double t1, const IntegratorOptions& opts = {});

}  // namespace modal
