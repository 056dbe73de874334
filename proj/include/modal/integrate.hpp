#pragma once

#include <functional>
#include <vector>

#include "modal/types.hpp"

namespace modal {

using OdeRhs =
    std::function<void(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;

struct IntegratorOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  double h_initial = 0.0;  // 0 = choose automatically
  double h_max = 0.0;      // 0 = span
  long max_steps = 20'000'000;
};

/// Continuous solution from one adaptive Dormand-Prince 5(4) run.
/// Stores the quartic interpolation polynomial of every accepted step;
/// evaluation anywhere in [t0, t1] is O(log steps). Evaluation is
/// read-only and safe to share across threads.
class DenseSolution {
 public:
  double t_begin() const { return t0_; }
  double t_end() const { return t1_; }
  int dim() const { return dim_; }

  Eigen::VectorXd eval(double t) const;
  /// Single component (avoids a full-vector allocation in hot loops).
  double eval_component(double t, int i) const;
  /// Accepted step boundaries (useful for event scans).
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t step_count() const { return nodes_.empty() ? 0 : nodes_.size() - 1; }

 private:
  friend DenseSolution integrate(const OdeRhs&, const Eigen::VectorXd&, double,
                                 double, const IntegratorOptions&);
  std::size_t locate(double t) const;

  double t0_ = 0.0, t1_ = 0.0;
  int dim_ = 0;
  std::vector<double> nodes_;            // size steps+1
  std::vector<Eigen::VectorXd> rcont_;   // 5 polynomials per step
};

/// Integrate dy/dt = f(t, y) from t0 to t1 (t1 > t0) with the embedded
/// Dormand-Prince 5(4) pair and PI step control.
DenseSolution integrate(const OdeRhs& f, const Eigen::VectorXd& y0, double t0,
                        double t1, const IntegratorOptions& opts = {});

/// First root of g(t, y(t)) in (t_lo, t_hi], located by scanning the accepted
/// steps for a sign change and refining by bisection on the dense output.
/// Returns false if g does not change sign.
bool find_event(const DenseSolution& sol,
                const std::function<double(double, const Eigen::VectorXd&)>& g,
                double t_lo, double t_hi, double* t_event,
                double tol = 1e-13);

}  // namespace modal
