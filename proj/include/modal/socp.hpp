#pragma once

#include <vector>

#include "modal/types.hpp"

namespace modal {

struct SocpOptions {
  /// Relative duality-gap target.
  double gap_rel = 1e-9;
  /// Hard cap on Newton iterations across the whole path.
  int max_iterations = 200;
  /// Barrier parameter growth per outer step.
  double t_factor = 10.0;
};

struct SocpSolution {
  Vec6 eta = Vec6::Zero();
  /// d . eta at the solution.
  double objective = 0.0;
  /// Certified primal-dual gap (same units as the objective).
  double gap = 0.0;
  /// ||g_j^T eta|| per cone; active constraints sit at 1.
  std::vector<double> activation;
  int iterations = 0;
};

/// maximize d.eta subject to ||g_j^T eta|| <= 1 for every j.
///
/// Interior-point path-follower on the 6-variable dual: log-barrier Newton
/// centering with analytic primal recovery at each centered point (the
/// stationarity condition yields a primal-feasible cone decomposition of d,
/// giving a certified duality gap at every outer step). The problem is
/// solved in the range of sum g_j g_j^T; a component of d outside that
/// range makes the program unbounded and throws NumericalError (the target
/// is unreachable with these influence directions).
SocpSolution solve_socp(const std::vector<Mat63>& g, const Vec6& d,
                        const SocpOptions& opts = {});

}  // namespace modal
