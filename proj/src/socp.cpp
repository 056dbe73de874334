#include "modal/socp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace modal {

namespace {

// Reduced problem: maximize dr.xi subject to ||gr[j]^T xi|| <= 1, xi in R^r,
// with ||dr|| ~ 1 and ||gr[j]|| <= 1 after scaling.
struct Reduced {
  std::vector<Eigen::MatrixXd> gr;
  Eigen::VectorXd dr;
  int rank = 0;

  double barrier(double t, const Eigen::VectorXd& xi) const {
    double f = -t * dr.dot(xi);
    for (const auto& g : gr) {
      const double s = (g.transpose() * xi).squaredNorm();
      if (s >= 1.0) {
        return std::numeric_limits<double>::infinity();
      }
      f -= std::log1p(-s);
    }
    return f;
  }

  /// Largest step with xi + a*dir strictly inside every cone.
  double max_step(const Eigen::VectorXd& xi, const Eigen::VectorXd& dir) const {
    double a_max = std::numeric_limits<double>::infinity();
    for (const auto& g : gr) {
      const Eigen::Vector3d u = g.transpose() * xi;
      const Eigen::Vector3d du = g.transpose() * dir;
      const double qa = du.squaredNorm();
      if (qa <= 0.0) {
        continue;
      }
      const double qb = u.dot(du);
      const double qc = u.squaredNorm() - 1.0;
      const double disc = std::max(qb * qb - qa * qc, 0.0);
      a_max = std::min(a_max, (-qb + std::sqrt(disc)) / qa);
    }
    return a_max;
  }
};

struct CenterResult {
  double gap_centered = 0.0;   // (2/t) sum u/(1+u), exact at a perfect center
  double defect = 0.0;         // ||dr - sum gr v|| of the recovered primal
  double objective = 0.0;      // dr.xi
};

/// Newton centering of the log-barrier at parameter t. Spends at most
/// `budget` steps; near the center the decrement floors at the level set by
/// the Hessian conditioning, which the caller absorbs via the certificate.
CenterResult center(const Reduced& red, double t, Eigen::VectorXd& xi,
                    int& steps, int budget) {
  const int r = red.rank;
  Eigen::VectorXd grad(r);
  Eigen::MatrixXd hess(r, r);
  for (int inner = 0; inner < budget; ++inner) {
    grad = -t * red.dr;
    hess.setZero();
    for (const auto& g : red.gr) {
      const Eigen::Vector3d u = g.transpose() * xi;
      const double w = 1.0 - u.squaredNorm();
      const Eigen::VectorXd gu = g * u;
      grad += (2.0 / w) * gu;
      hess += (2.0 / w) * (g * g.transpose()) +
              (4.0 / (w * w)) * (gu * gu.transpose());
    }
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    const double dec2 = -grad.dot(step);
    ++steps;
    if (!(dec2 > 1e-16)) {
      break;
    }
    double a = std::min(1.0, 0.99 * red.max_step(xi, step));
    if (dec2 > 0.09) {
      // Outside the quadratic basin: backtrack on the barrier value.
      const double f0 = red.barrier(t, xi);
      while (a > 1e-14 &&
             red.barrier(t, xi + a * step) > f0 - 0.25 * a * dec2) {
        a *= 0.5;
      }
    }
    xi += a * step;
  }

  CenterResult out;
  Eigen::VectorXd dfit = Eigen::VectorXd::Zero(r);
  for (const auto& g : red.gr) {
    const Eigen::Vector3d u = g.transpose() * xi;
    const double un = u.norm();
    out.gap_centered += (2.0 / t) * un / (1.0 + un);
    dfit += g * ((2.0 / t) * u / (1.0 - un * un));
  }
  out.defect = (red.dr - dfit).norm();
  out.objective = red.dr.dot(xi);
  return out;
}

/// Active-set KKT polish. Solves, by Newton iteration on the square system,
///   sum_{j in A} alpha_j gr_j yhat_j = dr,   ||gr_j^T xi|| = 1  (j in A)
/// with yhat_j the unit activation direction. Converges quadratically from
/// the path-following point, driving the duality gap to rounding level.
/// Returns false if the iteration stalls or goes rank-deficient.
bool polish(const Reduced& red, std::vector<int>& active, Eigen::VectorXd& xi,
            Eigen::VectorXd& alpha, int& steps, int budget) {
  const int r = red.rank;
  for (int pass = 0; pass < 12; ++pass) {
    const int na = static_cast<int>(active.size());
    if (na == 0 || steps >= budget) {
      return false;
    }
    Eigen::VectorXd f(r + na);
    Eigen::MatrixXd jac(r + na, r + na);
    bool converged = false;
    for (int it = 0; it < 25 && steps < budget; ++it) {
      f.setZero();
      jac.setZero();
      Eigen::VectorXd stat = -red.dr;
      for (int a = 0; a < na; ++a) {
        const auto& g = red.gr[active[a]];
        const Eigen::Vector3d u = g.transpose() * xi;
        const double un = u.norm();
        if (!(un > 1e-8)) {
          return false;
        }
        const Eigen::Vector3d yhat = u / un;
        stat += alpha[a] * (g * yhat);
        jac.block(0, 0, r, r) +=
            (alpha[a] / un) *
            (g * (Eigen::Matrix3d::Identity() - yhat * yhat.transpose()) *
             g.transpose());
        jac.block(0, r + a, r, 1) = g * yhat;
        jac.block(r + a, 0, 1, r) = (g * u).transpose();
        f[r + a] = 0.5 * (un * un - 1.0);
      }
      f.head(r) = stat;
      const double fnorm = f.norm();
      if (fnorm < 1e-13) {
        converged = true;
        break;
      }
      const Eigen::VectorXd dz = jac.colPivHouseholderQr().solve(-f);
      if (!dz.allFinite()) {
        return false;
      }
      xi += dz.head(r);
      alpha += dz.tail(na);
      ++steps;
    }
    if (!converged) {
      return false;
    }
    // Wrong active-set guesses show up as negative multipliers or as
    // violated inactive cones; amend the set and re-solve.
    int worst = -1;
    double worst_alpha = -1e-9;
    for (int a = 0; a < na; ++a) {
      if (alpha[a] < worst_alpha) {
        worst_alpha = alpha[a];
        worst = a;
      }
    }
    if (worst >= 0) {
      active.erase(active.begin() + worst);
      Eigen::VectorXd trimmed(alpha.size() - 1);
      int w = 0;
      for (int a = 0; a < alpha.size(); ++a) {
        if (a != worst) {
          trimmed[w++] = std::max(alpha[a], 0.0);
        }
      }
      alpha = trimmed;
      continue;
    }
    bool amended = false;
    for (int j = 0; j < static_cast<int>(red.gr.size()); ++j) {
      if (std::find(active.begin(), active.end(), j) != active.end()) {
        continue;
      }
      if ((red.gr[j].transpose() * xi).norm() > 1.0 + 1e-12) {
        active.push_back(j);
        Eigen::VectorXd grown(alpha.size() + 1);
        grown.head(alpha.size()) = alpha;
        grown[alpha.size()] = 0.0;
        alpha = grown;
        amended = true;
        break;
      }
    }
    if (!amended) {
      return true;
    }
  }
  return false;
}

}  // namespace

SocpSolution solve_socp(const std::vector<Mat63>& g, const Vec6& d,
                        const SocpOptions& opts) {
  if (g.empty()) {
    throw ValidationError("solve_socp: no cone constraints");
  }
  const double dnorm = d.norm();
  if (!(dnorm > 0.0)) {
    throw ValidationError("solve_socp: zero objective direction");
  }

  double gscale = 0.0;
  for (const auto& gj : g) {
    gscale = std::max(gscale, gj.norm());
  }
  if (!(gscale > 0.0)) {
    throw NumericalError(
        "solve_socp: all influence matrices vanish; target unreachable");
  }
  const Vec6 dh = d / dnorm;

  // Work in the range of sum g g^T; an objective component outside it rides
  // a direction no cone constrains, so the program is unbounded and the
  // primal target unreachable.
  Mat6 m = Mat6::Zero();
  for (const auto& gj : g) {
    const Mat63 gs = gj / gscale;
    m += gs * gs.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat6> es(m);
  const double lmax = es.eigenvalues().maxCoeff();
  int rank = 0;
  for (int i = 0; i < 6; ++i) {
    if (es.eigenvalues()[i] > 1e-12 * lmax) {
      ++rank;
    }
  }
  const Eigen::MatrixXd q = es.eigenvectors().rightCols(rank);
  if ((dh - q * (q.transpose() * dh)).norm() > 1e-9) {
    throw NumericalError(
        "solve_socp: objective direction leaves the influence range; target "
        "unreachable on this grid");
  }

  Reduced red;
  red.rank = rank;
  red.dr = q.transpose() * dh;
  red.gr.reserve(g.size());
  for (const auto& gj : g) {
    red.gr.push_back(q.transpose() * (gj / gscale));
  }
  Eigen::MatrixXd mr = Eigen::MatrixXd::Zero(rank, rank);
  for (const auto& gj : red.gr) {
    mr += gj * gj.transpose();
  }

  // Phase 1: follow the central path until the centered gap identifies the
  // active set. Unit scaling puts the optimum at dr.xi >= ||dr||^2 ~ 1.
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(rank);
  double t = 1.0;
  int steps = 0;
  CenterResult cr;
  while (true) {
    if (steps >= opts.max_iterations) {
      throw NumericalError(
          "solve_socp: iteration cap reached before the gap target");
    }
    cr = center(red, t, xi, steps, opts.max_iterations - steps);
    if (cr.gap_centered <= 1e-4 * std::max(1.0, std::abs(cr.objective))) {
      break;
    }
    t *= opts.t_factor;
  }

  // Phase 2: active-set polish to rounding level.
  std::vector<int> active;
  Eigen::VectorXd alpha;
  {
    std::vector<double> a0;
    for (int j = 0; j < static_cast<int>(red.gr.size()); ++j) {
      const Eigen::Vector3d u = red.gr[j].transpose() * xi;
      if (u.norm() >= 1.0 - 1e-3) {
        active.push_back(j);
        a0.push_back((2.0 / t) * u.norm() / (1.0 - u.squaredNorm()));
      }
    }
    alpha = Eigen::Map<Eigen::VectorXd>(a0.data(), a0.size());
  }
  Eigen::VectorXd xi_p = xi;
  const bool polished =
      polish(red, active, xi_p, alpha, steps, opts.max_iterations);

  double gap_scaled;
  double obj_scaled;
  if (polished) {
    xi = xi_p;
    // Exact dual feasibility by a final scalar shrink, then certify with
    // the polished multipliers as the primal witness.
    double act_max = 0.0;
    for (const auto& gj : red.gr) {
      act_max = std::max(act_max, (gj.transpose() * xi).norm());
    }
    if (act_max > 1.0) {
      xi /= act_max;
    }
    obj_scaled = red.dr.dot(xi);
    Eigen::VectorXd stat = -red.dr;
    double primal = 0.0;
    for (int a = 0; a < static_cast<int>(active.size()); ++a) {
      const auto& gj = red.gr[active[a]];
      const Eigen::Vector3d u = gj.transpose() * xi;
      stat += alpha[a] * (gj * (u / u.norm()));
      primal += alpha[a];
    }
    gap_scaled = std::max(primal - obj_scaled + stat.norm() * xi.norm(), 0.0);
  } else {
    // Fallback: keep following the path and certify with a least-squares
    // feasibility repair of the recovered primal point.
    const Eigen::LDLT<Eigen::MatrixXd> mr_ldlt(mr);
    while (true) {
      obj_scaled = cr.objective;
      std::vector<Eigen::Vector3d> v(red.gr.size());
      Eigen::VectorXd dfit = Eigen::VectorXd::Zero(rank);
      for (size_t j = 0; j < red.gr.size(); ++j) {
        const Eigen::Vector3d u = red.gr[j].transpose() * xi;
        v[j] = (2.0 / t) * u / (1.0 - u.squaredNorm());
        dfit += red.gr[j] * v[j];
      }
      const Eigen::VectorXd corr = mr_ldlt.solve(red.dr - dfit);
      double primal = 0.0;
      for (size_t j = 0; j < red.gr.size(); ++j) {
        primal += (v[j] + red.gr[j].transpose() * corr).norm();
      }
      gap_scaled = std::max(primal - obj_scaled, 0.0);
      if (gap_scaled <=
          opts.gap_rel * std::max(1.0, std::abs(obj_scaled))) {
        break;
      }
      if (steps >= opts.max_iterations) {
        throw NumericalError(
            "solve_socp: iteration cap reached before the gap target");
      }
      t *= opts.t_factor;
      cr = center(red, t, xi, steps, opts.max_iterations - steps);
    }
  }

  SocpSolution sol;
  sol.eta = q * xi / gscale;
  sol.objective = d.dot(sol.eta);
  sol.gap = gap_scaled * dnorm / gscale;
  sol.iterations = steps;
  sol.activation.reserve(g.size());
  for (const auto& gj : g) {
    sol.activation.push_back((gj.transpose() * sol.eta).norm());
  }
  return sol;
}

}  // namespace modal
