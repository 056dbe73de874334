#include "modal/corrector.hpp"

#include <cmath>
#include <vector>

#include "modal/cr3bp.hpp"
#include "modal/integrate.hpp"

namespace modal {

namespace {

// Joint state + STM flow in the CR3BP (42 components).
void variational_rhs(double mu, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
  const Vec6 x = y.head<6>();
  const Mat6 a = cr3bp::jacobian(mu, x);
  dy.resize(42);
  dy.head<6>() = cr3bp::rhs(mu, x);
  Eigen::Map<const Mat6> phi(y.data() + 6);
  Eigen::Map<Mat6> dphi(dy.data() + 6);
  dphi = a * phi;
}

struct HalfPeriodCrossing {
  double t;
  Vec6 state;
  Mat6 stm;
  Vec6 rate;
};

// Integrate from a perpendicular crossing to the next y = 0 crossing.
HalfPeriodCrossing to_next_crossing(double mu, const Vec6& x0,
                                    double t_guess) {
  Eigen::VectorXd y0(42);
  y0.head<6>() = x0;
  Eigen::Map<Mat6>(y0.data() + 6) = Mat6::Identity();

  IntegratorOptions opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-12;
  auto rhs = [mu](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    variational_rhs(mu, y, dy);
  };

  // The crossing must stay near t_guess. A wider search could latch onto a
  // later crossing of some other orbit and silently converge to it; failing
  // here instead lets the family walk shorten its continuation step.
  const double span = 1.6 * t_guess;
  DenseSolution sol = integrate(rhs, y0, 0.0, span, opts);
  double t_event = 0.0;
  const bool found = find_event(
      sol, [](double, const Eigen::VectorXd& y) { return y[1]; },
      0.05 * t_guess, span, &t_event);
  if (!found) {
    throw NumericalError("correct_halo: no x-z plane crossing near the guess");
  }
  HalfPeriodCrossing c;
  c.t = t_event;
  const Eigen::VectorXd ye = sol.eval(t_event);
  c.state = ye.head<6>();
  c.stm = Eigen::Map<const Mat6>(ye.data() + 6);
  c.rate = cr3bp::rhs(mu, c.state);
  return c;
}

// Family point in the reduced coordinates u = (x0, z0, ydot0) of a
// perpendicular crossing.
struct FamilyPoint {
  Eigen::Vector3d u;
  double half_period;
  double period() const { return 2.0 * half_period; }
};

Vec6 expand(const Eigen::Vector3d& u) {
  Vec6 x = Vec6::Zero();
  x[0] = u[0];
  x[2] = u[1];
  x[4] = u[2];
  return x;
}

// Newton solve for a perpendicular-to-perpendicular orbit subject to one
// linear constraint normal^T (u - anchor) = 0. The constraint plane is what
// distinguishes fixed-amplitude correction (normal = e_z) from a
// pseudo-arclength step (normal = family tangent); the plane lets the walk
// pass folds where the family is not a graph over any single coordinate.
FamilyPoint solve_on_plane(double mu, const Eigen::Vector3d& guess,
                           const Eigen::Vector3d& normal,
                           const Eigen::Vector3d& anchor, double t_half_guess,
                           double tol = 1e-12, int* iterations_out = nullptr) {
  Eigen::Vector3d u = guess;
  double t_half = t_half_guess;
  for (int it = 0; it < 30; ++it) {
    const HalfPeriodCrossing c = to_next_crossing(mu, expand(u), t_half);
    t_half = c.t;
    const double g1 = c.state[3];
    const double g2 = c.state[5];
    const double g3 = normal.dot(u - anchor);
    const double vel_scale = std::max(1.0, c.state.tail<3>().norm());
    if (std::abs(g1) < tol * vel_scale && std::abs(g2) < tol * vel_scale &&
        std::abs(g3) < 1e-12) {
      if (iterations_out) *iterations_out = it + 1;
      return {u, t_half};
    }
    const double ydote = c.rate[1];
    if (std::abs(ydote) < 1e-12) {
      throw NumericalError("correct_halo: tangential plane crossing");
    }
    const double xdde = c.rate[3];
    const double zdde = c.rate[5];
    Eigen::Matrix3d jac;
    const int cols[3] = {0, 2, 4};
    for (int j = 0; j < 3; ++j) {
      jac(0, j) = c.stm(3, cols[j]) - xdde / ydote * c.stm(1, cols[j]);
      jac(1, j) = c.stm(5, cols[j]) - zdde / ydote * c.stm(1, cols[j]);
      jac(2, j) = normal[j];
    }
    Eigen::Vector3d step = jac.fullPivLu().solve(Eigen::Vector3d{g1, g2, g3});
    if (!step.allFinite()) {
      throw NumericalError("correct_halo: singular correction system");
    }
    // Damp large steps; a full step from a poor guess can leave the basin.
    const double cap = 0.02;
    if (step.norm() > cap) step *= cap / step.norm();
    u -= step;
  }
  throw NumericalError("correct_halo: corrector did not converge");
}

}  // namespace

HaloSeed halo_seed(double mu, int point, double z_amplitude_lu, bool northern) {
  const double xl = cr3bp::libration_point_x(mu, point);
  const double gamma =
      (point == 1) ? (1.0 - mu) - xl : xl - (1.0 - mu);

  auto cn = [&](int n) -> double {
    if (point == 1) {
      return (mu + std::pow(-1.0, n) * (1.0 - mu) * std::pow(gamma, n + 1) /
                       std::pow(1.0 - gamma, n + 1)) /
             (gamma * gamma * gamma);
    }
    return (std::pow(-1.0, n) * mu +
            std::pow(-1.0, n) * (1.0 - mu) * std::pow(gamma, n + 1) /
                std::pow(1.0 + gamma, n + 1)) /
           (gamma * gamma * gamma);
  };
  const double c2 = cn(2), c3 = cn(3), c4 = cn(4);

  const double lam2 =
      0.5 * (2.0 - c2 + std::sqrt((c2 - 2.0) * (c2 - 2.0) +
                                  4.0 * (c2 - 1.0) * (1.0 + 2.0 * c2)));
  const double lam = std::sqrt(lam2);
  const double k = (lam2 + 1.0 + 2.0 * c2) / (2.0 * lam);
  const double del = lam2 - c2;

  const double d1 = 3.0 * lam2 / k * (k * (6.0 * lam2 - 1.0) - 2.0 * lam);
  const double d2 = 8.0 * lam2 / k * (k * (11.0 * lam2 - 1.0) - 2.0 * lam);
  const double a21 = 3.0 * c3 * (k * k - 2.0) / (4.0 * (1.0 + 2.0 * c2));
  const double a22 = 3.0 * c3 / (4.0 * (1.0 + 2.0 * c2));
  const double a23 = -3.0 * c3 * lam / (4.0 * k * d1) *
                     (3.0 * k * k * k * lam - 6.0 * k * (k - lam) + 4.0);
  const double a24 =
      -3.0 * c3 * lam / (4.0 * k * d1) * (2.0 + 3.0 * k * lam);
  const double b21 = -3.0 * c3 * lam / (2.0 * d1) * (3.0 * k * lam - 4.0);
  const double b22 = 3.0 * c3 * lam / d1;
  const double d21 = -c3 / (2.0 * lam2);
  const double a31 =
      -9.0 * lam / (4.0 * d2) *
          (4.0 * c3 * (k * a23 - b21) + k * c4 * (4.0 + k * k)) +
      (9.0 * lam2 + 1.0 - c2) / (2.0 * d2) *
          (3.0 * c3 * (2.0 * a23 - k * b21) + c4 * (2.0 + 3.0 * k * k));
  const double a32 =
      -1.0 / d2 *
      (9.0 * lam / 4.0 * (4.0 * c3 * (k * a24 - b22) + k * c4) +
       1.5 * (9.0 * lam2 + 1.0 - c2) *
           (c3 * (k * b22 + d21 - 2.0 * a24) - c4));
  const double b31 =
      3.0 / (8.0 * d2) *
      (8.0 * lam * (3.0 * c3 * (k * b21 - 2.0 * a23) - c4 * (2.0 + 3.0 * k * k)) +
       (9.0 * lam2 + 1.0 + 2.0 * c2) *
           (4.0 * c3 * (k * a23 - b21) + k * c4 * (4.0 + k * k)));
  const double b32 =
      1.0 / d2 *
      (9.0 * lam * (c3 * (k * b22 + d21 - 2.0 * a24) - c4) +
       3.0 / 8.0 * (9.0 * lam2 + 1.0 + 2.0 * c2) *
           (4.0 * c3 * (k * a24 - b22) + k * c4));
  const double d31 = 3.0 / (64.0 * lam2) * (4.0 * c3 * a24 + c4);
  const double d32 =
      3.0 / (64.0 * lam2) * (4.0 * c3 * (a23 - d21) + c4 * (4.0 + k * k));
  const double denom = 2.0 * lam * (lam * (1.0 + k * k) - 2.0 * k);
  const double s1 =
      (1.5 * c3 * (2.0 * a21 * (k * k - 2.0) - a23 * (k * k + 2.0) -
                   2.0 * k * b21) -
       3.0 / 8.0 * c4 * (3.0 * k * k * k * k - 8.0 * k * k + 8.0)) /
      denom;
  const double s2 =
      (1.5 * c3 * (2.0 * a22 * (k * k - 2.0) + a24 * (k * k + 2.0) +
                   2.0 * k * b22 + 5.0 * d21) +
       3.0 / 8.0 * c4 * (12.0 - k * k)) /
      denom;
  const double a1 = -1.5 * c3 * (2.0 * a21 + a23 + 5.0 * d21) -
                    3.0 / 8.0 * c4 * (12.0 - k * k);
  const double a2 = 1.5 * c3 * (a24 - 2.0 * a22) + 9.0 / 8.0 * c4;
  const double l1 = a1 + 2.0 * lam2 * s1;
  const double l2 = a2 + 2.0 * lam2 * s2;

  const double az = z_amplitude_lu / gamma;
  const double ax2 = -(l2 * az * az + del) / l1;
  if (ax2 <= 0.0) {
    throw NumericalError("halo_seed: no in-plane amplitude at this z");
  }
  const double ax = std::sqrt(ax2);
  const double nu = 1.0 + s1 * ax2 + s2 * az * az;
  const double dn = northern ? 1.0 : -1.0;

  // tau1 = 0: perpendicular crossing.
  const double x =
      a21 * ax2 + a22 * az * az - ax + (a23 * ax2 - a24 * az * az) +
      (a31 * ax2 * ax - a32 * ax * az * az);
  const double z =
      dn * (az + d21 * ax * az * (1.0 - 3.0) + (d32 * az * ax2 - d31 * az * az * az));
  const double ydot =
      lam * nu *
      (k * ax + 2.0 * (b21 * ax2 - b22 * az * az) +
       3.0 * (b31 * ax2 * ax - b32 * ax * az * az));

  HaloSeed seed;
  seed.state = Vec6::Zero();
  seed.state[0] = xl + gamma * x;
  seed.state[2] = gamma * z;
  seed.state[4] = gamma * ydot;
  seed.period = 2.0 * consts::pi / (lam * nu);
  seed.z_amplitude = z_amplitude_lu;
  return seed;
}

CorrectedOrbit correct_halo(double mu, const Vec6& guess, double period_guess,
                            double tol) {
  const Eigen::Vector3d g{guess[0], guess[2], guess[4]};
  int iterations = 0;
  const FamilyPoint p = solve_on_plane(mu, g, Eigen::Vector3d::UnitY(), g,
                                       0.5 * period_guess, tol, &iterations);
  const Vec6 x0 = expand(p.u);

  // Full-period closure check.
  const double period = p.period();
  IntegratorOptions opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-12;
  DenseSolution sol = integrate(
      [mu](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        dy = cr3bp::rhs(mu, Vec6(y));
      },
      x0, 0.0, period, opts);
  const double closure = (Vec6(sol.eval(period)) - x0).norm();
  if (closure > 1e-8) {
    throw NumericalError("correct_halo: full-period closure failed");
  }

  CorrectedOrbit out;
  out.state = x0;
  out.period = period;
  out.closure_error = closure;
  out.iterations = iterations;
  return out;
}

PeriodicOrbit find_halo_orbit(const HaloTarget& target) {
  if (target.period <= 0.0) {
    throw ValidationError("find_halo_orbit: target period must be positive");
  }
  const double mu = target.mass_ratio;
  const double zsign = target.northern ? 1.0 : -1.0;
  const Eigen::Vector3d zpin = Eigen::Vector3d::UnitY();  // u = (x0, z0, yd0)
  int solves = 0;

  // Two fixed-amplitude startup points near the planar end of the family.
  auto start_at = [&](double z_lu) {
    const HaloSeed seed = halo_seed(mu, target.point, z_lu, target.northern);
    Eigen::Vector3d g{seed.state[0], zsign * z_lu, seed.state[4]};
    ++solves;
    return solve_on_plane(mu, g, zpin, g, 0.5 * seed.period);
  };
  FamilyPoint prev = start_at(target.z_start);
  FamilyPoint curr = start_at(target.z_start + target.z_step);

  const auto miss = [&](const FamilyPoint& p) {
    return p.period() - target.period;
  };

  // Pseudo-arclength walk until the target period is bracketed. The first
  // bracket wins, so when two members share the period the one nearer the
  // planar end is selected.
  double ds = (curr.u - prev.u).norm();
  const double ds_max = 8.0 * ds;
  FamilyPoint lo = prev, hi = curr;
  bool bracketed = miss(prev) * miss(curr) <= 0.0;
  for (int step_count = 0; !bracketed; ++step_count) {
    if (step_count > 4000) {
      throw NumericalError(
          "find_halo_orbit: target period not found on family segment");
    }
    Eigen::Vector3d tangent = (curr.u - prev.u).normalized();
    const Eigen::Vector3d pred = curr.u + ds * tangent;
    FamilyPoint next;
    try {
      next = solve_on_plane(mu, pred, tangent, pred,
                            curr.half_period +
                                (curr.half_period - prev.half_period) * ds /
                                    (curr.u - prev.u).norm());
      ++solves;
    } catch (const NumericalError&) {
      ds *= 0.5;
      if (ds < 1e-8) throw;
      continue;
    }
    // Leaving the branch (z0 through zero) means the period was never hit.
    if (next.u[1] * zsign <= 0.0 || std::abs(next.u[1]) > target.z_max) {
      throw NumericalError(
          "find_halo_orbit: target period not found on family segment");
    }
    if (miss(curr) * miss(next) <= 0.0) {
      lo = curr;
      hi = next;
      bracketed = true;
    }
    prev = curr;
    curr = next;
    ds = std::min(ds * 1.4, ds_max);
  }

  // Bisection along the bracketing chord; each midpoint is re-corrected onto
  // the family, so the chord coordinate stays a valid family parameter.
  FamilyPoint best = std::abs(miss(lo)) < std::abs(miss(hi)) ? lo : hi;
  for (int it = 0; std::abs(miss(best)) > target.period_tol && it < 80; ++it) {
    if ((hi.u - lo.u).norm() < 1e-14) break;
    const Eigen::Vector3d tangent = (hi.u - lo.u).normalized();
    const Eigen::Vector3d mid_pred = 0.5 * (lo.u + hi.u);
    FamilyPoint mid = solve_on_plane(mu, mid_pred, tangent, mid_pred,
                                     0.5 * (lo.half_period + hi.half_period));
    ++solves;
    if (miss(lo) * miss(mid) <= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    best = std::abs(miss(mid)) < std::abs(miss(best)) ? mid : best;
  }
  if (std::abs(miss(best)) > target.period_tol) {
    throw NumericalError("find_halo_orbit: period bisection stalled");
  }

  // Closure and final state via the public corrector (also re-verifies).
  // Tightest practical tolerance: the monodromy unity-pair splitting grows
  // as the square root of the closure error, so the classifier needs the
  // orbit closed as far as double precision allows.
  CorrectedOrbit fin = correct_halo(mu, expand(best.u), best.period(), 1e-13);
  ++solves;

  // Canonical anchor: the perpendicular crossing with negative y-velocity.
  // The two crossings of a halo orbit sit half a period apart; modal
  // constants and maneuver times are only comparable between runs when every
  // run epochs the orbit at the same one.
  if (fin.state[4] > 0.0) {
    const HalfPeriodCrossing other =
        to_next_crossing(mu, fin.state, 0.5 * fin.period);
    const Eigen::Vector3d u2{other.state[0], other.state[2], other.state[4]};
    fin = correct_halo(mu, expand(u2), fin.period, 1e-13);
    ++solves;
  }
  // Hemisphere by mirror symmetry: northern members have z > 0 at the
  // canonical anchor. z -> -z maps solutions to solutions, so this costs
  // nothing and never disturbs the corrected state.
  if ((fin.state[2] > 0.0) != target.northern) {
    fin.state[2] = -fin.state[2];
  }

  PeriodicOrbit orbit;
  orbit.kind = PeriodicOrbit::Kind::cr3bp;
  orbit.mu = mu;
  orbit.epoch = 0.0;
  orbit.initial_state = fin.state;
  orbit.period = fin.period;
  orbit.tol.period_match = target.period_tol;
  orbit.metadata = {
      {"generator", "halo-continuation"},
      {"libration_point", target.point},
      {"branch", target.northern ? "northern" : "southern"},
      {"z_amplitude_lu", std::abs(fin.state[2])},
      {"closure_error", fin.closure_error},
      {"corrector_solves", solves},
      {"target_period", target.period}};
  return orbit;
}

}  // namespace modal
