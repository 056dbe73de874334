#include "modal/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace modal {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// b - bhat (error weights).
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

double initial_step(const OdeRhs& f, double t0, const Eigen::VectorXd& y0,
                    const Eigen::VectorXd& f0, double rtol, double atol,
                    double span) {
  const auto sc = (atol + rtol * y0.cwiseAbs().array()).matrix().eval();
  const double d0 = (y0.cwiseQuotient(sc)).norm();
  const double d1n = (f0.cwiseQuotient(sc)).norm();
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);

  Eigen::VectorXd y1 = y0 + h0 * f0;
  Eigen::VectorXd f1(y0.size());
  f(t0 + h0, y1, f1);
  const double d2 = ((f1 - f0).cwiseQuotient(sc)).norm() / h0;
  const double dm = std::max(d1n, d2);
  double h1 = (dm <= 1e-15) ? std::max(1e-6 * span, h0 * 1e-3)
                            : std::pow(0.01 / dm, 0.2);
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

std::size_t DenseSolution::locate(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = (it == nodes_.begin()) ? 0 : (it - nodes_.begin() - 1);
  return std::min(k, nodes_.size() - 2);
}

Eigen::VectorXd DenseSolution::eval(double t) const {
  const std::size_t k = locate(t);
  const double h = nodes_[k + 1] - nodes_[k];
  const double th = (t - nodes_[k]) / h;
  const Eigen::VectorXd* r = &rcont_[5 * k];
  return r[0] +
         th * (r[1] + (1.0 - th) * (r[2] + th * (r[3] + (1.0 - th) * r[4])));
}

double DenseSolution::eval_component(double t, int i) const {
  const std::size_t k = locate(t);
  const double h = nodes_[k + 1] - nodes_[k];
  const double th = (t - nodes_[k]) / h;
  const Eigen::VectorXd* r = &rcont_[5 * k];
  return r[0][i] + th * (r[1][i] + (1.0 - th) * (r[2][i] +
                                                 th * (r[3][i] +
                                                       (1.0 - th) * r[4][i])));
}

DenseSolution integrate(const OdeRhs& f, const Eigen::VectorXd& y0, double t0,
                        double t1, const IntegratorOptions& opts) {
  if (!(t1 > t0)) throw ValidationError("integrate: need t1 > t0");
  const int n = static_cast<int>(y0.size());
  const double span = t1 - t0;
  const double h_max = opts.h_max > 0.0 ? opts.h_max : span;

  DenseSolution sol;
  sol.t0_ = t0;
  sol.t1_ = t1;
  sol.dim_ = n;
  sol.nodes_.push_back(t0);

  Eigen::VectorXd y = y0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n),
      ynew(n), err(n);
  f(t0, y, k1);

  double t = t0;
  double h = opts.h_initial > 0.0
                 ? std::min(opts.h_initial, span)
                 : initial_step(f, t0, y, k1, opts.rtol, opts.atol, span);
  double err_prev = 1e-4;
  long nsteps = 0;

  while (t < t1) {
    if (++nsteps > opts.max_steps)
      throw NumericalError("integrate: step limit exceeded");
    h = std::min(h, h_max);
    if (t + h >= t1) h = t1 - t;
    const double h_floor = 1e-14 * std::max(std::abs(t), 1.0);
    if (h < h_floor) throw NumericalError("integrate: step size underflow");

    yt = y + h * (a21 * k1);
    f(t + c2 * h, yt, k2);
    yt = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, yt, k3);
    yt = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, yt, k4);
    yt = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, yt, k5);
    yt = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, yt, k6);
    ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    f(t + h, ynew, k7);  // FSAL

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err_norm = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc =
          opts.atol + opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      const double q = err[i] / sc;
      err_norm += q * q;
    }
    err_norm = std::sqrt(err_norm / n);
    if (!std::isfinite(err_norm))
      throw NumericalError("integrate: non-finite state");

    if (err_norm <= 1.0) {
      // Accept: store the quartic interpolant for this step.
      const Eigen::VectorXd dy = ynew - y;
      sol.rcont_.push_back(y);
      sol.rcont_.push_back(dy);
      sol.rcont_.push_back(h * k1 - dy);
      sol.rcont_.push_back(dy - h * k7 - (h * k1 - dy));
      sol.rcont_.push_back(h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 +
                                d6 * k6 + d7 * k7));
      t += h;
      sol.nodes_.push_back(t);
      y.swap(ynew);
      k1.swap(k7);
      // PI controller (beta = 0.04).
      const double e_clamped = std::max(err_norm, 1e-32);
      double fac = 0.9 * std::pow(e_clamped, -0.2) * std::pow(err_prev, 0.04);
      fac = std::clamp(fac, 0.2, 5.0);
      h *= fac;
      err_prev = e_clamped;
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
    }
  }
  return sol;
}

bool find_event(const DenseSolution& sol,
                const std::function<double(double, const Eigen::VectorXd&)>& g,
                double t_lo, double t_hi, double* t_event, double tol) {
  t_lo = std::max(t_lo, sol.t_begin());
  t_hi = std::min(t_hi, sol.t_end());
  if (!(t_hi > t_lo)) return false;

  const auto& nodes = sol.nodes();
  double ta = t_lo;
  double ga = g(ta, sol.eval(ta));
  // Scan step boundaries (plus midpoints, to be robust to within-step
  // double crossings) for a sign change.
  std::vector<double> probes;
  for (double tn : nodes) {
    if (tn <= t_lo || tn >= t_hi) continue;
    probes.push_back(tn);
  }
  probes.push_back(t_hi);

  for (double tb : probes) {
    for (double tc : {0.5 * (ta + tb), tb}) {
      const double gc = g(tc, sol.eval(tc));
      if (ga == 0.0) {
        *t_event = ta;
        return true;
      }
      if (ga * gc < 0.0) {
        double lo = ta, hi = tc, glo = ga;
        while (hi - lo > tol * std::max(1.0, std::abs(hi))) {
          const double mid = 0.5 * (lo + hi);
          const double gm = g(mid, sol.eval(mid));
          if (glo * gm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            glo = gm;
          }
        }
        *t_event = 0.5 * (lo + hi);
        return true;
      }
      ta = tc;
      ga = gc;
    }
  }
  return false;
}

}  // namespace modal
