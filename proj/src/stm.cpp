#include "modal/stm.hpp"

namespace modal {

Mat6 StmSolution::at(double t) const {
  const Eigen::VectorXd y = flow_.eval(t);
  return Eigen::Map<const Mat6>(y.data());
}

StmSolution propagate_stm(const PlantFn& a, double t0, double span,
                          const IntegratorOptions& opts) {
  Eigen::VectorXd y0(36);
  Eigen::Map<Mat6>(y0.data()) = Mat6::Identity();
  auto rhs = [&a](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(36);
    Eigen::Map<const Mat6> phi(y.data());
    Eigen::Map<Mat6> dphi(dy.data());
    dphi = a(t) * phi;
  };
  StmSolution out;
  out.flow_ = integrate(rhs, y0, t0, t0 + span, opts);
  return out;
}

DenseSolution integrate_linear(const PlantFn& a, const Vec6& x0, double t0,
                               double t1, const IntegratorOptions& opts) {
  auto rhs = [&a](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy = a(t) * y;
  };
  return integrate(rhs, x0, t0, t1, opts);
}

}  // namespace modal
