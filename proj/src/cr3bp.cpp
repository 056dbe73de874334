#include "modal/cr3bp.hpp"

#include <cmath>

namespace modal::cr3bp {

Vec6 rhs(double mu, const Vec6& y) {
  const Vec3 r = y.head<3>();
  const Vec3 v = y.tail<3>();
  const Vec3 d1 = r + Vec3{mu, 0.0, 0.0};
  const Vec3 d2 = r - Vec3{1.0 - mu, 0.0, 0.0};
  const double r13 = std::pow(d1.squaredNorm(), 1.5);
  const double r23 = std::pow(d2.squaredNorm(), 1.5);

  Vec3 a = -(1.0 - mu) / r13 * d1 - mu / r23 * d2;
  a.x() += r.x() + 2.0 * v.y();
  a.y() += r.y() - 2.0 * v.x();

  Vec6 dy;
  dy << v, a;
  return dy;
}

Mat6 jacobian(double mu, const Vec6& y) {
  const Vec3 r = y.head<3>();
  const Vec3 d1 = r + Vec3{mu, 0.0, 0.0};
  const Vec3 d2 = r - Vec3{1.0 - mu, 0.0, 0.0};

  auto grad = [](double m, const Vec3& d) -> Mat3 {
    const double dn = d.norm();
    const Vec3 dh = d / dn;
    return m / (dn * dn * dn) * (3.0 * dh * dh.transpose() - Mat3::Identity());
  };

  Mat3 uxx = grad(1.0 - mu, d1) + grad(mu, d2);
  uxx(0, 0) += 1.0;
  uxx(1, 1) += 1.0;

  Mat6 a = Mat6::Zero();
  a.block<3, 3>(0, 3) = Mat3::Identity();
  a.block<3, 3>(3, 0) = uxx;
  a(3, 4) = 2.0;
  a(4, 3) = -2.0;
  return a;
}

double jacobi_constant(double mu, const Vec6& y) {
  const Vec3 r = y.head<3>();
  const double r1 = (r + Vec3{mu, 0.0, 0.0}).norm();
  const double r2 = (r - Vec3{1.0 - mu, 0.0, 0.0}).norm();
  const double u =
      0.5 * (r.x() * r.x() + r.y() * r.y()) + (1.0 - mu) / r1 + mu / r2;
  return 2.0 * u - y.tail<3>().squaredNorm();
}

double libration_point_x(double mu, int point, double tol) {
  if (point != 1 && point != 2) {
    throw ValidationError("libration_point_x: only L1 and L2 supported");
  }
  const double g0 = std::cbrt(mu / 3.0);
  double x = (point == 1) ? 1.0 - mu - g0 : 1.0 - mu + g0;
  for (int it = 0; it < 200; ++it) {
    const double d1 = x + mu;
    const double d2 = x - (1.0 - mu);
    const double f = x - (1.0 - mu) * d1 / std::pow(std::abs(d1), 3) -
                     mu * d2 / std::pow(std::abs(d2), 3);
    const double df = 1.0 + 2.0 * (1.0 - mu) / std::pow(std::abs(d1), 3) +
                      2.0 * mu / std::pow(std::abs(d2), 3);
    const double dx = f / df;
    x -= dx;
    if (std::abs(dx) < tol) return x;
  }
  throw NumericalError("libration_point_x: no convergence");
}

}  // namespace modal::cr3bp
