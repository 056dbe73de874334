#include "modal/perturbation.hpp"

#include <cmath>

namespace modal {

namespace {

void check_radius(const Vec3& r) {
  if (!(r.norm() > 0.0)) {
    throw ValidationError("perturbation model: zero position vector");
  }
}

}  // namespace

PerturbationEval kepler_eval(const Vec3& r, const Vec3& v, double mu) {
  check_radius(r);
  const double rn = r.norm();
  const Vec3 rh = r / rn;
  const double k = mu / (rn * rn * rn);
  PerturbationEval out;
  out.accel = -k * r;
  out.gradient = -k * (Mat3::Identity() - 3.0 * rh * rh.transpose());
  out.jerk = out.gradient * v;
  return out;
}

PerturbationEval j2_eval(const Vec3& r, const Vec3& v, double mu, double j2,
                         double req) {
  PerturbationEval out = kepler_eval(r, v, mu);
  const double rn = r.norm();
  const Vec3 rh = r / rn;
  const Vec3 kh = Vec3::UnitZ();
  const double c = rh.dot(kh);

  // Oblateness coefficient 3*mu*J2*Req^2 / 2.
  const double q = 1.5 * mu * j2 * req * req;
  const double r4 = rn * rn * rn * rn;

  out.accel -= (q / r4) * ((1.0 - 5.0 * c * c) * rh + 2.0 * c * kh);

  const Mat3 grad_j2 =
      (1.0 - 5.0 * c * c) * Mat3::Identity() +
      2.0 * kh * kh.transpose() +
      5.0 * (7.0 * c * c - 1.0) * rh * rh.transpose() -
      10.0 * c * (kh * rh.transpose() + rh * kh.transpose());
  out.gradient -= (q / (r4 * rn)) * grad_j2;

  out.jerk = out.gradient * v;
  return out;
}

PerturbationModel kepler_model(double mu) {
  PerturbationModel m;
  m.name = "kepler";
  m.eval = [mu](const Vec3& r, const Vec3& v) { return kepler_eval(r, v, mu); };
  return m;
}

PerturbationModel j2_model(double mu, double j2, double req) {
  PerturbationModel m;
  m.name = "j2";
  m.eval = [mu, j2, req](const Vec3& r, const Vec3& v) {
    return j2_eval(r, v, mu, j2, req);
  };
  return m;
}

}  // namespace modal
