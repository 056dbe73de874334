#include "modal/frames.hpp"

#include <cmath>

namespace modal {

namespace {

Mat3 triad(const InertialState& chief) {
  const Vec3 er = chief.r.normalized();
  const Vec3 h = chief.r.cross(chief.v);
  const Vec3 en = h.normalized();
  const Vec3 et = en.cross(er);
  Mat3 rot;
  rot.row(0) = er;
  rot.row(1) = et;
  rot.row(2) = en;
  return rot;
}

}  // namespace

LvlhFrame lvlh_frame(const InertialState& chief) {
  LvlhFrame f;
  f.rot = triad(chief);
  const double r = chief.r.norm();
  const double h = chief.r.cross(chief.v).norm();
  const double rdot = chief.r.dot(chief.v) / r;
  f.omega = Vec3{0.0, 0.0, h / (r * r)};
  f.omega_dot = Vec3{0.0, 0.0, -2.0 * h * rdot / (r * r * r)};
  return f;
}

LvlhFrame lvlh_frame(const InertialState& chief, const Vec3& accel,
                     const Vec3& jerk) {
  LvlhFrame f;
  f.rot = triad(chief);
  const double r = chief.r.norm();
  const double h = chief.r.cross(chief.v).norm();
  const double rdot = chief.r.dot(chief.v) / r;

  const Vec3 a_lvlh = f.rot * accel;
  const double a_t = a_lvlh.y();
  const double a_n = a_lvlh.z();
  const double j_n = (f.rot * jerk).z();

  f.omega = Vec3{r * a_n / h, 0.0, h / (r * r)};
  // hdot = r a_t; d(a_n)/dt picks up the frame rotation of e_n.
  const double an_dot = j_n - a_t * (r * a_n / h);
  f.omega_dot =
      Vec3{(rdot * a_n + r * an_dot) / h - 2.0 * r * r * a_n * a_t / (h * h),
           0.0, a_t / r - 2.0 * h * rdot / (r * r * r)};
  return f;
}

namespace {

LvlhState relative_with(const LvlhFrame& f, const InertialState& chief,
                        const InertialState& deputy) {
  const Vec3 rho = f.rot * (deputy.r - chief.r);
  const Vec3 rho_dot = f.rot * (deputy.v - chief.v) - f.omega.cross(rho);
  LvlhState x;
  x << rho, rho_dot;
  return x;
}

InertialState reconstruct_with(const LvlhFrame& f, const InertialState& chief,
                               const LvlhState& x) {
  const Vec3 rho = x.head<3>();
  const Vec3 rho_dot = x.tail<3>();
  InertialState d;
  d.r = chief.r + f.rot.transpose() * rho;
  d.v = chief.v + f.rot.transpose() * (rho_dot + f.omega.cross(rho));
  return d;
}

}  // namespace

LvlhState relative_state(const InertialState& chief,
                         const InertialState& deputy) {
  return relative_with(lvlh_frame(chief), chief, deputy);
}

LvlhState relative_state(const InertialState& chief,
                         const InertialState& deputy, const Vec3& chief_accel) {
  return relative_with(lvlh_frame(chief, chief_accel, Vec3::Zero()), chief,
                       deputy);
}

InertialState deputy_from_relative(const InertialState& chief,
                                   const LvlhState& x) {
  return reconstruct_with(lvlh_frame(chief), chief, x);
}

InertialState deputy_from_relative(const InertialState& chief,
                                   const LvlhState& x, const Vec3& chief_accel) {
  return reconstruct_with(lvlh_frame(chief, chief_accel, Vec3::Zero()), chief,
                          x);
}

}  // namespace modal
