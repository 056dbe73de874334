#include "modal/elements.hpp"

#include <cmath>

namespace modal {

namespace {

Mat3 rot_z(double a) {
  Mat3 m;
  m << std::cos(a), -std::sin(a), 0.0, std::sin(a), std::cos(a), 0.0, 0.0, 0.0,
      1.0;
  return m;
}

Mat3 rot_x(double a) {
  Mat3 m;
  m << 1.0, 0.0, 0.0, 0.0, std::cos(a), -std::sin(a), 0.0, std::sin(a),
      std::cos(a);
  return m;
}

}  // namespace

InertialState elements_to_state(const OrbitElements& oe, double mu) {
  if (oe.a <= 0.0 || oe.e < 0.0 || oe.e >= 1.0) {
    throw ValidationError("elements_to_state: need a > 0 and 0 <= e < 1");
  }
  const double p = oe.a * (1.0 - oe.e * oe.e);
  const double h = std::sqrt(mu * p);
  const double r = p / (1.0 + oe.e * std::cos(oe.f));

  const Vec3 r_pf{r * std::cos(oe.f), r * std::sin(oe.f), 0.0};
  const Vec3 v_pf{-(mu / h) * std::sin(oe.f), (mu / h) * (oe.e + std::cos(oe.f)),
                  0.0};

  const Mat3 dcm = rot_z(oe.raan) * rot_x(oe.i) * rot_z(oe.argp);
  return {dcm * r_pf, dcm * v_pf};
}

OrbitElements state_to_elements(const InertialState& s, double mu, double e_tol,
                                double i_tol) {
  const Vec3 r = s.r;
  const Vec3 v = s.v;
  const double rn = r.norm();
  if (rn == 0.0) throw ValidationError("state_to_elements: zero radius");

  const Vec3 h = r.cross(v);
  const double hn = h.norm();
  const Vec3 e_vec = ((v.squaredNorm() - mu / rn) * r - r.dot(v) * v) / mu;
  const double e = e_vec.norm();
  const double energy = 0.5 * v.squaredNorm() - mu / rn;
  if (energy >= 0.0) {
    throw ValidationError("state_to_elements: orbit is not elliptic");
  }

  OrbitElements oe;
  oe.a = -mu / (2.0 * energy);
  oe.e = e;
  // atan2 form keeps tiny inclinations (acos(h_z/h) rounds them to zero).
  oe.i = std::atan2(std::hypot(h.x(), h.y()), h.z());

  const Vec3 node{-h.y(), h.x(), 0.0};  // z_hat x h
  const double nn = node.norm();
  const bool equatorial = oe.i < i_tol || consts::pi - oe.i < i_tol;
  const bool circular = e < e_tol;

  // In-plane basis used to measure angles: (p_hat, q_hat = h_hat x p_hat)
  // anchored at the node, or at inertial x for equatorial orbits.
  const Vec3 h_hat = h / hn;
  Vec3 anchor = equatorial ? Vec3::UnitX() : Vec3(node / nn);
  const Vec3 q_hat = h_hat.cross(anchor);

  oe.raan = equatorial ? 0.0 : std::atan2(node.y(), node.x());
  if (oe.raan < 0.0) oe.raan += 2.0 * consts::pi;

  if (circular) {
    oe.argp = 0.0;
    oe.f = std::atan2(r.dot(q_hat), r.dot(anchor));
    if (oe.f < 0.0) oe.f += 2.0 * consts::pi;
  } else {
    const Vec3 e_hat = e_vec / e;
    oe.argp = std::atan2(e_vec.dot(q_hat), e_vec.dot(anchor));
    if (oe.argp < 0.0) oe.argp += 2.0 * consts::pi;
    const Vec3 fq = h_hat.cross(e_hat);
    oe.f = std::atan2(r.dot(fq), r.dot(e_hat));
    if (oe.f < 0.0) oe.f += 2.0 * consts::pi;
  }
  return oe;
}

double eccentric_from_mean(double M, double e, double tol) {
  // Newton on g(E) = E - e sin E - M. The seed keeps |E - M| < pi so the
  // iteration tracks the continuous branch for unbounded M.
  double E = M + e * std::sin(M);
  for (int it = 0; it < 64; ++it) {
    const double g = E - e * std::sin(E) - M;
    const double dg = 1.0 - e * std::cos(E);
    const double dE = g / dg;
    E -= dE;
    if (std::abs(dE) < tol) return E;
  }
  // Bisection fallback on the bracket M -+ e.
  double lo = M - e, hi = M + e;
  for (int it = 0; it < 200; ++it) {
    E = 0.5 * (lo + hi);
    const double g = E - e * std::sin(E) - M;
    (g > 0.0 ? hi : lo) = E;
    if (hi - lo < tol) return E;
  }
  throw NumericalError("eccentric_from_mean: no convergence");
}

double true_from_eccentric(double E, double e) {
  const double beta = e / (1.0 + std::sqrt(1.0 - e * e));
  return E + 2.0 * std::atan2(beta * std::sin(E), 1.0 - beta * std::cos(E));
}

double eccentric_from_true(double f, double e) {
  const double beta = e / (1.0 + std::sqrt(1.0 - e * e));
  return f - 2.0 * std::atan2(beta * std::sin(f), 1.0 + beta * std::cos(f));
}

double mean_from_true(double f, double e) {
  const double E = eccentric_from_true(f, e);
  return E - e * std::sin(E);
}

double true_from_mean(double M, double e, double tol) {
  return true_from_eccentric(eccentric_from_mean(M, e, tol), e);
}

double mean_motion(double a, double mu) { return std::sqrt(mu / (a * a * a)); }

double orbit_period(double a, double mu) {
  return 2.0 * consts::pi / mean_motion(a, mu);
}

double true_anomaly_at(const OrbitElements& oe, double mu, double t0, double t,
                       double tol) {
  const double n = mean_motion(oe.a, mu);
  const double M = mean_from_true(oe.f, oe.e) + n * (t - t0);
  return true_from_mean(M, oe.e, tol);
}

InertialState kepler_state_at(const OrbitElements& oe, double mu, double t0,
                              double t, double tol) {
  OrbitElements at = oe;
  at.f = true_anomaly_at(oe, mu, t0, t, tol);
  return elements_to_state(at, mu);
}

}  // namespace modal
