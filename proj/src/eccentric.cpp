#include "modal/eccentric.hpp"

#include <cmath>

namespace modal {

namespace {

constexpr double guard_eps = 1e-6;

double wrap_pi(double x) {
  const double two_pi = 2.0 * consts::pi;
  double w = std::fmod(x + consts::pi, two_pi);
  if (w < 0.0) w += two_pi;
  return w - consts::pi;
}

// Smallest shift of `angle` that puts |e cos(angle)| (with_cos) or
// |e sin(angle)| at guard_eps, preserving the sign of the guarded quantity.
double guarded_angle(double angle, double e, bool with_cos, double* shift) {
  const double val = with_cos ? e * std::cos(angle) : e * std::sin(angle);
  *shift = 0.0;
  if (std::abs(val) >= guard_eps) return angle;
  const double sg = val >= 0.0 ? 1.0 : -1.0;
  const double small = sg * guard_eps / e;
  const double big_mag = std::sqrt(1.0 - small * small);
  double s, c;
  if (with_cos) {
    c = small;
    s = (std::sin(angle) >= 0.0 ? 1.0 : -1.0) * big_mag;
  } else {
    s = small;
    c = (std::cos(angle) >= 0.0 ? 1.0 : -1.0) * big_mag;
  }
  const double target = std::atan2(s, c);
  *shift = wrap_pi(target - angle);
  return angle + *shift;
}

}  // namespace

CartesianSphericalMap cartesian_spherical_map(const InertialState& chief) {
  const double r = chief.r.norm();
  if (!(r > 0.0)) {
    throw ValidationError("cartesian_spherical_map: chief radius must be positive");
  }
  const double rdot = chief.r.dot(chief.v) / r;
  CartesianSphericalMap m;
  m.f(1, 1) = 1.0 / r;
  m.f(2, 2) = 1.0 / r;
  m.f(4, 1) = -rdot / (r * r);
  m.f(4, 4) = 1.0 / r;
  m.f(5, 2) = -rdot / (r * r);
  m.f(5, 5) = 1.0 / r;
  m.f_inv(1, 1) = r;
  m.f_inv(2, 2) = r;
  m.f_inv(4, 1) = rdot;
  m.f_inv(4, 4) = r;
  m.f_inv(5, 2) = rdot;
  m.f_inv(5, 5) = r;
  return m;
}

EccentricBasisContext::EccentricBasisContext(const OrbitElements& elements,
                                             double mu_in) {
  if (!(elements.a > 0.0) || !(mu_in > 0.0)) {
    throw ValidationError("eccentric basis: a and mu must be positive");
  }
  if (!(elements.e > 0.0 && elements.e < 1.0)) {
    throw ValidationError("eccentric basis: eccentricity must satisfy 0 < e < 1");
  }
  if (elements.e < 2.0 * guard_eps) {
    throw ValidationError(
        "eccentric basis: eccentricity too small for the 1e-6 singularity "
        "guard; use the circular-orbit (CW) basis instead");
  }
  oe = elements;
  mu = mu_in;
  // The decomposition is singular at e cos(argp) = 0 and at e sin(f0) = 0;
  // both are pushed to +-1e-6 by nudging the angle, keeping e intact.
  oe.argp = guarded_angle(oe.argp, oe.e, true, &omega_shift);
  oe.f = guarded_angle(oe.f, oe.e, false, &f0_shift);

  a = oe.a;
  e = oe.e;
  q1 = e * std::cos(oe.argp);
  q2 = e * std::sin(oe.argp);
  eta = std::sqrt(1.0 - e * e);
  p = a * eta * eta;
  h = std::sqrt(mu * p);
  n = std::sqrt(mu / (a * a * a));
  theta0 = oe.argp + oe.f;
  kappa0 = kappa(theta0);
  r0 = p / kappa0;
  vr0 = radial_rate(theta0);
  vt0 = h / r0;
  A = q2 * std::cos(theta0) - q1 * std::sin(theta0);
  B = q1 * std::cos(theta0) + q2 * std::sin(theta0);
  gamma = A * A + B * B - 1.0;
  C = h * r0 * r0 / (a * mu * gamma);
  R21 = -3.0 * a * eta / (2.0 * r0 * r0);

  v_(1, 0) = 1.0;
  v_(2, 1) = 1.0;
  v_(3, 2) = 1.0;
  v_(4, 2) = -A / (gamma * a);
  v_(5, 3) = 1.0;
  v_(0, 4) = (2.0 * R21 * a / gamma) * A * C * gamma * a;
  v_(1, 4) = (2.0 * R21 * a / gamma) * (B + 1.0) * (B + 1.0) * C;
  v_(3, 4) = (2.0 * R21 * a / gamma) * B * gamma * a;
  v_(4, 4) = -(4.0 * R21 * a / gamma) * A * (B + 1.0);
  v_(4, 5) = 1.0;

  f21_0 = f21(theta0);
  f24_0 = f24(theta0);
  f25_0 = f25(theta0);
  gs0_inv_ = g_s(theta0).fullPivLu().inverse();
}

double EccentricBasisContext::kappa(double theta) const {
  return 1.0 + q1 * std::cos(theta) + q2 * std::sin(theta);
}

double EccentricBasisContext::radius(double theta) const {
  return p / kappa(theta);
}

double EccentricBasisContext::radial_rate(double theta) const {
  return h / p * (q1 * std::sin(theta) - q2 * std::cos(theta));
}

double EccentricBasisContext::theta_rate(double theta) const {
  const double r = radius(theta);
  return h / (r * r);
}

double EccentricBasisContext::f21(double theta) const {
  // Principal-branch arctan jumps every half revolution of theta/2; the
  // branch index m keeps the primitive continuous for unwrapped theta.
  const double two_pi = 2.0 * consts::pi;
  const double m = std::floor((theta + consts::pi) / two_pi);
  const double tr = theta - two_pi * m;
  const double ch = std::cos(0.5 * tr);
  const double sh = std::sin(0.5 * tr);
  const double branch =
      std::atan2(q2 * ch + (1.0 - q1) * sh, eta * ch) + consts::pi * m;
  const double e2 = q1 * q1 + q2 * q2;
  return 6.0 / (eta * eta * eta) * (branch - 0.5 * theta) +
         3.0 * (q2 + e2 * std::sin(theta)) /
             (q1 * (e2 - 1.0) * kappa(theta));
}

double EccentricBasisContext::f24(double theta) const {
  const double k = kappa(theta);
  return 4.0 * (q2 + std::sin(theta)) / (k * k) + 4.0 * std::sin(theta) / k;
}

double EccentricBasisContext::f25(double theta) const {
  const double k = kappa(theta);
  return 4.0 * (1.0 - q1 * q1 + q2 * std::sin(theta)) / (q1 * k * k) +
         4.0 * q2 * std::sin(theta) / (q1 * k);
}

Mat6 EccentricBasisContext::f_map(double theta) const {
  const double r = radius(theta);
  const double rdot = radial_rate(theta);
  Mat6 f = Mat6::Identity();
  f(1, 1) = 1.0 / r;
  f(2, 2) = 1.0 / r;
  f(4, 1) = -rdot / (r * r);
  f(4, 4) = 1.0 / r;
  f(5, 2) = -rdot / (r * r);
  f(5, 5) = 1.0 / r;
  return f;
}

Mat6 EccentricBasisContext::f_map_inverse(double theta) const {
  const double r = radius(theta);
  const double rdot = radial_rate(theta);
  Mat6 f = Mat6::Identity();
  f(1, 1) = r;
  f(2, 2) = r;
  f(4, 1) = rdot;
  f(4, 4) = r;
  f(5, 2) = rdot;
  f(5, 5) = r;
  return f;
}

Mat6 EccentricBasisContext::g_s(double theta) const {
  const double st = std::sin(theta);
  const double ct = std::cos(theta);
  const double r = radius(theta);
  const double vr = radial_rate(theta);
  const double td = theta_rate(theta);
  const double vt = r * td;
  const double si = std::sin(oe.i);
  const double ci = std::cos(oe.i);
  Mat6 g = Mat6::Zero();
  g(0, 0) = r / a;
  g(0, 1) = vr / vt * r;
  g(0, 3) = -(r / p) * (2.0 * a * q1 + r * ct);
  g(0, 4) = -(r / p) * (2.0 * a * q2 + r * st);
  g(1, 1) = 1.0;
  g(1, 5) = ci;
  g(2, 2) = st;
  g(2, 5) = -ct * si;
  g(3, 0) = -vr / (2.0 * a);
  g(3, 1) = (1.0 / r - 1.0 / p) * h;
  g(3, 3) = (vr * a * q1 + h * st) / p;
  g(3, 4) = (vr * a * q2 - h * ct) / p;
  g(4, 0) = -3.0 * td / (2.0 * a);
  g(4, 1) = -2.0 * vr / r;
  g(4, 3) = td / p * (3.0 * a * q1 + 2.0 * r * ct);
  g(4, 4) = td / p * (3.0 * a * q2 + 2.0 * r * st);
  g(5, 2) = td * ct;
  g(5, 5) = td * st * si;
  return g;
}

Mat6 EccentricBasisContext::p_doe(double theta) const {
  const double k = kappa(theta);
  const double k2 = k * k;
  Mat6 m = Mat6::Identity();
  m(1, 0) = k2 / (2.0 * a) * (f21_0 - f21(theta));
  m(1, 1) = k2 / (kappa0 * kappa0);
  m(1, 3) = k2 / (4.0 * gamma) * (f24_0 - f24(theta));
  m(1, 4) = k2 / (4.0 * gamma) * (f25_0 - f25(theta));
  return m;
}

Mat6 EccentricBasisContext::p_xs(double theta) const {
  return g_s(theta) * p_doe(theta) * gs0_inv_;
}

EccentricBasis::EccentricBasis(const OrbitElements& oe, double mu,
                               double epoch)
    : ctx_(oe, mu) {
  orbit_ = keplerian_orbit(ctx_.oe, mu, epoch);
  if (ctx_.omega_shift != 0.0 || ctx_.f0_shift != 0.0) {
    orbit_.metadata["singularity_guard"] = {
        {"omega_shift_rad", ctx_.omega_shift},
        {"f0_shift_rad", ctx_.f0_shift}};
  }
  mean_anomaly0_ = mean_from_true(ctx_.oe.f, ctx_.e);

  kinds_ = {ModeKind::periodic, ModeKind::periodic, ModeKind::periodic,
            ModeKind::periodic, ModeKind::trivial,  ModeKind::drift};
  for (int col = 0; col < 4; ++col) {
    ModeBlock b;
    b.kind = ModeBlock::Kind::periodic;
    b.col = col;
    blocks_.push_back(b);
  }
  ModeBlock chain;  // columns (5, 6): psi6 gains 2 pi psi5 per revolution
  chain.kind = ModeBlock::Kind::chain;
  chain.col = 4;
  chain.size = 2;
  chain.k(0, 1) = 2.0 * consts::pi / orbit_.period;
  blocks_.push_back(chain);

  Mat6 k = Mat6::Zero();
  for (const ModeBlock& b : blocks_) {
    k.block(b.col, b.col, b.size, b.size) = b.k.topLeftCorner(b.size, b.size);
  }
  const Mat6 vbar = psi(epoch);
  lambda_ = vbar * k * vbar.fullPivLu().inverse();

  compute_normalization();
}

double EccentricBasis::theta_at(double t) const {
  const double m = mean_anomaly0_ + ctx_.n * (t - epoch());
  return ctx_.oe.argp + true_from_mean(m, ctx_.e);
}

Mat6 EccentricBasis::psi_theta(double theta) const {
  const Mat6 base = ctx_.f_map_inverse(theta) * ctx_.p_xs(theta);
  Mat6 out = base * ctx_.v_matrix();
  out.col(5) += (theta - ctx_.theta0) * out.col(4);
  return out;
}

Mat6 EccentricBasis::psi(double t) const { return psi_theta(theta_at(t)); }

nlohmann::json EccentricBasis::to_json() const {
  nlohmann::json j = structure_to_json();
  j["type"] = "eccentric";
  j["orbit"] = orbit_to_json(orbit_);
  j["epoch"] = epoch();
  j["period"] = period();
  j["mu"] = ctx_.mu;
  j["elements"] = {{"a", ctx_.oe.a},     {"e", ctx_.oe.e},
                   {"i", ctx_.oe.i},     {"raan", ctx_.oe.raan},
                   {"argp", ctx_.oe.argp}, {"f", ctx_.oe.f}};
  j["omega_shift"] = ctx_.omega_shift;
  j["f0_shift"] = ctx_.f0_shift;
  return j;
}

std::unique_ptr<ModalBasis> eccentric_basis(const OrbitElements& oe, double mu,
                                            double epoch) {
  return std::make_unique<EccentricBasis>(oe, mu, epoch);
}

ModalConstants eccentric_constants(const SphericalRelState& x0,
                                   const OrbitElements& oe, double mu) {
  const EccentricBasisContext c(oe, mu);
  Vec6 out;
  out[0] = -(c.vt0 / (c.vr0 * c.r0)) * x0.dr + x0.theta_r;
  out[1] = x0.phi_r;
  out[2] = (1.0 - c.r0 / c.p) * c.vt0 / (c.C * c.vr0) * x0.dr + x0.dr_dot;
  out[3] = x0.phi_r_dot;
  out[4] = -(c.vt0 / (3.0 * c.vr0 * c.a)) * c.n * (c.r0 / c.p) * x0.dr;
  out[5] = c.mu / (c.h * c.r0 * c.r0) * (1.0 + c.p / c.r0) * x0.dr +
           c.vr0 / (c.vt0 * c.r0) * x0.dr_dot + x0.theta_r_dot;
  return {out, 0.0};
}

std::unique_ptr<ModalBasis> eccentric_basis_from_json(const nlohmann::json& j) {
  if (j.at("type").get<std::string>() != "eccentric") {
    throw ValidationError("basis JSON: not an eccentric basis");
  }
  const auto& je = j.at("elements");
  OrbitElements oe;
  oe.a = je.at("a").get<double>();
  oe.e = je.at("e").get<double>();
  oe.i = je.at("i").get<double>();
  oe.raan = je.at("raan").get<double>();
  oe.argp = je.at("argp").get<double>();
  oe.f = je.at("f").get<double>();
  return std::make_unique<EccentricBasis>(oe, j.at("mu").get<double>(),
                                          j.at("epoch").get<double>());
}

}  // namespace modal
