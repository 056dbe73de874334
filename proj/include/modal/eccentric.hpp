#pragma once

#include "modal/modal_basis.hpp"

namespace modal {

/// Relative state in chief-centred spherical coordinates: radial offset,
/// in-plane and out-of-plane angular offsets, and their time rates.
struct SphericalRelState {
  double dr = 0.0;           // [km]
  double theta_r = 0.0;      // [rad]
  double phi_r = 0.0;        // [rad]
  double dr_dot = 0.0;       // [km/s]
  double theta_r_dot = 0.0;  // [rad/s]
  double phi_r_dot = 0.0;    // [rad/s]

  Vec6 vec() const {
    Vec6 y;
    y << dr, theta_r, phi_r, dr_dot, theta_r_dot, phi_r_dot;
    return y;
  }
  static SphericalRelState from_vec(const Vec6& y) {
    return {y[0], y[1], y[2], y[3], y[4], y[5]};
  }
};

/// Linear map between Cartesian LVLH coordinates and the spherical relative
/// coordinates, and its exact inverse. Needs only the chief radius and
/// radial rate.
struct CartesianSphericalMap {
  Mat6 f = Mat6::Identity();
  Mat6 f_inv = Mat6::Identity();
};
CartesianSphericalMap cartesian_spherical_map(const InertialState& chief);

/// Scalars and matrix builders of the eccentric-chief modal decomposition in
/// spherical coordinates, parameterized by the argument of latitude theta.
/// Construction applies the documented singularity guards (|q1| and
/// |e sin f0| pushed to 1e-6, sign-preserving) and records the angle shifts.
struct EccentricBasisContext {
  EccentricBasisContext(const OrbitElements& elements, double mu_in);

  OrbitElements oe;  // after guards
  double mu = 0.0;
  double omega_shift = 0.0;  // argument-of-periapsis guard shift [rad]
  double f0_shift = 0.0;     // apsis guard shift [rad]

  double a = 0.0, e = 0.0, q1 = 0.0, q2 = 0.0, eta = 0.0;
  double p = 0.0, h = 0.0, n = 0.0;
  double theta0 = 0.0, kappa0 = 0.0, r0 = 0.0, vr0 = 0.0, vt0 = 0.0;
  double A = 0.0, B = 0.0, C = 0.0, gamma = 0.0, R21 = 0.0;

  double kappa(double theta) const;
  double radius(double theta) const;       // p / kappa
  double radial_rate(double theta) const;  // (h/p)(q1 sin - q2 cos)
  double theta_rate(double theta) const;   // h / r^2

  /// Antiderivative primitives of the angle-element drift row; f21 uses a
  /// continuous arctan branch so the row stays smooth over many revolutions.
  double f21(double theta) const;
  double f24(double theta) const;
  double f25(double theta) const;

  Mat6 f_map(double theta) const;
  Mat6 f_map_inverse(double theta) const;
  Mat6 g_s(double theta) const;
  Mat6 p_doe(double theta) const;
  /// Periodic part in spherical coordinates: G_s(theta) P_doe G_s(theta0)^-1,
  /// identity at theta0.
  Mat6 p_xs(double theta) const;
  const Mat6& v_matrix() const { return v_; }

 private:
  Mat6 v_ = Mat6::Zero();
  Mat6 gs0_inv_ = Mat6::Identity();
  double f21_0 = 0.0, f24_0 = 0.0, f25_0 = 0.0;
};

/// Closed-form modal basis about an eccentric two-body chief. Modes are
/// functions of theta; time evaluation solves Kepler's equation. Columns:
/// along-track, out-of-plane, teardrop, out-of-plane rate, offset circle,
/// drift (the drift mode carries the secular (theta - theta0) term).
class EccentricBasis : public ModalBasis {
 public:
  EccentricBasis(const OrbitElements& oe, double mu, double epoch = 0.0);

  Mat6 psi(double t) const override;
  nlohmann::json to_json() const override;

  Mat6 psi_theta(double theta) const;
  /// Continuous (unwrapped) argument of latitude at time t.
  double theta_at(double t) const;
  const EccentricBasisContext& context() const { return ctx_; }

 private:
  EccentricBasisContext ctx_;
  double mean_anomaly0_ = 0.0;
};

std::unique_ptr<ModalBasis> eccentric_basis(const OrbitElements& oe, double mu,
                                            double epoch = 0.0);

/// Closed-form modal weights from the spherical relative state at epoch.
ModalConstants eccentric_constants(const SphericalRelState& x0,
                                   const OrbitElements& oe, double mu);

std::unique_ptr<ModalBasis> eccentric_basis_from_json(const nlohmann::json& j);

}  // namespace modal
