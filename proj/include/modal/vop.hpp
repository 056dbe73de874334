#pragma once

#include <functional>
#include <vector>

#include "modal/integrate.hpp"
#include "modal/modal_basis.hpp"
#include "modal/perturbation.hpp"
#include "modal/types.hpp"

namespace modal {

/// Continuous control acceleration in the chief's LVLH frame [km/s^2].
using ControlFn = std::function<Vec3(double t)>;

/// Instantaneous velocity change applied in the LVLH frame. Each impulse
/// maps to a jump in the modal constants, c += Psi(t)^-1 B Dv with
/// B = [0; I].
struct ImpulseEvent {
  double t = 0.0;
  Vec3 dv = Vec3::Zero();
};

struct VopOptions {
  /// ||rho|| / r_chief above which a sample is flagged as outside the
  /// linear regime (warning only, never an error).
  double linear_regime_bound = 1e-3;
  /// 1-norm condition estimate of Psi above which a sample is flagged.
  double cond_bound = 1e10;
  IntegratorOptions integ;
  /// Output rows (uniform in time, endpoints included).
  int samples = 400;
};

struct VopSample {
  double t = 0.0;
  Vec6 c = Vec6::Zero();
  /// Reconstruction Psi(t) c(t).
  LvlhState x = LvlhState::Zero();
  bool linear_regime_exceeded = false;
  bool ill_conditioned = false;
};

struct VopTrajectory {
  std::vector<VopSample> rows;
  bool linear_regime_exceeded = false;
  bool ill_conditioned = false;

  const VopSample& front() const { return rows.front(); }
  const VopSample& back() const { return rows.back(); }
};

/// Variation of parameters against the exact modal solution of the
/// reference plant A*: c' = Psi^-1 ((A(t) - A*(t)) Psi c + B u), where A(t)
/// is the relative plant linearized about the perturbed chief, which is
/// integrated in parallel under `truth` from the basis epoch state. The
/// reconstruction Psi(t) c(t) tracks this dynamics to integration
/// tolerance; against the exact nonlinear relative motion (see
/// propagate_two_spacecraft) it carries the usual linearization error.
/// Kepler truth with u = 0 keeps c constant up to integrator noise.
///
/// A perturbation model is only meaningful for keplerian chiefs; CR3BP
/// orbits must pass truth = nullptr (control-only form c' = Psi^-1 B u).
/// The basis is never re-anchored automatically; see reinitialize_constants.
VopTrajectory propagate_constants_full(const ModalBasis& basis, const Vec6& c0,
                                       const PerturbationModel* truth,
                                       const ControlFn& u,
                                       const std::vector<ImpulseEvent>& burns,
                                       double t0, double t1,
                                       const VopOptions& opts = {});

/// Linearized constants dynamics c' = Psi^-1 dA(t) Psi c + B_c(t) u with a
/// caller-supplied plant offset dA(t) (nullptr = zero). With dA = 0 and
/// u = 0 the constants are exactly constant and no integration runs.
VopTrajectory propagate_constants_linear(const ModalBasis& basis,
                                         const Vec6& c0, const PlantFn& delta_a,
                                         const ControlFn& u,
                                         const std::vector<ImpulseEvent>& burns,
                                         double t0, double t1,
                                         const VopOptions& opts = {});

/// Plant offset dA(t) = A_pert(t) - A*(t) evaluated along the unperturbed
/// reference chief of the basis (no parallel chief integration). Misses the
/// feedback of the chief's own deviation, which grows secularly under J2;
/// see delta_plant_perturbed. Keplerian chiefs only.
PlantFn delta_plant(const ModalBasis& basis, const PerturbationModel& pert);

/// Plant offset dA(t) = A(t) - A*(t) with A evaluated along the perturbed
/// chief itself, precomputed once over [epoch, horizon]. First-order
/// complete in the perturbation strength. Keplerian chiefs only.
PlantFn delta_plant_perturbed(const ModalBasis& basis,
                              const PerturbationModel& pert, double horizon);

/// Omega(t) = Psi(t)^-1 dA(t) Psi(t), the slow generator of the constants.
PlantFn omega_of(const ModalBasis& basis, const PlantFn& delta_a);

/// M(t) = integral of Omega over [t0, t], by adaptive quadrature.
Mat6 integrated_omega(const PlantFn& omega, double t0, double t,
                      const IntegratorOptions& opts = {});

/// First-order perturbed solution x(t) = Psi(t) (I + M(t)) c0 with
/// M(t) the integral of Omega (omega = nullptr gives the unperturbed
/// solution Psi(t) c0).
LvlhState first_order_solution(const ModalBasis& basis, const Vec6& c0,
                               const PlantFn& omega, double t0, double t,
                               const IntegratorOptions& opts = {});

/// Re-anchor constants on a new basis (or the same basis at a new epoch
/// state): c_new = Psi_new(t)^-1 Psi_old(t) c_old. Explicit by design;
/// propagation never re-anchors on its own.
Vec6 reinitialize_constants(const ModalBasis& old_basis,
                            const ModalBasis& new_basis, const Vec6& c_old,
                            double t);

/// Chief and deputy integrated as two spacecraft under `truth` and
/// differenced exactly into the chief's LVLH frame (general frame with the
/// model's acceleration and jerk). Oracle for the reconstruction tests.
std::vector<std::pair<double, LvlhState>> propagate_two_spacecraft(
    const InertialState& chief0, const LvlhState& x0,
    const PerturbationModel& truth, double t0, double t1, int samples,
    const IntegratorOptions& opts = {});

}  // namespace modal
