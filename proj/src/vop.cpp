#include "modal/vop.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "modal/frames.hpp"
#include "modal/plant.hpp"

namespace modal {

namespace {

std::vector<double> row_times(double t0, double t1, int n) {
  std::vector<double> ts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    ts[static_cast<std::size_t>(i)] = t0 + (t1 - t0) * i / double(n - 1);
  }
  ts.back() = t1;
  return ts;
}

std::vector<ImpulseEvent> checked_burns(std::vector<ImpulseEvent> burns,
                                        double t0, double t1) {
  std::sort(burns.begin(), burns.end(),
            [](const ImpulseEvent& a, const ImpulseEvent& b) { return a.t < b.t; });
  if (!burns.empty() && (burns.front().t < t0 || burns.back().t > t1)) {
    throw ValidationError("vop: impulse outside the propagation span");
  }
  return burns;
}

Vec6 apply_impulse(const ModalBasis& basis, const Vec6& c,
                   const ImpulseEvent& burn) {
  Vec6 bdv = Vec6::Zero();
  bdv.tail<3>() = burn.dv;
  return c + basis.psi_inverse(burn.t) * bdv;
}

double matrix_cond1(const Mat6& psi, const Mat6& psi_inv) {
  const double n1 = psi.cwiseAbs().colwise().sum().maxCoeff();
  const double n2 = psi_inv.cwiseAbs().colwise().sum().maxCoeff();
  return n1 * n2;
}

/// Length scale the linear-regime flag compares ||rho|| against: chief
/// radius (keplerian) or distance to the nearer primary (cr3bp).
double chief_scale(const OrbitCache& chief, double t) {
  const Vec6 y = chief.state_at(t);
  if (chief.orbit().kind == PeriodicOrbit::Kind::keplerian) {
    return y.head<3>().norm();
  }
  const double mu = chief.orbit().mu;
  const Vec3 r = y.head<3>();
  const double r1 = (r - Vec3(-mu, 0.0, 0.0)).norm();
  const double r2 = (r - Vec3(1.0 - mu, 0.0, 0.0)).norm();
  return std::min(r1, r2);
}

/// One propagation piece between impulses. `y0` holds the constants and,
/// in augmented mode, the perturbed chief state behind them. Zero-length
/// pieces (stacked impulses) keep `integrated` false.
struct Segment {
  double ta = 0.0;
  double tb = 0.0;
  Eigen::VectorXd y0;
  bool integrated = false;
  DenseSolution sol;
};

Eigen::VectorXd segment_state(const Segment& seg, double t) {
  return seg.integrated ? seg.sol.eval(t) : seg.y0;
}

/// Builds segments over [t0, t1] split at the burn times. `make_rhs` is
/// empty for trivially constant dynamics.
std::vector<Segment> build_segments(const ModalBasis& basis,
                                    const Eigen::VectorXd& y_start,
                                    const std::vector<ImpulseEvent>& burns,
                                    double t0, double t1, const OdeRhs& rhs,
                                    const IntegratorOptions& integ) {
  std::vector<Segment> segs;
  Eigen::VectorXd y = y_start;
  double tcur = t0;
  std::size_t next = 0;
  while (next < burns.size() && burns[next].t <= t0) {
    Vec6 c = y.head<6>();
    y.head<6>() = apply_impulse(basis, c, burns[next]);
    ++next;
  }
  auto push_segment = [&](double tb) {
    Segment seg;
    seg.ta = tcur;
    seg.tb = tb;
    seg.y0 = y;
    if (rhs && tb > tcur) {
      seg.sol = integrate(rhs, y, tcur, tb, integ);
      seg.integrated = true;
      y = seg.sol.eval(tb);
    }
    segs.push_back(std::move(seg));
    tcur = tb;
  };
  for (; next < burns.size(); ++next) {
    push_segment(burns[next].t);
    Vec6 c = y.head<6>();
    y.head<6>() = apply_impulse(basis, c, burns[next]);
  }
  if (tcur < t1 || segs.empty()) {
    push_segment(t1);
  } else {
    // Burn exactly at t1: keep a zero-length tail so rows at t1 see the
    // post-burn constants.
    Segment seg;
    seg.ta = tcur;
    seg.tb = t1;
    seg.y0 = y;
    segs.push_back(std::move(seg));
  }
  return segs;
}

VopTrajectory sample_rows(const ModalBasis& basis,
                          const std::vector<Segment>& segs,
                          const OrbitCache* ref_chief, bool augmented,
                          double t0, double t1, const VopOptions& opts) {
  VopTrajectory out;
  out.rows.reserve(static_cast<std::size_t>(opts.samples));
  for (double tr : row_times(t0, t1, opts.samples)) {
    std::size_t si = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      if (segs[i].ta <= tr) si = i;
    }
    const Eigen::VectorXd y = segment_state(segs[si], tr);
    VopSample row;
    row.t = tr;
    row.c = y.head<6>();
    const Mat6 psi = basis.psi(tr);
    const Mat6 psi_inv = basis.psi_inverse(tr);
    row.x = psi * row.c;
    const double scale = augmented ? y.segment<3>(6).norm()
                                   : chief_scale(*ref_chief, tr);
    row.linear_regime_exceeded =
        row.x.head<3>().norm() > opts.linear_regime_bound * scale;
    row.ill_conditioned = matrix_cond1(psi, psi_inv) > opts.cond_bound;
    out.linear_regime_exceeded |= row.linear_regime_exceeded;
    out.ill_conditioned |= row.ill_conditioned;
    out.rows.push_back(row);
  }
  return out;
}

void check_span(double t0, double t1, const VopOptions& opts) {
  if (!(t1 > t0)) {
    throw ValidationError("vop: propagation span must be increasing");
  }
  if (opts.samples < 2) {
    throw ValidationError("vop: need at least two output samples");
  }
}

}  // namespace

VopTrajectory propagate_constants_full(const ModalBasis& basis, const Vec6& c0,
                                       const PerturbationModel* truth,
                                       const ControlFn& u,
                                       const std::vector<ImpulseEvent>& burns,
                                       double t0, double t1,
                                       const VopOptions& opts) {
  check_span(t0, t1, opts);
  const PeriodicOrbit& orbit = basis.orbit();
  const bool augmented = truth != nullptr;
  if (augmented && orbit.kind != PeriodicOrbit::Kind::keplerian) {
    throw ValidationError(
        "vop: perturbed truth models require a keplerian chief; CR3BP "
        "propagation is control-only");
  }
  const auto ordered = checked_burns(burns, t0, t1);
  const OrbitCache ref_chief(orbit);

  if (!augmented) {
    // Control-only form: c' = Psi^-1 B u.
    Eigen::VectorXd y0 = c0;
    OdeRhs rhs;
    if (u) {
      const ModalBasis* b = &basis;
      rhs = [b, &u](double t, const Eigen::VectorXd&, Eigen::VectorXd& dy) {
        Vec6 bu = Vec6::Zero();
        bu.tail<3>() = u(t);
        dy = b->psi(t).partialPivLu().solve(bu);
      };
    }
    const auto segs =
        build_segments(basis, y0, ordered, t0, t1, rhs, opts.integ);
    return sample_rows(basis, segs, &ref_chief, false, t0, t1, opts);
  }

  // The perturbed chief coincides with the reference chief at the basis
  // epoch and is integrated alongside the constants.
  if (t0 < orbit.epoch) {
    throw ValidationError("vop: span starts before the basis epoch");
  }
  Vec6 chief0 = orbit.initial_state;
  OdeRhs chief_rhs = [truth](double, const Eigen::VectorXd& y,
                             Eigen::VectorXd& dy) {
    dy.resize(6);
    dy.head<3>() = y.tail<3>();
    dy.tail<3>() = truth->eval(y.head<3>(), y.tail<3>()).accel;
  };
  if (t0 > orbit.epoch) {
    chief0 = integrate(chief_rhs, chief0, orbit.epoch, t0, opts.integ).eval(t0);
  }

  const PlantFn astar = canonical_plant(orbit);
  const ModalBasis* b = &basis;
  OdeRhs rhs = [b, truth, &u, &astar](double t, const Eigen::VectorXd& y,
                                      Eigen::VectorXd& dy) {
    const InertialState chief{y.segment<3>(6), y.segment<3>(9)};
    const PerturbationEval pe = truth->eval(chief.r, chief.v);
    // Relative dynamics linearized about the perturbed chief; the frame
    // tilt from the out-of-plane perturbing acceleration is part of A.
    const Mat6 a = plant_matrix_lvlh(lvlh_frame(chief, pe.accel, pe.jerk),
                                     pe.gradient);
    const Mat6 psi = b->psi(t);
    Vec6 fc = (a - astar(t)) * (psi * y.head<6>());
    if (u) {
      fc.tail<3>() += u(t);
    }
    dy.resize(12);
    dy.head<6>() = psi.partialPivLu().solve(fc);
    dy.segment<3>(6) = chief.v;
    dy.segment<3>(9) = pe.accel;
  };

  Eigen::VectorXd y0(12);
  y0 << c0, chief0;
  const auto segs = build_segments(basis, y0, ordered, t0, t1, rhs, opts.integ);
  return sample_rows(basis, segs, &ref_chief, true, t0, t1, opts);
}

VopTrajectory propagate_constants_linear(const ModalBasis& basis,
                                         const Vec6& c0, const PlantFn& delta_a,
                                         const ControlFn& u,
                                         const std::vector<ImpulseEvent>& burns,
                                         double t0, double t1,
                                         const VopOptions& opts) {
  check_span(t0, t1, opts);
  const auto ordered = checked_burns(burns, t0, t1);
  const OrbitCache ref_chief(basis.orbit());

  OdeRhs rhs;
  if (delta_a || u) {
    const ModalBasis* b = &basis;
    rhs = [b, &delta_a, &u](double t, const Eigen::VectorXd& y,
                            Eigen::VectorXd& dy) {
      const Mat6 psi = b->psi(t);
      Vec6 fc = Vec6::Zero();
      if (delta_a) {
        fc = delta_a(t) * (psi * y.head<6>());
      }
      if (u) {
        fc.tail<3>() += u(t);
      }
      dy = psi.partialPivLu().solve(fc);
    };
  }
  const auto segs =
      build_segments(basis, c0, ordered, t0, t1, rhs, opts.integ);
  return sample_rows(basis, segs, &ref_chief, false, t0, t1, opts);
}

PlantFn delta_plant(const ModalBasis& basis, const PerturbationModel& pert) {
  const PeriodicOrbit& orbit = basis.orbit();
  if (orbit.kind != PeriodicOrbit::Kind::keplerian) {
    throw ValidationError("delta_plant: keplerian chiefs only");
  }
  auto chief = std::make_shared<OrbitCache>(orbit);
  const double mu = orbit.mu;
  auto eval = pert.eval;
  return [chief, mu, eval](double t) {
    const Vec6 y = chief->state_at(t);
    const InertialState s{y.head<3>(), y.tail<3>()};
    const PerturbationEval pe = eval(s.r, s.v);
    const Mat6 ap =
        plant_matrix_lvlh(lvlh_frame(s, pe.accel, pe.jerk), pe.gradient);
    const Mat6 a0 = plant_matrix_lvlh(s, mu);
    return Mat6(ap - a0);
  };
}

PlantFn delta_plant_perturbed(const ModalBasis& basis,
                              const PerturbationModel& pert, double horizon) {
  const PeriodicOrbit& orbit = basis.orbit();
  if (orbit.kind != PeriodicOrbit::Kind::keplerian) {
    throw ValidationError("delta_plant_perturbed: keplerian chiefs only");
  }
  if (!(horizon > orbit.epoch)) {
    throw ValidationError("delta_plant_perturbed: horizon before the epoch");
  }
  auto eval = pert.eval;
  OdeRhs chief_rhs = [eval](double, const Eigen::VectorXd& y,
                            Eigen::VectorXd& dy) {
    dy.resize(6);
    dy.head<3>() = y.tail<3>();
    dy.tail<3>() = eval(y.head<3>(), y.tail<3>()).accel;
  };
  auto chief = std::make_shared<DenseSolution>(
      integrate(chief_rhs, orbit.initial_state, orbit.epoch, horizon));
  const PlantFn astar = canonical_plant(orbit);
  return [chief, eval, astar](double t) {
    if (t < chief->t_begin() || t > chief->t_end()) {
      throw ValidationError(
          "delta_plant_perturbed: evaluation beyond the precomputed horizon");
    }
    const Vec6 y = chief->eval(t);
    const InertialState s{y.head<3>(), y.tail<3>()};
    const PerturbationEval pe = eval(s.r, s.v);
    const Mat6 a =
        plant_matrix_lvlh(lvlh_frame(s, pe.accel, pe.jerk), pe.gradient);
    return Mat6(a - astar(t));
  };
}

PlantFn omega_of(const ModalBasis& basis, const PlantFn& delta_a) {
  const ModalBasis* b = &basis;
  PlantFn da = delta_a;
  return [b, da](double t) {
    const Mat6 psi = b->psi(t);
    return Mat6(psi.partialPivLu().solve(da(t) * psi));
  };
}

Mat6 integrated_omega(const PlantFn& omega, double t0, double t,
                      const IntegratorOptions& opts) {
  if (t == t0) {
    return Mat6::Zero();
  }
  if (t < t0) {
    throw ValidationError("integrated_omega: t must not precede t0");
  }
  OdeRhs rhs = [&omega](double s, const Eigen::VectorXd&, Eigen::VectorXd& dy) {
    const Mat6 w = omega(s);
    dy = Eigen::Map<const Eigen::VectorXd>(w.data(), 36);
  };
  const Eigen::VectorXd m =
      integrate(rhs, Eigen::VectorXd::Zero(36), t0, t, opts).eval(t);
  return Eigen::Map<const Mat6>(m.data());
}

LvlhState first_order_solution(const ModalBasis& basis, const Vec6& c0,
                               const PlantFn& omega, double t0, double t,
                               const IntegratorOptions& opts) {
  Vec6 c1 = c0;
  if (omega && t != t0) {
    c1 += integrated_omega(omega, t0, t, opts) * c0;
  }
  return basis.psi(t) * c1;
}

Vec6 reinitialize_constants(const ModalBasis& old_basis,
                            const ModalBasis& new_basis, const Vec6& c_old,
                            double t) {
  return new_basis.psi_inverse(t) * (old_basis.psi(t) * c_old);
}

std::vector<std::pair<double, LvlhState>> propagate_two_spacecraft(
    const InertialState& chief0, const LvlhState& x0,
    const PerturbationModel& truth, double t0, double t1, int samples,
    const IntegratorOptions& opts) {
  if (!(t1 > t0) || samples < 2) {
    throw ValidationError("propagate_two_spacecraft: bad span or sample count");
  }
  const PerturbationEval pe0 = truth.eval(chief0.r, chief0.v);
  const InertialState dep0 = deputy_from_relative(chief0, x0, pe0.accel);
  Eigen::VectorXd y0(12);
  y0 << chief0.vec(), dep0.vec();
  OdeRhs rhs = [&truth](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(12);
    dy.segment<3>(0) = y.segment<3>(3);
    dy.segment<3>(3) = truth.eval(y.segment<3>(0), y.segment<3>(3)).accel;
    dy.segment<3>(6) = y.segment<3>(9);
    dy.segment<3>(9) = truth.eval(y.segment<3>(6), y.segment<3>(9)).accel;
  };
  const DenseSolution sol = integrate(rhs, y0, t0, t1, opts);
  std::vector<std::pair<double, LvlhState>> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (double t : row_times(t0, t1, samples)) {
    const Eigen::VectorXd y = sol.eval(t);
    const InertialState chief = InertialState::from_vec(y.head<6>());
    const InertialState dep = InertialState::from_vec(y.tail<6>());
    const PerturbationEval pe = truth.eval(chief.r, chief.v);
    out.emplace_back(t, relative_state(chief, dep, pe.accel));
  }
  return out;
}

}  // namespace modal
