#include "modal/monodromy.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace modal {

const char* to_string(ModeKind k) {
  switch (k) {
    case ModeKind::trivial: return "trivial";
    case ModeKind::drift: return "drift";
    case ModeKind::periodic: return "trivial-periodic";
    case ModeKind::center: return "center";
    case ModeKind::stable: return "stable";
    case ModeKind::unstable: return "unstable";
  }
  return "?";
}

ModeKind mode_kind_from_string(const std::string& s) {
  for (ModeKind k : {ModeKind::trivial, ModeKind::drift, ModeKind::periodic,
                     ModeKind::center, ModeKind::stable, ModeKind::unstable}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown mode kind: " + s);
}

const char* to_string(ModeBlock::Kind k) {
  switch (k) {
    case ModeBlock::Kind::chain: return "chain";
    case ModeBlock::Kind::periodic: return "periodic";
    case ModeBlock::Kind::center: return "center";
    case ModeBlock::Kind::real_pair: return "real_pair";
  }
  return "?";
}

ModeBlock::Kind block_kind_from_string(const std::string& s) {
  for (ModeBlock::Kind k :
       {ModeBlock::Kind::chain, ModeBlock::Kind::periodic,
        ModeBlock::Kind::center, ModeBlock::Kind::real_pair}) {
    if (s == to_string(k)) return k;
  }
  throw ValidationError("unknown mode block kind: " + s);
}

Eigen::Matrix2d ModeBlock::exp_k(double tau) const {
  switch (kind) {
    case Kind::periodic:
      return Eigen::Matrix2d::Identity();
    case Kind::chain:
      return Eigen::Matrix2d::Identity() + tau * k;
    case Kind::center: {
      // k = [[0, -p], [q, 0]] with p q = omega^2, so k^2 = -omega^2 I.
      const double w = std::sqrt(-k(0, 1) * k(1, 0));
      return std::cos(w * tau) * Eigen::Matrix2d::Identity() +
             (w > 0.0 ? std::sin(w * tau) / w : tau) * k;
    }
    case Kind::real_pair: {
      Eigen::Matrix2d e = Eigen::Matrix2d::Zero();
      e(0, 0) = std::exp(k(0, 0) * tau);
      e(1, 1) = std::exp(k(1, 1) * tau);
      return e;
    }
  }
  return Eigen::Matrix2d::Identity();
}

namespace {

using CVec6 = Eigen::Matrix<std::complex<double>, 6, 1>;

// Unit norm with the largest-modulus component rotated to the positive real
// axis. Pins the phase (and for real eigenvectors the sign) the same way
// LAPACK-based tools report eigenvectors.
CVec6 fix_phase(CVec6 v) {
  v.normalize();
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  v *= std::abs(v[imax]) / v[imax];
  return v;
}

Vec6 fix_sign(Vec6 v) {
  v.normalize();
  int imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  return v;
}

[[noreturn]] void reject(const std::string& what) {
  throw NumericalError("analyze_monodromy: " + what);
}

}  // namespace

MonodromyAnalysis analyze_monodromy(const Mat6& phi, const Vec6& rate0,
                                    double period,
                                    const MonodromyOptions& opts) {
  if (period <= 0.0) {
    throw ValidationError("analyze_monodromy: period must be positive");
  }
  const double det = phi.determinant();
  if (std::abs(det - 1.0) > opts.det_tol) {
    std::ostringstream msg;
    msg << "analyze_monodromy: det = " << det
        << " violates the volume-preserving flow property";
    throw ValidationError(msg.str());
  }

  Eigen::EigenSolver<Mat6> es(phi);
  if (es.info() != Eigen::Success) reject("eigensolver failed");
  const CVec6 lam = es.eigenvalues();
  const Eigen::Matrix<std::complex<double>, 6, 6> evec = es.eigenvectors();

  // Reciprocal pairing is a structural property of the flow; losing it means
  // the input is not a monodromy matrix of the supported problem classes.
  for (int i = 0; i < 6; ++i) {
    bool paired = false;
    for (int j = 0; j < 6 && !paired; ++j) {
      paired = std::abs(lam[i] * lam[j] - 1.0) < opts.recip_tol;
    }
    if (!paired) {
      std::ostringstream msg;
      msg << "multiplier " << lam[i] << " has no reciprocal partner";
      reject(msg.str());
    }
  }

  std::vector<int> unity, other;
  for (int i = 0; i < 6; ++i) {
    (std::abs(lam[i] - 1.0) < opts.unity_tol ? unity : other).push_back(i);
  }

  MonodromyAnalysis out;
  out.phi = phi;
  out.period = period;

  const Mat6 n = phi - Mat6::Identity();
  Eigen::JacobiSVD<Mat6> svd(n, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();

  Vec6 v1, v2;
  double drift_s = 0.0;

  if (unity.size() == 2) {
    // Defective unity pair: the orbit rate spans the lone eigendirection and
    // the generalized vector comes from the pseudoinverse restricted to the
    // range of (phi - I) (the smallest singular direction is its kernel).
    if (rate0.norm() == 0.0) {
      throw ValidationError("analyze_monodromy: zero state rate");
    }
    v1 = rate0.normalized();
    if ((n * v1).norm() > opts.chain_tol * sv[0]) {
      reject("state rate is not a unity eigenvector of the monodromy matrix");
    }
    Vec6 rhs_coef = svd.matrixU().transpose() * v1;
    v2.setZero();
    for (int i = 0; i < 5; ++i) {
      v2 += rhs_coef[i] / sv[i] * svd.matrixV().col(i);
    }
    v2 -= v1.dot(v2) * v1;  // the chain fixes v2 only modulo v1
    v2.normalize();
    drift_s = v1.dot(n * v2);
    if ((n * v2 - drift_s * v1).norm() > opts.chain_tol * sv[0]) {
      reject("unity pair is not a single Jordan chain");
    }
  } else if (unity.size() == 6) {
    // Two-body relative motion: (phi - I) is rank one and nilpotent, with a
    // single drift chain and four periodic directions.
    if (sv[0] < 1e-12 * phi.norm()) {
      reject(
          "monodromy matrix equals the identity; no drift chain to anchor "
          "the decomposition (outside the supported orbit classes)");
    }
    if (sv[1] > 1e-6 * sv[0]) {
      reject("all-unity spectrum with more than one defective block");
    }
    v1 = svd.matrixU().col(0);
    v2 = svd.matrixV().col(0);
    if (std::abs(v1.dot(v2)) > 1e-6) {
      reject("all-unity defect is not nilpotent");
    }
    // Along-track drift fixes the sign; fall back to the generic convention
    // when the drift direction has no along-track component.
    if (std::abs(v1[1]) > 1e-8) {
      if (v1[1] < 0.0) v1 = -v1;
    } else {
      v1 = fix_sign(v1);
    }
    if (v1.dot(n * v2) < 0.0) v2 = -v2;
    drift_s = v1.dot(n * v2);
  } else {
    std::ostringstream msg;
    msg << unity.size() << " unity multipliers (supported: 2 or 6); "
        << "near-unity nontrivial multipliers make the classification "
        << "ambiguous at unity_tol = " << opts.unity_tol;
    reject(msg.str());
  }

  out.vbar.col(0) = v1;
  out.vbar.col(1) = v2;
  out.multipliers[0] = 1.0;
  out.multipliers[1] = 1.0;
  out.kinds[0] = ModeKind::trivial;
  out.kinds[1] = ModeKind::drift;
  ModeBlock chain;
  chain.kind = ModeBlock::Kind::chain;
  chain.col = 0;
  chain.size = 2;
  chain.k(0, 1) = drift_s / period;
  out.blocks.push_back(chain);

  int col = 2;
  if (unity.size() == 6) {
    // Orthonormal completion; every direction orthogonal to v2 is periodic.
    Eigen::Matrix<double, 6, 2> chain_cols;
    chain_cols.col(0) = v1;
    chain_cols.col(1) = v2;
    const Mat6 q =
        Eigen::FullPivHouseholderQR<Eigen::Matrix<double, 6, 2>>(chain_cols)
            .matrixQ();
    for (int i = 2; i < 6; ++i, ++col) {
      const Vec6 gen = fix_sign(q.col(i));
      if ((n * gen).norm() > opts.chain_tol * sv[0]) {
        reject("periodic completion left the kernel of (phi - I)");
      }
      out.vbar.col(col) = gen;
      out.multipliers[col] = 1.0;
      out.kinds[col] = ModeKind::periodic;
      ModeBlock b;
      b.kind = ModeBlock::Kind::periodic;
      b.col = col;
      b.size = 1;
      out.blocks.push_back(b);
    }
  } else {
    // Group the four nontrivial multipliers into center and real pairs.
    struct Center {
      double omega;
      std::complex<double> lambda;
      CVec6 v;
    };
    std::vector<Center> centers;
    std::vector<std::pair<int, int>> real_pairs;  // (stable, unstable)
    std::vector<bool> used(6, false);

    for (int idx : other) {
      if (used[idx]) continue;
      const std::complex<double> l = lam[idx];
      if (std::abs(l.imag()) > 1e-9 * (1.0 + std::abs(l))) {
        if (std::abs(std::norm(l) - 1.0) > opts.recip_tol) {
          reject("complex multiplier off the unit circle (saddle quartet)");
        }
        // Keep the upper-half-plane member; mark its conjugate partner used.
        if (l.imag() < 0.0) continue;
        for (int j : other) {
          if (j != idx && !used[j] &&
              std::abs(lam[j] - std::conj(l)) <
                  opts.recip_tol * (1.0 + std::abs(l))) {
            used[j] = true;
            break;
          }
        }
        used[idx] = true;
        centers.push_back({std::arg(l) / period, l, fix_phase(evec.col(idx))});
      } else {
        const double lr = l.real();
        if (lr < 0.0) {
          reject(
              "negative real multiplier requires a complex logarithm branch");
        }
        if (std::abs(lr - 1.0) < opts.unity_tol) continue;  // already counted
        if (lr > 1.0) continue;  // pair is registered from its stable member
        int partner = -1;
        for (int j : other) {
          if (j != idx && !used[j] &&
              std::abs(lam[j].imag()) < 1e-9 * (1.0 + std::abs(lam[j])) &&
              std::abs(lam[j].real() * lr - 1.0) < opts.recip_tol) {
            partner = j;
            break;
          }
        }
        if (partner < 0) reject("real multiplier without reciprocal partner");
        used[idx] = used[partner] = true;
        real_pairs.emplace_back(idx, partner);
      }
    }

    std::sort(centers.begin(), centers.end(),
              [](const Center& a, const Center& b) { return a.omega > b.omega; });

    for (const Center& c : centers) {
      ModeBlock b;
      b.kind = ModeBlock::Kind::center;
      b.col = col;
      b.size = 2;
      b.omega = c.omega;
      b.k(0, 1) = -c.omega;
      b.k(1, 0) = c.omega;
      out.vbar.col(col) = 2.0 * c.v.real();
      out.vbar.col(col + 1) = -2.0 * c.v.imag();
      out.multipliers[col] = c.lambda;
      out.multipliers[col + 1] = std::conj(c.lambda);
      out.kinds[col] = ModeKind::center;
      out.kinds[col + 1] = ModeKind::center;
      out.blocks.push_back(b);
      col += 2;
    }
    for (auto [is, iu] : real_pairs) {
      const double ls = lam[is].real();
      const double lu = lam[iu].real();
      ModeBlock b;
      b.kind = ModeBlock::Kind::real_pair;
      b.col = col;
      b.size = 2;
      b.sigma = std::log(lu) / period;
      b.k(0, 0) = std::log(ls) / period;
      b.k(1, 1) = b.sigma;
      out.vbar.col(col) = fix_sign(fix_phase(evec.col(is)).real());
      out.vbar.col(col + 1) = fix_sign(fix_phase(evec.col(iu)).real());
      out.multipliers[col] = ls;
      out.multipliers[col + 1] = lu;
      out.kinds[col] = ModeKind::stable;
      out.kinds[col + 1] = ModeKind::unstable;
      out.blocks.push_back(b);
      col += 2;
    }
  }

  if (col != 6 && unity.size() == 2) {
    reject("multiplier grouping did not fill the basis");
  }

  // Structural check: phi Vbar = Vbar exp(K T) ties eigenvalues, vectors,
  // chain coefficient, and sign conventions together.
  Mat6 ekt = Mat6::Zero();
  for (const ModeBlock& b : out.blocks) {
    ekt.block(b.col, b.col, b.size, b.size) =
        b.exp_k(period).topLeftCorner(b.size, b.size);
  }
  const Mat6 lhs = phi * out.vbar;
  const Mat6 rhs = out.vbar * ekt;
  if ((lhs - rhs).norm() > 1e-6 * (1.0 + lhs.norm())) {
    reject("block structure does not reproduce the monodromy matrix");
  }
  return out;
}

}  // namespace modal
