#pragma once

#include <array>
#include <complex>
#include <vector>

#include "modal/types.hpp"

namespace modal {

/// Classification of one modal-basis column.
enum class ModeKind { trivial, drift, periodic, center, stable, unstable };

const char* to_string(ModeKind k);
ModeKind mode_kind_from_string(const std::string& s);

/// One real block of the LTI generator K (Lambda = Vbar K Vbar^-1).
/// Column layout in Vbar:
///   chain:     [v1, v2] with M v2 = v2 + s v1, K = [[0, s/T], [0, 0]]
///   center:    [2 Re v, -2 Im v], K = [[0, -w], [w, 0]]
///   real_pair: [v_stable, v_unstable], K = diag(ln ls, ln lu) / T
///   periodic:  single column with M v = v, K = [0]
struct ModeBlock {
  enum class Kind { chain, periodic, center, real_pair };

  Kind kind = Kind::periodic;
  int col = 0;   // first column in Vbar
  int size = 1;  // 1 or 2
  double omega = 0.0;  // center frequency [rad per time unit]
  double sigma = 0.0;  // real pair: unstable exponent [1 per time unit]
  Eigen::Matrix2d k = Eigen::Matrix2d::Zero();  // top-left size x size used

  /// Analytic exp(K tau) of this block (size x size top-left of the result).
  Eigen::Matrix2d exp_k(double tau) const;
};

const char* to_string(ModeBlock::Kind k);
ModeBlock::Kind block_kind_from_string(const std::string& s);

struct MonodromyOptions {
  double det_tol = 1e-6;
  /// |lambda - 1| band for the trivial set. The defective unity pair of a
  /// numerical monodromy matrix splits as sqrt of the matrix error; orbits
  /// with close planetary passes (large STM entries) reach ~8e-4 splitting
  /// at double precision even with the orbit closed to 1e-12, while the
  /// nearest genuine non-unity multiplier of the supported orbit classes
  /// stays |lambda - 1| > 0.4.
  double unity_tol = 1e-3;
  double recip_tol = 1e-6;   // |lambda_i lambda_j - 1| pairing band
  double chain_tol = 1e-5;   // relative residual of the Jordan chain relation
};

/// Real modal structure of a monodromy matrix.
struct MonodromyAnalysis {
  Mat6 phi;       // Phi(t0 + T, t0)
  double period = 0.0;
  /// Multipliers in Vbar column order (chain columns both report 1).
  std::array<std::complex<double>, 6> multipliers{};
  std::array<ModeKind, 6> kinds{};
  Mat6 vbar;      // real generator columns at the epoch
  std::vector<ModeBlock> blocks;
};

/// Eigenanalysis of the monodromy matrix into real modal blocks.
///
/// `rate0` is the orbit's state rate at the epoch; for a periodic orbit it is
/// an eigenvector for the unity multiplier and anchors the Jordan chain.
/// Supported spectra: one defective unity pair plus centers / positive real
/// reciprocal pairs (periodic orbits of the restricted three-body problem),
/// and the rank-one defective all-unity spectrum of two-body relative motion.
/// Anything else (negative real multipliers, complex saddles, extra defective
/// blocks, near-unity nontrivial multipliers) is rejected with a diagnostic.
MonodromyAnalysis analyze_monodromy(const Mat6& phi, const Vec6& rate0,
                                    double period,
                                    const MonodromyOptions& opts = {});

}  // namespace modal
