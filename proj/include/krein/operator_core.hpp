#pragma once

#include <functional>

#include "krein/errors.hpp"
#include "krein/linalg.hpp"

namespace krein {

/// Finite Hermitian H with its spectral decomposition. Immutable once
/// built; every functional-calculus routine in the library goes through it.
class OperatorModel {
 public:
  /// Symmetrizes the input, then diagonalizes it.
  explicit OperatorModel(const Mat& h);

  /// Real diagonal H; the decomposition is exact (eigvecs is a permutation).
  static OperatorModel diagonal(const RVec& entries);

  Eigen::Index dim() const { return h_.rows(); }
  const Mat& matrix() const { return h_; }
  const RVec& eigvals() const { return eigvals_; }
  const Mat& eigvecs() const { return eigvecs_; }
  double lambda_inf() const { return eigvals_(0); }
  /// ‖H‖₂ = max |λ_k|
  double norm() const;
  /// Minimum admissible distance between z and the spectrum.
  double guard() const { return 1e-8 * (1.0 + norm()); }
  bool is_diagonal() const { return diagonal_; }

  /// V · diag(f(λ_k)) · V†
  Mat apply(const std::function<cplx(double)>& f) const;

  /// Relative reconstruction error of V diag(λ) V† against H.
  double reconstruction_error() const;

 private:
  OperatorModel() = default;

  Mat h_;
  RVec eigvals_;
  Mat eigvecs_;
  bool diagonal_ = false;
};

/// min_k |z − λ_k|
double spectral_distance(const OperatorModel& model, cplx z);

/// (−H + z)^{-1}. Throws SpectrumHit inside the singularity guard.
Mat resolvent(const OperatorModel& model, cplx z);

/// Weight of the scale space 𝔥_s: W = (H² + 1)^{s/2}.
struct ScaleWeight {
  double s = 0.0;
  Mat w;
};

ScaleWeight scale_weight(const OperatorModel& model, double s);

/// ‖W(s_to) · L · W(s_from)^{-1}‖₂, the norm of L as a map 𝔥_{s_from} → 𝔥_{s_to}.
double op_norm_scale(const Mat& l, const OperatorModel& model, double s_from, double s_to);

/// 2×2 block operator on 𝔉 ⊕ 𝔉.
struct BlockOp2 {
  Mat a11, a12, a21, a22;

  static BlockOp2 identity(Eigen::Index dim);
  static BlockOp2 zero(Eigen::Index dim);
  static BlockOp2 diag(const Mat& top, const Mat& bottom);
  static BlockOp2 split(const Mat& full);

  Eigen::Index dim() const { return a11.rows(); }
  Mat assemble() const;
  BlockOp2 adjoint() const;
  /// a11 = a11†, a22 = a22†, a21 = a12† within a relative tolerance.
  bool is_symmetric(double tol = 1e-12) const;
  /// Largest relative block asymmetry, the quantity is_symmetric thresholds.
  double symmetry_defect() const;

  BlockOp2 operator+(const BlockOp2& o) const;
  BlockOp2 operator-(const BlockOp2& o) const;
  BlockOp2 operator*(const BlockOp2& o) const;
  BlockOp2 operator*(cplx c) const;
};

/// Largest block-wise relative difference.
double block_rel_diff(const BlockOp2& a, const BlockOp2& b);

enum class SchurPath { kSecondComplement, kDenseFallback };

/// a11 − a12 · a22^{-1} · a21. Throws SingularBlock when a22 is ill-conditioned.
Mat second_schur_complement(const BlockOp2& b);

/// Block inverse through the second Schur complement; falls back to the
/// assembled 2d×2d inverse when a22 or the complement is ill-conditioned.
/// Throws SingularBlock when both routes have condition estimate > 1e12.
BlockOp2 schur_invert(const BlockOp2& b, SchurPath* path = nullptr);

using ResolventMap = std::function<Mat(cplx)>;

/// ‖R(z) − R(w) − (w − z) R(z) R(w)‖₂
double pseudo_resolvent_defect(const ResolventMap& rmap, cplx z, cplx w);

}  // namespace krein
