#pragma once

#include <functional>

#include "krein/errors.hpp"
#include "krein/linalg.hpp"

namespace krein {

/// X = diag(d) + U V†. Used for diagonal H with finite-rank A, E and S, where
/// dense d×d storage is out of reach.
class FMat {
 public:
  FMat() = default;
  FMat(Vec d, Mat u, Mat v);

  static FMat diag(Vec d);
  static FMat identity(Eigen::Index n);
  static FMat zero(Eigen::Index n);
  /// U V† with a zero diagonal.
  static FMat low_rank(Mat u, Mat v);

  Eigen::Index dim() const { return d_.size(); }
  Eigen::Index rank() const { return u_.cols(); }
  const Vec& d() const { return d_; }
  const Mat& u() const { return u_; }
  const Mat& v() const { return v_; }
  /// Zero diagonal and no low-rank columns.
  bool is_zero() const;
  /// Bitwise equality of all three factors.
  bool same_as(const FMat& o) const;

  Mat dense() const;
  Vec apply(const Vec& x) const;
  FMat adjoint() const;

  FMat operator+(const FMat& o) const;
  /// Returns an exact zero when both operands are the same factors.
  FMat operator-(const FMat& o) const;
  FMat operator*(const FMat& o) const;
  FMat operator*(cplx c) const;

  /// Woodbury inverse. Throws SingularBlock when the diagonal or the
  /// capacitance matrix is ill-conditioned (condition estimate > 1e12).
  FMat inverse() const;

  /// Re-factors U V† through QR and SVD, dropping singular values below
  /// rel_tol times the largest.
  FMat compressed(double rel_tol = 1e-15) const;

 private:
  Vec d_;
  Mat u_;
  Mat v_;
};

/// ‖U V†‖₂, exact.
double low_rank_norm(const FMat& x);

/// ‖U V†‖₂ + max |d|, an upper bound on ‖X‖₂ that is exact when d = 0.
double norm_bound(const FMat& x);

/// f applied to a Hermitian X with zero diagonal: f(0)·1 + Q (f(C) − f(0)) Q†.
FMat low_rank_hermitian_function(const FMat& x, const std::function<double(double)>& f);

struct FBlock {
  FMat a11, a12, a21, a22;
};

/// Second-Schur-complement inverse in factored form; no dense fallback.
FBlock schur_invert(const FBlock& b);

/// diag(1/(z − h)). Throws SpectrumHit inside the guard 1e-8 (1 + max|h|).
FMat f_resolvent(const RVec& h, cplx z);

/// (−(diag(h) + P) + z)^{-1}. Throws SpectrumHit when the Woodbury core is singular.
FMat f_direct_resolvent(const RVec& h, const FMat& p, cplx z);

/// A R A† with R = diag(1/(λ∘ − h)).
FMat f_self_energy(const RVec& h, const FMat& a, double lambda_circ);

/// (1 − G†) S (1 − G), G = R A†.
FMat f_t_s(const RVec& h, const FMat& a, const FMat& s, double lambda_circ);

/// R_z + 𝔾_z (Θ + M_z)^{-1} 𝔾_z̄† with top-left block of Θ equal to `top_left`.
/// Covers both the cutoff formula (top_left = E_n − A_n R A_n†) and the
/// limit formula (top_left = T_S).
FMat f_boundary_resolvent(const RVec& h, const FMat& a, const FMat& top_left, double lambda_circ,
                          cplx z);

/// Cutoff resolvent through Θ_n + M_{n,z}.
FMat f_regularized_resolvent(const RVec& h, const FMat& a_n, const FMat& e_n, double lambda_circ,
                             cplx z);

/// Kreĭn resolvent of (diag(h), A, S, λ∘).
FMat f_krein_resolvent(const RVec& h, const FMat& a, const FMat& s, double lambda_circ, cplx z);

/// A_n† + A_n − E_n
FMat f_cutoff_perturbation(const FMat& a_n, const FMat& e_n);

}  // namespace krein
