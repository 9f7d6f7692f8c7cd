#pragma once

#include "krein/operator_core.hpp"

namespace krein {

/// Truncation of the annihilation-type map A together with its declared
/// smoothness class s and the cached norm ‖A‖ as a map 𝔥_s → 𝔉.
struct Perturbation {
  Mat a;
  double s_exponent = 0.5;
  double norm_s = 0.0;

  /// Validates s ∈ (0, 1) and computes norm_s against `model`.
  static Perturbation make(const Mat& a, double s_exponent, const OperatorModel& model);
};

/// Symmetric H-small correction S with estimated Kato constants (a, b).
struct CorrectionS {
  Mat s;
  double kato_a = 0.0;
  double kato_b = 0.0;

  /// Hermitizes S and estimates (a, b) on the eigenbasis of H.
  static CorrectionS make(const Mat& s, const OperatorModel& model);
};

/// The data (H, A, S, λ∘). R := R_{λ∘} and G := G_{λ∘} are cached.
class SingularModel {
 public:
  SingularModel(OperatorModel model, Perturbation pert, CorrectionS corr, double lambda_circ);

  const OperatorModel& model() const { return model_; }
  const Perturbation& pert() const { return pert_; }
  const CorrectionS& corr() const { return corr_; }
  double lambda_circ() const { return lambda_circ_; }
  const Mat& a() const { return pert_.a; }
  const Mat& s() const { return corr_.s; }
  const Mat& r() const { return r_; }
  const Mat& g() const { return g_; }
  Eigen::Index dim() const { return model_.dim(); }

 private:
  OperatorModel model_;
  Perturbation pert_;
  CorrectionS corr_;
  double lambda_circ_;
  Mat r_;
  Mat g_;
};

/// λ_inf − 2·max(√(λ_inf²+1), ‖A‖^{s*}): strictly below the
/// invertibility threshold for 1 − G_λ.
double default_lambda_circ(const OperatorModel& model, const Perturbation& pert);
double default_lambda_circ(double lambda_inf, double norm_s, double s_exponent);

/// G_z = (A R_z̄)†
Mat g_z(const SingularModel& sm, cplx z);

/// The block row 𝔾_z = [G_z | R_z] acting on 𝔉 ⊕ 𝔉.
struct BoundaryMap {
  Mat g;
  Mat r;

  Vec apply(const Vec& psi, const Vec& phi) const { return g * psi + r * phi; }
  /// d × 2d matrix [G_z R_z]
  Mat row() const;
};

BoundaryMap gg_z(const SingularModel& sm, cplx z);

/// M_z = (z − λ∘) 𝔾† 𝔾_z
BlockOp2 m_z(const SingularModel& sm, cplx z);

/// T_S = (1 − G†) S (1 − G)
Mat t_s(const SingularModel& sm);

/// Θ_S = [[T_S, 1 − G†], [1 − G, −R]]
BlockOp2 theta_s(const SingularModel& sm);

/// Θ_S + M_z
BlockOp2 theta_plus_m(const SingularModel& sm, cplx z);

/// R_z + 𝔾_z (Θ_S + M_z)^{-1} 𝔾_z̄†. Throws ThetaSingular off Z_S.
Mat krein_resolvent(const SingularModel& sm, cplx z);

/// The explicit finite-dimensional H_S = H + A† + A − A G − T_S.
Mat h_s_direct(const SingularModel& sm);

double lambda_threshold(const OperatorModel& model, const Perturbation& pert);
double lambda_threshold(const SingularModel& sm);
double gamma_threshold(const Perturbation& pert);
double gamma_threshold(const SingularModel& sm);

/// Unsymmetrized S̃ for the coordinate change λ∘ → lambda_new.
Mat s_tilde_raw(const SingularModel& sm, double lambda_new);

/// S̃ after hermitization, with recomputed Kato constants. Throws
/// NotBelowThreshold unless lambda_new < lambda_threshold(sm), and
/// InternalMismatch when the raw asymmetry exceeds 1e-10 relative.
CorrectionS s_tilde(const SingularModel& sm, double lambda_new);

/// (H, A, S̃, lambda_new): the same operator H_S in different coordinates.
SingularModel reparametrize(const SingularModel& sm, double lambda_new);

/// A_n R A_n†, the bare self-energy of a regular cutoff map.
Mat self_energy_operator(const OperatorModel& model, const Mat& a_n, double lambda_circ);

/// Θ_n = [[E_n − A_n R A_n†, 1 − G_n†], [1 − G_n, −R]] with G_n = R A_n†.
BlockOp2 theta_n(const OperatorModel& model, const Mat& a_n, const Mat& e_n, double lambda_circ);

/// M_{n,z} = (z − λ∘) 𝔾_n† 𝔾_{n,z}
BlockOp2 m_n_z(const OperatorModel& model, const Mat& a_n, double lambda_circ, cplx z);

/// Θ_n + M_{n,z}
BlockOp2 theta_n_plus_m(const OperatorModel& model, const Mat& a_n, const Mat& e_n,
                        double lambda_circ, cplx z);

/// R_z + 𝔾_{n,z} (Θ_n + M_{n,z})^{-1} 𝔾_{n,z̄}†
Mat regularized_resolvent(const OperatorModel& model, const Mat& a_n, const Mat& e_n,
                          double lambda_circ, cplx z);

/// H + A_n† + A_n − E_n
Mat cutoff_hamiltonian(const OperatorModel& model, const Mat& a_n, const Mat& e_n);

/// (−X + z)^{-1} by dense LU; the oracle every Kreĭn-type formula is
/// checked against. Throws SpectrumHit when the solve is ill-conditioned.
Mat direct_resolvent(const Mat& x, cplx z);

}  // namespace krein
