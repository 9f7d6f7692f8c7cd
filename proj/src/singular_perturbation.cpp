#include "krein/singular_perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace krein {

namespace {

double s_star(double s) { return 1.0 / (1.0 - s); }

Mat identity(Eigen::Index n) { return Mat::Identity(n, n); }

Mat sandwich(const Mat& left, const Mat& mid, const Mat& right) { return left * mid * right; }

}  // namespace

Perturbation Perturbation::make(const Mat& a, double s_exponent, const OperatorModel& model) {
  if (!(s_exponent > 0.0 && s_exponent < 1.0)) {
    throw DomainError("Perturbation: s_exponent must lie strictly inside (0, 1)");
  }
  if (a.rows() != model.dim() || a.cols() != model.dim()) {
    throw DomainError("Perturbation: A must match the dimension of H");
  }
  return {a, s_exponent, op_norm_scale(a, model, s_exponent, 0.0)};
}

CorrectionS CorrectionS::make(const Mat& s, const OperatorModel& model) {
  if (s.rows() != model.dim() || s.cols() != model.dim()) {
    throw DomainError("CorrectionS: S must match the dimension of H");
  }
  CorrectionS c;
  c.s = hermitize(s);
  const double eps = model.guard();
  const Mat sv = c.s * model.eigvecs();
  double a = 0.0;
  for (Eigen::Index k = 0; k < model.dim(); ++k) {
    a = std::max(a, sv.col(k).norm() / (std::abs(model.eigvals()(k)) + eps));
  }
  c.kato_a = std::min(a, std::nextafter(1.0, 0.0));
  c.kato_b = spectral_norm(c.s);
  return c;
}

SingularModel::SingularModel(OperatorModel model, Perturbation pert, CorrectionS corr,
                             double lambda_circ)
    : model_(std::move(model)),
      pert_(std::move(pert)),
      corr_(std::move(corr)),
      lambda_circ_(lambda_circ) {
  if (!(lambda_circ_ < model_.lambda_inf())) {
    throw DomainError("SingularModel: lambda_circ must lie strictly below inf σ(H)");
  }
  if (pert_.a.rows() != model_.dim() || corr_.s.rows() != model_.dim()) {
    throw DomainError("SingularModel: dimension mismatch");
  }
  r_ = hermitize(resolvent(model_, lambda_circ_));
  g_ = (pert_.a * r_).adjoint();
}

double default_lambda_circ(double lambda_inf, double norm_s, double s_exponent) {
  const double li = lambda_inf;
  return li - 2.0 * std::max(std::sqrt(li * li + 1.0), std::pow(norm_s, s_star(s_exponent)));
}

double default_lambda_circ(const OperatorModel& model, const Perturbation& pert) {
  return default_lambda_circ(model.lambda_inf(), pert.norm_s, pert.s_exponent);
}

Mat g_z(const SingularModel& sm, cplx z) {
  return (sm.a() * resolvent(sm.model(), std::conj(z))).adjoint();
}

Mat BoundaryMap::row() const {
  Mat out(g.rows(), g.cols() + r.cols());
  out << g, r;
  return out;
}

BoundaryMap gg_z(const SingularModel& sm, cplx z) {
  return {g_z(sm, z), resolvent(sm.model(), z)};
}

BlockOp2 m_z(const SingularModel& sm, cplx z) {
  const BoundaryMap gz = gg_z(sm, z);
  const cplx c = z - sm.lambda_circ();
  const Mat gh = sm.g().adjoint();
  return BlockOp2{gh * gz.g, gh * gz.r, sm.r() * gz.g, sm.r() * gz.r} * c;
}

Mat t_s(const SingularModel& sm) {
  const Mat one_minus_g = identity(sm.dim()) - sm.g();
  return hermitize(sandwich(one_minus_g.adjoint(), sm.s(), one_minus_g));
}

BlockOp2 theta_s(const SingularModel& sm) {
  const Mat one_minus_g = identity(sm.dim()) - sm.g();
  return {t_s(sm), one_minus_g.adjoint(), one_minus_g, -sm.r()};
}

BlockOp2 theta_plus_m(const SingularModel& sm, cplx z) { return theta_s(sm) + m_z(sm, z); }

namespace {

// R_z + [G_z R_z] Λ [G_z̄†; R_z̄†]
Mat krein_assemble(const BoundaryMap& gz, const BoundaryMap& gzb, const BlockOp2& lam) {
  const Mat left_g = gz.g * lam.a11 + gz.r * lam.a21;
  const Mat left_r = gz.g * lam.a12 + gz.r * lam.a22;
  return gz.r + left_g * gzb.g.adjoint() + left_r * gzb.r.adjoint();
}

BlockOp2 invert_or_theta_singular(const BlockOp2& b) {
  try {
    return schur_invert(b);
  } catch (const SingularBlock& e) {
    throw ThetaSingular(std::string("Θ + M_z is not invertible: ") + e.what());
  }
}

}  // namespace

Mat krein_resolvent(const SingularModel& sm, cplx z) {
  const BoundaryMap gz = gg_z(sm, z);
  const BoundaryMap gzb = gg_z(sm, std::conj(z));
  const BlockOp2 lam = invert_or_theta_singular(theta_plus_m(sm, z));
  return krein_assemble(gz, gzb, lam);
}

Mat h_s_direct(const SingularModel& sm) {
  const Mat& a = sm.a();
  return sm.model().matrix() + a.adjoint() + a - a * sm.g() - t_s(sm);
}

double lambda_threshold(const OperatorModel& model, const Perturbation& pert) {
  const double li = model.lambda_inf();
  return li - std::max(std::sqrt(li * li + 1.0), std::pow(pert.norm_s, s_star(pert.s_exponent)));
}

double lambda_threshold(const SingularModel& sm) { return lambda_threshold(sm.model(), sm.pert()); }

double gamma_threshold(const Perturbation& pert) {
  return std::max(1.0, std::pow(pert.norm_s, s_star(pert.s_exponent)));
}

double gamma_threshold(const SingularModel& sm) { return gamma_threshold(sm.pert()); }

Mat s_tilde_raw(const SingularModel& sm, double lambda_new) {
  if (!(lambda_new < lambda_threshold(sm))) {
    throw NotBelowThreshold("s_tilde: lambda_new must lie below lambda_threshold");
  }
  const auto n = sm.dim();
  const Mat g_new = g_z(sm, lambda_new);
  const Mat core = sm.a() * (sm.g() - g_new) + t_s(sm);
  // X (1 − G_λ)^{-1} = ((1 − G_λ)^{-†} X†)†, solved against the adjoint system
  Eigen::PartialPivLU<Mat> right_adj(identity(n) - g_new.adjoint());
  const Mat x_right = right_adj.solve(core.adjoint()).adjoint();
  return right_adj.solve(x_right);
}

CorrectionS s_tilde(const SingularModel& sm, double lambda_new) {
  const Mat raw = s_tilde_raw(sm, lambda_new);
  const double scale = std::max(spectral_norm(raw), std::numeric_limits<double>::min());
  if (hermitian_defect(raw) / scale > 1e-10) {
    throw InternalMismatch("s_tilde: coordinate change produced a non-symmetric S̃");
  }
  return CorrectionS::make(raw, sm.model());
}

SingularModel reparametrize(const SingularModel& sm, double lambda_new) {
  return SingularModel(sm.model(), sm.pert(), s_tilde(sm, lambda_new), lambda_new);
}

Mat self_energy_operator(const OperatorModel& model, const Mat& a_n, double lambda_circ) {
  return (a_n * resolvent(model, lambda_circ)) * a_n.adjoint();
}

BlockOp2 theta_n(const OperatorModel& model, const Mat& a_n, const Mat& e_n, double lambda_circ) {
  if (!(lambda_circ < model.lambda_inf())) {
    throw DomainError("theta_n: lambda_circ must lie strictly below inf σ(H)");
  }
  const Mat r = resolvent(model, lambda_circ);
  const Mat one_minus_g = identity(model.dim()) - r * a_n.adjoint();
  return {e_n - self_energy_operator(model, a_n, lambda_circ), one_minus_g.adjoint(), one_minus_g,
          -r};
}

BlockOp2 m_n_z(const OperatorModel& model, const Mat& a_n, double lambda_circ, cplx z) {
  const Mat r = resolvent(model, lambda_circ);
  const Mat rz = resolvent(model, z);
  const Mat g = r * a_n.adjoint();
  const Mat gz = rz * a_n.adjoint();
  const Mat gh = g.adjoint();
  return BlockOp2{gh * gz, gh * rz, r * gz, r * rz} * (z - lambda_circ);
}

BlockOp2 theta_n_plus_m(const OperatorModel& model, const Mat& a_n, const Mat& e_n,
                        double lambda_circ, cplx z) {
  return theta_n(model, a_n, e_n, lambda_circ) + m_n_z(model, a_n, lambda_circ, z);
}

Mat regularized_resolvent(const OperatorModel& model, const Mat& a_n, const Mat& e_n,
                          double lambda_circ, cplx z) {
  const Mat rz = resolvent(model, z);
  const Mat rzb = resolvent(model, std::conj(z));
  const BoundaryMap gz{rz * a_n.adjoint(), rz};
  const BoundaryMap gzb{rzb * a_n.adjoint(), rzb};
  const BlockOp2 lam = invert_or_theta_singular(theta_n_plus_m(model, a_n, e_n, lambda_circ, z));
  return krein_assemble(gz, gzb, lam);
}

Mat cutoff_hamiltonian(const OperatorModel& model, const Mat& a_n, const Mat& e_n) {
  return model.matrix() + a_n.adjoint() + a_n - e_n;
}

Mat direct_resolvent(const Mat& x, cplx z) {
  const auto n = x.rows();
  Eigen::PartialPivLU<Mat> lu(z * identity(n) - x);
  if (!(lu.rcond() * 1e12 >= 1.0)) {
    throw SpectrumHit("direct_resolvent: z is numerically in the spectrum");
  }
  return lu.inverse();
}

}  // namespace krein
