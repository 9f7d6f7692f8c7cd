#include "krein/factored.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace krein {

namespace {

constexpr double kCondLimit = 1e12;

struct ThinQr {
  Mat q;
  Mat r;
};

ThinQr thin_qr(const Mat& x) {
  const auto n = x.rows();
  const auto k = std::min(n, x.cols());
  Eigen::HouseholderQR<Mat> qr(x);
  ThinQr out;
  out.q = qr.householderQ() * Mat::Identity(n, k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

Mat hcat(const Mat& a, const Mat& b) {
  Mat out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

FMat::FMat(Vec d, Mat u, Mat v) : d_(std::move(d)), u_(std::move(u)), v_(std::move(v)) {
  if (u_.rows() != d_.size() || v_.rows() != d_.size() || u_.cols() != v_.cols()) {
    throw DomainError("FMat: factor shapes do not match");
  }
}

FMat FMat::diag(Vec d) {
  const auto n = d.size();
  return FMat(std::move(d), Mat(n, 0), Mat(n, 0));
}

FMat FMat::identity(Eigen::Index n) { return diag(Vec::Ones(n)); }

FMat FMat::zero(Eigen::Index n) { return diag(Vec::Zero(n)); }

FMat FMat::low_rank(Mat u, Mat v) {
  const auto n = u.rows();
  return FMat(Vec::Zero(n), std::move(u), std::move(v));
}

bool FMat::is_zero() const { return rank() == 0 && (d_.array() == cplx(0.0)).all(); }

bool FMat::same_as(const FMat& o) const {
  return d_.size() == o.d_.size() && u_.cols() == o.u_.cols() && d_ == o.d_ && u_ == o.u_ &&
         v_ == o.v_;
}

Mat FMat::dense() const {
  Mat out = u_ * v_.adjoint();
  out.diagonal() += d_;
  return out;
}

Vec FMat::apply(const Vec& x) const {
  return d_.cwiseProduct(x) + u_ * (v_.adjoint() * x);
}

FMat FMat::adjoint() const { return FMat(d_.conjugate(), v_, u_); }

FMat FMat::operator+(const FMat& o) const {
  return FMat(d_ + o.d_, hcat(u_, o.u_), hcat(v_, o.v_)).compressed();
}

FMat FMat::operator-(const FMat& o) const {
  if (same_as(o)) return zero(dim());
  return FMat(d_ - o.d_, hcat(u_, -o.u_), hcat(v_, o.v_)).compressed();
}

FMat FMat::operator*(const FMat& o) const {
  if (dim() != o.dim()) throw DomainError("FMat: dimension mismatch in product");
  // (D1 + U1V1†)(D2 + U2V2†) = D1D2 + [D1U2, U1] [V2, D2†V1 + V2(U2†V1)]†
  Mat u = hcat(d_.asDiagonal() * o.u_, u_);
  Mat v = hcat(o.v_, o.d_.conjugate().asDiagonal() * v_ + o.v_ * (o.u_.adjoint() * v_));
  return FMat(d_.cwiseProduct(o.d_), std::move(u), std::move(v)).compressed();
}

FMat FMat::operator*(cplx c) const { return FMat(d_ * c, u_ * c, v_); }

FMat FMat::inverse() const {
  const RVec mag = d_.cwiseAbs();
  const double lo = mag.size() ? mag.minCoeff() : 0.0;
  const double hi = mag.size() ? mag.maxCoeff() : 0.0;
  if (!(lo > 0.0) || hi / lo > kCondLimit) {
    throw SingularBlock("FMat::inverse: diagonal part is singular or ill-conditioned");
  }
  const Vec dinv = d_.cwiseInverse();
  if (rank() == 0) return diag(dinv);
  const Mat dinv_u = dinv.asDiagonal() * u_;
  const Mat cap = Mat::Identity(rank(), rank()) + v_.adjoint() * dinv_u;
  Eigen::PartialPivLU<Mat> lu(cap);
  if (!(lu.rcond() * kCondLimit >= 1.0)) {
    throw SingularBlock("FMat::inverse: Woodbury capacitance is ill-conditioned");
  }
  // D^{-1} − D^{-1}U (1 + V†D^{-1}U)^{-1} V†D^{-1}
  Mat u = -dinv_u * lu.inverse();
  Mat v = dinv.conjugate().asDiagonal() * v_;
  return FMat(dinv, std::move(u), std::move(v)).compressed();
}

FMat FMat::compressed(double rel_tol) const {
  if (rank() == 0) return *this;
  const ThinQr qu = thin_qr(u_);
  const ThinQr qv = thin_qr(v_);
  Eigen::JacobiSVD<Mat> svd(qu.r * qv.r.adjoint(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  Eigen::Index keep = 0;
  while (keep < sv.size() && sv(keep) > rel_tol * top && sv(keep) > 0.0) ++keep;
  Mat u = qu.q * (svd.matrixU().leftCols(keep) * sv.head(keep).asDiagonal());
  Mat v = qv.q * svd.matrixV().leftCols(keep);
  return FMat(d_, std::move(u), std::move(v));
}

double low_rank_norm(const FMat& x) {
  if (x.rank() == 0) return 0.0;
  const ThinQr qu = thin_qr(x.u());
  const ThinQr qv = thin_qr(x.v());
  return spectral_norm(qu.r * qv.r.adjoint());
}

double norm_bound(const FMat& x) {
  const double diag = x.dim() ? x.d().cwiseAbs().maxCoeff() : 0.0;
  return low_rank_norm(x) + diag;
}

FMat low_rank_hermitian_function(const FMat& x, const std::function<double(double)>& f) {
  if (!(x.d().array() == cplx(0.0)).all()) {
    throw DomainError("low_rank_hermitian_function: diagonal part must vanish");
  }
  const auto n = x.dim();
  const double f0 = f(0.0);
  if (x.rank() == 0) return FMat::diag(Vec::Constant(n, f0));
  const ThinQr q = thin_qr(hcat(x.u(), x.v()));
  const Mat core = hermitize((q.q.adjoint() * x.u()) * (q.q.adjoint() * x.v()).adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(core);
  RVec shift(es.eigenvalues().size());
  for (Eigen::Index k = 0; k < shift.size(); ++k) shift(k) = f(es.eigenvalues()(k)) - f0;
  const Mat qw = q.q * es.eigenvectors();
  Mat u = qw * shift.asDiagonal();
  return FMat(Vec::Constant(n, f0), std::move(u), qw).compressed();
}

FBlock schur_invert(const FBlock& b) {
  const FMat inv22 = b.a22.inverse();
  const FMat x = inv22 * b.a21;
  const FMat y = b.a12 * inv22;
  const FMat sinv = (b.a11 - b.a12 * x).inverse();
  const FMat sinv_y = sinv * y;
  return {sinv, sinv_y * cplx(-1.0), (x * sinv) * cplx(-1.0), inv22 + x * sinv_y};
}

FMat f_resolvent(const RVec& h, cplx z) {
  const double guard = 1e-8 * (1.0 + (h.size() ? h.cwiseAbs().maxCoeff() : 0.0));
  const Vec zh = (z - h.cast<cplx>().array()).matrix();
  if (zh.size() && zh.cwiseAbs().minCoeff() < guard) {
    throw SpectrumHit("f_resolvent: z is within the singularity guard of an eigenvalue");
  }
  return FMat::diag(zh.cwiseInverse());
}

FMat f_direct_resolvent(const RVec& h, const FMat& p, cplx z) {
  const Vec zh = (z - h.cast<cplx>().array()).matrix();
  try {
    return (FMat::diag(zh) - p).inverse();
  } catch (const SingularBlock& e) {
    throw SpectrumHit(std::string("f_direct_resolvent: ") + e.what());
  }
}

FMat f_self_energy(const RVec& h, const FMat& a, double lambda_circ) {
  return (a * f_resolvent(h, lambda_circ)) * a.adjoint();
}

FMat f_t_s(const RVec& h, const FMat& a, const FMat& s, double lambda_circ) {
  if (s.is_zero()) return FMat::zero(h.size());
  const FMat one_minus_g = FMat::identity(h.size()) - f_resolvent(h, lambda_circ) * a.adjoint();
  return (one_minus_g.adjoint() * s) * one_minus_g;
}

FMat f_boundary_resolvent(const RVec& h, const FMat& a, const FMat& top_left, double lambda_circ,
                          cplx z) {
  const auto n = h.size();
  const FMat one = FMat::identity(n);
  const FMat r = f_resolvent(h, lambda_circ);
  const FMat rz = f_resolvent(h, z);
  const FMat rzb = f_resolvent(h, std::conj(z));
  const FMat ah = a.adjoint();
  const FMat g = r * ah;
  const FMat gz = rz * ah;
  const FMat gzb = rzb * ah;
  const FMat gh = g.adjoint();
  const cplx c = z - lambda_circ;

  const FBlock sum{top_left + (gh * gz) * c, (one - gh) + (gh * rz) * c,
                   (one - g) + (r * gz) * c, (r * rz) * c - r};
  FBlock lam;
  try {
    lam = schur_invert(sum);
  } catch (const SingularBlock& e) {
    throw ThetaSingular(std::string("Θ + M_z is not invertible: ") + e.what());
  }
  const FMat left_g = gz * lam.a11 + rz * lam.a21;
  const FMat left_r = gz * lam.a12 + rz * lam.a22;
  return rz + left_g * gzb.adjoint() + left_r * rzb.adjoint();
}

FMat f_regularized_resolvent(const RVec& h, const FMat& a_n, const FMat& e_n, double lambda_circ,
                             cplx z) {
  return f_boundary_resolvent(h, a_n, e_n - f_self_energy(h, a_n, lambda_circ), lambda_circ, z);
}

FMat f_krein_resolvent(const RVec& h, const FMat& a, const FMat& s, double lambda_circ, cplx z) {
  return f_boundary_resolvent(h, a, f_t_s(h, a, s, lambda_circ), lambda_circ, z);
}

FMat f_cutoff_perturbation(const FMat& a_n, const FMat& e_n) {
  return (a_n.adjoint() + a_n) - e_n;
}

}  // namespace krein
