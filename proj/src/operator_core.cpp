#include "krein/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace krein {

namespace {

constexpr double kConditionLimit = 1e12;

}  // namespace

OperatorModel::OperatorModel(const Mat& h) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw DomainError("OperatorModel: H must be a non-empty square matrix");
  }
  h_ = hermitize(h);
  Eigen::SelfAdjointEigenSolver<Mat> es(h_);
  if (es.info() != Eigen::Success) throw Error("OperatorModel: eigensolver did not converge");
  eigvals_ = es.eigenvalues();
  eigvecs_ = es.eigenvectors();
}

OperatorModel OperatorModel::diagonal(const RVec& entries) {
  if (entries.size() == 0) throw DomainError("OperatorModel: empty diagonal");
  const auto n = entries.size();
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return entries(a) < entries(b); });
  OperatorModel m;
  m.h_ = entries.cast<cplx>().asDiagonal();
  m.eigvals_.resize(n);
  m.eigvecs_ = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    m.eigvals_(k) = entries(order[static_cast<size_t>(k)]);
    m.eigvecs_(order[static_cast<size_t>(k)], k) = 1.0;
  }
  m.diagonal_ = true;
  return m;
}

double OperatorModel::norm() const {
  return std::max(std::abs(eigvals_(0)), std::abs(eigvals_(eigvals_.size() - 1)));
}

Mat OperatorModel::apply(const std::function<cplx(double)>& f) const {
  const auto n = dim();
  if (diagonal_) {
    Mat out = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) out(i, i) = f(h_(i, i).real());
    return out;
  }
  Vec fv(n);
  for (Eigen::Index k = 0; k < n; ++k) fv(k) = f(eigvals_(k));
  return eigvecs_ * fv.asDiagonal() * eigvecs_.adjoint();
}

double OperatorModel::reconstruction_error() const {
  const Mat rebuilt = eigvecs_ * eigvals_.cast<cplx>().asDiagonal() * eigvecs_.adjoint();
  const double scale = std::max(spectral_norm(h_), 1.0);
  return spectral_norm(rebuilt - h_) / scale;
}

double spectral_distance(const OperatorModel& model, cplx z) {
  double best = std::abs(z - model.eigvals()(0));
  for (Eigen::Index k = 1; k < model.dim(); ++k) {
    best = std::min(best, std::abs(z - model.eigvals()(k)));
  }
  return best;
}

Mat resolvent(const OperatorModel& model, cplx z) {
  if (spectral_distance(model, z) < model.guard()) {
    throw SpectrumHit("resolvent: z is within the singularity guard of the spectrum");
  }
  return model.apply([z](double lambda) { return 1.0 / (z - lambda); });
}

ScaleWeight scale_weight(const OperatorModel& model, double s) {
  if (!(std::abs(s) <= 1.0)) throw DomainError("scale_weight: |s| must not exceed 1");
  if (s == 0.0) return {0.0, Mat::Identity(model.dim(), model.dim())};
  return {s, model.apply([s](double lambda) {
            return cplx(std::pow(lambda * lambda + 1.0, 0.5 * s), 0.0);
          })};
}

double op_norm_scale(const Mat& l, const OperatorModel& model, double s_from, double s_to) {
  if (!(std::abs(s_from) <= 1.0) || !(std::abs(s_to) <= 1.0)) {
    throw DomainError("op_norm_scale: exponents must lie in [-1, 1]");
  }
  const Mat left = scale_weight(model, s_to).w;
  const Mat right = scale_weight(model, -s_from).w;
  return spectral_norm(left * l * right);
}

BlockOp2 BlockOp2::identity(Eigen::Index dim) {
  return {Mat::Identity(dim, dim), Mat::Zero(dim, dim), Mat::Zero(dim, dim),
          Mat::Identity(dim, dim)};
}

BlockOp2 BlockOp2::zero(Eigen::Index dim) {
  return {Mat::Zero(dim, dim), Mat::Zero(dim, dim), Mat::Zero(dim, dim), Mat::Zero(dim, dim)};
}

BlockOp2 BlockOp2::diag(const Mat& top, const Mat& bottom) {
  const auto n = top.rows();
  return {top, Mat::Zero(n, n), Mat::Zero(n, n), bottom};
}

BlockOp2 BlockOp2::split(const Mat& full) {
  const auto n = full.rows() / 2;
  if (full.rows() != 2 * n || full.cols() != 2 * n) {
    throw DomainError("BlockOp2::split: expected an even square matrix");
  }
  return {full.topLeftCorner(n, n), full.topRightCorner(n, n), full.bottomLeftCorner(n, n),
          full.bottomRightCorner(n, n)};
}

Mat BlockOp2::assemble() const {
  const auto n = dim();
  Mat full(2 * n, 2 * n);
  full << a11, a12, a21, a22;
  return full;
}

BlockOp2 BlockOp2::adjoint() const {
  return {a11.adjoint(), a21.adjoint(), a12.adjoint(), a22.adjoint()};
}

double BlockOp2::symmetry_defect() const {
  return std::max({rel_diff(a11, a11.adjoint()), rel_diff(a22, a22.adjoint()),
                   rel_diff(a21, a12.adjoint())});
}

bool BlockOp2::is_symmetric(double tol) const { return symmetry_defect() <= tol; }

BlockOp2 BlockOp2::operator+(const BlockOp2& o) const {
  return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
}

BlockOp2 BlockOp2::operator-(const BlockOp2& o) const {
  return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
}

BlockOp2 BlockOp2::operator*(const BlockOp2& o) const {
  return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22, a21 * o.a11 + a22 * o.a21,
          a21 * o.a12 + a22 * o.a22};
}

BlockOp2 BlockOp2::operator*(cplx c) const { return {a11 * c, a12 * c, a21 * c, a22 * c}; }

double block_rel_diff(const BlockOp2& a, const BlockOp2& b) {
  return std::max({rel_diff(a.a11, b.a11), rel_diff(a.a12, b.a12), rel_diff(a.a21, b.a21),
                   rel_diff(a.a22, b.a22)});
}

Mat second_schur_complement(const BlockOp2& b) {
  Eigen::PartialPivLU<Mat> lu22(b.a22);
  if (!(lu22.rcond() * kConditionLimit >= 1.0)) {
    throw SingularBlock("second_schur_complement: a22 is numerically singular");
  }
  return b.a11 - b.a12 * lu22.solve(b.a21);
}

BlockOp2 schur_invert(const BlockOp2& b, SchurPath* path) {
  Eigen::PartialPivLU<Mat> lu22(b.a22);
  if (lu22.rcond() * kConditionLimit >= 1.0) {
    const Mat inv22 = lu22.inverse();
    const Mat x = inv22 * b.a21;  // a22^{-1} a21
    const Mat y = b.a12 * inv22;  // a12 a22^{-1}
    Eigen::PartialPivLU<Mat> lus(b.a11 - b.a12 * x);
    if (lus.rcond() * kConditionLimit >= 1.0) {
      const Mat sinv = lus.inverse();
      if (path) *path = SchurPath::kSecondComplement;
      const Mat xs = x * sinv;
      return {sinv, -sinv * y, -xs, inv22 + xs * y};
    }
  }
  Eigen::PartialPivLU<Mat> lu(b.assemble());
  if (!(lu.rcond() * kConditionLimit >= 1.0)) {
    throw SingularBlock("schur_invert: block operator is numerically singular");
  }
  if (path) *path = SchurPath::kDenseFallback;
  return BlockOp2::split(lu.inverse());
}

double pseudo_resolvent_defect(const ResolventMap& rmap, cplx z, cplx w) {
  if (z == w) return 0.0;
  const Mat rz = rmap(z);
  const Mat rw = rmap(w);
  return spectral_norm(rz - rw - (w - z) * rz * rw);
}

}  // namespace krein
