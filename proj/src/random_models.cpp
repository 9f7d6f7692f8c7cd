#include "krein/random_models.hpp"

#include <cmath>

namespace krein {

Mat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      x(i, j) = cplx(re, im);
    }
  }
  return x;
}

Mat random_hermitian(Rng& rng, Eigen::Index dim) {
  const Mat x = random_gaussian(rng, dim, dim);
  return (x + x.adjoint()) / (2.0 * std::sqrt(static_cast<double>(dim)));
}

Eigen::Index random_dim(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  std::uniform_int_distribution<Eigen::Index> ud(lo, hi);
  return ud(rng);
}

SingularModel random_singular_model(Rng& rng, Eigen::Index dim, const RandomModelOptions& opts) {
  if (dim < 1) throw DomainError("random_singular_model: dim must be positive");
  OperatorModel model(random_hermitian(rng, dim));

  Mat a = Mat::Zero(dim, dim);
  if (opts.with_a) {
    std::uniform_real_distribution<double> ud(opts.norm_low, opts.norm_high);
    const double target = ud(rng);
    const Mat a0 = random_gaussian(rng, dim, dim);
    a = a0 * (target / op_norm_scale(a0, model, opts.s_exponent, 0.0));
  }
  Perturbation pert = Perturbation::make(a, opts.s_exponent, model);

  Mat s = Mat::Zero(dim, dim);
  if (opts.with_s) {
    const Mat s0 = random_hermitian(rng, dim);
    const Mat sv = s0 * model.eigvecs();
    double ratio = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      ratio = std::max(ratio, sv.col(k).norm() / (std::abs(model.eigvals()(k)) + model.guard()));
    }
    s = s0 * (opts.kato_target / ratio);
  }
  CorrectionS corr = CorrectionS::make(s, model);
  const double lc = default_lambda_circ(model, pert);
  return SingularModel(std::move(model), std::move(pert), std::move(corr), lc);
}

}  // namespace krein
