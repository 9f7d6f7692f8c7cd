#include "krein/linalg.hpp"

#include <algorithm>

#include <Eigen/SVD>

namespace krein {

Mat hermitize(const Mat& x) { return (x + x.adjoint()) * 0.5; }

double spectral_norm(const Mat& x) {
  if (x.size() == 0) return 0.0;
  if (std::min(x.rows(), x.cols()) <= 32) {
    Eigen::JacobiSVD<Mat> svd(x);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Mat> svd(x);
  return svd.singularValues()(0);
}

double rel_diff(const Mat& a, const Mat& b) {
  const double scale = std::max(spectral_norm(a), spectral_norm(b));
  if (scale == 0.0) return 0.0;
  return spectral_norm(a - b) / scale;
}

double hermitian_defect(const Mat& x) { return spectral_norm(x - x.adjoint()); }

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace krein
