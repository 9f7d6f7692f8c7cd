#pragma once

#include <complex>

#include <Eigen/Dense>

namespace krein {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr cplx kI{0.0, 1.0};

// (X + X†)/2
Mat hermitize(const Mat& x);

// Largest singular value.
double spectral_norm(const Mat& x);

// ‖a − b‖₂ / max(‖a‖₂, ‖b‖₂); zero when both vanish.
double rel_diff(const Mat& a, const Mat& b);

// ‖X − X†‖₂
double hermitian_defect(const Mat& x);

// Entrywise maximum modulus of a − b.
double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace krein
