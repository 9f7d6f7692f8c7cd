#include "krein/nelson.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "krein/errors.hpp"

namespace krein {

void NelsonParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("NelsonParams: mu must be ≥ 0");
  if (!(m > 0.0) || !std::isfinite(m)) throw DomainError("NelsonParams: m must be > 0");
  if (n_particles < 1) throw DomainError("NelsonParams: N must be positive");
}

double nelson_counterterm(const NelsonParams& params, double lambda, double quad_tol) {
  params.validate();
  if (!(lambda > 0.0)) throw DomainError("nelson_counterterm: Lambda must be positive");
  if (!(quad_tol > 0.0)) throw DomainError("nelson_counterterm: quad_tol must be positive");

  const double pref = 4.0 * std::numbers::pi / (2.0 * std::pow(2.0 * std::numbers::pi, 3));
  const double mu = params.mu;
  const double two_m = 2.0 * params.m;
  // κ = a sinh t, dκ = a cosh t dt; with a = µ the weight (κ²+µ²)^{-1/2} cancels.
  const double a = mu > 0.0 ? mu : 1.0;
  const double t_max = std::asinh(lambda / a);
  auto integrand = [&](double t) {
    const double k = a * std::sinh(t);
    if (mu > 0.0) return k * k / (k * k / two_m + mu * std::cosh(t));
    return std::cosh(t) / (k / two_m + 1.0);
  };
  double err = 0.0;
  const double rel = std::max(0.01 * quad_tol, 1e-15);
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, t_max, 20, rel, &err);
  // Leaf error estimates are reported on the reference interval; rescale conservatively.
  const double abs_err = pref * err * std::max(1.0, 0.5 * t_max);
  if (!std::isfinite(value) || abs_err > quad_tol) {
    throw QuadratureFailure("nelson_counterterm: error estimate " + std::to_string(abs_err) +
                            " exceeds tolerance at Lambda = " + std::to_string(lambda));
  }
  return pref * value;
}

double nelson_scheme_counterterm(const NelsonParams& params, double lambda, double quad_tol) {
  return params.g * params.g * params.n_particles * nelson_counterterm(params, lambda, quad_tol);
}

double nelson_log_slope(const NelsonParams& params) {
  params.validate();
  return params.m / (2.0 * std::numbers::pi * std::numbers::pi);
}

}  // namespace krein
