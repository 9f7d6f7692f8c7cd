#pragma once

namespace krein {

struct NelsonParams {
  double mu = 1.0;  // field mass, ≥ 0
  double m = 1.0;   // particle mass, > 0
  double g = 1.0;
  int n_particles = 1;

  void validate() const;
};

/// ℰ_Λ = (4π / (2(2π)³)) ∫₀^Λ κ² (κ²+µ²)^{-1/2} (κ²/2m + (κ²+µ²)^{1/2})^{-1} dκ,
/// with absolute quadrature error ≤ quad_tol. Throws QuadratureFailure otherwise.
double nelson_counterterm(const NelsonParams& params, double lambda, double quad_tol);

/// g² N ℰ_Λ, the counterterm entering the cutoff Hamiltonian.
double nelson_scheme_counterterm(const NelsonParams& params, double lambda, double quad_tol);

/// m / (2π²), the large-Λ slope of ℰ_Λ against ln Λ.
double nelson_log_slope(const NelsonParams& params);

}  // namespace krein
