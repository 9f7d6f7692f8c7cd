#pragma once

#include <cstdint>
#include <random>

#include "krein/singular_perturbation.hpp"

namespace krein {

using Rng = std::mt19937_64;

/// Entries with independent standard normal real and imaginary parts.
Mat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// (X + X†) / (2√d) for Gaussian X.
Mat random_hermitian(Rng& rng, Eigen::Index dim);

struct RandomModelOptions {
  double s_exponent = 0.5;
  // ‖A‖_{𝔥_s,𝔉} is drawn uniformly from [norm_low, norm_high].
  double norm_low = 0.5;
  double norm_high = 1.5;
  double kato_target = 0.3;
  bool with_a = true;
  bool with_s = true;
};

/// Seeded (H, A, S, λ∘) with λ∘ = default_lambda_circ.
SingularModel random_singular_model(Rng& rng, Eigen::Index dim, const RandomModelOptions& opts = {});

/// Dimension drawn uniformly from [lo, hi].
Eigen::Index random_dim(Rng& rng, Eigen::Index lo, Eigen::Index hi);

}  // namespace krein
