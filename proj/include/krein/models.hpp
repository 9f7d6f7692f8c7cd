#pragma once

#include <filesystem>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krein/factored.hpp"
#include "krein/fock.hpp"
#include "krein/singular_perturbation.hpp"

namespace krein {

/// Finite-rank data of a family with diagonal H, for dimensions where dense
/// matrices do not fit.
struct FactoredFamily {
  RVec h;
  std::function<FMat(int)> a_n;
  std::function<FMat(int)> e_n;
  FMat limit_a;  // A of the limit model
  FMat limit_s;  // S of the limit model
};

/// Sequence (A_n, E_n) indexed by cutoff levels, with the data of its limit.
struct CutoffFamily {
  std::string name;
  std::vector<int> levels;
  Eigen::Index dim = 0;
  double lambda_circ = 0.0;
  double s_exponent = 0.5;

  /// Null when dim exceeds the dense cap; the dense callbacks are then unset.
  std::shared_ptr<const OperatorModel> model;
  std::function<Mat(int)> make_An;
  std::function<Mat(int)> make_En;
  /// Set when A_n converges in 𝔥₁ → 𝔉; unset for a genuinely singular limit.
  std::optional<Mat> target_A;
  Mat target_TS;
  /// Dense limit Kreĭn model (full-profile A when target_A is unset).
  std::function<SingularModel()> make_limit;

  /// Scalar self-energy tracked along the levels.
  std::function<double(int)> self_energy;
  /// ‖A_n‖_{𝔥_s,𝔉} per level, and for the limit A.
  std::function<double(int)> norm_s_at;
  double limit_norm_s = 0.0;

  std::optional<FactoredFamily> factored;

  bool dense_available() const { return model != nullptr; }
};

/// Dense matrices are only built up to this dimension.
inline constexpr Eigen::Index kDenseCap = 2048;

struct FriedrichsParams {
  Eigen::Index dim_max = 16384;
  double s = 0.75;
  double eps = 0.05;
  double coupling = 3.0;
  /// Empty: powers of 4 from 16 up to dim_max / 4.
  std::vector<int> levels;
};

/// H = diag(1..dim_max), A_n = c e₁ v_n† with (v_n)_k = k^{s − 1/2 − eps} for
/// k ≤ n, E_n = A_n R A_n†. The limit uses the full profile at dim_max, S = 0.
CutoffFamily friedrichs_family(const FriedrichsParams& p);
CutoffFamily friedrichs_family(Eigen::Index dim_max, double s = 0.75, double eps = 0.05,
                               double coupling = 3.0);

/// Σ_{k ≤ n} k^{2s−1−2eps} / (k − λ∘)
double friedrichs_sigma(int n, double s, double eps, double lambda_circ);

/// A_n = a(v^{(n)}) with v^{(n)} the profile cut to the first n modes,
/// E_n = A_n R A_n† + (1 − G_n†) S (1 − G_n). lambda_circ NaN selects the default.
CutoffFamily fock_cutoff_family(const FockSpace& fock, const std::function<cplx(int)>& v_profile,
                                const std::vector<int>& cutoffs, const Mat& s = Mat(),
                                double lambda_circ = std::numeric_limits<double>::quiet_NaN(),
                                double s_exponent = 0.5);

/// A_n = A and E_n = A R A† + T_S at every level: H_n − E_n = H_S exactly.
CutoffFamily constant_family(const SingularModel& sm, const std::vector<int>& levels);

/// JSON manifest plus per-level A_n / E_n matrix files. Dense families only.
std::filesystem::path export_family(const CutoffFamily& family, const std::filesystem::path& dir);

}  // namespace krein
