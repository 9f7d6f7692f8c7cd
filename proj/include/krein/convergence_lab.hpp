#pragma once

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "krein/models.hpp"

namespace krein {

struct RateFit {
  double rate = 0.0;
  double constant = 0.0;
  double residual = 0.0;  // max |log d_n − fit|
  std::vector<int> levels_used;
};

struct LogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // max |value − fit|
  std::size_t points_used = 0;
};

struct ConvergenceCurve {
  cplx z_probe;
  std::vector<int> levels;
  std::vector<double> distances;
  std::vector<double> path_mismatch;
  /// ‖R̂⁽ⁿ⁾ − R̂⁽ⁿ'⁾‖ to the next level; NaN at the last level.
  std::vector<double> cauchy;
  std::optional<RateFit> fitted_rate;
  std::optional<LogFit> fitted_log;
};

struct DistanceResult {
  double distance = 0.0;
  double path_mismatch = 0.0;  // relative disagreement of the two cutoff-resolvent paths
};

/// Agreement required between the dense solve and the Θ_n + M_{n,z} path.
inline constexpr double kPathTolerance = 1e-10;

/// ‖(−(H + A_n† + A_n − E_n) + z)^{-1} − krein_resolvent(limit, z)‖₂ on the dense path.
/// Throws InternalMismatch when the two cutoff-resolvent paths disagree.
DistanceResult nr_distance_detail(const CutoffFamily& family, const SingularModel& limit, int n, cplx z);
double nr_distance(const CutoffFamily& family, const SingularModel& limit, int n, cplx z);

/// Same quantity in the diagonal-plus-low-rank algebra of family.factored.
DistanceResult nr_distance_factored(const CutoffFamily& family, int n, cplx z);

/// 2 · max(gamma_threshold) over the levels and the limit.
double probe_gamma(const CutoffFamily& family);

struct SmallnessReport {
  double gamma = 0.0;
  std::vector<int> levels;
  std::vector<double> a_n;
  double sup = 0.0;
  double margin = 0.0;
  bool pass = false;
};

/// a_n = ‖(E_n − A_n R A_n†)(−(H_n − A_n R A_n†) + iγ)^{-1}‖₂ at γ = probe_gamma(family).
SmallnessReport uniform_smallness_check(const CutoffFamily& family, const std::vector<int>& levels,
                                        double margin);

/// ‖(E_n − A_n R A_n† − T_S)(T_S†T_S + 1)^{-1/2}‖₂ with T_S = family.target_TS.
double target_gap(const CutoffFamily& family, int n);

/// Least-squares log d = log C − rate · log n over the top max(4, ⌈N/2⌉) levels.
RateFit fit_rate(const std::vector<int>& levels, const std::vector<double>& distances);
RateFit fit_rate(const ConvergenceCurve& curve);

/// value = slope · ln Λ + intercept over the top max(4, ⌈N/2⌉) points.
LogFit log_growth_fit(const std::vector<std::pair<double, double>>& pairs);

struct SweepOptions {
  std::vector<cplx> extra_probes;
  bool cauchy = true;
  /// 0: hardware concurrency, capped by KREIN_LAB_THREADS.
  unsigned threads = 0;
  /// Use the factored algebra even when dense matrices are available.
  bool prefer_factored = false;
};

/// One curve per probe point: iγ first, then extra_probes.
std::vector<ConvergenceCurve> sweep(const CutoffFamily& family, const SweepOptions& opts = {});

/// Worker count after applying KREIN_LAB_THREADS.
unsigned worker_count(unsigned requested);

/// level, z_re, z_im, distance, path_mismatch
void write_curves_csv(const std::filesystem::path& path, const std::vector<ConvergenceCurve>& curves);

/// {rate, constant, residual, levels_used}
nlohmann::json rate_fit_json(const RateFit& fit);

/// printf("%.17g")
std::string format_double(double x);

}  // namespace krein
