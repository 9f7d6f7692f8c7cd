#include "krein/convergence_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <thread>
#include <variant>

#include <Eigen/QR>

namespace krein {

namespace {

struct Shot {
  DistanceResult result;
  std::variant<Mat, FMat> cutoff;  // the cutoff resolvent, kept for Cauchy distances
};

void check_mismatch(double mismatch, int n) {
  if (!(mismatch <= kPathTolerance)) {
    throw InternalMismatch("nr_distance: dense solve and Θ_n + M_{n,z} path disagree at level " +
                           std::to_string(n) + " (relative " + format_double(mismatch) + ")");
  }
}

Shot dense_shot(const CutoffFamily& family, const Mat& limit_resolvent, int n, cplx z) {
  if (!family.dense_available()) throw DomainError("nr_distance: family has no dense representation");
  const OperatorModel& model = *family.model;
  const Mat an = family.make_An(n);
  const Mat en = family.make_En(n);
  Mat direct = direct_resolvent(cutoff_hamiltonian(model, an, en), z);
  const Mat kn = regularized_resolvent(model, an, en, family.lambda_circ, z);
  Shot shot;
  shot.result.path_mismatch = rel_diff(direct, kn);
  check_mismatch(shot.result.path_mismatch, n);
  shot.result.distance = spectral_norm(direct - limit_resolvent);
  shot.cutoff = std::move(direct);
  return shot;
}

const FactoredFamily& factored_of(const CutoffFamily& family) {
  if (!family.factored) throw DomainError("nr_distance_factored: family has no factored representation");
  return *family.factored;
}

FMat factored_limit(const CutoffFamily& family, cplx z) {
  const FactoredFamily& f = factored_of(family);
  return f_krein_resolvent(f.h, f.limit_a, f.limit_s, family.lambda_circ, z);
}

double factored_rel_diff(const FMat& a, const FMat& b) {
  const double scale = std::max(norm_bound(a), norm_bound(b));
  return scale == 0.0 ? 0.0 : norm_bound(a - b) / scale;
}

Shot factored_shot(const CutoffFamily& family, const FMat& limit_resolvent, int n, cplx z) {
  const FactoredFamily& f = factored_of(family);
  const FMat an = f.a_n(n);
  const FMat en = f.e_n(n);
  FMat direct = f_direct_resolvent(f.h, f_cutoff_perturbation(an, en), z);
  const FMat kn = f_regularized_resolvent(f.h, an, en, family.lambda_circ, z);
  Shot shot;
  shot.result.path_mismatch = factored_rel_diff(direct, kn);
  check_mismatch(shot.result.path_mismatch, n);
  shot.result.distance = norm_bound(direct - limit_resolvent);
  shot.cutoff = std::move(direct);
  return shot;
}

double shot_distance(const Shot& a, const Shot& b) {
  if (std::holds_alternative<Mat>(a.cutoff)) {
    return spectral_norm(std::get<Mat>(a.cutoff) - std::get<Mat>(b.cutoff));
  }
  return norm_bound(std::get<FMat>(a.cutoff) - std::get<FMat>(b.cutoff));
}

template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t fit_window(std::size_t n) { return std::min(n, std::max<std::size_t>(4, (n + 1) / 2)); }

// Least squares y ≈ slope · x + intercept.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = x[static_cast<std::size_t>(i)];
    design(i, 1) = 1.0;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return {coef(0), coef(1)};
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

DistanceResult nr_distance_detail(const CutoffFamily& family, const SingularModel& limit, int n, cplx z) {
  return dense_shot(family, krein_resolvent(limit, z), n, z).result;
}

double nr_distance(const CutoffFamily& family, const SingularModel& limit, int n, cplx z) {
  return nr_distance_detail(family, limit, n, z).distance;
}

DistanceResult nr_distance_factored(const CutoffFamily& family, int n, cplx z) {
  return factored_shot(family, factored_limit(family, z), n, z).result;
}

double probe_gamma(const CutoffFamily& family) {
  const double s_star = 1.0 / (1.0 - family.s_exponent);
  double g = std::max(1.0, std::pow(family.limit_norm_s, s_star));
  for (int n : family.levels) g = std::max(g, std::pow(family.norm_s_at(n), s_star));
  return 2.0 * g;
}

SmallnessReport uniform_smallness_check(const CutoffFamily& family, const std::vector<int>& levels,
                                        double margin) {
  SmallnessReport rep;
  rep.gamma = probe_gamma(family);
  rep.levels = levels;
  rep.margin = margin;
  const cplx z = kI * rep.gamma;
  const double lc = family.lambda_circ;
  for (int n : levels) {
    double a = 0.0;
    if (family.dense_available()) {
      const Mat an = family.make_An(n);
      const Mat se = self_energy_operator(*family.model, an, lc);
      const Mat k = family.make_En(n) - se;
      if (!(k.array() == cplx(0.0)).all()) {
        const Mat hn = family.model->matrix() + an.adjoint() + an - se;
        a = spectral_norm(k * direct_resolvent(hn, z));
      }
    } else {
      const FactoredFamily& f = factored_of(family);
      const FMat an = f.a_n(n);
      const FMat se = f_self_energy(f.h, an, lc);
      const FMat k = f.e_n(n) - se;
      if (!k.is_zero()) {
        a = norm_bound(k * f_direct_resolvent(f.h, f_cutoff_perturbation(an, se), z));
      }
    }
    rep.a_n.push_back(a);
    rep.sup = std::max(rep.sup, a);
  }
  rep.pass = rep.sup < 1.0 - margin;
  return rep;
}

double target_gap(const CutoffFamily& family, int n) {
  const double lc = family.lambda_circ;
  if (family.dense_available()) {
    const Mat an = family.make_An(n);
    const Mat& ts = family.target_TS;
    const Mat diff = family.make_En(n) - self_energy_operator(*family.model, an, lc) - ts;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(ts));
    const RVec w = (es.eigenvalues().array().square() + 1.0).rsqrt().matrix();
    const Mat weight = es.eigenvectors() * w.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    return spectral_norm(diff * weight);
  }
  const FactoredFamily& f = factored_of(family);
  const FMat an = f.a_n(n);
  const FMat ts = f_t_s(f.h, f.limit_a, f.limit_s, lc);
  const FMat diff = (f.e_n(n) - f_self_energy(f.h, an, lc)) - ts;
  if (diff.is_zero()) return 0.0;
  const FMat weight =
      low_rank_hermitian_function(ts, [](double x) { return 1.0 / std::sqrt(x * x + 1.0); });
  return norm_bound(diff * weight);
}

RateFit fit_rate(const std::vector<int>& levels, const std::vector<double>& distances) {
  if (levels.size() != distances.size()) throw DomainError("fit_rate: levels and distances differ in length");
  if (levels.size() < 4) throw InsufficientData("fit_rate: at least 4 levels are required");
  for (double d : distances) {
    if (!(d > 1e-14) || !std::isfinite(d)) throw InsufficientData("fit_rate: distances must exceed 1e-14");
  }
  const std::size_t w = fit_window(levels.size());
  const std::size_t first = levels.size() - w;
  std::vector<double> x, y;
  RateFit fit;
  for (std::size_t i = first; i < levels.size(); ++i) {
    x.push_back(std::log(static_cast<double>(levels[i])));
    y.push_back(std::log(distances[i]));
    fit.levels_used.push_back(levels[i]);
  }
  const auto [slope, intercept] = line_fit(x, y);
  fit.rate = -slope;
  fit.constant = std::exp(intercept);
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(y[i] - (slope * x[i] + intercept)));
  }
  return fit;
}

RateFit fit_rate(const ConvergenceCurve& curve) { return fit_rate(curve.levels, curve.distances); }

LogFit log_growth_fit(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4) throw InsufficientData("log_growth_fit: at least 4 points are required");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].first > 0.0) || !std::isfinite(pairs[i].second)) {
      throw DomainError("log_growth_fit: Lambda must be positive and values finite");
    }
    if (i > 0 && !(pairs[i].first > pairs[i - 1].first)) {
      throw DomainError("log_growth_fit: Lambda must be strictly increasing");
    }
  }
  const std::size_t w = fit_window(pairs.size());
  std::vector<double> x, y;
  for (std::size_t i = pairs.size() - w; i < pairs.size(); ++i) {
    x.push_back(std::log(pairs[i].first));
    y.push_back(pairs[i].second);
  }
  LogFit fit;
  std::tie(fit.slope, fit.intercept) = line_fit(x, y);
  fit.points_used = w;
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residual = std::max(fit.residual, std::abs(y[i] - (fit.slope * x[i] + fit.intercept)));
  }
  return fit;
}

unsigned worker_count(unsigned requested) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("KREIN_LAB_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

std::vector<ConvergenceCurve> sweep(const CutoffFamily& family, const SweepOptions& opts) {
  if (family.levels.empty()) throw DomainError("sweep: family has no levels");
  const bool use_factored = family.factored && (opts.prefer_factored || !family.dense_available());
  if (!use_factored && !family.dense_available()) throw DomainError("sweep: family has no usable representation");

  std::vector<cplx> probes{kI * probe_gamma(family)};
  probes.insert(probes.end(), opts.extra_probes.begin(), opts.extra_probes.end());

  const std::size_t nl = family.levels.size();
  const unsigned workers = worker_count(opts.threads);
  std::vector<ConvergenceCurve> curves;
  std::optional<SingularModel> dense_limit;
  if (!use_factored) dense_limit.emplace(family.make_limit());

  for (cplx z : probes) {
    std::variant<Mat, FMat> limit;
    if (use_factored) {
      limit = factored_limit(family, z);
    } else {
      limit = krein_resolvent(*dense_limit, z);
    }
    std::vector<Shot> shots(nl);
    parallel_for(nl, workers, [&](std::size_t i) {
      const int n = family.levels[i];
      shots[i] = use_factored ? factored_shot(family, std::get<FMat>(limit), n, z)
                              : dense_shot(family, std::get<Mat>(limit), n, z);
    });
    ConvergenceCurve curve;
    curve.z_probe = z;
    curve.levels = family.levels;
    for (std::size_t i = 0; i < nl; ++i) {
      curve.distances.push_back(shots[i].result.distance);
      curve.path_mismatch.push_back(shots[i].result.path_mismatch);
      curve.cauchy.push_back(opts.cauchy && i + 1 < nl ? shot_distance(shots[i], shots[i + 1])
                                                       : std::numeric_limits<double>::quiet_NaN());
    }
    try {
      curve.fitted_rate = fit_rate(curve);
    } catch (const InsufficientData&) {
      curve.fitted_rate.reset();
    }
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_curves_csv(const std::filesystem::path& path, const std::vector<ConvergenceCurve>& curves) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << "level,z_re,z_im,distance,path_mismatch\n";
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      out << c.levels[i] << ',' << format_double(c.z_probe.real()) << ','
          << format_double(c.z_probe.imag()) << ',' << format_double(c.distances[i]) << ','
          << format_double(c.path_mismatch[i]) << '\n';
    }
  }
}

nlohmann::json rate_fit_json(const RateFit& fit) {
  return {{"rate", fit.rate},
          {"constant", fit.constant},
          {"residual", fit.residual},
          {"levels_used", fit.levels_used}};
}

}  // namespace krein
