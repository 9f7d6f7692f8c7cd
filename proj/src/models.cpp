#include "krein/models.hpp"

#include <cmath>

#include "krein/matrix_io.hpp"

namespace krein {

namespace {

void check_levels(const std::vector<int>& levels, int upper, const char* who) {
  if (levels.empty()) throw DomainError(std::string(who) + ": levels must be nonempty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < 1 || levels[i] > upper) {
      throw DomainError(std::string(who) + ": level out of range");
    }
    if (i > 0 && levels[i] <= levels[i - 1]) {
      throw DomainError(std::string(who) + ": levels must be strictly ascending");
    }
  }
}

}  // namespace

double friedrichs_sigma(int n, double s, double eps, double lambda_circ) {
  double sigma = 0.0;
  for (int k = 1; k <= n; ++k) {
    sigma += std::pow(static_cast<double>(k), 2.0 * s - 1.0 - 2.0 * eps) / (k - lambda_circ);
  }
  return sigma;
}

CutoffFamily friedrichs_family(const FriedrichsParams& p) {
  if (p.dim_max < 16) throw DomainError("friedrichs_family: dim_max must be at least 16");
  if (!(p.s > 0.0 && p.s < 1.0)) throw DomainError("friedrichs_family: s must lie in (0, 1)");
  if (!(p.eps > 0.0)) throw DomainError("friedrichs_family: eps must be positive");
  if (!std::isfinite(p.coupling)) throw DomainError("friedrichs_family: coupling must be finite");

  const Eigen::Index d = p.dim_max;
  std::vector<int> levels = p.levels;
  if (levels.empty()) {
    for (Eigen::Index n = 16; n <= d / 4; n *= 4) levels.push_back(static_cast<int>(n));
    if (levels.empty()) levels.push_back(16);
  }
  check_levels(levels, static_cast<int>(d), "friedrichs_family");

  RVec h(d);
  RVec profile(d);
  RVec weight(d);  // (k² + 1)^{-s}
  for (Eigen::Index k = 0; k < d; ++k) {
    const double kk = static_cast<double>(k + 1);
    h(k) = kk;
    profile(k) = std::pow(kk, p.s - 0.5 - p.eps);
    weight(k) = std::pow(kk * kk + 1.0, -p.s);
  }
  const double c = p.coupling;
  auto norm_s_at = [=](int n) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += profile(k) * profile(k) * weight(k);
    return std::abs(c) * std::sqrt(acc);
  };

  CutoffFamily fam;
  fam.name = "friedrichs";
  fam.levels = levels;
  fam.dim = d;
  fam.s_exponent = p.s;
  fam.limit_norm_s = norm_s_at(static_cast<int>(d));
  fam.lambda_circ = default_lambda_circ(1.0, fam.limit_norm_s, p.s);
  fam.norm_s_at = norm_s_at;
  const double lc = fam.lambda_circ;
  const double s = p.s;
  const double eps = p.eps;
  fam.self_energy = [=](int n) { return friedrichs_sigma(n, s, eps, lc); };

  Mat phi = Mat::Zero(d, 1);
  phi(0, 0) = c;
  auto a_n = [=](int n) {
    Mat v = Mat::Zero(d, 1);
    v.col(0).head(n) = profile.head(n).cast<cplx>();
    return FMat::low_rank(phi, std::move(v));
  };
  auto e_n = [=](int n) { return f_self_energy(h, a_n(n), lc); };
  fam.factored = FactoredFamily{h, a_n, e_n, a_n(static_cast<int>(d)), FMat::zero(d)};

  if (d <= kDenseCap) {
    auto model = std::make_shared<const OperatorModel>(OperatorModel::diagonal(h));
    fam.model = model;
    fam.make_An = [=](int n) { return a_n(n).dense(); };
    fam.make_En = [=](int n) { return self_energy_operator(*model, a_n(n).dense(), lc); };
    fam.target_TS = Mat::Zero(d, d);
    fam.make_limit = [=]() {
      Perturbation pert = Perturbation::make(a_n(static_cast<int>(d)).dense(), s, *model);
      CorrectionS corr = CorrectionS::make(Mat::Zero(d, d), *model);
      return SingularModel(*model, std::move(pert), std::move(corr), lc);
    };
  }
  return fam;
}

CutoffFamily friedrichs_family(Eigen::Index dim_max, double s, double eps, double coupling) {
  FriedrichsParams p;
  p.dim_max = dim_max;
  p.s = s;
  p.eps = eps;
  p.coupling = coupling;
  return friedrichs_family(p);
}

CutoffFamily fock_cutoff_family(const FockSpace& fock, const std::function<cplx(int)>& v_profile,
                                const std::vector<int>& cutoffs, const Mat& s_in, double lambda_circ,
                                double s_exponent) {
  check_levels(cutoffs, fock.modes(), "fock_cutoff_family");
  if (fock.dim() > kDenseCap) throw DomainError("fock_cutoff_family: Fock space too large");
  const Eigen::Index d = fock.dim();
  Mat s = s_in.size() == 0 ? Mat::Zero(d, d) : hermitize(s_in);
  if (s.rows() != d || s.cols() != d) throw DomainError("fock_cutoff_family: S has wrong shape");

  Vec full(fock.modes());
  for (int j = 0; j < fock.modes(); ++j) full(j) = v_profile(j + 1);
  auto profile_at = [full](int n) {
    Vec v = Vec::Zero(full.size());
    v.head(n) = full.head(n);
    return v;
  };

  auto model = std::make_shared<const OperatorModel>(OperatorModel::diagonal(fock.d_gamma_diag()));
  const Mat a_full = fock.annihilation(full);
  Perturbation pert_full = Perturbation::make(a_full, s_exponent, *model);
  const double lc = std::isnan(lambda_circ) ? default_lambda_circ(*model, pert_full) : lambda_circ;
  if (!(lc < model->lambda_inf())) throw DomainError("fock_cutoff_family: lambda_circ must lie below inf σ(H)");

  CutoffFamily fam;
  fam.name = "fock";
  fam.levels = cutoffs;
  fam.dim = d;
  fam.lambda_circ = lc;
  fam.s_exponent = s_exponent;
  fam.model = model;
  // Cutoff maps are rebuilt from the profile; FockSpace is copied into the closures.
  auto a_n = [fock, profile_at](int n) { return fock.annihilation(profile_at(n)); };
  fam.make_An = a_n;
  fam.make_En = [=](int n) {
    const Mat an = a_n(n);
    const Mat one_minus_g = Mat::Identity(d, d) - resolvent(*model, lc) * an.adjoint();
    return Mat(self_energy_operator(*model, an, lc) + one_minus_g.adjoint() * s * one_minus_g);
  };
  fam.target_A = a_full;
  const SingularModel limit(*model, pert_full, CorrectionS::make(s, *model), lc);
  fam.target_TS = t_s(limit);
  fam.make_limit = [limit]() { return limit; };
  fam.limit_norm_s = pert_full.norm_s;
  fam.norm_s_at = [=](int n) { return op_norm_scale(a_n(n), *model, s_exponent, 0.0); };
  const std::vector<double> freqs = fock.mode_freqs();
  fam.self_energy = [=](int n) {
    double sigma = 0.0;
    for (int j = 0; j < n; ++j) sigma += std::norm(full(j)) / (freqs[static_cast<std::size_t>(j)] - lc);
    return sigma;
  };
  return fam;
}

CutoffFamily constant_family(const SingularModel& sm, const std::vector<int>& levels) {
  check_levels(levels, std::numeric_limits<int>::max(), "constant_family");
  CutoffFamily fam;
  fam.name = "constant";
  fam.levels = levels;
  fam.dim = sm.dim();
  fam.lambda_circ = sm.lambda_circ();
  fam.s_exponent = sm.pert().s_exponent;
  fam.model = std::make_shared<const OperatorModel>(sm.model());
  const Mat a = sm.a();
  const Mat ts = t_s(sm);
  const Mat e = self_energy_operator(sm.model(), a, sm.lambda_circ()) + ts;
  fam.make_An = [a](int) { return a; };
  fam.make_En = [e](int) { return e; };
  fam.target_A = a;
  fam.target_TS = ts;
  fam.make_limit = [sm]() { return sm; };
  const double sigma = spectral_norm(self_energy_operator(sm.model(), a, sm.lambda_circ()));
  fam.self_energy = [sigma](int) { return sigma; };
  const double ns = sm.pert().norm_s;
  fam.norm_s_at = [ns](int) { return ns; };
  fam.limit_norm_s = ns;
  return fam;
}

std::filesystem::path export_family(const CutoffFamily& family, const std::filesystem::path& dir) {
  if (!family.dense_available()) {
    throw ConfigError("export_family: family has no dense representation at this dimension");
  }
  std::filesystem::create_directories(dir);
  nlohmann::json levels = nlohmann::json::array();
  for (int n : family.levels) {
    const std::string a_name = "A_" + std::to_string(n) + ".json";
    const std::string e_name = "E_" + std::to_string(n) + ".json";
    write_matrix(dir / a_name, family.make_An(n));
    write_matrix(dir / e_name, family.make_En(n));
    levels.push_back({{"level", n}, {"A", a_name}, {"E", e_name}});
  }
  write_matrix(dir / "H.json", family.model->matrix());
  write_matrix(dir / "T_S.json", family.target_TS);
  const nlohmann::json manifest = {{"family", family.name},
                                   {"dim", family.dim},
                                   {"lambda_circ", family.lambda_circ},
                                   {"s_exponent", family.s_exponent},
                                   {"H", "H.json"},
                                   {"target_TS", "T_S.json"},
                                   {"singular_limit", !family.target_A.has_value()},
                                   {"levels", levels}};
  const auto path = dir / "manifest.json";
  write_json(path, manifest);
  return path;
}

}  // namespace krein
