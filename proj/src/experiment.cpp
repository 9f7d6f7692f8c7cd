#include "krein/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/LU>

#include "krein/convergence_lab.hpp"
#include "krein/fock.hpp"
#include "krein/matrix_io.hpp"
#include "krein/nelson.hpp"
#include "krein/random_models.hpp"

namespace krein {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Zero when satisfied, strictly positive otherwise.
double violation(bool ok, double amount) {
  return ok ? 0.0 : std::max(std::abs(amount), std::numeric_limits<double>::min());
}

class CheckBook {
 public:
  void add(const std::string& name, double residual, double tol) {
    if (std::isnan(residual)) residual = kInf;
    for (auto& c : checks_) {
      if (c.name == name) {
        c.worst_residual = std::max(c.worst_residual, residual);
        return;
      }
    }
    checks_.push_back({name, false, residual, tol});
  }

  template <class F>
  void run(const std::string& name, double tol, F&& f) {
    double r = kInf;
    try {
      r = f();
    } catch (const Error&) {
      r = kInf;
    }
    add(name, r, tol);
  }

  std::vector<CheckResult> results() const {
    std::vector<CheckResult> out = checks_;
    for (auto& c : out) c.pass = c.worst_residual <= c.tolerance;
    return out;
  }

 private:
  std::vector<CheckResult> checks_;
};

double num(const json& p, const char* key, double fallback) {
  if (!p.contains(key)) return fallback;
  if (!p.at(key).is_number()) throw ConfigError(std::string("model_params.") + key + " must be a number");
  return p.at(key).get<double>();
}

std::vector<double> num_list(const json& p, const char* key, std::vector<double> fallback) {
  if (!p.contains(key)) return fallback;
  const json& a = p.at(key);
  if (!a.is_array()) throw ConfigError(std::string("model_params.") + key + " must be an array");
  std::vector<double> out;
  for (const auto& x : a) {
    if (!x.is_number()) throw ConfigError(std::string("model_params.") + key + " must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

// Complex entries given as numbers or [re, im] pairs.
std::vector<cplx> cplx_list(const json& p, const char* key, std::vector<cplx> fallback) {
  if (!p.contains(key)) return fallback;
  const json& a = p.at(key);
  if (!a.is_array()) throw ConfigError(std::string("model_params.") + key + " must be an array");
  std::vector<cplx> out;
  for (const auto& x : a) {
    if (x.is_number()) {
      out.emplace_back(x.get<double>(), 0.0);
    } else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
      out.emplace_back(x[0].get<double>(), x[1].get<double>());
    } else {
      throw ConfigError(std::string("model_params.") + key + " entries must be numbers or [re, im]");
    }
  }
  return out;
}

double ratio(double num_, double den) { return den == 0.0 ? (num_ == 0.0 ? 0.0 : kInf) : num_ / den; }

std::vector<cplx> probe_points(const SingularModel& sm) {
  return {kI * (2.0 * gamma_threshold(sm)), cplx(1.0, 2.0), cplx(-3.0, 0.5)};
}

void verify_model(CheckBook& book, const SingularModel& sm, Rng& rng, double tol) {
  const OperatorModel& model = sm.model();
  const auto d = sm.dim();
  const Mat id = Mat::Identity(d, d);
  const auto zs = probe_points(sm);

  for (std::size_t i = 0; i < zs.size(); ++i) {
    const cplx z = zs[i];
    const cplx w = zs[(i + 1) % zs.size()];

    book.run("resolvent_vs_linear_solve", tol, [&] {
      const Mat oracle = (z * id - model.matrix()).fullPivLu().solve(id);
      return rel_diff(resolvent(model, z), oracle);
    });
    book.run("resolvent_adjoint_symmetry", tol, [&] {
      return rel_diff(resolvent(model, z).adjoint(), resolvent(model, std::conj(z)));
    });
    book.run("first_resolvent_identity", tol, [&] {
      const ResolventMap rmap = [&](cplx x) { return resolvent(model, x); };
      return pseudo_resolvent_defect(rmap, z, w) /
             (spectral_norm(rmap(z)) * spectral_norm(rmap(w)));
    });
    book.run("schur_invert_vs_dense", tol, [&] {
      const BlockOp2 b = theta_plus_m(sm, z);
      return rel_diff(schur_invert(b).assemble(), b.assemble().inverse());
    });
    book.run("g_z_adjoint_form", tol, [&] {
      return rel_diff(g_z(sm, z), resolvent(model, z) * sm.a().adjoint());
    });
    book.run("g_z_resolvent_identity", tol, [&] {
      const Mat gz = g_z(sm, z);
      const Mat gw = g_z(sm, w);
      const double scale = std::max(spectral_norm(gz), spectral_norm(gw));
      return ratio(spectral_norm((z - w) * resolvent(model, w) * gz - (gw - gz)), scale);
    });
    book.run("boundary_map_identity", tol, [&] {
      const Mat rz = gg_z(sm, z).row();
      const Mat rw = gg_z(sm, w).row();
      const double scale = std::max(spectral_norm(rz), spectral_norm(rw));
      return ratio(spectral_norm((z - w) * resolvent(model, w) * rz - (rw - rz)), scale);
    });
    book.run("m_z_difference_identity", tol, [&] {
      const BoundaryMap gz = gg_z(sm, z);
      const BoundaryMap gwb = gg_z(sm, std::conj(w));
      const BlockOp2 rhs = BlockOp2{gwb.g.adjoint() * gz.g, gwb.g.adjoint() * gz.r,
                                    gwb.r.adjoint() * gz.g, gwb.r.adjoint() * gz.r} *
                           (z - w);
      return block_rel_diff(m_z(sm, z) - m_z(sm, w), rhs);
    });
    book.run("m_z_adjoint_identity", tol, [&] {
      return block_rel_diff(m_z(sm, z).adjoint(), m_z(sm, std::conj(z)));
    });
    book.run("m_z_boundary_form", tol, [&] {
      const BoundaryMap gz = gg_z(sm, z);
      const Mat dg = sm.g() - gz.g;
      const Mat dr = sm.r() - gz.r;
      return block_rel_diff(m_z(sm, z), BlockOp2{sm.a() * dg, sm.a() * dr, dg, dr});
    });
    book.run("krein_vs_direct", tol, [&] {
      return rel_diff(krein_resolvent(sm, z), direct_resolvent(h_s_direct(sm), z));
    });
    book.run("krein_pseudo_resolvent", tol, [&] {
      const ResolventMap rmap = [&](cplx x) { return krein_resolvent(sm, x); };
      return pseudo_resolvent_defect(rmap, z, w) /
             ((1.0 + spectral_norm(rmap(z))) * (1.0 + spectral_norm(rmap(w))));
    });
    book.run("krein_adjoint_symmetry", tol, [&] {
      return rel_diff(krein_resolvent(sm, z).adjoint(), krein_resolvent(sm, std::conj(z)));
    });
  }

  book.run("scale_weight_group_law", tol, [&] {
    const Mat w3 = scale_weight(model, 0.3).w;
    const Mat w4 = scale_weight(model, 0.4).w;
    const Mat w7 = scale_weight(model, 0.7).w;
    const Mat wm3 = scale_weight(model, -0.3).w;
    return std::max(rel_diff(w3 * w4, w7), spectral_norm(w3 * wm3 - id));
  });
  book.run("interpolation_bound", tol, [&] {
    const double li = model.lambda_inf();
    double worst = 0.0;
    for (double delta : {1.0, 2.0, 10.0}) {
      const double lambda = li - delta * std::sqrt(li * li + 1.0);
      const Mat r = resolvent(model, lambda);
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double lhs = op_norm_scale(r, model, 0.0, s);
        worst = std::max(worst, lhs - std::pow(li - lambda, s - 1.0));
      }
    }
    return std::max(worst, 0.0);
  });
  book.run("theta_factorization", tol, [&] {
    const Mat omg = id - sm.g();
    const BlockOp2 ss{sm.s(), id, id, -sm.r()};
    const BlockOp2 left = BlockOp2::diag(omg.adjoint(), id);
    const BlockOp2 right = BlockOp2::diag(omg, id);
    return block_rel_diff(theta_s(sm), left * ss * right);
  });
  book.run("theta_block_symmetry", tol, [&] { return theta_s(sm).symmetry_defect(); });
  book.run("h_s_hermitian", tol, [&] {
    const Mat hs = h_s_direct(sm);
    return ratio(hermitian_defect(hs), spectral_norm(hs));
  });
  book.run("kato_bound", tol, [&] {
    const Mat sv = sm.s() * model.eigvecs();
    double worst = 0.0;
    for (Eigen::Index k = 0; k < d; ++k) {
      const double lhs = sv.col(k).norm();
      const double rhs = sm.corr().kato_a * std::abs(model.eigvals()(k)) + sm.corr().kato_b;
      worst = std::max(worst, lhs - rhs);
    }
    return std::max(worst, 0.0);
  });

  const double thr = lambda_threshold(sm);
  const double gthr = gamma_threshold(sm);
  const double below_one = std::nextafter(1.0, 0.0);
  book.run("g_lambda_contraction", below_one, [&] {
    double worst = 0.0;
    for (double off : {0.1, 1.0, 10.0}) worst = std::max(worst, spectral_norm(g_z(sm, thr - off)));
    return worst;
  });
  book.run("g_igamma_contraction", below_one, [&] {
    double worst = 0.0;
    for (double g : {gthr + 0.1, 2.0 * gthr, 10.0 * gthr}) {
      worst = std::max(worst, spectral_norm(g_z(sm, kI * g)));
      worst = std::max(worst, spectral_norm(g_z(sm, -kI * g)));
    }
    return worst;
  });

  const double li = model.lambda_inf();
  for (double delta : {0.5, 1.0, 3.0}) {
    const double lambda_new = thr - delta * std::sqrt(li * li + 1.0);
    book.run("s_tilde_symmetry", tol, [&] {
      const Mat raw = s_tilde_raw(sm, lambda_new);
      return ratio(hermitian_defect(raw), spectral_norm(raw));
    });
    book.run("lambda_independence", tol, [&] {
      const SingularModel re = reparametrize(sm, lambda_new);
      double worst = 0.0;
      for (cplx z : zs) {
        worst = std::max(worst, block_rel_diff(theta_plus_m(re, z), theta_plus_m(sm, z)));
        worst = std::max(worst, rel_diff(krein_resolvent(re, z), krein_resolvent(sm, z)));
      }
      return worst;
    });
  }

  book.run("a_zero_reduction", tol, [&] {
    Perturbation p0 = Perturbation::make(Mat::Zero(d, d), sm.pert().s_exponent, model);
    const SingularModel sm0(model, p0, sm.corr(), default_lambda_circ(model, p0));
    double worst = 0.0;
    for (cplx z : zs) {
      const Mat rz = resolvent(model, z);
      const Mat oracle = rz * (id + sm.s() * rz).inverse();
      worst = std::max(worst, rel_diff(krein_resolvent(sm0, z), oracle));
    }
    return worst;
  });

  // Cutoff formula on an unrelated regular pair (A_n, E_n).
  const Mat a0 = random_gaussian(rng, d, d);
  const Mat an = a0 / spectral_norm(a0);
  const Mat en = 0.5 * random_hermitian(rng, d);
  for (cplx z : zs) {
    book.run("regularized_vs_direct", tol, [&] {
      const Mat oracle = direct_resolvent(cutoff_hamiltonian(model, an, en), z);
      return rel_diff(regularized_resolvent(model, an, en, sm.lambda_circ(), z), oracle);
    });
    book.run("schur_complement_equality", tol, [&] {
      const Mat oracle = direct_resolvent(cutoff_hamiltonian(model, an, en), z);
      const Mat comp = second_schur_complement(theta_n_plus_m(model, an, en, sm.lambda_circ(), z));
      return rel_diff(comp.inverse(), oracle);
    });
  }
}

void add_results(ExperimentReport& rep, const CheckBook& book) {
  for (auto& c : book.results()) rep.checks.push_back(c);
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
  return (cfg.out_dir / name).string();
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "verify") return Command::kVerify;
  if (name == "sweep") return Command::kSweep;
  if (name == "nelson") return Command::kNelson;
  if (name == "fock") return Command::kFock;
  throw ConfigError("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::kVerify: return "verify";
    case Command::kSweep: return "sweep";
    case Command::kNelson: return "nelson";
    case Command::kFock: return "fock";
  }
  return "verify";
}

void ExperimentConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  if (command == Command::kVerify && dims.empty()) throw ConfigError("dims must be nonempty for verify");
  for (int d : dims) {
    if (d < 1) throw ConfigError("dims entries must be positive");
  }
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) throw ConfigError("levels must be strictly ascending");
  }
  for (int n : levels) {
    if (n < 1) throw ConfigError("levels entries must be positive");
  }
  if (!model_params.is_object()) throw ConfigError("model_params must be an object");
}

json ExperimentConfig::to_json() const {
  return {{"command", command_name(command)}, {"seed", seed},
          {"dims", dims},                     {"tol", tol},
          {"levels", levels},                 {"model_params", model_params},
          {"out_dir", out_dir.string()}};
}

void apply_config_json(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  try {
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("dims")) cfg.dims = j.at("dims").get<std::vector<int>>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("levels")) cfg.levels = j.at("levels").get<std::vector<int>>();
    if (j.contains("model_params")) cfg.model_params = j.at("model_params");
    if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(Command command, const ConfigOverrides& overrides) {
  ExperimentConfig cfg;
  cfg.command = command;
  if (overrides.config_file) {
    try {
      apply_config_json(cfg, read_json(*overrides.config_file));
    } catch (const FormatError& e) {
      throw ConfigError(e.what());
    }
  }
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.tol) cfg.tol = *overrides.tol;
  cfg.validate();
  return cfg;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

json ExperimentReport::to_json() const {
  json cs = json::array();
  for (const auto& c : checks) {
    // JSON has no infinity; an unevaluable check reports null.
    json r = std::isfinite(c.worst_residual) ? json(c.worst_residual) : json(nullptr);
    cs.push_back({{"name", c.name},
                  {"status", c.pass ? "PASS" : "FAIL"},
                  {"worst_residual", r},
                  {"tolerance", c.tolerance}});
  }
  return {{"config_echo", config_echo},
          {"checks", cs},
          {"artifacts", artifacts},
          {"wall_time_ms", wall_time_ms}};
}

ExperimentReport run_verify(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config_echo = cfg.to_json();
  const int per_dim = static_cast<int>(num(cfg.model_params, "models", 5));
  if (per_dim < 1) throw ConfigError("model_params.models must be positive");
  Rng rng(cfg.seed);
  CheckBook book;
  for (int d : cfg.dims) {
    for (int k = 0; k < per_dim; ++k) {
      const SingularModel sm = random_singular_model(rng, d);
      verify_model(book, sm, rng, cfg.tol);
    }
  }
  add_results(rep, book);
  return rep;
}

ExperimentReport run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config_echo = cfg.to_json();
  const json& p = cfg.model_params;
  const std::string family_name = p.value("family", std::string("friedrichs"));

  CutoffFamily family;
  if (family_name == "friedrichs") {
    FriedrichsParams fp;
    fp.levels = cfg.levels.empty() ? std::vector<int>{16, 64, 256, 1024, 4096} : cfg.levels;
    fp.dim_max = static_cast<Eigen::Index>(num(p, "dim_max", 4.0 * fp.levels.back()));
    fp.s = num(p, "s", fp.s);
    fp.eps = num(p, "eps", fp.eps);
    fp.coupling = num(p, "coupling", fp.coupling);
    try {
      family = friedrichs_family(fp);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else if (family_name == "fock") {
    std::vector<double> freqs = num_list(p, "modes", {1, 2, 3, 4, 5, 6});
    const int max_total = static_cast<int>(num(p, "max_total", 3));
    const double eps = num(p, "eps", 0.05);
    const std::vector<int> cutoffs = cfg.levels.empty() ? std::vector<int>{2, 3, 4, 5, 6} : cfg.levels;
    try {
      const FockSpace fock(freqs, max_total);
      family = fock_cutoff_family(
          fock, [&](int j) { return cplx(std::pow(freqs[static_cast<std::size_t>(j - 1)], -0.25 - eps), 0.0); },
          cutoffs);
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else if (family_name == "constant") {
    Rng rng(cfg.seed);
    const SingularModel sm = random_singular_model(rng, cfg.dims.empty() ? 8 : cfg.dims.front());
    family = constant_family(sm, cfg.levels.empty() ? std::vector<int>{1, 2, 3, 4} : cfg.levels);
  } else {
    throw UnknownFamily("unknown family '" + family_name + "'");
  }

  SweepOptions opts;
  opts.extra_probes = cplx_list(p, "probes", {});
  CheckBook book;
  std::vector<ConvergenceCurve> curves;
  try {
    curves = sweep(family, opts);
  } catch (const Error&) {
    book.add("sweep_completed", kInf, 0.0);
    add_results(rep, book);
    return rep;
  }
  std::filesystem::create_directories(cfg.out_dir);
  write_curves_csv(out_path(cfg, "curve.csv"), curves);
  rep.artifacts.push_back(out_path(cfg, "curve.csv"));

  const ConvergenceCurve& main = curves.front();
  json fit_out;
  if (main.fitted_rate) {
    fit_out = rate_fit_json(*main.fitted_rate);
  } else {
    fit_out = {{"error", "InsufficientData"}, {"levels", main.levels.size()}};
  }
  write_json(out_path(cfg, "fit.json"), fit_out);
  rep.artifacts.push_back(out_path(cfg, "fit.json"));

  double mismatch = 0.0;
  for (const auto& c : curves) {
    for (double m : c.path_mismatch) mismatch = std::max(mismatch, m);
  }
  book.add("path_agreement", mismatch, kPathTolerance);

  if (family_name == "constant") {
    double worst = 0.0;
    for (const auto& c : curves) {
      for (double dist : c.distances) worst = std::max(worst, dist);
    }
    book.add("constant_family_zero_distance", worst, 1e-10);
  } else {
    double rise = 0.0;
    for (std::size_t i = 1; i < main.distances.size(); ++i) {
      rise = std::max(rise, main.distances[i] - main.distances[i - 1]);
    }
    book.add("distance_monotone", std::max(rise, 0.0), 1e-12);
    book.add("final_distance", main.distances.back(), 1e-3);
    bool growing = true;
    for (std::size_t i = 1; i < family.levels.size(); ++i) {
      growing = growing && family.self_energy(family.levels[i]) > family.self_energy(family.levels[i - 1]);
    }
    book.add("self_energy_increasing", violation(growing, 1.0), 0.0);
    if (main.fitted_rate) {
      book.add("rate_positive", violation(main.fitted_rate->rate > 0.0, main.fitted_rate->rate), 0.0);
    }
    const SmallnessReport sr = uniform_smallness_check(family, family.levels, 0.1);
    book.add("uniform_smallness", sr.sup, 1.0 - sr.margin);
    double gap = 0.0;
    for (int n : family.levels) gap = std::max(gap, target_gap(family, n));
    book.add("target_gap", gap, cfg.tol);
  }
  add_results(rep, book);
  return rep;
}

ExperimentReport run_nelson(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config_echo = cfg.to_json();
  const json& p = cfg.model_params;
  NelsonParams np;
  np.mu = num(p, "mu", 1.0);
  np.m = num(p, "m", 1.0);
  np.g = num(p, "g", 1.0);
  np.n_particles = static_cast<int>(num(p, "N", 1.0));
  try {
    np.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const std::vector<double> lambdas = num_list(p, "lambdas", {1e3, 1e4, 1e5, 1e6});
  const double quad_tol = num(p, "quad_tol", 1e-10);
  if (lambdas.empty()) throw ConfigError("model_params.lambdas must be nonempty");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw ConfigError("model_params.lambdas must be positive");
  }
  if (!(quad_tol > 0.0)) throw ConfigError("model_params.quad_tol must be positive");

  CheckBook book;
  std::vector<std::pair<double, double>> pairs;
  for (double l : lambdas) {
    try {
      const double v = nelson_counterterm(np, l, quad_tol);
      const double v_fine = nelson_counterterm(np, l, quad_tol / 10.0);
      book.add("quadrature_refinement", std::abs(v - v_fine), quad_tol);
      pairs.emplace_back(l, v);
    } catch (const QuadratureFailure&) {
      book.add("quadrature_refinement", kInf, quad_tol);
    }
  }

  std::filesystem::create_directories(cfg.out_dir);
  {
    std::ofstream out(out_path(cfg, "nelson.csv"), std::ios::binary);
    out << "Lambda,E_Lambda,E_Lambda_over_logLambda\n";
    for (const auto& [l, v] : pairs) {
      out << format_double(l) << ',' << format_double(v) << ',' << format_double(v / std::log(l)) << '\n';
    }
  }
  rep.artifacts.push_back(out_path(cfg, "nelson.csv"));

  json fit_out;
  const double asymptote = nelson_log_slope(np);
  try {
    const LogFit fit = log_growth_fit(pairs);
    fit_out = {{"slope", fit.slope},
               {"intercept", fit.intercept},
               {"residual", fit.residual},
               {"points_used", fit.points_used},
               {"asymptotic_slope", asymptote}};
    book.add("log_slope_vs_asymptote", std::abs(fit.slope / asymptote - 1.0), 0.05);
    book.add("log_fit_residual", fit.residual / std::abs(pairs.back().second), 0.02);
  } catch (const Error& e) {
    fit_out = {{"error", e.what()}, {"asymptotic_slope", asymptote}};
  }
  write_json(out_path(cfg, "log_fit.json"), fit_out);
  rep.artifacts.push_back(out_path(cfg, "log_fit.json"));
  add_results(rep, book);
  return rep;
}

ExperimentReport run_fock(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport rep;
  rep.config_echo = cfg.to_json();
  const json& p = cfg.model_params;
  const std::vector<double> freqs = num_list(p, "modes", {1.0, 3.0});
  const std::vector<cplx> v_in = cplx_list(p, "v", {cplx(1.0), cplx(1.0)});
  if (v_in.size() != freqs.size()) throw ConfigError("model_params.v must have one entry per mode");
  std::vector<int> totals;
  for (double t : num_list(p, "max_totals", {4, 6, 8, 10, 12})) totals.push_back(static_cast<int>(t));
  if (totals.empty()) throw ConfigError("model_params.max_totals must be nonempty");
  Vec v(static_cast<Eigen::Index>(v_in.size()));
  for (std::size_t j = 0; j < v_in.size(); ++j) v(static_cast<Eigen::Index>(j)) = v_in[j];

  CheckBook book;
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(out_path(cfg, "fock.csv"), std::ios::binary);
  out << "max_total,dim,ground_energy,exact_energy,gap\n";
  double previous = kInf;
  bool monotone = true;
  double last_gap = kInf;
  try {
    for (int m : totals) {
      const FockSpace fock(freqs, m);
      const VanHoveModel vh = van_hove_model(fock, v);
      const double e = truncated_ground_energy(vh);
      const double gap = e - vh.exact_energy;
      out << m << ',' << fock.dim() << ',' << format_double(e) << ',' << format_double(vh.exact_energy)
          << ',' << format_double(gap) << '\n';
      monotone = monotone && e <= previous + 1e-12 && gap >= -1e-12;
      previous = e;
      last_gap = gap;

      const Vec w = Vec::LinSpaced(v.size(), 0.5, 1.5) * cplx(0.3, -0.7);
      const Mat comm = fock.annihilation(v) * fock.creation(w) - fock.creation(w) * fock.annihilation(v);
      const auto inner = sector_indices(fock, m - 1);
      const cplx vw = v.dot(w);
      double worst = 0.0;
      for (auto r : inner) {
        for (auto c : inner) {
          const cplx expect = r == c ? vw : cplx(0.0);
          worst = std::max(worst, std::abs(comm(r, c) - expect));
        }
      }
      book.add("commutator_interior", worst, cfg.tol);
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  rep.artifacts.push_back(out_path(cfg, "fock.csv"));
  book.add("variational_monotone", violation(monotone, 1.0), 0.0);
  book.add("ground_energy_vs_exact", std::abs(last_gap), 1e-6);
  add_results(rep, book);
  return rep;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.command) {
    case Command::kVerify: rep = run_verify(cfg); break;
    case Command::kSweep: rep = run_sweep(cfg); break;
    case Command::kNelson: rep = run_nelson(cfg); break;
    case Command::kFock: rep = run_fock(cfg); break;
  }
  const auto stop = std::chrono::steady_clock::now();
  rep.wall_time_ms = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count());
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = out_path(cfg, "report.json");
  rep.artifacts.push_back(path);
  write_json(path, rep.to_json());
  return rep;
}

}  // namespace krein
