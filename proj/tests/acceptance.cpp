#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "krein/convergence_lab.hpp"
#include "krein/fock.hpp"
#include "krein/nelson.hpp"
#include "krein/random_models.hpp"

using namespace krein;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;  // wall-clock limit; 0 means none
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Mat oracle_resolvent(const Mat& x, cplx z) {
  const Mat m = z * Mat::Identity(x.rows(), x.cols()) - x;
  return m.fullPivLu().solve(Mat::Identity(x.rows(), x.cols()));
}

std::vector<cplx> probes(const SingularModel& sm) {
  return {kI * (2.0 * gamma_threshold(sm)), cplx(1.0, 2.0), cplx(-3.0, 0.5)};
}

BlockOp2 pair_product(const BoundaryMap& left, const BoundaryMap& right) {
  return {left.g.adjoint() * right.g, left.g.adjoint() * right.r, left.r.adjoint() * right.g,
          left.r.adjoint() * right.r};
}

// 100 random models, dims 4–40: Kreĭn resolvent against the direct inverse of H_S.
Outcome krein_oracle() {
  Rng rng(1001);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const SingularModel sm = random_singular_model(rng, random_dim(rng, 4, 40));
    const Mat hs = h_s_direct(sm);
    for (cplx z : probes(sm)) worst = std::max(worst, rel_diff(krein_resolvent(sm, z), oracle_resolvent(hs, z)));
  }
  return {worst <= 1e-10, "worst relative error " + fmt("%.3e", worst)};
}

// Cutoff resolvent through Θ_n + M_{n,z} against the dense solve, plus the Schur complement.
Outcome regularized_identity() {
  Rng rng(1002);
  double worst = 0.0, worst_schur = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index d = random_dim(rng, 4, 40);
    const OperatorModel m(random_hermitian(rng, d));
    const Mat an = random_gaussian(rng, d, d) * (0.2 + 0.01 * k);
    const Mat en = random_hermitian(rng, d);
    const double lc = m.lambda_inf() - 1.0 - k % 4;
    const Mat hn = cutoff_hamiltonian(m, an, en);
    for (cplx z : {kI * 2.0, cplx(1.0, 2.0), cplx(-3.0, 0.5)}) {
      const Mat oracle = oracle_resolvent(hn, z);
      worst = std::max(worst, rel_diff(regularized_resolvent(m, an, en, lc, z), oracle));
      const Mat comp = second_schur_complement(theta_n_plus_m(m, an, en, lc, z));
      const Mat expect = z * Mat::Identity(d, d) - hn;
      worst_schur = std::max(worst_schur, rel_diff(comp, expect));
    }
  }
  return {worst <= 1e-10 && worst_schur <= 1e-10,
          "worst resolvent error " + fmt("%.3e", worst) + ", Schur complement error " + fmt("%.3e", worst_schur)};
}

Outcome structural_identities() {
  Rng rng(1003);
  double rg = 0.0, rgg = 0.0, qft = 0.0, gsg = 0.0, theta_sym = 0.0, m_adj = 0.0, pseudo = 0.0, adj = 0.0;
  for (int k = 0; k < 50; ++k) {
    const SingularModel sm = random_singular_model(rng, random_dim(rng, 4, 30));
    const auto zs = probes(sm);
    for (std::size_t i = 0; i < zs.size(); ++i) {
      const cplx z = zs[i], w = zs[(i + 1) % zs.size()];
      const Mat gz = g_z(sm, z), gw = g_z(sm, w);
      const Mat rw = resolvent(sm.model(), w);
      rg = std::max(rg, spectral_norm((z - w) * rw * gz - (gw - gz)) /
                            std::max(spectral_norm(gz), spectral_norm(gw)));
      const BoundaryMap bz = gg_z(sm, z), bw = gg_z(sm, w);
      const Mat rowz = bz.row(), roww = bw.row();
      rgg = std::max(rgg, spectral_norm((z - w) * rw * rowz - (roww - rowz)) /
                              std::max(spectral_norm(rowz), spectral_norm(roww)));
      const BlockOp2 lhs = m_z(sm, z) - m_z(sm, w);
      qft = std::max(qft, block_rel_diff(lhs, pair_product(gg_z(sm, std::conj(w)), bz) * (z - w)));
      m_adj = std::max(m_adj, block_rel_diff(m_z(sm, z).adjoint(), m_z(sm, std::conj(z))));

      const ResolventMap rmap = [&](cplx x) { return krein_resolvent(sm, x); };
      pseudo = std::max(pseudo, pseudo_resolvent_defect(rmap, z, w));
      adj = std::max(adj, rel_diff(rmap(z).adjoint(), rmap(std::conj(z))));
    }
    const Mat id = Mat::Identity(sm.dim(), sm.dim());
    const BlockOp2 th = theta_s(sm);
    const BlockOp2 fact = BlockOp2::diag((id - sm.g()).adjoint(), id) * BlockOp2{sm.s(), id, id, -sm.r()} *
                          BlockOp2::diag(id - sm.g(), id);
    gsg = std::max(gsg, block_rel_diff(th, fact));
    theta_sym = std::max(theta_sym, th.symmetry_defect());
  }
  const bool pass = rg <= 1e-11 && rgg <= 1e-11 && qft <= 1e-11 && gsg <= 1e-11 && theta_sym == 0.0 &&
                    m_adj <= 1e-12 && pseudo <= 1e-10 && adj <= 1e-11;
  return {pass, "RG " + fmt("%.2e", rg) + ", RGG " + fmt("%.2e", rgg) + ", QFT " + fmt("%.2e", qft) + ", GSG " +
                    fmt("%.2e", gsg) + ", Theta asym " + fmt("%.2e", theta_sym) + ", M adj " + fmt("%.2e", m_adj) +
                    ", pseudo " + fmt("%.2e", pseudo) + ", adj " + fmt("%.2e", adj)};
}

Outcome threshold_soundness() {
  Rng rng(1004);
  double worst_g = 0.0, worst_interp = -1e300;
  for (int k = 0; k < 50; ++k) {
    const SingularModel sm = random_singular_model(rng, random_dim(rng, 4, 30));
    const double thr = lambda_threshold(sm), gthr = gamma_threshold(sm);
    for (double off : {1e-6, 0.1, 1.0, 10.0, 1e3}) {
      worst_g = std::max(worst_g, spectral_norm(g_z(sm, thr - off)));
      worst_g = std::max(worst_g, spectral_norm(g_z(sm, kI * (gthr + off))));
      worst_g = std::max(worst_g, spectral_norm(g_z(sm, -kI * (gthr + off))));
    }
    const double li = sm.model().lambda_inf();
    for (double delta : {1.0, 2.0, 5.0, 20.0}) {
      const double lambda = li - delta * std::sqrt(li * li + 1.0);
      const Mat r = resolvent(sm.model(), lambda);
      for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        worst_interp = std::max(worst_interp, op_norm_scale(r, sm.model(), 0.0, s) - std::pow(li - lambda, s - 1.0));
      }
    }
  }
  return {worst_g < 1.0 && worst_interp <= 1e-10,
          "max ||G|| " + fmt("%.4f", worst_g) + ", max interpolation excess " + fmt("%.3e", worst_interp)};
}

Outcome coordinate_invariance() {
  Rng rng(1005);
  double worst_block = 0.0, worst_res = 0.0;
  for (int k = 0; k < 30; ++k) {
    const SingularModel sm = random_singular_model(rng, random_dim(rng, 4, 30));
    const double li = sm.model().lambda_inf();
    for (double delta : {0.5, 2.0, 10.0}) {
      const SingularModel re = reparametrize(sm, lambda_threshold(sm) - delta * std::sqrt(li * li + 1.0));
      for (cplx z : probes(sm)) {
        worst_block = std::max(worst_block, block_rel_diff(theta_plus_m(re, z), theta_plus_m(sm, z)));
        worst_res = std::max(worst_res, rel_diff(krein_resolvent(re, z), krein_resolvent(sm, z)));
      }
    }
  }
  return {worst_block <= 1e-10 && worst_res <= 1e-10,
          "Theta+M " + fmt("%.3e", worst_block) + ", resolvent " + fmt("%.3e", worst_res)};
}

Outcome friedrichs_convergence() {
  const CutoffFamily fam = friedrichs_family(FriedrichsParams{});
  if (fam.levels != std::vector<int>{16, 64, 256, 1024, 4096}) return {false, "unexpected default levels"};
  bool growing = true;
  for (std::size_t i = 1; i < fam.levels.size(); ++i) {
    growing = growing && fam.self_energy(fam.levels[i]) > fam.self_energy(fam.levels[i - 1]);
  }
  const double ratio = fam.self_energy(fam.levels.back()) / fam.self_energy(fam.levels.front());
  const ConvergenceCurve c = sweep(fam).front();
  bool monotone = true;
  double mismatch = 0.0;
  for (std::size_t i = 0; i < c.distances.size(); ++i) {
    if (i > 0) monotone = monotone && c.distances[i] <= c.distances[i - 1] + 1e-12;
    mismatch = std::max(mismatch, c.path_mismatch[i]);
  }
  const double rate = c.fitted_rate ? c.fitted_rate->rate : std::nan("");
  std::string d;
  for (double x : c.distances) d += fmt("%.3e ", x);
  const bool pass = growing && ratio > 10.0 && monotone && c.distances.back() < 1e-3 && rate > 0.0 &&
                    mismatch <= kPathTolerance;
  return {pass, "self-energy ratio " + fmt("%.2f", ratio) + ", distances [ " + d + "], rate " + fmt("%.4f", rate) +
                    ", path mismatch " + fmt("%.1e", mismatch)};
}

Outcome van_hove() {
  struct Config {
    std::vector<double> freqs;
    std::vector<cplx> v;
  };
  const std::vector<Config> configs{{{2.0}, {1.0}},
                                    {{1.0, 3.0}, {1.0, 1.0}},
                                    {{1.0}, {0.5}},
                                    {{1.0, 2.0}, {0.3, cplx(0.0, 0.7)}},
                                    {{1.5, 2.5, 4.0}, {0.4, cplx(0.3, -0.2), 0.2}}};
  double worst = 0.0;
  for (const auto& c : configs) {
    const FockSpace f(c.freqs, 12);
    Vec v(static_cast<Eigen::Index>(c.v.size()));
    for (std::size_t j = 0; j < c.v.size(); ++j) v(static_cast<Eigen::Index>(j)) = c.v[j];
    const VanHoveModel vh = van_hove_model(f, v);
    worst = std::max(worst, std::abs(truncated_ground_energy(vh) - vh.exact_energy));
  }
  const FockSpace f({1.0, 2.0, 3.0}, 6);
  Vec v(3), w(3);
  v << cplx(1.0, 0.5), -0.3, cplx(0.0, 2.0);
  w << 0.7, cplx(1.0, -1.0), 0.2;
  const Mat comm = f.annihilation(v) * f.creation(w) - f.creation(w) * f.annihilation(v);
  const cplx vw = v.dot(w);
  double ccr = 0.0;
  const auto inner = sector_indices(f, 5);
  for (Eigen::Index i : inner) {
    for (Eigen::Index j : inner) ccr = std::max(ccr, std::abs(comm(i, j) - (i == j ? vw : cplx(0.0))));
  }
  return {worst <= 1e-6 && ccr <= 1e-13,
          "worst energy error " + fmt("%.3e", worst) + ", commutator defect " + fmt("%.3e", ccr)};
}

Outcome nelson() {
  const NelsonParams p;
  std::vector<std::pair<double, double>> pairs;
  for (double l : {1e3, 1e4, 1e5, 1e6}) pairs.emplace_back(l, nelson_counterterm(p, l, 1e-10));
  const LogFit fit = log_growth_fit(pairs);
  const double asymptote = nelson_log_slope(p);
  const double rel = std::abs(fit.slope / asymptote - 1.0);
  const double res = fit.residual / pairs.back().second;
  return {rel <= 0.05 && res < 0.02, "slope " + fmt("%.6f", fit.slope) + " vs " + fmt("%.6f", asymptote) + " (" +
                                         fmt("%.3f", 100.0 * rel) + "%), residual " + fmt("%.3e", 100.0 * res) + "%"};
}

Outcome a_zero_reduction() {
  Rng rng(1009);
  RandomModelOptions opts;
  opts.with_a = false;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const SingularModel sm = random_singular_model(rng, random_dim(rng, 4, 40), opts);
    for (cplx z : probes(sm)) {
      const Mat rz = resolvent(sm.model(), z);
      const Mat core = Mat::Identity(sm.dim(), sm.dim()) + sm.s() * rz;
      const Mat expect = rz * core.fullPivLu().solve(Mat::Identity(sm.dim(), sm.dim()));
      worst = std::max(worst, rel_diff(krein_resolvent(sm, z), expect));
    }
  }
  return {worst <= 1e-12, "worst relative error " + fmt("%.3e", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Krein resolvent matches the direct inverse", 30.0, krein_oracle},
      {2, "regularized resolvent and Schur complement", 30.0, regularized_identity},
      {3, "structural identities", 0.0, structural_identities},
      {4, "threshold soundness", 0.0, threshold_soundness},
      {5, "coordinate-change invariance", 0.0, coordinate_invariance},
      {6, "renormalized Friedrichs convergence", 120.0, friedrichs_convergence},
      {7, "van Hove ground energies and commutation", 60.0, van_hove},
      {8, "Nelson counterterm logarithmic growth", 10.0, nelson},
      {9, "A = 0 reduction", 0.0, a_zero_reduction},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      out.pass = false;
      out.detail += ", over time budget " + fmt("%.0f s", c.budget_s);
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %d: %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", c.id, c.title.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
