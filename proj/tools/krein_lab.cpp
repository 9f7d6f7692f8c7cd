#include <cstdint>
#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "krein/errors.hpp"
#include "krein/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"krein-lab: Kreĭn resolvent verification and renormalization experiments"};
  app.require_subcommand(1);

  std::string config_file, out_dir;
  std::uint64_t seed = 0;
  double tol = 0.0;

  const std::pair<const char*, const char*> commands[] = {
      {"verify", "identity suite on seeded random models"},
      {"sweep", "norm-resolvent convergence sweep of a cutoff family"},
      {"nelson", "counterterm table and logarithmic fit"},
      {"fock", "van Hove ground energies on truncated Fock spaces"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_file, "JSON config file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--tol", tol, "identity tolerance");
  }
  CLI11_PARSE(app, argc, argv);

  CLI::App* sub = app.get_subcommands().front();
  krein::ConfigOverrides ov;
  if (sub->count("--config")) ov.config_file = config_file;
  if (sub->count("--out")) ov.out_dir = out_dir;
  if (sub->count("--seed")) ov.seed = seed;
  if (sub->count("--tol")) ov.tol = tol;

  try {
    const krein::ExperimentConfig cfg = krein::load_config(krein::parse_command(sub->get_name()), ov);
    const krein::ExperimentReport rep = krein::run_experiment(cfg);
    for (const auto& c : rep.checks) {
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  worst=" << c.worst_residual
                << "  tol=" << c.tolerance << '\n';
    }
    for (const auto& a : rep.artifacts) std::cout << "wrote " << a << '\n';
    std::cout << (rep.all_pass() ? "all checks passed" : "some checks failed") << " ("
              << rep.wall_time_ms << " ms)\n";
    return rep.all_pass() ? 0 : 1;
  } catch (const krein::Error& e) {
    std::cerr << "krein-lab: " << e.what() << '\n';
    return 2;
  }
}
