#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace krein {

enum class Command { kVerify, kSweep, kNelson, kFock };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct ExperimentConfig {
  Command command = Command::kVerify;
  std::uint64_t seed = 42;
  std::vector<int> dims{8};
  double tol = 1e-10;
  std::vector<int> levels;
  nlohmann::json model_params = nlohmann::json::object();
  std::filesystem::path out_dir = "krein-lab-out";

  /// Throws ConfigError on tol ≤ 0, empty dims for verify, or unsorted levels.
  void validate() const;
  nlohmann::json to_json() const;
};

/// Command-line values; set fields win over the config file.
struct ConfigOverrides {
  std::optional<std::filesystem::path> config_file;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

/// Defaults, then the JSON file, then the overrides.
ExperimentConfig load_config(Command command, const ConfigOverrides& overrides);
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst_residual = 0.0;
  double tolerance = 0.0;
};

struct ExperimentReport {
  nlohmann::json config_echo;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;
  std::uint64_t wall_time_ms = 0;

  bool all_pass() const;
  nlohmann::json to_json() const;
};

ExperimentReport run_verify(const ExperimentConfig& cfg);
ExperimentReport run_sweep(const ExperimentConfig& cfg);
ExperimentReport run_nelson(const ExperimentConfig& cfg);
ExperimentReport run_fock(const ExperimentConfig& cfg);

/// Validates, dispatches on cfg.command, and writes report.json into out_dir.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace krein
