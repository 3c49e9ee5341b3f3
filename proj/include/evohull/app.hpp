#pragma once

// Experiment commands behind the evohull executable. Each command reads a
// JSON config, writes its artifacts under the output directory and returns
// a process exit status: 0 all checks passed, 1 a verification failed,
// 2 a config or instance error.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace evohull {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitConfigError = 2;

struct ExperimentConfig {
  std::string command;
  std::filesystem::path base_dir;  // relative references resolve here
  nlohmann::json instance;         // inline object, or loaded from a path
  nlohmann::json ea;               // may be empty
  nlohmann::json options;          // command-specific settings
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;
};

/// Reads the config file; `seeds` and `out_dir`, when given, override the
/// file. Throws InvalidConfig, ParseError or FileNotFound.
ExperimentConfig load_experiment_config(const std::filesystem::path& path, const std::string& command,
                                        const std::vector<std::uint64_t>& seeds = {},
                                        const std::optional<std::filesystem::path>& out_dir = std::nullopt);

int cmd_hull_recover(const ExperimentConfig& config);
int cmd_optimize(const ExperimentConfig& config);
int cmd_operator_laws(const ExperimentConfig& config);
int cmd_entropy_report(const ExperimentConfig& config);

/// Loads the config and dispatches. Library errors become exit status 2
/// (instance and config problems) and are logged.
int run_command(const std::string& command, const std::filesystem::path& config_path,
                const std::vector<std::uint64_t>& seeds = {},
                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

struct LawResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::string first_violation;
};

/// Property suites for selection membership, mutation lineage and
/// recombination dependency. `broken_selection` swaps in a selection that
/// returns fresh random genotypes.
std::vector<LawResult> check_operator_laws(std::size_t trials, std::uint64_t seed, bool broken_selection = false);

/// Sets the log level from EVOHULL_LOG (error, info, debug; default error).
void configure_logging();

}  // namespace evohull
