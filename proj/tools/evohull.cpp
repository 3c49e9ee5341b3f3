#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "evohull/app.hpp"

int main(int argc, char** argv) {
  CLI::App app{"evohull: evolutionary convex hull and optimization experiments"};
  app.require_subcommand(1);

  std::string config;
  std::vector<std::uint64_t> seeds;
  std::string out;
  const std::pair<const char*, const char*> commands[] = {
      {"hull-recover", "scramble a hull mesh, then run greedy descent and the EA"},
      {"optimize", "penalized LP/QP over a polytope, checked against the vertex or grid oracle"},
      {"operator-laws", "randomized checks of the selection, mutation and recombination laws"},
      {"entropy-report", "per-generation locus entropies of a recorded run"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seeds, "seed(s), overriding the config");
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : evohull::kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  return evohull::run_command(command, config, seeds, out_dir);
}
