#pragma once

// Populations, the three evolutionary operators as seeded random population
// transformations, the fitness pipeline Phi = T_s o f o c, termination, and
// the reproducible EA loop.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "evohull/encoding.hpp"
#include "evohull/random.hpp"

namespace evohull {

enum class Direction { Minimize, Maximize };

struct Population {
  std::vector<Genotype> members;
  std::size_t generation = 0;
  /// lineage[i] lists indices into the previous population; empty at t = 0.
  std::vector<std::vector<std::size_t>> lineage;

  std::size_t size() const noexcept { return members.size(); }
};

struct FitnessPipeline {
  Codec codec;
  std::function<double(std::span<const double>)> objective;
  std::function<double(double)> scaling = [](double y) { return y; };
  Direction direction = Direction::Minimize;
};

/// Phi(s) = scaling(objective(decode(s))).
double evaluate(const Genotype& s, const FitnessPipeline& pipe);
/// Evaluates every member, optionally on `threads` workers. Results are
/// stored in member order so the output does not depend on the thread count.
std::vector<double> evaluate_all(std::span<const Genotype> members, const FitnessPipeline& pipe,
                                 std::size_t threads = 1);

/// Maps a fitness to the internal minimization scale.
inline double to_minimization(double fitness, Direction d) noexcept {
  return d == Direction::Maximize ? -fitness : fitness;
}
/// True when `a` is strictly better than `b`.
inline bool better(double a, double b, Direction d) noexcept {
  return d == Direction::Maximize ? a > b : a < b;
}

enum class OperatorKind { Recombination, Mutation, Selection };

enum class Strategy {
  OnePoint,
  Uniform,
  Resample,
  Flip,
  Tournament,
  Truncation,
};

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct OperatorParams {
  OperatorKind kind = OperatorKind::Mutation;
  Strategy strategy = Strategy::Resample;
  /// Named settings: "probability" (crossover), "rate" (mutation),
  /// "tournament_size" (selection).
  std::map<std::string, double> settings;
  /// Output size of the operator (mu').
  std::size_t offspring_size = 1;
  /// chi: when true the selection pool is parents followed by offspring.
  bool elitism = false;

  double get(const std::string& name, double fallback) const;
  /// Throws InvalidParams on out-of-range settings or offspring_size < 1.
  void validate() const;
};

/// Uniform i.i.d. sampling with replacement from A^l.
Population initialize(const Codec& codec, std::size_t mu, RandomStream& rng);

Genotype one_point_crossover_child(const Genotype& a, const Genotype& b, std::size_t cut);

struct OperatorEvents {
  std::size_t crossovers = 0;
  std::size_t mutated_symbols = 0;
};

/// Pairs parents at random (distinct indices when mu >= 2) and applies the
/// crossover with the configured probability. Returns offspring_size
/// children with their parent indices in `lineage`.
Population recombine(const Population& pop, std::size_t alphabet_size, const OperatorParams& params,
                     RandomStream& rng, OperatorEvents* events = nullptr);

/// Independent per-symbol resampling with probability "rate". Resampling
/// draws uniformly among the other symbols, so every event changes the
/// locus. Flip requires a binary alphabet.
Population mutate(const Population& pop, std::size_t alphabet_size, const OperatorParams& params,
                  RandomStream& rng, OperatorEvents* events = nullptr);

/// Tournament (size k, drawn without replacement) or truncation selection on
/// minimization-scale fitnesses; ties go to the lowest pool index. The
/// lineage of each output lists its pool index. With elitism, tournament
/// output 0 is the best pool member.
Population select(const Population& pool, std::span<const double> fitnesses, const OperatorParams& params,
                  RandomStream& rng);

struct TerminationCriteria {
  std::optional<std::size_t> max_generations;
  /// In objective units; reached when best <= target (minimize) or
  /// best >= target (maximize).
  std::optional<double> target;
  std::optional<std::size_t> stagnation_window;
  double stagnation_tolerance = 1e-12;
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double worst = 0.0;
  double best_so_far = 0.0;
  double entropy_shannon = 0.0;
  double entropy_renyi2 = 0.0;
  OperatorEvents events;
  std::size_t evaluations = 0;
};

struct RunRecord {
  Direction direction = Direction::Minimize;
  std::vector<GenerationStats> generations;
  Genotype best_genotype;
  Phenotype best_phenotype;
  double best_fitness = 0.0;
  std::size_t generations_used = 0;
  std::string termination_reason;
};

/// Throws InvalidConfig when no criterion is enabled.
std::optional<std::string> termination_reason(const RunRecord& record, const TerminationCriteria& criteria);
bool should_terminate(const RunRecord& record, const TerminationCriteria& criteria);

struct EaConfig {
  std::size_t population_size = 20;
  std::size_t offspring_size = 20;
  bool elitism = true;
  OperatorParams recombination{OperatorKind::Recombination, Strategy::OnePoint, {{"probability", 0.9}}, 20, false};
  OperatorParams mutation{OperatorKind::Mutation, Strategy::Resample, {{"rate", 0.05}}, 20, false};
  OperatorParams selection{OperatorKind::Selection, Strategy::Tournament, {{"tournament_size", 2}}, 20, true};
  TerminationCriteria termination{200, std::nullopt, std::nullopt, 1e-12};
  std::size_t threads = 1;

  /// Propagates population/offspring sizes and chi into the operator params.
  void normalize();
  void validate() const;
};

EaConfig ea_config_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EaConfig& config);

/// initialize -> (recombine -> mutate -> evaluate -> select)* until a
/// termination criterion fires. Each operator draws from its own named
/// substream of `seed`.
RunRecord run_ea(const FitnessPipeline& pipe, EaConfig config, std::uint64_t seed);

nlohmann::json to_json(const RunRecord& record, const Alphabet& alphabet);
RunRecord run_record_from_json(const nlohmann::json& doc);
/// generation,best,mean,worst,entropy
std::string generations_csv(const RunRecord& record);

}  // namespace evohull
