#include "evohull/ea_core.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "evohull/error.hpp"

namespace evohull {

double evaluate(const Genotype& s, const FitnessPipeline& pipe) {
  const Phenotype x = pipe.codec.decode(s);
  return pipe.scaling(pipe.objective(x));
}

std::vector<double> evaluate_all(std::span<const Genotype> members, const FitnessPipeline& pipe,
                                 std::size_t threads) {
  std::vector<double> out(members.size());
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, members.size()));
  if (threads == 1) {
    for (std::size_t i = 0; i < members.size(); ++i) out[i] = evaluate(members[i], pipe);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> workers;
    for (std::size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        try {
          for (std::size_t i = t; i < members.size(); i += threads) out[i] = evaluate(members[i], pipe);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::OnePoint: return "one-point";
    case Strategy::Uniform: return "uniform";
    case Strategy::Resample: return "resample";
    case Strategy::Flip: return "flip";
    case Strategy::Tournament: return "tournament";
    case Strategy::Truncation: return "truncation";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& s) {
  for (Strategy v : {Strategy::OnePoint, Strategy::Uniform, Strategy::Resample, Strategy::Flip,
                     Strategy::Tournament, Strategy::Truncation}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown operator strategy '" + s + "'");
}

double OperatorParams::get(const std::string& name, double fallback) const {
  auto it = settings.find(name);
  return it == settings.end() ? fallback : it->second;
}

void OperatorParams::validate() const {
  if (offspring_size < 1) throw Error(ErrorCode::InvalidParams, "offspring size must be >= 1");
  switch (kind) {
    case OperatorKind::Recombination: {
      if (strategy != Strategy::OnePoint && strategy != Strategy::Uniform) {
        throw Error(ErrorCode::InvalidParams, "recombination strategy must be one-point or uniform");
      }
      const double p = get("probability", 1.0);
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParams, "crossover probability outside [0,1]");
      break;
    }
    case OperatorKind::Mutation: {
      if (strategy != Strategy::Resample && strategy != Strategy::Flip) {
        throw Error(ErrorCode::InvalidParams, "mutation strategy must be resample or flip");
      }
      const double r = get("rate", 0.0);
      if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidParams, "mutation rate outside [0,1]");
      break;
    }
    case OperatorKind::Selection: {
      if (strategy != Strategy::Tournament && strategy != Strategy::Truncation) {
        throw Error(ErrorCode::InvalidParams, "selection strategy must be tournament or truncation");
      }
      if (strategy == Strategy::Tournament && get("tournament_size", 2.0) < 1.0) {
        throw Error(ErrorCode::InvalidParams, "tournament size must be >= 1");
      }
      break;
    }
  }
}

Population initialize(const Codec& codec, std::size_t mu, RandomStream& rng) {
  if (mu < 1) throw Error(ErrorCode::InvalidParams, "population size must be >= 1");
  Population pop;
  pop.members.resize(mu);
  for (auto& g : pop.members) {
    g.symbols.resize(codec.length());
    for (auto& s : g.symbols) s = static_cast<std::uint32_t>(rng.uniform_index(codec.alphabet().size()));
  }
  return pop;
}

Genotype one_point_crossover_child(const Genotype& a, const Genotype& b, std::size_t cut) {
  if (a.length() != b.length() || cut > a.length()) {
    throw Error(ErrorCode::InvalidParams, "crossover cut outside the parents");
  }
  Genotype child = a;
  std::copy(b.symbols.begin() + static_cast<std::ptrdiff_t>(cut), b.symbols.end(),
            child.symbols.begin() + static_cast<std::ptrdiff_t>(cut));
  return child;
}

Population recombine(const Population& pop, std::size_t /*alphabet_size*/, const OperatorParams& params,
                     RandomStream& rng, OperatorEvents* events) {
  params.validate();
  if (pop.size() == 0) throw Error(ErrorCode::InvalidInput, "empty parent population");
  const double prob = params.get("probability", 1.0);
  if (prob > 0.0 && pop.size() < 2) {
    throw Error(ErrorCode::InvalidParams, "crossover needs at least two parents");
  }

  Population out;
  out.generation = pop.generation;
  out.members.reserve(params.offspring_size + 1);
  out.lineage.reserve(params.offspring_size + 1);
  while (out.members.size() < params.offspring_size) {
    const std::size_t i = rng.uniform_index(pop.size());
    std::size_t j = i;
    if (pop.size() >= 2) {
      j = rng.uniform_index(pop.size() - 1);
      if (j >= i) ++j;
    }
    const Genotype& a = pop.members[i];
    const Genotype& b = pop.members[j];
    const std::size_t length = a.length();
    const bool fire = rng.bernoulli(prob) && i != j &&
                      (params.strategy == Strategy::Uniform ? length >= 1 : length >= 2);
    if (!fire) {
      out.members.push_back(a);
      out.lineage.push_back({i});
      out.members.push_back(b);
      out.lineage.push_back({j});
      continue;
    }
    if (events) ++events->crossovers;
    Genotype c1 = a, c2 = b;
    if (params.strategy == Strategy::OnePoint) {
      const std::size_t cut = 1 + rng.uniform_index(length - 1);
      c1 = one_point_crossover_child(a, b, cut);
      c2 = one_point_crossover_child(b, a, cut);
    } else {
      for (std::size_t k = 0; k < length; ++k) {
        if (rng.bernoulli(0.5)) std::swap(c1.symbols[k], c2.symbols[k]);
      }
    }
    out.members.push_back(std::move(c1));
    out.lineage.push_back({i, j});
    out.members.push_back(std::move(c2));
    out.lineage.push_back({j, i});
  }
  out.members.resize(params.offspring_size);
  out.lineage.resize(params.offspring_size);
  return out;
}

Population mutate(const Population& pop, std::size_t alphabet_size, const OperatorParams& params,
                  RandomStream& rng, OperatorEvents* events) {
  params.validate();
  if (params.strategy == Strategy::Flip && alphabet_size != 2) {
    throw Error(ErrorCode::InvalidParams, "flip mutation needs a binary alphabet");
  }
  const double rate = params.get("rate", 0.0);
  Population out;
  out.generation = pop.generation;
  out.members = pop.members;
  out.lineage.resize(pop.size());
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    out.lineage[i] = {i};
    if (rate <= 0.0) continue;
    for (auto& s : out.members[i].symbols) {
      if (!rng.bernoulli(rate)) continue;
      if (params.strategy == Strategy::Flip) {
        s ^= 1u;
      } else {
        auto r = static_cast<std::uint32_t>(rng.uniform_index(alphabet_size - 1));
        s = r >= s ? r + 1 : r;
      }
      if (events) ++events->mutated_symbols;
    }
  }
  return out;
}

Population select(const Population& pool, std::span<const double> fitnesses, const OperatorParams& params,
                  RandomStream& rng) {
  params.validate();
  if (fitnesses.size() != pool.size()) {
    throw Error(ErrorCode::InvalidInput, "fitness count " + std::to_string(fitnesses.size()) +
                                             " does not match pool size " + std::to_string(pool.size()));
  }
  if (pool.size() == 0) throw Error(ErrorCode::InvalidInput, "empty selection pool");
  // NaN sorts last.
  const auto key = [&](std::size_t i) {
    const double f = fitnesses[i];
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };
  const auto wins = [&](std::size_t a, std::size_t b) { return key(a) < key(b) || (key(a) == key(b) && a < b); };

  Population out;
  out.generation = pool.generation;
  out.members.reserve(params.offspring_size);
  out.lineage.reserve(params.offspring_size);
  if (params.strategy == Strategy::Truncation) {
    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), wins);
    for (std::size_t k = 0; k < params.offspring_size; ++k) {
      const std::size_t idx = order[k % order.size()];
      out.members.push_back(pool.members[idx]);
      out.lineage.push_back({idx});
    }
    return out;
  }
  const auto k = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(params.get("tournament_size", 2.0)));
  std::vector<std::size_t> scratch(pool.size());
  std::size_t n = 0;
  if (params.elitism) {
    // slot 0 keeps the pool's best
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (wins(i, best)) best = i;
    }
    out.members.push_back(pool.members[best]);
    out.lineage.push_back({best});
    n = 1;
  }
  for (; n < params.offspring_size; ++n) {
    std::iota(scratch.begin(), scratch.end(), 0);
    std::size_t winner = pool.size();
    // Partial Fisher-Yates: the first k slots are a draw without replacement.
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t r = t + rng.uniform_index(pool.size() - t);
      std::swap(scratch[t], scratch[r]);
      if (winner == pool.size() || wins(scratch[t], winner)) winner = scratch[t];
    }
    out.members.push_back(pool.members[winner]);
    out.lineage.push_back({winner});
  }
  return out;
}

std::optional<std::string> termination_reason(const RunRecord& record, const TerminationCriteria& criteria) {
  if (!criteria.max_generations && !criteria.target && !criteria.stagnation_window) {
    throw Error(ErrorCode::InvalidConfig, "no termination criterion enabled");
  }
  if (record.generations.empty()) throw Error(ErrorCode::InvalidInput, "run record has no generations");
  const auto& last = record.generations.back();
  if (criteria.max_generations && last.generation >= *criteria.max_generations) return "max-generations";
  if (criteria.target) {
    const bool hit = record.direction == Direction::Maximize ? last.best_so_far >= *criteria.target
                                                              : last.best_so_far <= *criteria.target;
    if (hit) return "target";
  }
  if (criteria.stagnation_window && *criteria.stagnation_window > 0 &&
      record.generations.size() > *criteria.stagnation_window) {
    const auto& earlier = record.generations[record.generations.size() - 1 - *criteria.stagnation_window];
    if (std::abs(last.best_so_far - earlier.best_so_far) <= criteria.stagnation_tolerance) return "stagnation";
  }
  return std::nullopt;
}

bool should_terminate(const RunRecord& record, const TerminationCriteria& criteria) {
  return termination_reason(record, criteria).has_value();
}

void EaConfig::normalize() {
  recombination.kind = OperatorKind::Recombination;
  mutation.kind = OperatorKind::Mutation;
  selection.kind = OperatorKind::Selection;
  recombination.offspring_size = offspring_size;
  mutation.offspring_size = offspring_size;
  selection.offspring_size = population_size;
  selection.elitism = elitism;
}

void EaConfig::validate() const {
  if (population_size < 1) throw Error(ErrorCode::InvalidConfig, "population size must be >= 1");
  if (offspring_size < 1) throw Error(ErrorCode::InvalidConfig, "offspring size must be >= 1");
  if (!termination.max_generations && !termination.target && !termination.stagnation_window) {
    throw Error(ErrorCode::InvalidConfig, "no termination criterion enabled");
  }
  recombination.validate();
  mutation.validate();
  selection.validate();
}

namespace {

GenerationStats summarize(std::size_t generation, std::span<const double> fitness, const Population& pop,
                          std::size_t alphabet_size, Direction dir) {
  GenerationStats st;
  st.generation = generation;
  st.best = fitness[0];
  st.worst = fitness[0];
  double sum = 0.0;
  for (double f : fitness) {
    if (better(f, st.best, dir)) st.best = f;
    if (better(st.worst, f, dir)) st.worst = f;
    sum += f;
  }
  st.mean = sum / double(fitness.size());
  const LocusEntropy h = mean_locus_entropy(pop.members, alphabet_size);
  st.entropy_shannon = h.shannon;
  st.entropy_renyi2 = h.renyi2;
  return st;
}

}  // namespace

RunRecord run_ea(const FitnessPipeline& pipe, EaConfig config, std::uint64_t seed) {
  config.normalize();
  config.validate();
  const std::size_t alphabet_size = pipe.codec.alphabet().size();
  const RandomStream root(seed);
  RandomStream init_rng = root.substream("initialize");
  RandomStream rec_rng = root.substream("recombine");
  RandomStream mut_rng = root.substream("mutate");
  RandomStream sel_rng = root.substream("select");

  RunRecord record;
  record.direction = pipe.direction;

  Population pop = initialize(pipe.codec, config.population_size, init_rng);
  std::vector<double> fitness = evaluate_all(pop.members, pipe, config.threads);

  const auto track_best = [&](const Population& p, std::span<const double> f) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (record.best_genotype.symbols.empty() || better(f[i], record.best_fitness, pipe.direction)) {
        record.best_fitness = f[i];
        record.best_genotype = p.members[i];
      }
    }
  };
  track_best(pop, fitness);
  {
    GenerationStats st = summarize(0, fitness, pop, alphabet_size, pipe.direction);
    st.best_so_far = record.best_fitness;
    st.evaluations = pop.size();
    record.generations.push_back(st);
  }

  std::vector<double> internal;
  for (;;) {
    if (auto reason = termination_reason(record, config.termination)) {
      record.termination_reason = *reason;
      break;
    }
    OperatorEvents events;
    Population offspring = pop.size() >= 2 ? recombine(pop, alphabet_size, config.recombination, rec_rng, &events)
                                           : [&] {
                                               // A single parent cannot recombine; clone it.
                                               Population o;
                                               o.members.assign(config.offspring_size, pop.members[0]);
                                               o.lineage.assign(config.offspring_size, {0});
                                               return o;
                                             }();
    offspring = mutate(offspring, alphabet_size, config.mutation, mut_rng, &events);
    std::vector<double> off_fit = evaluate_all(offspring.members, pipe, config.threads);
    track_best(offspring, off_fit);

    Population pool;
    std::vector<double> pool_fit;
    if (config.elitism) {
      pool.members = pop.members;
      pool.members.insert(pool.members.end(), offspring.members.begin(), offspring.members.end());
      pool_fit = fitness;
      pool_fit.insert(pool_fit.end(), off_fit.begin(), off_fit.end());
    } else {
      pool.members = std::move(offspring.members);
      pool_fit = std::move(off_fit);
    }
    internal.resize(pool_fit.size());
    for (std::size_t i = 0; i < pool_fit.size(); ++i) internal[i] = to_minimization(pool_fit[i], pipe.direction);

    Population next = select(pool, internal, config.selection, sel_rng);
    next.generation = pop.generation + 1;
    std::vector<double> next_fit(next.size());
    for (std::size_t i = 0; i < next.size(); ++i) next_fit[i] = pool_fit[next.lineage[i].front()];

    pop = std::move(next);
    fitness = std::move(next_fit);
    GenerationStats st = summarize(pop.generation, fitness, pop, alphabet_size, pipe.direction);
    st.best_so_far = record.best_fitness;
    st.events = events;
    st.evaluations = config.offspring_size;
    record.generations.push_back(st);
  }
  record.generations_used = record.generations.back().generation;
  record.best_phenotype = pipe.codec.decode(record.best_genotype);
  return record;
}

namespace {

nlohmann::json params_json(const OperatorParams& p) {
  nlohmann::json j;
  j["strategy"] = to_string(p.strategy);
  for (const auto& [k, v] : p.settings) j[k] = v;
  return j;
}

void params_from_json(const nlohmann::json& j, OperatorParams& p) {
  if (j.contains("strategy")) p.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  for (const auto& [k, v] : j.items()) {
    if (k == "strategy") continue;
    if (!v.is_number()) throw Error(ErrorCode::InvalidConfig, "operator setting '" + k + "' must be numeric");
    p.settings[k] = v.get<double>();
  }
}

}  // namespace

EaConfig ea_config_from_json(const nlohmann::json& doc) {
  EaConfig c;
  try {
    c.population_size = doc.value("population_size", c.population_size);
    c.offspring_size = doc.value("offspring_size", c.population_size);
    c.elitism = doc.value("elitism", c.elitism);
    c.threads = doc.value("threads", c.threads);
    if (doc.contains("recombination")) params_from_json(doc.at("recombination"), c.recombination);
    if (doc.contains("mutation")) params_from_json(doc.at("mutation"), c.mutation);
    if (doc.contains("selection")) params_from_json(doc.at("selection"), c.selection);
    if (doc.contains("termination")) {
      const auto& t = doc.at("termination");
      c.termination = TerminationCriteria{};
      if (t.contains("max_generations")) c.termination.max_generations = t.at("max_generations").get<std::size_t>();
      if (t.contains("target")) c.termination.target = t.at("target").get<double>();
      if (t.contains("stagnation_window")) {
        c.termination.stagnation_window = t.at("stagnation_window").get<std::size_t>();
      }
      c.termination.stagnation_tolerance = t.value("stagnation_tolerance", 1e-12);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("EA configuration: ") + e.what());
  }
  c.normalize();
  c.validate();
  return c;
}

nlohmann::json to_json(const EaConfig& c) {
  nlohmann::json j;
  j["population_size"] = c.population_size;
  j["offspring_size"] = c.offspring_size;
  j["elitism"] = c.elitism;
  j["threads"] = c.threads;
  j["recombination"] = params_json(c.recombination);
  j["mutation"] = params_json(c.mutation);
  j["selection"] = params_json(c.selection);
  nlohmann::json t = nlohmann::json::object();
  if (c.termination.max_generations) t["max_generations"] = *c.termination.max_generations;
  if (c.termination.target) t["target"] = *c.termination.target;
  if (c.termination.stagnation_window) t["stagnation_window"] = *c.termination.stagnation_window;
  t["stagnation_tolerance"] = c.termination.stagnation_tolerance;
  j["termination"] = t;
  return j;
}

nlohmann::json to_json(const RunRecord& r, const Alphabet& alphabet) {
  nlohmann::json j;
  j["direction"] = r.direction == Direction::Maximize ? "maximize" : "minimize";
  j["alphabet"] = alphabet.symbols();
  nlohmann::json gens = nlohmann::json::array();
  for (const auto& g : r.generations) {
    gens.push_back({{"generation", g.generation},
                    {"best", g.best},
                    {"mean", g.mean},
                    {"worst", g.worst},
                    {"best_so_far", g.best_so_far},
                    {"entropy_shannon", g.entropy_shannon},
                    {"entropy_renyi2", g.entropy_renyi2},
                    {"crossovers", g.events.crossovers},
                    {"mutated_symbols", g.events.mutated_symbols},
                    {"evaluations", g.evaluations}});
  }
  j["generations"] = gens;
  j["best_genotype"] = r.best_genotype.symbols;
  j["best_genotype_text"] = to_string(r.best_genotype, alphabet);
  j["best_phenotype"] = r.best_phenotype;
  j["best_fitness"] = r.best_fitness;
  j["generations_used"] = r.generations_used;
  j["termination_reason"] = r.termination_reason;
  return j;
}

RunRecord run_record_from_json(const nlohmann::json& doc) {
  RunRecord r;
  try {
    r.direction = doc.at("direction").get<std::string>() == "maximize" ? Direction::Maximize : Direction::Minimize;
    for (const auto& g : doc.at("generations")) {
      GenerationStats st;
      st.generation = g.at("generation").get<std::size_t>();
      st.best = g.at("best").get<double>();
      st.mean = g.at("mean").get<double>();
      st.worst = g.at("worst").get<double>();
      st.best_so_far = g.value("best_so_far", st.best);
      st.entropy_shannon = g.at("entropy_shannon").get<double>();
      st.entropy_renyi2 = g.at("entropy_renyi2").get<double>();
      st.events.crossovers = g.value("crossovers", std::size_t{0});
      st.events.mutated_symbols = g.value("mutated_symbols", std::size_t{0});
      st.evaluations = g.value("evaluations", std::size_t{0});
      r.generations.push_back(st);
    }
    r.best_genotype.symbols = doc.at("best_genotype").get<std::vector<std::uint32_t>>();
    r.best_phenotype = doc.at("best_phenotype").get<std::vector<double>>();
    r.best_fitness = doc.at("best_fitness").get<double>();
    r.generations_used = doc.at("generations_used").get<std::size_t>();
    r.termination_reason = doc.at("termination_reason").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("run record: ") + e.what());
  }
  return r;
}

std::string generations_csv(const RunRecord& record) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "generation,best,mean,worst,entropy\n";
  for (const auto& g : record.generations) {
    os << g.generation << ',' << g.best << ',' << g.mean << ',' << g.worst << ',' << g.entropy_shannon << '\n';
  }
  return os.str();
}

}  // namespace evohull
