#include "evohull/app.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "evohull/ea_core.hpp"
#include "evohull/error.hpp"
#include "evohull/io.hpp"
#include "evohull/mesh.hpp"
#include "evohull/problems.hpp"

namespace evohull {

namespace fs = std::filesystem;
using nlohmann::json;

void configure_logging() {
  static auto logger = [] {
    auto l = spdlog::stderr_color_mt("evohull");
    l->set_pattern("[%l] %v");
    spdlog::set_default_logger(l);
    return l;
  }();
  const char* env = std::getenv("EVOHULL_LOG");
  const std::string level = env ? env : "error";
  if (level == "debug") {
    logger->set_level(spdlog::level::debug);
  } else if (level == "info") {
    logger->set_level(spdlog::level::info);
  } else {
    logger->set_level(spdlog::level::err);
  }
}

namespace {

json parse_json_text(const std::string& text, const fs::path& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, where.string() + ": " + e.what());
  }
}

// A reference is either an inline object or a path relative to the config.
json resolve(const json& ref, const fs::path& base) {
  if (ref.is_null() || ref.is_object()) return ref;
  if (!ref.is_string()) throw Error(ErrorCode::InvalidConfig, "reference must be an object or a path");
  const fs::path p = base / ref.get<std::string>();
  return parse_json_text(read_text_file(p), p);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fs::path seed_dir(const ExperimentConfig& c, std::uint64_t seed) { return c.out_dir / ("seed_" + std::to_string(seed)); }

}  // namespace

ExperimentConfig load_experiment_config(const fs::path& path, const std::string& command,
                                        const std::vector<std::uint64_t>& seeds,
                                        const std::optional<fs::path>& out_dir) {
  const json doc = parse_json_text(read_text_file(path), path);
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  ExperimentConfig c;
  c.command = command;
  c.base_dir = path.parent_path();
  if (doc.contains("command") && doc.at("command") != command) {
    throw Error(ErrorCode::InvalidConfig, "config is for command '" + doc.at("command").get<std::string>() + "'");
  }
  try {
    c.instance = resolve(doc.value("instance", json()), c.base_dir);
    c.ea = resolve(doc.value("ea", json()), c.base_dir);
    c.options = doc.value("options", json::object());
    if (!seeds.empty()) {
      c.seeds = seeds;
    } else if (doc.contains("seeds")) {
      c.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
    }
    if (out_dir) {
      c.out_dir = *out_dir;
    } else {
      c.out_dir = doc.contains("out") ? c.base_dir / doc.at("out").get<std::string>() : fs::path("evohull_out");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (c.seeds.empty()) throw Error(ErrorCode::InvalidConfig, "at least one seed is required");
  return c;
}

namespace {

std::vector<Vec3> triangulation_points(const ExperimentConfig& c) {
  const json& inst = c.instance;
  if (!inst.is_object()) throw Error(ErrorCode::InvalidConfig, "hull-recover needs an instance");
  try {
    if (inst.contains("points")) {
      std::vector<Vec3> pts;
      for (const auto& p : inst.at("points")) {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != 3) throw Error(ErrorCode::ParseError, "points must have three coordinates");
        pts.emplace_back(v[0], v[1], v[2]);
      }
      return pts;
    }
    if (inst.contains("points_csv")) {
      return to_vec3(read_points_csv(read_text_file(c.base_dir / inst.at("points_csv").get<std::string>())));
    }
    if (inst.contains("random_sphere")) {
      const auto& rs = inst.at("random_sphere");
      RandomStream rng(rs.value("seed", std::uint64_t{0}));
      return random_sphere_points(rs.at("count").get<std::size_t>(), rng);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  throw Error(ErrorCode::InvalidConfig, "instance needs points, points_csv or random_sphere");
}

// Keys given in the config override the command's defaults.
EaConfig ea_config_or(const json& doc, const EaConfig& fallback) {
  if (doc.is_null() || doc.empty()) return fallback;
  json merged = to_json(fallback);
  if (doc.contains("population_size") && !doc.contains("offspring_size")) merged.erase("offspring_size");
  merged.merge_patch(doc);
  return ea_config_from_json(merged);
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

int cmd_hull_recover(const ExperimentConfig& c) {
  const std::vector<Vec3> points = triangulation_points(c);
  const TriangulationOptions options = triangulation_options_from_json(c.options.value("triangulation", json::object()));
  const std::string start = c.options.value("start", std::string("scrambled"));
  if (start != "scrambled" && start != "hull") throw Error(ErrorCode::InvalidConfig, "start must be scrambled or hull");

  // Rejects non-convex input before any work.
  const TriSurface hull_mesh = mesh_from_hull(points);
  const TriangulationProblem at_hull = make_triangulation_problem(points, hull_mesh);
  const std::size_t genome_length = SwapSequenceDecoder(at_hull, options).genome_length();
  const EaConfig ea = ea_config_or(c.ea, default_triangulation_config(genome_length));

  std::string summary = "seed,method,objective,hull_match,steps\n";
  bool all_pass = true;
  for (auto seed : c.seeds) {
    const TriangulationProblem problem = start == "hull" ? at_hull : scrambled_triangulation_problem(points, seed);
    const fs::path dir = seed_dir(c, seed);
    spdlog::info("hull-recover seed {}: start objective {}", seed, l1_curvature(problem.initial));

    const auto [greedy_mesh, trace] = greedy_descent(problem.initial);
    const bool greedy_match = matches_hull(greedy_mesh, problem.hull);
    write_file_atomic(dir / "start.off", write_off(problem.initial));
    write_file_atomic(dir / "greedy.off", write_off(greedy_mesh));
    write_file_atomic(dir / "greedy_trace.csv", trace_csv(trace));
    summary += std::to_string(seed) + ",greedy," + format_double(trace.terminal_objective) + "," +
               bool_text(greedy_match) + "," + std::to_string(trace.move_count()) + "\n";

    const VerificationReport report = solve_and_verify(problem, ea, seed, options);
    const TriSurface ea_mesh = mesh_from_phenotype(points, report.best_phenotype);
    write_file_atomic(dir / "ea.off", write_off(ea_mesh));
    json rep = to_json(report);
    rep["seed"] = seed;
    rep["greedy"] = {{"objective", trace.terminal_objective}, {"hull_match", greedy_match}, {"moves", trace.move_count()}};
    write_file_atomic(dir / "report.json", dump(rep));
    const Alphabet alphabet = Alphabet::integers(SwapSequenceDecoder(problem, options).alphabet_size());
    write_file_atomic(dir / "run.json", dump(to_json(report.record, alphabet)));
    summary += std::to_string(seed) + ",ea," + format_double(report.achieved) + "," + bool_text(*report.hull_match) +
               "," + std::to_string(report.record.generations_used) + "\n";
    spdlog::info("hull-recover seed {}: greedy {} ({} moves), ea {} after {} generations", seed,
                 trace.terminal_objective, trace.move_count(), report.achieved, report.record.generations_used);
    if (!report.passed) {
      all_pass = false;
      spdlog::error("seed {}: EA ended at {} (gap {}), hull match {}", seed, report.achieved, report.gap,
                    *report.hull_match);
    }
  }
  write_file_atomic(c.out_dir / "summary.csv", summary);
  return all_pass ? kExitPass : kExitVerificationFailed;
}

int cmd_optimize(const ExperimentConfig& c) {
  if (!c.instance.is_object()) throw Error(ErrorCode::InvalidConfig, "optimize needs an instance");
  const OptimizationInstance instance = optimization_instance_from_json(c.instance);
  const EaConfig ea = ea_config_or(c.ea, default_lp_config());
  const std::size_t bits = c.options.value("bits_per_dim", std::size_t{16});

  std::string summary = "seed,kind,achieved,oracle,gap,passed\n";
  bool all_pass = true;
  for (auto seed : c.seeds) {
    const VerificationReport report = std::visit(
        [&](const auto& p) { return solve_and_verify(p, ea, seed, bits); }, instance);
    const fs::path dir = seed_dir(c, seed);
    json rep = to_json(report);
    rep["seed"] = seed;
    write_file_atomic(dir / "report.json", dump(rep));
    write_file_atomic(dir / "run.json", dump(to_json(report.record, Alphabet::binary())));
    summary += std::to_string(seed) + "," + report.kind + "," + format_double(report.achieved) + "," +
               format_double(report.oracle) + "," + format_double(report.gap) + "," + bool_text(report.passed) + "\n";
    spdlog::info("optimize seed {}: {} vs oracle {} (gap {})", seed, report.achieved, report.oracle, report.gap);
    if (!report.passed) {
      all_pass = false;
      spdlog::error("seed {}: gap {} exceeds {}", seed, report.gap, report.tolerance);
    }
  }
  write_file_atomic(c.out_dir / "gaps.csv", summary);
  return all_pass ? kExitPass : kExitVerificationFailed;
}

namespace {

Genotype random_genotype(std::size_t alphabet, std::size_t length, RandomStream& rng) {
  Genotype g;
  g.symbols.resize(length);
  for (auto& s : g.symbols) s = static_cast<std::uint32_t>(rng.uniform_index(alphabet));
  return g;
}

Population random_population(std::size_t alphabet, std::size_t length, std::size_t mu, RandomStream& rng) {
  Population p;
  for (std::size_t i = 0; i < mu; ++i) p.members.push_back(random_genotype(alphabet, length, rng));
  return p;
}

}  // namespace

std::vector<LawResult> check_operator_laws(std::size_t trials, std::uint64_t seed, bool broken_selection) {
  const RandomStream root(seed);
  RandomStream rng = root.substream("trials");
  LawResult sel{"selection-membership", trials, 0, {}};
  LawResult mut{"mutation-lineage", trials, 0, {}};
  LawResult rec{"recombination-dependency", trials, 0, {}};
  const auto note = [](LawResult& r, std::size_t trial, const std::string& what) {
    if (r.violations++ == 0) r.first_violation = "trial " + std::to_string(trial) + ": " + what;
  };

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t alphabet = 2 + rng.uniform_index(4);
    const std::size_t length = 1 + rng.uniform_index(24);
    const std::size_t mu = 2 + rng.uniform_index(15);

    // Selection: every survivor is a member of the pool it was drawn from.
    {
      Population pool = random_population(alphabet, length, mu, rng);
      std::vector<double> fit(mu);
      for (auto& f : fit) f = rng.uniform01();
      OperatorParams p{OperatorKind::Selection,
                       rng.bernoulli(0.5) ? Strategy::Tournament : Strategy::Truncation,
                       {{"tournament_size", double(1 + rng.uniform_index(mu))}},
                       1 + rng.uniform_index(mu),
                       true};
      Population out = select(pool, fit, p, rng);
      if (broken_selection) {
        for (auto& m : out.members) m = random_genotype(alphabet, length, rng);
      }
      std::set<Genotype> members(pool.members.begin(), pool.members.end());
      for (const auto& m : out.members) {
        if (!members.contains(m)) {
          note(sel, t, "survivor " + to_string(m, Alphabet::integers(alphabet)) + " is not in the pool");
          break;
        }
      }
    }
    // Mutation: each offspring descends from exactly one parent.
    {
      Population pop = random_population(alphabet, length, mu, rng);
      OperatorParams p{OperatorKind::Mutation, alphabet == 2 && rng.bernoulli(0.5) ? Strategy::Flip : Strategy::Resample,
                       {{"rate", rng.uniform01()}}, mu, false};
      Population out = mutate(pop, alphabet, p, rng);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (out.lineage.at(i).size() != 1 || out.lineage[i][0] >= pop.size()) {
          note(mut, t, "offspring " + std::to_string(i) + " has " + std::to_string(out.lineage[i].size()) + " parents");
          break;
        }
      }
    }
    // Recombination with certain crossover: some child has two distinct parents.
    {
      Population pop = random_population(alphabet, std::max<std::size_t>(length, 2), mu, rng);
      OperatorParams p{OperatorKind::Recombination, rng.bernoulli(0.5) ? Strategy::OnePoint : Strategy::Uniform,
                       {{"probability", 1.0}}, 2 + rng.uniform_index(2 * mu), false};
      Population out = recombine(pop, alphabet, p, rng);
      bool found = false;
      for (const auto& l : out.lineage) found = found || (l.size() == 2 && l[0] != l[1]);
      if (!found) note(rec, t, "no offspring with two distinct parents");
    }
  }
  return {sel, mut, rec};
}

int cmd_operator_laws(const ExperimentConfig& c) {
  std::size_t trials = 1000;
  bool broken = false;
  try {
    trials = c.options.value("trials", std::size_t{1000});
    broken = c.options.value("broken_selection", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (trials < 100) throw Error(ErrorCode::InvalidConfig, "operator-laws needs at least 100 trials");

  bool all_pass = true;
  for (auto seed : c.seeds) {
    const auto results = check_operator_laws(trials, seed, broken);
    json laws = json::array();
    for (const auto& r : results) {
      laws.push_back({{"law", r.name}, {"trials", r.trials}, {"violations", r.violations},
                      {"first_violation", r.first_violation}});
      if (r.violations > 0) {
        all_pass = false;
        spdlog::error("law violated: {} ({} of {} trials; {})", r.name, r.violations, r.trials, r.first_violation);
      }
    }
    json rep{{"seed", seed}, {"broken_selection", broken}, {"laws", laws}};
    write_file_atomic(seed_dir(c, seed) / "laws.json", dump(rep));
  }
  return all_pass ? kExitPass : kExitVerificationFailed;
}

int cmd_entropy_report(const ExperimentConfig& c) {
  if (!c.options.contains("record")) throw Error(ErrorCode::InvalidConfig, "entropy-report needs options.record");
  const fs::path path = c.base_dir / c.options.at("record").get<std::string>();
  const RunRecord record = run_record_from_json(parse_json_text(read_text_file(path), path));
  std::string csv = "generation,shannon,renyi2\n";
  for (const auto& g : record.generations) {
    csv += std::to_string(g.generation) + "," + format_double(g.entropy_shannon) + "," +
           format_double(g.entropy_renyi2) + "\n";
  }
  for (auto seed : c.seeds) write_file_atomic(seed_dir(c, seed) / "entropy.csv", csv);
  return kExitPass;
}

int run_command(const std::string& command, const fs::path& config_path, const std::vector<std::uint64_t>& seeds,
                const std::optional<fs::path>& out_dir) {
  configure_logging();
  try {
    const ExperimentConfig c = load_experiment_config(config_path, command, seeds, out_dir);
    if (command == "hull-recover") return cmd_hull_recover(c);
    if (command == "optimize") return cmd_optimize(c);
    if (command == "operator-laws") return cmd_operator_laws(c);
    if (command == "entropy-report") return cmd_entropy_report(c);
    throw Error(ErrorCode::InvalidConfig, "unknown command '" + command + "'");
  } catch (const Error& e) {
    const bool rejected = e.code() == ErrorCode::InstanceRejected || e.code() == ErrorCode::InvalidProblem ||
                          e.code() == ErrorCode::UnboundedFeasibleSet;
    spdlog::error("{}{}", rejected ? "instance rejected: " : "", e.what());
    return kExitConfigError;
  }
}

}  // namespace evohull
