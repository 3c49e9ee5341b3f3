#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evohull/app.hpp"
#include "evohull/ea_core.hpp"
#include "evohull/io.hpp"

using namespace evohull;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "evohull_test_app" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const json& doc, const std::string& name = "config.json") {
  write_file_atomic(dir / name, doc.dump(2));
  return dir / name;
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = read_text_file(e.path());
  }
  return out;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json unit_square_lp() {
  return {{"kind", "lp"}, {"cost", {1, 1}}, {"box", {{"lo", {0, 0}}, {"hi", {1, 1}}}}};
}

}  // namespace

TEST_CASE("operator-laws") {
  const auto dir = scratch("laws");
  CHECK(run_command("operator-laws", write_config(dir, {{"seeds", {1}}, {"options", {{"trials", 1000}}}}), {},
                    dir / "out") == kExitPass);
  const json rep = json::parse(read_text_file(dir / "out" / "seed_1" / "laws.json"));
  REQUIRE(rep.at("laws").size() == 3);
  for (const auto& l : rep.at("laws")) {
    CHECK(l.at("trials") == 1000);
    CHECK(l.at("violations") == 0);
  }

  const auto broken = write_config(dir, {{"seeds", {1}}, {"options", {{"trials", 200}, {"broken_selection", true}}}},
                                   "broken.json");
  CHECK(run_command("operator-laws", broken, {}, dir / "broken") == kExitVerificationFailed);
  const json b = json::parse(read_text_file(dir / "broken" / "seed_1" / "laws.json"));
  CHECK(b.at("laws")[0].at("law") == "selection-membership");
  CHECK(b.at("laws")[0].at("violations").get<int>() > 0);
  CHECK(b.at("laws")[1].at("violations") == 0);

  const auto zero = write_config(dir, {{"seeds", {1}}, {"options", {{"trials", 0}}}}, "zero.json");
  CHECK(run_command("operator-laws", zero, {}, dir / "zero") == kExitConfigError);
}

TEST_CASE("law suite direct") {
  for (const auto& r : check_operator_laws(1000, 9)) CHECK(r.violations == 0);
  const auto broken = check_operator_laws(100, 9, true);
  CHECK(broken[0].violations > 0);
  CHECK_FALSE(broken[0].first_violation.empty());
}

TEST_CASE("optimize") {
  const auto dir = scratch("optimize");
  const auto cfg = write_config(dir, {{"instance", unit_square_lp()}, {"seeds", {1, 2, 3, 4, 5}}});
  CHECK(run_command("optimize", cfg, {}, dir / "a") == kExitPass);
  const auto rows = csv_rows(read_text_file(dir / "a" / "gaps.csv"));
  REQUIRE(rows.size() == 6);
  CHECK(rows[0] == std::vector<std::string>{"seed", "kind", "achieved", "oracle", "gap", "passed"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(std::stod(rows[i][4]) <= 1e-3);
    CHECK(rows[i][5] == "true");
  }
  CHECK(fs::exists(dir / "a" / "seed_3" / "run.json"));

  // determinism, and the command-line seed list overrides the file
  CHECK(run_command("optimize", cfg, {2}, dir / "b") == kExitPass);
  CHECK(read_text_file(dir / "a" / "seed_2" / "report.json") == read_text_file(dir / "b" / "seed_2" / "report.json"));
  CHECK(read_text_file(dir / "a" / "seed_2" / "run.json") == read_text_file(dir / "b" / "seed_2" / "run.json"));
  CHECK_FALSE(fs::exists(dir / "b" / "seed_1"));

  json mx = unit_square_lp();
  mx["direction"] = "maximize";
  const auto mcfg = write_config(dir, {{"instance", mx}, {"seeds", {1}}}, "max.json");
  CHECK(run_command("optimize", mcfg, {}, dir / "max") == kExitPass);
  CHECK(json::parse(read_text_file(dir / "max" / "seed_1" / "report.json")).at("oracle") == 2.0);

  json empty = {{"kind", "lp"},
                {"cost", {1, 1}},
                {"inequalities", {{{"normal", {1, 0}}, {"offset", -1}}, {{"normal", {-1, 0}}, {"offset", 0}},
                                  {{"normal", {0, 1}}, {"offset", 1}}, {{"normal", {0, -1}}, {"offset", 0}}}}};
  const auto ecfg = write_config(dir, {{"instance", empty}, {"seeds", {1}}}, "empty.json");
  CHECK(run_command("optimize", ecfg, {}, dir / "empty") == kExitConfigError);

  // instance and ea by relative path; partial EA block keeps the other defaults
  write_file_atomic(dir / "inst.json", json{{"kind", "qp"},
                                            {"quadratic", {{1, 0}, {0, 1}}},
                                            {"linear", {-0.5, -0.5}},
                                            {"constant", 0.125},
                                            {"box", {{"lo", {0, 0}}, {"hi", {1, 1}}}}}
                                           .dump());
  write_file_atomic(dir / "ea.json", json{{"termination", {{"max_generations", 300}}}}.dump());
  const auto qcfg = write_config(dir, {{"instance", "inst.json"}, {"ea", "ea.json"}, {"seeds", {4}}}, "qp.json");
  CHECK(run_command("optimize", qcfg, {}, dir / "qp") == kExitPass);
  const json run = json::parse(read_text_file(dir / "qp" / "seed_4" / "run.json"));
  CHECK(run.at("generations").size() <= 301);
}

TEST_CASE("hull-recover") {
  const auto dir = scratch("hull");
  const json inst = {{"random_sphere", {{"count", 8}, {"seed", 4}}}};
  const auto cfg = write_config(dir, {{"instance", inst}, {"seeds", {1, 2}}});
  CHECK(run_command("hull-recover", cfg, {}, dir / "a") == kExitPass);
  const auto rows = csv_rows(read_text_file(dir / "a" / "summary.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"seed", "method", "objective", "hull_match", "steps"});
  CHECK(rows[2][1] == "ea");
  CHECK(rows[2][3] == "true");
  CHECK(rows[4][3] == "true");
  for (const char* f : {"start.off", "greedy.off", "greedy_trace.csv", "ea.off", "report.json", "run.json"}) {
    CHECK(fs::exists(dir / "a" / "seed_1" / f));
  }

  CHECK(run_command("hull-recover", cfg, {}, dir / "b") == kExitPass);
  CHECK(tree(dir / "a") == tree(dir / "b"));

  // duplicate seeds write the same per-seed artifacts
  CHECK(run_command("hull-recover", cfg, {2, 2}, dir / "dup") == kExitPass);
  CHECK(read_text_file(dir / "dup" / "seed_2" / "report.json") == read_text_file(dir / "a" / "seed_2" / "report.json"));

  const auto hcfg = write_config(dir, {{"instance", inst}, {"seeds", {1}}, {"options", {{"start", "hull"}}}}, "h.json");
  CHECK(run_command("hull-recover", hcfg, {}, dir / "hull") == kExitPass);
  const auto hrows = csv_rows(read_text_file(dir / "hull" / "summary.csv"));
  CHECK(hrows[1][1] == "greedy");
  CHECK(hrows[1][3] == "true");
  CHECK(hrows[1][4] == "0");

  const json bad = {{"points", {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}, {0, 0, 0.1}}}};
  const auto bcfg = write_config(dir, {{"instance", bad}, {"seeds", {1}}}, "bad.json");
  CHECK(run_command("hull-recover", bcfg, {}, dir / "bad") == kExitConfigError);
  CHECK_FALSE(fs::exists(dir / "bad" / "summary.csv"));

  write_file_atomic(dir / "pts.csv", "1,0,0\n-1,0,0\n0,1,0\n0,-1,0\n0,0,1\n0,0,-1\n");
  const auto ccfg = write_config(dir, {{"instance", {{"points_csv", "pts.csv"}}}, {"seeds", {3}}}, "csv.json");
  CHECK(run_command("hull-recover", ccfg, {}, dir / "csv") == kExitPass);
}

TEST_CASE("entropy-report") {
  const auto dir = scratch("entropy");
  // generation 0 of a large uniform binary population
  FitnessPipeline pipe{symbol_vector_codec(Alphabet::binary(), 32), [](std::span<const double> x) {
                         double s = 0;
                         for (double v : x) s += v;
                         return s;
                       }};
  EaConfig ea;
  ea.population_size = 200;
  ea.offspring_size = 200;
  ea.termination = TerminationCriteria{5, std::nullopt, std::nullopt};
  write_file_atomic(dir / "record.json", to_json(run_ea(pipe, ea, 1), Alphabet::binary()).dump());
  const auto cfg = write_config(dir, {{"seeds", {0}}, {"options", {{"record", "record.json"}}}});
  CHECK(run_command("entropy-report", cfg, {}, dir / "out") == kExitPass);
  const auto rows = csv_rows(read_text_file(dir / "out" / "seed_0" / "entropy.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows[0] == std::vector<std::string>{"generation", "shannon", "renyi2"});
  CHECK(std::stod(rows[1][1]) > 0.95);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][2]) <= std::stod(rows[i][1]) + 1e-12);

  // converged population
  ea.population_size = 1;
  ea.offspring_size = 1;
  ea.mutation.settings["rate"] = 0.0;
  write_file_atomic(dir / "flat.json", to_json(run_ea(pipe, ea, 1), Alphabet::binary()).dump());
  const auto fcfg = write_config(dir, {{"seeds", {0}}, {"options", {{"record", "flat.json"}}}}, "flat_cfg.json");
  CHECK(run_command("entropy-report", fcfg, {}, dir / "flat") == kExitPass);
  const auto frows = csv_rows(read_text_file(dir / "flat" / "seed_0" / "entropy.csv"));
  CHECK(std::stod(frows[1][1]) == 0.0);

  const auto missing = write_config(dir, {{"seeds", {0}}, {"options", {{"record", "nope.json"}}}}, "missing.json");
  CHECK(run_command("entropy-report", missing, {}, dir / "m") == kExitConfigError);
}

TEST_CASE("config errors") {
  const auto dir = scratch("errors");
  CHECK(run_command("optimize", dir / "absent.json") == kExitConfigError);
  write_file_atomic(dir / "broken.json", "{ not json");
  CHECK(run_command("optimize", dir / "broken.json") == kExitConfigError);
  CHECK(run_command("optimize", write_config(dir, {{"instance", unit_square_lp()}}, "noseed.json")) ==
        kExitConfigError);
  CHECK(run_command("optimize", write_config(dir, {{"command", "hull-recover"}, {"seeds", {1}}}, "wrong.json")) ==
        kExitConfigError);
  CHECK(run_command("optimize", write_config(dir, {{"instance", "missing.json"}, {"seeds", {1}}}, "ref.json")) ==
        kExitConfigError);
  CHECK(run_command("teleport", write_config(dir, {{"seeds", {1}}}, "cmd.json")) == kExitConfigError);
  CHECK(run_command("optimize",
                    write_config(dir, {{"instance", unit_square_lp()}, {"seeds", {1}}, {"ea", {{"population_size", 0}}}},
                                 "ea.json"),
                    {}, dir / "o") == kExitConfigError);
}
