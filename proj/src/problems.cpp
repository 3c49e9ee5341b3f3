#include "evohull/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "evohull/error.hpp"

namespace evohull {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

Eigen::VectorXd to_vector(std::span<const double> x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

void check_polytope(const HalfSpacePolytope& p, std::size_t dim, const char* what) {
  if (p.dimension != dim) {
    throw Error(ErrorCode::InvalidProblem, std::string(what) + " dimension does not match the feasible set");
  }
  for (const auto& h : p.inequalities) {
    if (static_cast<std::size_t>(h.normal.size()) != dim) {
      throw Error(ErrorCode::InvalidProblem, "inequality normal has the wrong dimension");
    }
  }
}

}  // namespace

void validate(const LpProblem& p) {
  if (p.cost.size() == 0) throw Error(ErrorCode::InvalidProblem, "empty cost vector");
  check_polytope(p.feasible, static_cast<std::size_t>(p.cost.size()), "cost");
}

void validate(const QpProblem& p) {
  const auto n = p.quadratic.rows();
  if (n == 0 || p.quadratic.cols() != n) throw Error(ErrorCode::InvalidProblem, "quadratic term must be square");
  if (p.linear.size() != n) throw Error(ErrorCode::InvalidProblem, "linear term has the wrong dimension");
  if ((p.quadratic - p.quadratic.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorCode::InvalidProblem, "quadratic term is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.quadratic, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw Error(ErrorCode::InvalidProblem, "quadratic term is not positive semidefinite");
  }
  check_polytope(p.feasible, static_cast<std::size_t>(n), "quadratic");
}

double lp_objective(const LpProblem& p, const Eigen::VectorXd& x) { return p.cost.dot(x); }

double qp_objective(const QpProblem& p, const Eigen::VectorXd& x) {
  return x.dot(p.quadratic * x) + p.linear.dot(x) + p.constant;
}

double constraint_violation(const HalfSpacePolytope& p, const Eigen::VectorXd& x) {
  double v = 0.0;
  for (const auto& h : p.inequalities) v += std::max(0.0, h.normal.dot(x) - h.offset);
  return v;
}

double lp_penalty_weight(const LpProblem& p) { return 1e3 * (1.0 + p.cost.norm()); }

double qp_penalty_weight(const QpProblem& p) { return 1e3 * (1.0 + p.quadratic.norm() + p.linear.norm()); }

std::vector<Bounds> feasible_bounds(const HalfSpacePolytope& p) {
  const auto vertices = enumerate_vertices(p);
  std::vector<Bounds> out(p.dimension, Bounds{std::numeric_limits<double>::infinity(),
                                              -std::numeric_limits<double>::infinity()});
  for (const auto& v : vertices) {
    for (std::size_t k = 0; k < p.dimension; ++k) {
      out[k].lo = std::min(out[k].lo, v(k));
      out[k].hi = std::max(out[k].hi, v(k));
    }
  }
  for (auto& b : out) {
    if (b.hi - b.lo < 1e-12) b.hi = b.lo + 1e-12;  // flat direction
  }
  return out;
}

FitnessPipeline lp_pipeline(const LpProblem& p, std::size_t bits_per_dim, bool gray) {
  validate(p);
  if (bits_per_dim < 4) throw Error(ErrorCode::InvalidParams, "bits per dimension must be at least 4");
  Codec codec = scaled_real_codec(bits_per_dim, feasible_bounds(p.feasible), gray);
  const double rho = lp_penalty_weight(p);
  const double sign = p.direction == Direction::Maximize ? -1.0 : 1.0;
  FitnessPipeline pipe{std::move(codec), [p, rho, sign](std::span<const double> x) {
                         const Eigen::VectorXd v = to_vector(x);
                         const double viol = constraint_violation(p.feasible, v);
                         const double f = lp_objective(p, v);
                         return viol > 0.0 ? f + sign * rho * viol : f;
                       }};
  pipe.direction = p.direction;
  return pipe;
}

FitnessPipeline qp_pipeline(const QpProblem& p, std::size_t bits_per_dim, bool gray) {
  validate(p);
  if (bits_per_dim < 4) throw Error(ErrorCode::InvalidParams, "bits per dimension must be at least 4");
  Codec codec = scaled_real_codec(bits_per_dim, feasible_bounds(p.feasible), gray);
  const double rho = qp_penalty_weight(p);
  return FitnessPipeline{std::move(codec), [p, rho](std::span<const double> x) {
                           const Eigen::VectorXd v = to_vector(x);
                           const double viol = constraint_violation(p.feasible, v);
                           const double f = qp_objective(p, v);
                           return viol > 0.0 ? f + rho * viol : f;
                         }};
}

OptimumPoint analytic_lp_optimum(const LpProblem& p) {
  validate(p);
  if (p.feasible.dimension > 3) throw Error(ErrorCode::InvalidProblem, "vertex oracle supports dimension <= 3");
  const auto vertices = enumerate_vertices(p.feasible);
  OptimumPoint best{vertices.front(), lp_objective(p, vertices.front())};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double f = lp_objective(p, vertices[i]);
    if (better(f, best.value, p.direction)) best = {vertices[i], f};
  }
  return best;
}

namespace {

// Best feasible grid point in the box with `steps` cells per axis.
std::optional<OptimumPoint> grid_scan(const QpProblem& p, const std::vector<Bounds>& box, std::size_t steps) {
  const std::size_t n = box.size();
  std::optional<OptimumPoint> best;
  std::vector<std::size_t> idx(n, 0);
  Eigen::VectorXd x(n);
  for (;;) {
    for (std::size_t k = 0; k < n; ++k) {
      x(k) = box[k].lo + (box[k].hi - box[k].lo) * static_cast<double>(idx[k]) / static_cast<double>(steps);
    }
    if (polytope_contains(p.feasible, x)) {
      const double f = qp_objective(p, x);
      if (!best || f < best->value) best = OptimumPoint{x, f};
    }
    std::size_t k = 0;
    while (k < n && ++idx[k] > steps) idx[k++] = 0;
    if (k == n) break;
  }
  return best;
}

}  // namespace

OptimumPoint qp_grid_optimum(const QpProblem& p, double resolution) {
  validate(p);
  const auto n = static_cast<std::size_t>(p.quadratic.rows());
  if (n > 2) throw Error(ErrorCode::InvalidProblem, "grid oracle supports dimension <= 2");
  if (!(resolution > 0.0)) throw Error(ErrorCode::InvalidParams, "grid resolution must be positive");

  // Stationary point of x^T Q x + q^T x solves 2 Q x = -q.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(2.0 * p.quadratic);
  const Eigen::VectorXd stationary = cod.solve(-p.linear);
  if ((2.0 * p.quadratic * stationary + p.linear).norm() <= 1e-9 && polytope_contains(p.feasible, stationary)) {
    return {stationary, qp_objective(p, stationary)};
  }

  const auto box = feasible_bounds(p.feasible);
  double widest = 0.0;
  for (const auto& b : box) widest = std::max(widest, b.hi - b.lo);
  const auto steps = static_cast<std::size_t>(std::ceil(widest / resolution));
  auto best = grid_scan(p, box, steps);
  if (!best) throw Error(ErrorCode::InvalidProblem, "no feasible grid point");
  // Refine around the coarse winner.
  for (int round = 0; round < 3; ++round) {
    const double radius = resolution * std::pow(0.01, round);
    std::vector<Bounds> local(n);
    for (std::size_t k = 0; k < n; ++k) {
      local[k] = {std::max(box[k].lo, best->point(k) - radius), std::min(box[k].hi, best->point(k) + radius)};
    }
    if (auto fine = grid_scan(p, local, 200); fine && fine->value < best->value) best = fine;
  }
  return *best;
}

TriangulationProblem make_triangulation_problem(const std::vector<Vec3>& points, const TriSurface& initial) {
  const HullResult hull = convex_hull_oracle(to_points(points));
  if (hull.hull_vertices.size() != points.size()) {
    std::size_t interior = 0;
    while (interior < hull.hull_vertices.size() && hull.hull_vertices[interior] == interior) ++interior;
    throw Error(ErrorCode::InstanceRejected,
                "point " + std::to_string(interior) + " is not a hull vertex (points are not in convex position)");
  }
  if (initial.coordinates() != points) {
    throw Error(ErrorCode::InvalidMesh, "initial mesh does not use the problem's points");
  }
  initial.require_sphere_topology();
  return TriangulationProblem{points, initial, hull};
}

TriangulationProblem scrambled_triangulation_problem(const std::vector<Vec3>& points, std::uint64_t seed) {
  const TriSurface hull_mesh = mesh_from_hull(points);
  RandomStream rng = RandomStream(seed).substream("scramble");
  return make_triangulation_problem(points, scramble(hull_mesh, 4 * hull_mesh.edge_count(), rng));
}

namespace {

// Per-walk bookkeeping: each edge's move, legality and objective change,
// recomputed only when one of its four vertices changed neighbors.
struct EdgeEntry {
  Edge edge;
  SwapMove move;
  bool legal = false;
  double delta = 0.0;
  std::array<std::uint32_t, 4> stamp{};
  bool fresh = false;
};

class Walk {
 public:
  Walk(const TriSurface& start, std::shared_ptr<CurvatureCache> cache, bool need_delta)
      : ev_(start, CurvatureMeasure::Absolute, std::move(cache)),
        version_(start.vertex_count(), 0),
        need_delta_(need_delta) {
    for (const auto& e : ev_.mesh().edges()) entries_.push_back({e, {}, false, 0.0, {}, false});
  }

  SwapEvaluator& evaluator() { return ev_; }

  // Legal, non-tabu moves in edge order, with their deltas.
  const std::vector<const EdgeEntry*>& candidates(const std::vector<Edge>& tabu) {
    out_.clear();
    for (auto& en : entries_) {
      if (!en.fresh || stamp_changed(en)) refresh(en);
      if (!en.legal) continue;
      if (std::find(tabu.begin(), tabu.end(), en.edge) != tabu.end()) continue;
      out_.push_back(&en);
    }
    return out_;
  }

  void apply(const SwapMove& mv) {
    ev_.apply(mv);
    for (auto v : {mv.edge.lo, mv.edge.hi, mv.c, mv.d}) ++version_[v];
    const Edge created{std::min(mv.c, mv.d), std::max(mv.c, mv.d)};
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const EdgeEntry& en) { return en.edge == mv.edge; });
    entries_.erase(it);
    auto pos = std::lower_bound(entries_.begin(), entries_.end(), created,
                                [](const EdgeEntry& en, const Edge& e) { return en.edge < e; });
    entries_.insert(pos, EdgeEntry{created, {}, false, 0.0, {}, false});
  }

 private:
  bool stamp_changed(const EdgeEntry& en) const {
    const auto& m = en.move;
    return en.stamp != std::array<std::uint32_t, 4>{version_[m.edge.lo], version_[m.edge.hi], version_[m.c],
                                                    version_[m.d]};
  }

  void refresh(EdgeEntry& en) {
    en.move = *ev_.mesh().move_for(en.edge);
    en.legal = ev_.mesh().is_legal(en.move);
    en.delta = en.legal && need_delta_ ? ev_.delta(en.move) : 0.0;
    const auto& m = en.move;
    en.stamp = {version_[m.edge.lo], version_[m.edge.hi], version_[m.c], version_[m.d]};
    en.fresh = true;
  }

  SwapEvaluator ev_;
  std::vector<std::uint32_t> version_;
  std::vector<EdgeEntry> entries_;
  std::vector<const EdgeEntry*> out_;
  bool need_delta_;
};

bool ranked_before(const EdgeEntry* x, const EdgeEntry* y) {
  if (x->delta != y->delta) return x->delta < y->delta;
  return x->edge < y->edge;
}

void push_tabu(std::vector<Edge>& tabu, const SwapMove& mv, std::size_t tenure) {
  if (tenure == 0) return;
  if (tabu.size() == tenure) tabu.erase(tabu.begin());
  tabu.push_back({std::min(mv.c, mv.d), std::max(mv.c, mv.d)});
}

}  // namespace

SwapSequenceDecoder::SwapSequenceDecoder(const TriangulationProblem& problem, TriangulationOptions options)
    : problem_(&problem), options_(options), cache_(std::make_shared<CurvatureCache>()) {
  const std::size_t edges = problem.initial.edge_count();
  if (options_.alphabet_size == 0) options_.alphabet_size = options_.order == SwapOrder::Edge ? edges + 1 : 9;
  if (options_.genome_length == 0) options_.genome_length = 3 * edges;
  if (options_.alphabet_size < 2) throw Error(ErrorCode::InvalidParams, "swap alphabet needs at least 2 symbols");
}

std::vector<SwapMove> SwapSequenceDecoder::candidates(SwapEvaluator& ev, const std::vector<Edge>& tabu) const {
  std::vector<SwapMove> out;
  for (const auto& mv : legal_swaps(ev.mesh())) {
    if (std::find(tabu.begin(), tabu.end(), mv.edge) == tabu.end()) out.push_back(mv);
  }
  if (options_.order == SwapOrder::Ranked) {
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t i = 0; i < out.size(); ++i) keyed.emplace_back(ev.delta(out[i]), i);
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<SwapMove> ranked;
    for (const auto& [d, i] : keyed) ranked.push_back(out[i]);
    out = std::move(ranked);
  }
  return out;
}

TriSurface SwapSequenceDecoder::decode(const Genotype& g) const {
  if (g.symbols.size() != options_.genome_length) {
    throw Error(ErrorCode::InvalidGenotype, "swap sequence has length " + std::to_string(g.symbols.size()) +
                                                ", expected " + std::to_string(options_.genome_length));
  }
  const bool ranked = options_.order == SwapOrder::Ranked;
  Walk walk(problem_->initial, cache_, ranked || options_.polish);
  std::vector<Edge> tabu;
  std::vector<Triangle> best = problem_->initial.triangles();
  double best_value = walk.evaluator().objective();
  std::vector<const EdgeEntry*> order;
  for (auto s : g.symbols) {
    if (s >= options_.alphabet_size) throw Error(ErrorCode::InvalidGenotype, "gene value outside the alphabet");
    if (s == 0) continue;
    const auto& cand = walk.candidates(tabu);
    if (cand.empty()) continue;
    const std::size_t pick = (s - 1) % cand.size();
    const EdgeEntry* chosen = nullptr;
    if (ranked) {
      order.assign(cand.begin(), cand.end());
      std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pick), order.end(), ranked_before);
      chosen = order[pick];
    } else {
      chosen = cand[pick];
    }
    const SwapMove mv = chosen->move;
    walk.apply(mv);
    push_tabu(tabu, mv, options_.tabu);
    if (options_.best_visited && walk.evaluator().objective() < best_value - kImprovementTolerance) {
      best_value = walk.evaluator().objective();
      best = walk.evaluator().mesh().triangles();
    }
  }
  if (options_.polish) {
    const std::vector<Edge> none;
    for (;;) {
      const auto& cand = walk.candidates(none);
      if (cand.empty()) break;
      const EdgeEntry* top = *std::min_element(cand.begin(), cand.end(), ranked_before);
      if (!(top->delta < -kImprovementTolerance)) break;
      const double before = walk.evaluator().objective();
      walk.apply(top->move);
      if (!(walk.evaluator().objective() < before)) break;
    }
    if (options_.best_visited && walk.evaluator().objective() < best_value - kImprovementTolerance) {
      best_value = walk.evaluator().objective();
      best = walk.evaluator().mesh().triangles();
    }
  }
  if (!options_.best_visited) return walk.evaluator().mesh();
  return TriSurface(problem_->points, std::move(best));
}

Genotype SwapSequenceDecoder::encode_moves(const std::vector<SwapMove>& moves) const {
  if (moves.size() > options_.genome_length) {
    throw Error(ErrorCode::InvalidInput, "move list longer than the genome");
  }
  Genotype g;
  g.symbols.assign(options_.genome_length, 0);
  SwapEvaluator ev(problem_->initial, CurvatureMeasure::Absolute, cache_);
  std::vector<Edge> tabu;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const auto cand = candidates(ev, tabu);
    const auto it = std::find(cand.begin(), cand.end(), moves[i]);
    if (it == cand.end()) throw Error(ErrorCode::OutOfRange, "move " + std::to_string(i) + " is not a candidate");
    const auto symbol = static_cast<std::size_t>(it - cand.begin()) + 1;
    if (symbol >= options_.alphabet_size) {
      throw Error(ErrorCode::OutOfRange, "move " + std::to_string(i) + " needs gene value " + std::to_string(symbol));
    }
    g.symbols[i] = static_cast<std::uint32_t>(symbol);
    ev.apply(moves[i]);
    push_tabu(tabu, moves[i], options_.tabu);
  }
  return g;
}

Phenotype mesh_phenotype(const TriSurface& m) {
  Phenotype out;
  out.reserve(3 * m.face_count());
  for (const auto& t : m.triangles()) out.insert(out.end(), {double(t[0]), double(t[1]), double(t[2])});
  return out;
}

TriSurface mesh_from_phenotype(const std::vector<Vec3>& points, std::span<const double> phenotype) {
  if (phenotype.size() % 3 != 0) throw Error(ErrorCode::InvalidMesh, "phenotype length is not a multiple of 3");
  std::vector<Triangle> tris(phenotype.size() / 3);
  for (std::size_t i = 0; i < tris.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      const double v = phenotype[3 * i + k];
      if (!(v >= 0.0) || v != std::floor(v) || v >= double(points.size())) {
        throw Error(ErrorCode::InvalidMesh, "phenotype holds a bad vertex id");
      }
      tris[i][k] = static_cast<std::uint32_t>(v);
    }
  }
  return TriSurface(points, std::move(tris));
}

FitnessPipeline triangulation_pipeline(const TriangulationProblem& p, TriangulationOptions options) {
  auto decoder = std::make_shared<SwapSequenceDecoder>(p, options);
  Codec codec(
      "swap-sequence", Alphabet::integers(decoder->alphabet_size()), decoder->genome_length(), 3 * p.initial.face_count(),
      [decoder](const Genotype& g) { return mesh_phenotype(decoder->decode(g)); });
  const std::vector<Vec3>* points = &p.points;
  auto cache = decoder->cache();
  return FitnessPipeline{std::move(codec), [points, cache](std::span<const double> ph) {
                           return SwapEvaluator(mesh_from_phenotype(*points, ph), CurvatureMeasure::Absolute, cache)
                               .objective();
                         }};
}

EaConfig default_lp_config() {
  EaConfig c;
  c.population_size = 40;
  c.offspring_size = 400;
  c.recombination.settings = {{"probability", 0.9}};
  c.mutation.settings = {{"rate", 0.05}};
  c.selection.settings = {{"tournament_size", 4}};
  c.termination = TerminationCriteria{500, std::nullopt, std::nullopt, 1e-12};
  c.normalize();
  return c;
}

EaConfig default_triangulation_config(std::size_t genome_length) {
  EaConfig c;
  c.population_size = 20;
  c.offspring_size = 20;
  c.recombination.settings = {{"probability", 0.9}};
  c.mutation.settings = {{"rate", genome_length > 0 ? 1.0 / double(genome_length) : 0.01}};
  c.termination = TerminationCriteria{500, kFourPi + 1e-7, std::nullopt, 1e-12};
  c.normalize();
  return c;
}

namespace {

VerificationReport optimization_report(std::string kind, const FitnessPipeline& pipe, const EaConfig& config,
                                       std::uint64_t seed, double oracle) {
  VerificationReport r;
  r.kind = std::move(kind);
  r.record = run_ea(pipe, config, seed);
  r.best_phenotype = r.record.best_phenotype;
  r.achieved = r.record.best_fitness;
  r.oracle = oracle;
  r.gap = std::abs(r.achieved - r.oracle);
  r.tolerance = 1e-3;
  r.passed = r.gap <= r.tolerance;
  return r;
}

}  // namespace

VerificationReport solve_and_verify(const LpProblem& p, const EaConfig& config, std::uint64_t seed,
                                    std::size_t bits_per_dim) {
  return optimization_report("lp", lp_pipeline(p, bits_per_dim), config, seed, analytic_lp_optimum(p).value);
}

VerificationReport solve_and_verify(const QpProblem& p, const EaConfig& config, std::uint64_t seed,
                                    std::size_t bits_per_dim) {
  return optimization_report("qp", qp_pipeline(p, bits_per_dim), config, seed, qp_grid_optimum(p).value);
}

VerificationReport solve_and_verify(const TriangulationProblem& p, const EaConfig& config, std::uint64_t seed,
                                    TriangulationOptions options) {
  const FitnessPipeline pipe = triangulation_pipeline(p, options);
  VerificationReport r;
  r.kind = "triangulation";
  r.record = run_ea(pipe, config, seed);
  r.best_phenotype = r.record.best_phenotype;
  r.achieved = r.record.best_fitness;
  r.oracle = kFourPi;
  r.gap = std::abs(r.achieved - r.oracle);
  r.tolerance = 1e-6;
  r.hull_match = matches_hull(mesh_from_phenotype(p.points, r.best_phenotype), p.hull);
  r.passed = r.gap <= r.tolerance && *r.hull_match;
  return r;
}

nlohmann::json to_json(const VerificationReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["achieved"] = r.achieved;
  j["oracle"] = r.oracle;
  j["gap"] = r.gap;
  j["tolerance"] = r.tolerance;
  j["passed"] = r.passed;
  if (r.hull_match) j["hull_match"] = *r.hull_match;
  j["best_phenotype"] = r.best_phenotype;
  j["generations_used"] = r.record.generations_used;
  j["termination_reason"] = r.record.termination_reason;
  return j;
}

namespace {

Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a non-empty array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " holds a non-number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Direction direction_from_json(const nlohmann::json& doc) {
  const std::string d = doc.value("direction", std::string("minimize"));
  if (d == "minimize") return Direction::Minimize;
  if (d == "maximize") return Direction::Maximize;
  throw Error(ErrorCode::InvalidConfig, "direction must be minimize or maximize");
}

}  // namespace

HalfSpacePolytope polytope_from_json(const nlohmann::json& doc) {
  if (doc.contains("box")) {
    const auto& b = doc.at("box");
    const Eigen::VectorXd lo = vector_from_json(b.at("lo"), "box.lo");
    const Eigen::VectorXd hi = vector_from_json(b.at("hi"), "box.hi");
    if (lo.size() != hi.size()) throw Error(ErrorCode::ParseError, "box bounds differ in length");
    return HalfSpacePolytope::box(std::vector<double>(lo.data(), lo.data() + lo.size()),
                                  std::vector<double>(hi.data(), hi.data() + hi.size()));
  }
  if (!doc.contains("inequalities")) throw Error(ErrorCode::ParseError, "instance needs inequalities or box");
  HalfSpacePolytope p;
  for (const auto& h : doc.at("inequalities")) {
    HalfSpace hs{vector_from_json(h.at("normal"), "normal"), h.at("offset").get<double>()};
    if (p.inequalities.empty()) p.dimension = static_cast<std::size_t>(hs.normal.size());
    if (static_cast<std::size_t>(hs.normal.size()) != p.dimension) {
      throw Error(ErrorCode::ParseError, "inequalities differ in dimension");
    }
    p.inequalities.push_back(std::move(hs));
  }
  if (p.inequalities.empty()) throw Error(ErrorCode::ParseError, "no inequalities");
  return p;
}

nlohmann::json to_json(const HalfSpacePolytope& p) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& h : p.inequalities) {
    list.push_back({{"normal", std::vector<double>(h.normal.data(), h.normal.data() + h.normal.size())},
                    {"offset", h.offset}});
  }
  return {{"inequalities", list}};
}

OptimizationInstance optimization_instance_from_json(const nlohmann::json& doc) {
  try {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "lp") {
      LpProblem p{vector_from_json(doc.at("cost"), "cost"), polytope_from_json(doc), direction_from_json(doc)};
      validate(p);
      return p;
    }
    if (kind == "qp") {
      const auto& rows = doc.at("quadratic");
      if (!rows.is_array() || rows.empty()) throw Error(ErrorCode::ParseError, "quadratic must be a matrix");
      QpProblem p;
      const auto n = static_cast<Eigen::Index>(rows.size());
      p.quadratic.resize(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd row = vector_from_json(rows[static_cast<std::size_t>(i)], "quadratic row");
        if (row.size() != n) throw Error(ErrorCode::ParseError, "quadratic must be square");
        p.quadratic.row(i) = row;
      }
      p.linear = doc.contains("linear") ? vector_from_json(doc.at("linear"), "linear") : Eigen::VectorXd::Zero(n);
      p.constant = doc.value("constant", 0.0);
      p.feasible = polytope_from_json(doc);
      if (direction_from_json(doc) != Direction::Minimize) {
        throw Error(ErrorCode::InvalidConfig, "quadratic instances are minimized");
      }
      validate(p);
      return p;
    }
    throw Error(ErrorCode::InvalidConfig, "unknown instance kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

TriangulationOptions triangulation_options_from_json(const nlohmann::json& doc) {
  TriangulationOptions o;
  try {
    const std::string order = doc.value("order", std::string("edge"));
    if (order == "ranked") {
      o.order = SwapOrder::Ranked;
    } else if (order == "edge") {
      o.order = SwapOrder::Edge;
    } else {
      throw Error(ErrorCode::InvalidConfig, "order must be ranked or edge");
    }
    o.alphabet_size = doc.value("alphabet_size", std::size_t{0});
    o.genome_length = doc.value("genome_length", std::size_t{0});
    o.tabu = doc.value("tabu", std::size_t{1});
    o.best_visited = doc.value("best_visited", true);
    o.polish = doc.value("polish", true);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return o;
}

}  // namespace evohull
