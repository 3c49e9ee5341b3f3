#pragma once

// Problem instances wired to the EA: penalized LP/QP over polytopes and
// swap-sequence triangulation search.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "evohull/ea_core.hpp"
#include "evohull/mesh.hpp"
#include "evohull/simplicial.hpp"

namespace evohull {

struct LpProblem {
  Eigen::VectorXd cost;
  HalfSpacePolytope feasible;
  Direction direction = Direction::Minimize;
};

/// x^T Q x + q^T x + constant over a polytope, Q symmetric PSD.
struct QpProblem {
  Eigen::MatrixXd quadratic;
  Eigen::VectorXd linear;
  double constant = 0.0;
  HalfSpacePolytope feasible;
};

/// Throws InvalidProblem on dimension mismatch, an asymmetric matrix
/// (tolerance 1e-12) or an eigenvalue below -1e-9.
void validate(const QpProblem& p);
void validate(const LpProblem& p);

double lp_objective(const LpProblem& p, const Eigen::VectorXd& x);
double qp_objective(const QpProblem& p, const Eigen::VectorXd& x);

/// Sum of max(0, <a_i, x> - b_i).
double constraint_violation(const HalfSpacePolytope& p, const Eigen::VectorXd& x);
double lp_penalty_weight(const LpProblem& p);
double qp_penalty_weight(const QpProblem& p);

/// Bounding box of the feasible set from its enumerated vertices.
std::vector<Bounds> feasible_bounds(const HalfSpacePolytope& p);

/// Fixed-point binary codec over the feasible bounding box (Gray coded
/// unless `gray` is false) and the penalized objective. Throws
/// InvalidParams for bits_per_dim < 4 and InvalidProblem / UnboundedFeasibleSet
/// for a bad feasible set.
FitnessPipeline lp_pipeline(const LpProblem& p, std::size_t bits_per_dim, bool gray = true);
FitnessPipeline qp_pipeline(const QpProblem& p, std::size_t bits_per_dim, bool gray = true);

struct OptimumPoint {
  Eigen::VectorXd point;
  double value = 0.0;
};

/// Best enumerated vertex (first one wins ties) in the problem's direction.
/// Dimension at most 3.
OptimumPoint analytic_lp_optimum(const LpProblem& p);
/// Unconstrained minimizer when it is feasible, otherwise a grid scan at
/// `resolution` per axis with a finer scan around the best grid point.
/// Dimension at most 2.
OptimumPoint qp_grid_optimum(const QpProblem& p, double resolution = 1e-3);

enum class SwapOrder {
  Edge,    // ascending (lo, hi)
  Ranked,  // ascending objective change, edge order on ties
};

struct TriangulationOptions {
  SwapOrder order = SwapOrder::Edge;
  /// Number of gene values including the no-op; 0 picks the edge count + 1
  /// for Edge order and 9 for Ranked order.
  std::size_t alphabet_size = 0;
  /// Genes; 0 means three times the edge count.
  std::size_t genome_length = 0;
  /// The most recently created edges that may not be swapped away.
  std::size_t tabu = 1;
  /// Phenotype is the lowest-objective mesh met along the swap sequence
  /// rather than the final one.
  bool best_visited = true;
  /// After the genes, keep applying the best improving swap until none is
  /// left.
  bool polish = true;
};

struct TriangulationProblem {
  std::vector<Vec3> points;
  TriSurface initial;
  HullResult hull;
};

/// Checks convex position (InstanceRejected naming an interior point) and
/// that the initial mesh lives on the same points.
TriangulationProblem make_triangulation_problem(const std::vector<Vec3>& points, const TriSurface& initial);
/// Initial mesh is the hull mesh after 4E random legal swaps drawn from the
/// "scramble" substream of `seed`.
TriangulationProblem scrambled_triangulation_problem(const std::vector<Vec3>& points, std::uint64_t seed);

/// Decoder for swap-sequence genotypes on one problem.
class SwapSequenceDecoder {
 public:
  SwapSequenceDecoder(const TriangulationProblem& problem, TriangulationOptions options);

  const TriangulationOptions& options() const noexcept { return options_; }
  std::size_t alphabet_size() const noexcept { return options_.alphabet_size; }
  std::size_t genome_length() const noexcept { return options_.genome_length; }

  /// Mesh reached by the genotype (best visited or final, per options).
  TriSurface decode(const Genotype& g) const;
  /// Genotype replaying `moves` from the initial mesh, padded with no-ops.
  /// Throws OutOfRange when a move is missing from the candidate list or its
  /// index does not fit the alphabet, InvalidInput when the list is too long.
  Genotype encode_moves(const std::vector<SwapMove>& moves) const;
  std::shared_ptr<CurvatureCache> cache() const noexcept { return cache_; }

 private:
  std::vector<SwapMove> candidates(SwapEvaluator& ev, const std::vector<Edge>& tabu) const;

  const TriangulationProblem* problem_;
  TriangulationOptions options_;
  std::shared_ptr<CurvatureCache> cache_;
};

/// Flattened triangle ids, three per face.
Phenotype mesh_phenotype(const TriSurface& m);
TriSurface mesh_from_phenotype(const std::vector<Vec3>& points, std::span<const double> phenotype);

/// Genotype -> mesh via the decoder; fitness is l1_curvature of that mesh.
/// The problem must outlive the pipeline.
FitnessPipeline triangulation_pipeline(const TriangulationProblem& p, TriangulationOptions options = {});

/// EA defaults used by the CLI for each problem family. The triangulation
/// mutation rate is 1 / genome_length (0.01 when the length is 0).
EaConfig default_lp_config();
EaConfig default_triangulation_config(std::size_t genome_length = 0);

struct VerificationReport {
  std::string kind;
  double achieved = 0.0;
  double oracle = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::optional<bool> hull_match;
  Phenotype best_phenotype;
  RunRecord record;
};

/// Runs the EA and compares with the matching oracle. LP/QP: absolute gap
/// between the best penalized fitness and the oracle value, tolerance 1e-3.
/// Triangulation: fitness within 1e-6 of 4 pi and facet equality with the
/// hull.
VerificationReport solve_and_verify(const LpProblem& p, const EaConfig& config, std::uint64_t seed,
                                    std::size_t bits_per_dim = 16);
VerificationReport solve_and_verify(const QpProblem& p, const EaConfig& config, std::uint64_t seed,
                                    std::size_t bits_per_dim = 16);
VerificationReport solve_and_verify(const TriangulationProblem& p, const EaConfig& config, std::uint64_t seed,
                                    TriangulationOptions options = {});

nlohmann::json to_json(const VerificationReport& r);

/// Instance files. LP/QP: {"kind": "lp"|"qp", "cost" | "quadratic"/"linear"/
/// "constant", "inequalities": [{"normal": [...], "offset": b}] or
/// "box": {"lo": [...], "hi": [...]}, "direction": "minimize"|"maximize"}.
using OptimizationInstance = std::variant<LpProblem, QpProblem>;
OptimizationInstance optimization_instance_from_json(const nlohmann::json& doc);
HalfSpacePolytope polytope_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const HalfSpacePolytope& p);
TriangulationOptions triangulation_options_from_json(const nlohmann::json& doc);

}  // namespace evohull
