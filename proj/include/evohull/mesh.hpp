#pragma once

// Closed triangulated surfaces in space, edge swaps, discrete curvature
// objectives, greedy swap descent, and convexity/tightness checks.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "evohull/random.hpp"
#include "evohull/simplicial.hpp"

namespace evohull {

using Vec3 = Eigen::Vector3d;
using Triangle = std::array<std::uint32_t, 3>;

/// Minimum area of a triangle created by a swap.
inline constexpr double kMinSwapArea = 1e-12;

struct Edge {
  std::uint32_t lo = 0;
  std::uint32_t hi = 0;
  auto operator<=>(const Edge&) const = default;
};

/// Replacing the shared edge of two triangles (a, b, c) and (b, a, d) by the
/// diagonal (c, d).
struct SwapMove {
  Edge edge;
  std::uint32_t t1 = 0;  // triangle holding the half-edge lo -> hi
  std::uint32_t t2 = 0;  // triangle holding hi -> lo
  std::uint32_t c = 0;   // apex of t1
  std::uint32_t d = 0;   // apex of t2
  bool operator==(const SwapMove&) const = default;
};

/// Closed, consistently oriented 2-manifold triangle mesh. Every edge is
/// shared by exactly two triangles (once in each direction) and every vertex
/// link is a single cycle. Vertex ids are indices into `coordinates()`.
class TriSurface {
 public:
  /// Throws InvalidMesh when the manifold conditions fail.
  TriSurface(std::vector<Vec3> coordinates, std::vector<Triangle> triangles);

  const std::vector<Vec3>& coordinates() const noexcept { return coords_; }
  const std::vector<Triangle>& triangles() const noexcept { return tris_; }
  std::size_t vertex_count() const noexcept { return coords_.size(); }
  std::size_t edge_count() const noexcept { return tris_.size() * 3 / 2; }
  std::size_t face_count() const noexcept { return tris_.size(); }
  long euler_characteristic() const noexcept {
    return long(vertex_count()) - long(edge_count()) + long(face_count());
  }
  /// Throws InvalidMesh unless V - E + F = 2.
  void require_sphere_topology() const;

  /// Sorted neighbor ids of v.
  const std::vector<std::uint32_t>& neighbors(std::uint32_t v) const { return neighbors_.at(v); }
  /// Triangles incident to v.
  const std::vector<std::uint32_t>& incident(std::uint32_t v) const { return incident_.at(v); }
  bool has_edge(std::uint32_t a, std::uint32_t b) const;
  /// Triangle holding the directed half-edge a -> b.
  std::optional<std::uint32_t> triangle_of(std::uint32_t a, std::uint32_t b) const;
  /// Undirected edges in ascending (lo, hi) order.
  std::vector<Edge> edges() const;

  /// Swap move for an existing edge, whether or not it is legal.
  std::optional<SwapMove> move_for(Edge e) const;
  bool is_legal(const SwapMove& m) const;
  /// In-place swap; throws IllegalSwap when the move does not match the
  /// mesh or is not legal.
  void apply(const SwapMove& m);

  /// Triangles rotated to start at their smallest id, sorted. Two meshes
  /// with equal canonical triangles have identical connectivity.
  std::vector<Triangle> canonical_triangles() const;

 private:
  void build();
  static std::uint64_t key(std::uint32_t a, std::uint32_t b) noexcept { return (std::uint64_t(a) << 32) | b; }

  std::vector<Vec3> coords_;
  std::vector<Triangle> tris_;
  std::unordered_map<std::uint64_t, std::uint32_t> half_edges_;
  std::vector<std::vector<std::uint32_t>> neighbors_;
  std::vector<std::vector<std::uint32_t>> incident_;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);
/// Interior angle at p of the triangle (p, q, r).
double corner_angle(const Vec3& p, const Vec3& q, const Vec3& r);

/// 2 pi minus the sum of incident triangle angles. Throws DegenerateTriangle
/// naming the first incident triangle with area <= kMinSwapArea.
double angle_deficit(const TriSurface& m, std::uint32_t v);
/// Every vertex's angle deficit, in id order.
std::vector<double> angle_deficits(const TriSurface& m);

/// Positive part of the curvature at a vertex with neighbor directions
/// `dirs`: the area of the spherical set of unit normals n with
/// <n, dir> <= 0 for every direction, i.e. the Gauss image of the convex
/// hull of the star. Equals the angle deficit at a convex vertex and zero at
/// a saddle.
double positive_curvature(const Vec3& apex, const std::vector<Vec3>& neighbors);
double positive_curvature(const TriSurface& m, std::uint32_t v);

/// Absolute curvature at a vertex, K+ + K- with K- = K+ - K, where K is the
/// angle deficit.
double absolute_curvature(const TriSurface& m, std::uint32_t v);

/// Discrete L1 norm of Gaussian curvature: sum over vertices of
/// absolute_curvature. Bounded below by 4 pi on a sphere, with equality
/// exactly for convex surfaces.
double l1_curvature(const TriSurface& m);
/// Sum of |angle deficit|. Cannot tell mixed vertices from convex ones, so
/// it is not minimized uniquely by the convex hull.
double angle_deficit_l1(const TriSurface& m);
/// Sum of angle deficits; 2 pi times the Euler characteristic.
double total_signed_curvature(const TriSurface& m);

enum class CurvatureMeasure { Absolute, AngleDeficit };

double curvature_objective(const TriSurface& m, CurvatureMeasure measure);

/// All legal swaps in ascending edge order. A swap is legal when the apexes
/// differ and are not already joined and both new triangles have area above
/// kMinSwapArea.
std::vector<SwapMove> legal_swaps(const TriSurface& m);
/// Copy of m with the swap applied.
TriSurface swap_edge(const TriSurface& m, const SwapMove& move);

/// Positive curvature keyed by (vertex, sorted neighbor set) for one fixed
/// set of coordinates. Safe to share between threads. Values are computed
/// from the sorted neighbor list, so a hit returns exactly what a miss would.
class CurvatureCache {
 public:
  explicit CurvatureCache(std::size_t capacity = 1u << 21) : capacity_(capacity) {}
  double positive(const std::vector<Vec3>& coords, std::uint32_t v, const std::vector<std::uint32_t>& sorted_neighbors);
  std::size_t size() const;

 private:
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, double> values_;
  std::unordered_map<std::uint64_t, double> small_values_;  // meshes with at most 58 vertices
};

/// Incremental objective bookkeeping for sequences of swaps on one mesh.
/// Per-vertex terms are cached and only the four vertices touched by a swap
/// are recomputed.
class SwapEvaluator {
 public:
  SwapEvaluator(TriSurface mesh, CurvatureMeasure measure, std::shared_ptr<CurvatureCache> cache = nullptr);

  const TriSurface& mesh() const noexcept { return mesh_; }
  CurvatureMeasure measure() const noexcept { return measure_; }
  double objective() const noexcept { return objective_; }
  /// Objective change if `move` were applied. For the absolute measure the
  /// total signed curvature is fixed, so only the positive parts are
  /// compared.
  double delta(const SwapMove& move);
  void apply(const SwapMove& move);

 private:
  double vertex_term(std::uint32_t v) const;
  double positive_without(std::uint32_t v, std::uint32_t removed);
  double positive_with(std::uint32_t v, std::uint32_t added);
  void refresh(std::uint32_t v);

  TriSurface mesh_;
  CurvatureMeasure measure_;
  std::shared_ptr<CurvatureCache> cache_;
  std::vector<double> positive_;
  std::vector<double> angle_sum_;
  std::vector<double> term_;
  std::vector<std::uint32_t> scratch_;
  double objective_ = 0.0;
};

enum class DescentPolicy { BestImprovement, FirstImprovement };

struct DescentStep {
  SwapMove move;
  double before = 0.0;
  double after = 0.0;
};

struct DescentTrace {
  double initial_objective = 0.0;
  std::vector<DescentStep> steps;
  double terminal_objective = 0.0;
  std::size_t move_count() const noexcept { return steps.size(); }
};

/// Minimum decrease for a swap to count as an improvement.
inline constexpr double kImprovementTolerance = 1e-12;

/// Applies improving swaps until none remains. Best-improvement takes the
/// largest decrease (lowest edge on ties); first-improvement takes the
/// lowest improving edge.
std::pair<TriSurface, DescentTrace> greedy_descent(const TriSurface& m,
                                                   DescentPolicy policy = DescentPolicy::BestImprovement,
                                                   CurvatureMeasure measure = CurvatureMeasure::Absolute,
                                                   std::size_t max_moves = 1000000);

/// Facet set equals the brute-force hull's (as unoriented triangles) and
/// every vertex is a hull vertex.
bool is_convex_position_mesh(const TriSurface& m);
/// Hull-facet comparison against a precomputed hull of m's coordinates.
bool matches_hull(const TriSurface& m, const HullResult& hull);

/// Sampled half-space connectivity: for `directions` random unit vectors u
/// (and their negatives), every sublevel set {v : <u, p_v> <= t} induces a
/// connected subgraph of the edge graph. Throws InvalidInput for fewer than
/// 100 directions.
bool is_tight_2surface(const TriSurface& m, std::size_t directions, std::uint64_t seed = 0);
/// Number of connected pieces of the worst sublevel set along direction u.
std::size_t max_sublevel_components(const TriSurface& m, const Vec3& u);

/// Mesh on `points` whose triangles are the hull facets. Throws
/// InstanceRejected when a point is not a hull vertex.
TriSurface mesh_from_hull(const std::vector<Vec3>& points);
TriSurface regular_tetrahedron();
TriSurface regular_octahedron();
/// `count` unit vectors drawn uniformly on the sphere.
std::vector<Vec3> random_sphere_points(std::size_t count, RandomStream& rng);
/// Applies `swaps` uniformly chosen legal swaps.
TriSurface scramble(const TriSurface& m, std::size_t swaps, RandomStream& rng);

std::vector<Point> to_points(const std::vector<Vec3>& v);
std::vector<Vec3> to_vec3(const std::vector<Point>& p);

TriSurface read_off(const std::string& text);
std::string write_off(const TriSurface& m);
/// step,edge,objective with step 0 holding the initial objective.
std::string trace_csv(const DescentTrace& trace);

}  // namespace evohull
