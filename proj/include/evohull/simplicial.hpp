#pragma once

// Simplices, abstract and geometric complexes, joins and stellar
// subdivision, half-space polytopes, and a brute-force convex hull used as
// ground truth by the geometric tests.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace evohull {

using VertexId = std::size_t;
using Point = Eigen::VectorXd;

/// Sidedness tolerance for plane and half-space tests.
inline constexpr double kGeomEps = 1e-9;
/// Points closer than this are treated as coincident.
inline constexpr double kMergeRadius = 1e-7;

/// A finite vertex set, kept sorted. Dimension is |vertices| - 1.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<VertexId> vertices);
  Simplex(std::initializer_list<VertexId> vertices) : Simplex(std::vector<VertexId>(vertices)) {}

  const std::vector<VertexId>& vertices() const noexcept { return vertices_; }
  int dimension() const noexcept { return static_cast<int>(vertices_.size()) - 1; }
  bool contains(VertexId v) const;
  bool is_face_of(const Simplex& other) const;
  /// All nonempty faces, including the simplex itself.
  std::vector<Simplex> faces() const;

  auto operator<=>(const Simplex&) const = default;

 private:
  std::vector<VertexId> vertices_;
};

/// A system of finite vertex sets closed under taking faces.
class AbstractComplex {
 public:
  /// Inserts `s` and every face of it.
  void add(const Simplex& s);
  bool contains(const Simplex& s) const { return simplices_.contains(s); }
  const std::set<Simplex>& simplices() const noexcept { return simplices_; }
  std::set<VertexId> vertices() const;
  std::size_t count(int dimension) const;
  /// Simplices that are not a proper face of another simplex.
  std::vector<Simplex> maximal() const;
  bool is_closed_under_faces() const;

  /// Inserts a single simplex without its faces. Only for building
  /// deliberately broken complexes in tests.
  void insert_unchecked(const Simplex& s) { simplices_.insert(s); }

  bool operator==(const AbstractComplex&) const = default;

 private:
  std::set<Simplex> simplices_;
};

struct GeometricComplex {
  std::map<VertexId, Point> coordinates;
  AbstractComplex complex;
};

/// Rank of {p1 - p0, ..., pk - p0} equals k.
bool affinely_independent(const std::vector<Point>& points);

/// Single simplex on its vertex set, realized with `coordinates`.
GeometricComplex simplex_complex(const Simplex& s, const std::map<VertexId, Point>& coordinates);

/// The simplex on the union of both vertex sets, with all its faces. Throws
/// NotInGeneralPosition when the union is affinely dependent or the vertex
/// sets overlap.
GeometricComplex join(const Simplex& s1, const std::map<VertexId, Point>& c1, const Simplex& s2,
                      const std::map<VertexId, Point>& c2);

/// Replaces every simplex containing `target` by joins with a new vertex
/// placed at `apex`. Throws InvalidApex unless the apex lies in the relative
/// interior of the target.
GeometricComplex stellar_subdivide(const GeometricComplex& complex, const Simplex& target, const Point& apex);

/// Forgets coordinates.
AbstractComplex scheme(const GeometricComplex& complex);

/// True iff every simplex of K maps onto a simplex of L.
bool is_simplicial_map(const std::map<VertexId, VertexId>& vertex_map, const AbstractComplex& K,
                       const AbstractComplex& L);

/// Whether x lies in the underlying point set |K|.
bool body_contains(const GeometricComplex& complex, const Point& x, double eps = 1e-9);

struct HalfSpace {
  Point normal;
  double offset = 0.0;  // <normal, x> <= offset
};

struct HalfSpacePolytope {
  std::vector<HalfSpace> inequalities;
  std::size_t dimension = 0;

  static HalfSpacePolytope box(const std::vector<double>& lo, const std::vector<double>& hi);
};

bool polytope_contains(const HalfSpacePolytope& p, const Point& x);

/// Extreme points by brute force over every n-subset of the inequalities.
/// Throws UnboundedFeasibleSet for an unbounded set and InvalidProblem for an
/// empty one.
std::vector<Point> enumerate_vertices(const HalfSpacePolytope& p);

/// Whether {x : A x <= b} is bounded, checked through its recession cone.
bool is_bounded(const HalfSpacePolytope& p);

struct HullFacet {
  /// Vertex ids: two in the plane, three in space, ordered so the normal
  /// points outward (counter-clockwise seen from outside).
  std::vector<VertexId> vertices;
  Point normal;  // unit, outward
  double offset = 0.0;
};

struct HullResult {
  std::size_t dimension = 0;
  std::vector<VertexId> hull_vertices;  // sorted
  std::vector<HullFacet> facets;
};

/// Brute-force hull of points in the plane or space: a pair (plane) or
/// triple (space) spans a facet iff every point lies weakly on one side.
/// Coplanar facets with more than three points are triangulated as a fan
/// from their lowest-index corner. O(m^(n+1)).
HullResult convex_hull_oracle(const std::vector<Point>& points);

/// Facets as sorted, rotation-normalized vertex tuples, for set comparison.
std::set<std::vector<VertexId>> canonical_facets(const HullResult& hull);

/// Points as "x,y[,z]" lines.
std::vector<Point> read_points_csv(const std::string& text);
std::string write_points_csv(const std::vector<Point>& points);
/// Hull facets as OFF (3D only).
std::string hull_to_off(const std::vector<Point>& points, const HullResult& hull);

}  // namespace evohull
