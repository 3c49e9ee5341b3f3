#include <doctest.h>

#include "evohull/error.hpp"
#include "evohull/random.hpp"
#include "evohull/simplicial.hpp"

using namespace evohull;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p(i++) = x;
  return p;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidInput;
}

std::vector<Point> random_ball(std::size_t n, std::size_t dim, RandomStream& rng) {
  std::vector<Point> out;
  while (out.size() < n) {
    Point p(static_cast<Eigen::Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) p(static_cast<Eigen::Index>(k)) = 2.0 * rng.uniform01() - 1.0;
    if (p.norm() <= 1.0) out.push_back(p);
  }
  return out;
}

// Bounded intersection of random half-spaces around the origin.
HalfSpacePolytope random_polytope(std::size_t count, RandomStream& rng) {
  for (;;) {
    HalfSpacePolytope p;
    p.dimension = 3;
    for (std::size_t i = 0; i < count; ++i) {
      Point n = pt({rng.normal(), rng.normal(), rng.normal()});
      p.inequalities.push_back({n.normalized(), 0.5 + rng.uniform01()});
    }
    if (is_bounded(p)) return p;
  }
}

void check_sound(const std::vector<Point>& pts, const HullResult& h) {
  for (const auto& f : h.facets) {
    for (const auto& p : pts) REQUIRE(f.normal.dot(p) <= f.offset + 1e-9);
  }
}

std::map<VertexId, Point> coords(std::initializer_list<std::pair<VertexId, Point>> list) {
  return std::map<VertexId, Point>(list.begin(), list.end());
}

}  // namespace

TEST_CASE("simplex basics") {
  const Simplex s{2, 0, 1};
  CHECK(s.vertices() == std::vector<VertexId>{0, 1, 2});
  CHECK(s.dimension() == 2);
  CHECK(s.faces().size() == 7);
  CHECK(code_of([] { Simplex{1, 1}; }) == ErrorCode::InvalidInput);
  CHECK(Simplex{0, 2}.is_face_of(s));
}

TEST_CASE("abstract complexes are closed under faces") {
  AbstractComplex k;
  k.add(Simplex{0, 1, 2, 3});
  CHECK(k.is_closed_under_faces());
  CHECK(k.count(0) == 4);
  CHECK(k.count(1) == 6);
  CHECK(k.count(2) == 4);
  CHECK(k.count(3) == 1);
  AbstractComplex bad;
  bad.insert_unchecked(Simplex{0, 1});
  CHECK_FALSE(bad.is_closed_under_faces());
}

TEST_CASE("hull of a tetrahedron, with and without its centroid") {
  std::vector<Point> pts{pt({0, 0, 0}), pt({1, 0, 0}), pt({0, 1, 0}), pt({0, 0, 1})};
  HullResult h = convex_hull_oracle(pts);
  CHECK(h.facets.size() == 4);
  CHECK(h.hull_vertices == std::vector<VertexId>{0, 1, 2, 3});
  check_sound(pts, h);
  pts.push_back(pt({0.25, 0.25, 0.25}));
  h = convex_hull_oracle(pts);
  CHECK(h.hull_vertices == std::vector<VertexId>{0, 1, 2, 3});
  CHECK(h.facets.size() == 4);
}

TEST_CASE("hull in the plane") {
  const std::vector<Point> pts{pt({0, 0}), pt({1, 0}), pt({1, 1}), pt({0, 1}), pt({0.5, 0.5}), pt({0.5, 0})};
  const HullResult h = convex_hull_oracle(pts);
  CHECK(h.hull_vertices == std::vector<VertexId>{0, 1, 2, 3});
  CHECK(h.facets.size() == 4);
  check_sound(pts, h);
}

TEST_CASE("hull rejects degenerate input") {
  const std::vector<Point> flat{pt({0, 0, 0}), pt({1, 0, 0}), pt({0, 1, 0}), pt({1, 1, 0})};
  CHECK(code_of([&] { convex_hull_oracle(flat); }) == ErrorCode::DegenerateInput);
}

TEST_CASE("cube faces are fanned from the lowest corner") {
  std::vector<Point> pts;
  for (int i = 0; i < 8; ++i) pts.push_back(pt({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)}));
  const HullResult h = convex_hull_oracle(pts);
  CHECK(h.hull_vertices.size() == 8);
  CHECK(h.facets.size() == 12);
  check_sound(pts, h);
  CHECK(canonical_facets(h) == canonical_facets(convex_hull_oracle(pts)));
}

TEST_CASE("hull soundness on random balls") {
  RandomStream rng(20);
  for (int t = 0; t < 20; ++t) {
    const auto pts = random_ball(20, 3, rng);
    const HullResult h = convex_hull_oracle(pts);
    check_sound(pts, h);
    // Removing a non-vertex leaves the facets alone.
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::binary_search(h.hull_vertices.begin(), h.hull_vertices.end(), i)) continue;
      std::vector<Point> fewer = pts;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      const HullResult h2 = convex_hull_oracle(fewer);
      CHECK(h2.facets.size() == h.facets.size());
      break;
    }
  }
}

TEST_CASE("joins") {
  auto tri = join(Simplex{0}, coords({{0, pt({0, 1})}}), Simplex{1, 2}, coords({{1, pt({0, 0})}, {2, pt({1, 0})}}));
  CHECK(tri.complex.count(2) == 1);
  CHECK(tri.complex.is_closed_under_faces());

  auto tet = join(Simplex{0, 1}, coords({{0, pt({0, 0, 0})}, {1, pt({1, 0, 0})}}), Simplex{2, 3},
                  coords({{2, pt({0, 1, 1})}, {3, pt({0, -1, 1})}}));
  CHECK(tet.complex.count(3) == 1);

  auto tet2 = join(Simplex{3}, coords({{3, pt({0.2, 0.2, 1})}}), Simplex{0, 1, 2},
                   coords({{0, pt({0, 0, 0})}, {1, pt({1, 0, 0})}, {2, pt({0, 1, 0})}}));
  CHECK(tet2.complex.count(3) == 1);

  CHECK(code_of([] {
          join(Simplex{0}, coords({{0, pt({0.5, 0})}}), Simplex{1, 2}, coords({{1, pt({0, 0})}, {2, pt({1, 0})}}));
        }) == ErrorCode::NotInGeneralPosition);
}

TEST_CASE("stellar subdivision") {
  const auto base = coords({{0, pt({0, 0})}, {1, pt({1, 0})}, {2, pt({0, 1})}});
  const GeometricComplex tri = simplex_complex(Simplex{0, 1, 2}, base);

  auto sub = stellar_subdivide(tri, Simplex{0, 1, 2}, pt({1.0 / 3, 1.0 / 3}));
  CHECK(sub.complex.count(2) == 3);
  CHECK(sub.complex.count(0) == 4);
  CHECK(sub.complex.is_closed_under_faces());

  auto edge = stellar_subdivide(tri, Simplex{0, 1}, pt({0.5, 0}));
  CHECK(edge.complex.count(2) == 2);

  CHECK(code_of([&] { stellar_subdivide(tri, Simplex{0, 1}, pt({0.5, 0.1})); }) == ErrorCode::InvalidApex);
  CHECK(code_of([&] { stellar_subdivide(tri, Simplex{0, 1, 2}, pt({0, 0})); }) == ErrorCode::InvalidApex);

  // The body is unchanged.
  RandomStream rng(8);
  for (int i = 0; i < 1000; ++i) {
    const Point x = pt({1.4 * rng.uniform01() - 0.2, 1.4 * rng.uniform01() - 0.2});
    REQUIRE(body_contains(tri, x) == body_contains(sub, x));
    REQUIRE(body_contains(tri, x) == body_contains(edge, x));
  }
}

TEST_CASE("stellar subdivision of a tetrahedron boundary facet") {
  GeometricComplex k;
  k.coordinates = coords({{0, pt({0, 0, 0})}, {1, pt({1, 0, 0})}, {2, pt({0, 1, 0})}, {3, pt({0, 0, 1})}});
  for (const Simplex& f : {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 2, 3}, Simplex{1, 2, 3}}) k.complex.add(f);
  CHECK(k.complex.count(2) == 4);
  const auto sub = stellar_subdivide(k, Simplex{0, 1, 2}, pt({0.25, 0.25, 0}));
  CHECK(sub.complex.count(2) == 6);
  CHECK(sub.complex.count(0) == 5);
}

TEST_CASE("schemes and simplicial maps") {
  GeometricComplex k;
  k.coordinates = coords({{0, pt({0, 0, 0})}, {1, pt({1, 0, 0})}, {2, pt({0, 1, 0})}, {3, pt({0, 0, 1})}});
  for (const Simplex& f : {Simplex{0, 1, 2}, Simplex{0, 1, 3}, Simplex{0, 2, 3}, Simplex{1, 2, 3}}) k.complex.add(f);
  const AbstractComplex a = scheme(k);
  CHECK(a.count(0) == 4);
  CHECK(a.count(1) == 6);
  CHECK(a.count(2) == 4);
  GeometricComplex moved = k;
  for (auto& [id, p] : moved.coordinates) p *= 3.0;
  CHECK(scheme(moved) == a);

  GeometricComplex point;
  point.coordinates = coords({{7, pt({1, 1})}});
  point.complex.add(Simplex{7});
  CHECK(scheme(point).count(0) == 1);
  CHECK(scheme(point).count(1) == 0);

  const std::map<VertexId, VertexId> id{{0, 0}, {1, 1}, {2, 2}, {3, 3}};
  CHECK(is_simplicial_map(id, a, a));

  AbstractComplex seg, single, two_points;
  seg.add(Simplex{0, 1});
  single.add(Simplex{5});
  two_points.add(Simplex{5});
  two_points.add(Simplex{6});
  CHECK(is_simplicial_map({{0, 5}, {1, 5}}, seg, single));
  CHECK_FALSE(is_simplicial_map({{0, 5}, {1, 6}}, seg, two_points));
}

TEST_CASE("polytope membership") {
  const auto square = HalfSpacePolytope::box({0, 0}, {1, 1});
  CHECK(polytope_contains(square, pt({0.5, 0.5})));
  CHECK_FALSE(polytope_contains(square, pt({1.5, 0})));
  CHECK(polytope_contains(square, pt({1.0, 0.5})));
  CHECK(code_of([&] { polytope_contains(square, pt({0.5, 0.5, 0.5})); }) == ErrorCode::InvalidInput);
}

TEST_CASE("vertex enumeration") {
  CHECK(enumerate_vertices(HalfSpacePolytope::box({0, 0}, {1, 1})).size() == 4);

  HalfSpacePolytope simplex;
  simplex.dimension = 3;
  simplex.inequalities = {{pt({-1, 0, 0}), 0}, {pt({0, -1, 0}), 0}, {pt({0, 0, -1}), 0}, {pt({1, 1, 1}), 1}};
  CHECK(enumerate_vertices(simplex).size() == 4);

  HalfSpacePolytope open;
  open.dimension = 2;
  open.inequalities = {{pt({-1, 0}), 0}, {pt({0, -1}), 0}};
  CHECK_FALSE(is_bounded(open));
  CHECK(code_of([&] { enumerate_vertices(open); }) == ErrorCode::UnboundedFeasibleSet);

  HalfSpacePolytope empty = HalfSpacePolytope::box({0, 0}, {1, 1});
  empty.inequalities.push_back({pt({1, 1}), -1});
  CHECK(code_of([&] { enumerate_vertices(empty); }) == ErrorCode::InvalidProblem);
}

TEST_CASE("enumerated vertices are a fixed point of the hull oracle") {
  RandomStream rng(50);
  for (int t = 0; t < 50; ++t) {
    const HalfSpacePolytope p = random_polytope(8, rng);
    const auto v = enumerate_vertices(p);
    const HullResult h = convex_hull_oracle(v);
    REQUIRE(h.hull_vertices.size() == v.size());
    for (const auto& x : v) REQUIRE(polytope_contains(p, x));
  }
}

TEST_CASE("points csv") {
  const auto pts = read_points_csv("x,y,z\n1,2,3\n-0.5,0,1e-3\n");
  REQUIRE(pts.size() == 2);
  CHECK(pts[1](2) == 1e-3);
  CHECK(read_points_csv(write_points_csv(pts)) == pts);
  CHECK(code_of([] { read_points_csv("1,2,3\n1,2\n"); }) == ErrorCode::ParseError);
}
