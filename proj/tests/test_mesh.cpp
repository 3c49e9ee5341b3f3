#include <doctest.h>

#include <cmath>
#include <numbers>

#include "evohull/error.hpp"
#include "evohull/mesh.hpp"
#include "evohull/random.hpp"

using namespace evohull;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double k4Pi = 4 * std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::InvalidInput;
}

std::vector<Vec3> tet_points() { return {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}; }

// values from tests/oracles/mesh_oracle.py
TriSurface edge_dented_tetra() {
  auto p = tet_points();
  p.push_back({0, 0, -0.4});
  return TriSurface(p, {{0, 1, 4}, {0, 4, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 4}, {4, 3, 2}});
}

TriSurface face_dented_tetra() {
  auto p = tet_points();
  p.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
  return TriSurface(p, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 4, 2}, {2, 4, 3}, {3, 4, 1}});
}

TriSurface fixed_octahedron() {
  std::vector<Vec3> p{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  return TriSurface(p, {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4}, {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

TriSurface sphere_mesh(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  return mesh_from_hull(random_sphere_points(n, rng));
}

TriSurface scrambled(std::size_t n, std::uint64_t seed) {
  auto m = sphere_mesh(n, seed);
  RandomStream rng(seed + 1);
  return scramble(m, 4 * m.edge_count(), rng);
}

}  // namespace

TEST_CASE("regular solids: deficits, counts, convexity") {
  auto t = regular_tetrahedron();
  CHECK(t.vertex_count() == 4);
  CHECK(t.edge_count() == 6);
  CHECK(t.euler_characteristic() == 2);
  for (std::uint32_t v = 0; v < 4; ++v) CHECK(angle_deficit(t, v) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(l1_curvature(t) == doctest::Approx(k4Pi).epsilon(1e-12));
  CHECK(legal_swaps(t).empty());
  CHECK(is_convex_position_mesh(t));

  auto o = regular_octahedron();
  CHECK(o.vertex_count() == 6);
  CHECK(o.face_count() == 8);
  for (std::uint32_t v = 0; v < 6; ++v) CHECK(angle_deficit(o, v) == doctest::Approx(2 * kPi / 3).epsilon(1e-12));
  CHECK(legal_swaps(o).size() == 12);
  CHECK(is_convex_position_mesh(o));
}

TEST_CASE("flat vertex has zero deficit and zero positive part") {
  std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}, {0, 0, 1}};
  TriSurface m(p, {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 1}, {5, 2, 1}, {5, 3, 2}, {5, 4, 3}, {5, 1, 4}});
  CHECK(std::abs(angle_deficit(m, 0)) < 1e-12);
  CHECK(std::abs(positive_curvature(m, 0)) < 1e-12);
  CHECK(std::abs(absolute_curvature(m, 0)) < 1e-12);
}

TEST_CASE("positive curvature of simple cones") {
  Vec3 o(0, 0, 0);
  // octant corner: Gauss image is an eighth of the sphere
  CHECK(positive_curvature(o, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == doctest::Approx(kPi / 2).epsilon(1e-12));
  // planar star spanning less than pi
  CHECK(positive_curvature(o, {{1, 0, 0}, {0, 1, 0}}) == doctest::Approx(kPi).epsilon(1e-12));
  // saddle-like star contains opposite directions
  CHECK(positive_curvature(o, {{1, 0, 0.2}, {0, 1, -0.2}, {-1, 0, 0.2}, {0, -1, -0.2}}) == doctest::Approx(0.0));
}

TEST_CASE("edge-dented tetrahedron against the oracle") {
  auto m = edge_dented_tetra();
  CHECK(angle_deficit_l1(m) == doctest::Approx(14.793208085201314).epsilon(1e-12));
  CHECK(l1_curvature(m) == doctest::Approx(15.000155838475944).epsilon(1e-12));
  CHECK(angle_deficit(m, 4) == doctest::Approx(-1.1134187354210718).epsilon(1e-12));
  CHECK(angle_deficit(m, 1) == doctest::Approx(3.7500389596189856).epsilon(1e-12));
  CHECK(positive_curvature(m, 0) == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(std::abs(positive_curvature(m, 4)) < 1e-12);
  CHECK(l1_curvature(m) > k4Pi + 1e-3);
  CHECK_FALSE(is_convex_position_mesh(m));
}

TEST_CASE("face-dented tetrahedron: the plain deficit sum cannot see the dent") {
  auto m = face_dented_tetra();
  CHECK(angle_deficit_l1(m) == doctest::Approx(k4Pi).epsilon(1e-12));
  CHECK(l1_curvature(m) == doctest::Approx(15.707963267948962).epsilon(1e-12));
  CHECK(curvature_objective(m, CurvatureMeasure::AngleDeficit) == doctest::Approx(k4Pi).epsilon(1e-12));
  CHECK(curvature_objective(m, CurvatureMeasure::Absolute) == doctest::Approx(5 * kPi).epsilon(1e-12));
}

TEST_CASE("octahedron swap raises the objective") {
  auto o = fixed_octahedron();
  CHECK(l1_curvature(o) == doctest::Approx(12.566370614359169).epsilon(1e-12));
  auto mv = o.move_for({0, 2});
  REQUIRE(mv);
  CHECK(o.is_legal(*mv));
  CHECK(std::min(mv->c, mv->d) == 4);
  CHECK(std::max(mv->c, mv->d) == 5);
  auto s = swap_edge(o, *mv);
  CHECK(s.has_edge(4, 5));
  CHECK_FALSE(s.has_edge(0, 2));
  CHECK(l1_curvature(s) == doctest::Approx(14.660765716752366).epsilon(1e-12));
  CHECK(angle_deficit_l1(s) == doctest::Approx(k4Pi).epsilon(1e-12));

  SwapEvaluator ev(o, CurvatureMeasure::Absolute);
  CHECK(ev.delta(*mv) == doctest::Approx(14.660765716752366 - k4Pi).epsilon(1e-10));
}

TEST_CASE("degenerate swap is illegal") {
  // a on the segment between the apexes c and d
  std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {0.3, 1, 0}, {0, 0, 1}, {0, 0, -1}};
  TriSurface m(p, {{0, 1, 3}, {1, 2, 3}, {2, 0, 3}, {1, 0, 4}, {2, 1, 4}, {0, 2, 4}});
  auto mv = m.move_for({0, 1});
  REQUIRE(mv);
  CHECK_FALSE(m.is_legal(*mv));
  for (const auto& s : legal_swaps(m)) CHECK(s.edge != Edge{0, 1});
  CHECK(code_of([&] { m.apply(*mv); }) == ErrorCode::IllegalSwap);
  CHECK(code_of([&] { swap_edge(m, *mv); }) == ErrorCode::IllegalSwap);
}

TEST_CASE("swap properties on random meshes") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    auto m = scrambled(10 + seed, seed);
    CHECK(total_signed_curvature(m) == doctest::Approx(k4Pi).epsilon(1e-10));
    CHECK(l1_curvature(m) >= k4Pi - 1e-9);
    CHECK(angle_deficit_l1(m) >= k4Pi - 1e-9);
    auto swaps = legal_swaps(m);
    REQUIRE_FALSE(swaps.empty());
    for (const auto& mv : swaps) {
      auto s = swap_edge(m, mv);
      CHECK(s.vertex_count() == m.vertex_count());
      CHECK(s.edge_count() == m.edge_count());
      CHECK(s.face_count() == m.face_count());
      CHECK(total_signed_curvature(s) == doctest::Approx(k4Pi).epsilon(1e-10));
      // swapping the new edge restores the old connectivity
      auto back = s.move_for({std::min(mv.c, mv.d), std::max(mv.c, mv.d)});
      REQUIRE(back);
      REQUIRE(s.is_legal(*back));
      auto r = swap_edge(s, *back);
      auto a = r.canonical_triangles(), b = m.canonical_triangles();
      std::vector<std::array<std::uint32_t, 3>> ua, ub;
      for (auto t : a) {
        std::sort(t.begin(), t.end());
        ua.push_back(t);
      }
      for (auto t : b) {
        std::sort(t.begin(), t.end());
        ub.push_back(t);
      }
      std::sort(ua.begin(), ua.end());
      std::sort(ub.begin(), ub.end());
      CHECK(ua == ub);
    }
  }
}

TEST_CASE("incremental deltas match full recomputation") {
  auto cache = std::make_shared<CurvatureCache>();
  for (auto measure : {CurvatureMeasure::Absolute, CurvatureMeasure::AngleDeficit}) {
    auto m = scrambled(14, 5);
    SwapEvaluator ev(m, measure, cache);
    CHECK(ev.objective() == doctest::Approx(curvature_objective(m, measure)).epsilon(1e-12));
    RandomStream rng(11);
    for (int step = 0; step < 30; ++step) {
      auto swaps = legal_swaps(ev.mesh());
      for (const auto& mv : swaps) {
        double full = curvature_objective(swap_edge(ev.mesh(), mv), measure) - ev.objective();
        CHECK(ev.delta(mv) == doctest::Approx(full).epsilon(1e-9).scale(1.0));
      }
      ev.apply(swaps[rng.uniform_index(swaps.size())]);
      CHECK(ev.objective() == doctest::Approx(curvature_objective(ev.mesh(), measure)).epsilon(1e-9));
    }
  }
  CHECK(cache->size() > 0);
}

TEST_CASE("cache hits return the computed value") {
  auto m = scrambled(70, 3);  // string keys
  CurvatureCache cache;
  for (std::uint32_t v = 0; v < m.vertex_count(); ++v) {
    double first = cache.positive(m.coordinates(), v, m.neighbors(v));
    double second = cache.positive(m.coordinates(), v, m.neighbors(v));
    CHECK(first == second);
    CHECK(first == positive_curvature(m, v));
  }
}

TEST_CASE("greedy descent") {
  SUBCASE("convex start makes no move") {
    auto m = sphere_mesh(16, 4);
    auto [out, trace] = greedy_descent(m);
    CHECK(trace.move_count() == 0);
    CHECK(trace.terminal_objective == doctest::Approx(k4Pi).epsilon(1e-12));
  }
  SUBCASE("traces decrease strictly and reach local minima") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
      for (auto policy : {DescentPolicy::BestImprovement, DescentPolicy::FirstImprovement}) {
        auto m = scrambled(12, seed);
        auto [out, trace] = greedy_descent(m, policy);
        CHECK(trace.initial_objective == doctest::Approx(l1_curvature(m)).epsilon(1e-12));
        double prev = trace.initial_objective;
        for (const auto& s : trace.steps) {
          CHECK(s.before == doctest::Approx(prev).epsilon(1e-12));
          CHECK(s.after < s.before);
          prev = s.after;
        }
        CHECK(trace.terminal_objective == doctest::Approx(l1_curvature(out)).epsilon(1e-9));
        CHECK(trace.terminal_objective >= k4Pi - 1e-9);
        for (const auto& mv : legal_swaps(out)) CHECK(l1_curvature(swap_edge(out, mv)) > trace.terminal_objective - 1e-12);
      }
    }
  }
  SUBCASE("scrambled twelve points recover the hull") {
    auto m = scrambled(12, 9);
    auto [out, trace] = greedy_descent(m);
    CHECK(trace.move_count() > 0);
    CHECK(trace.terminal_objective == doctest::Approx(k4Pi).epsilon(1e-9));
    CHECK(is_convex_position_mesh(out));
  }
  SUBCASE("move cap") {
    auto m = scrambled(12, 2);
    auto [out, trace] = greedy_descent(m, DescentPolicy::BestImprovement, CurvatureMeasure::Absolute, 1);
    CHECK(trace.move_count() <= 1);
  }
}

TEST_CASE("hull matching ignores orientation") {
  auto m = sphere_mesh(9, 6);
  auto hull = convex_hull_oracle(to_points(m.coordinates()));
  CHECK(matches_hull(m, hull));
  std::vector<Triangle> flipped;
  for (auto t : m.triangles()) flipped.push_back({t[0], t[2], t[1]});
  TriSurface f(m.coordinates(), flipped);
  CHECK(matches_hull(f, hull));
  auto s = swap_edge(m, legal_swaps(m).front());
  CHECK_FALSE(matches_hull(s, hull));
}

TEST_CASE("tightness") {
  auto convex = sphere_mesh(20, 8);
  CHECK(is_tight_2surface(convex, 500, 1));
  auto dent = edge_dented_tetra();
  CHECK(max_sublevel_components(dent, Vec3(0, 0, 1)) == 2);
  CHECK_FALSE(is_tight_2surface(dent, 500, 1));
  CHECK(code_of([&] { is_tight_2surface(convex, 99); }) == ErrorCode::InvalidInput);
}

TEST_CASE("mesh validation") {
  auto p = tet_points();
  CHECK(code_of([&] { TriSurface(p, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}}); }) == ErrorCode::InvalidMesh);
  CHECK(code_of([&] { TriSurface(p, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 7}}); }) == ErrorCode::InvalidMesh);
  CHECK(code_of([&] { TriSurface(p, {{0, 1, 1}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}); }) == ErrorCode::InvalidMesh);
  CHECK(code_of([&] { TriSurface(p, {{0, 1, 2}, {0, 1, 2}, {0, 3, 1}, {1, 3, 2}}); }) == ErrorCode::InvalidMesh);
  auto extra = p;
  extra.push_back({5, 5, 5});
  CHECK(code_of([&] { TriSurface(extra, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}}); }) == ErrorCode::InvalidMesh);
  // two tetrahedra glued at vertex 0: its link is two cycles
  std::vector<Vec3> q = p;
  for (int i = 1; i < 4; ++i) q.push_back(p[i] + Vec3(5, 0, 0));
  std::vector<Triangle> tris{{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}, {0, 4, 5}, {0, 5, 6}, {0, 6, 4}, {4, 6, 5}};
  CHECK(code_of([&] { TriSurface(q, tris); }) == ErrorCode::InvalidMesh);
}

TEST_CASE("degenerate triangle in deficit") {
  std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {0, 1, 0}};
  TriSurface m(p, {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}});
  CHECK(code_of([&] { angle_deficit(m, 0); }) == ErrorCode::DegenerateTriangle);
}

TEST_CASE("hull builder rejects interior points") {
  auto p = tet_points();
  p.push_back({0, 0, 0});
  CHECK(code_of([&] { mesh_from_hull(p); }) == ErrorCode::InstanceRejected);
}

TEST_CASE("OFF round trip and parse errors") {
  auto m = scrambled(11, 9);
  auto r = read_off(write_off(m));
  CHECK(r.triangles() == m.triangles());
  for (std::size_t i = 0; i < m.vertex_count(); ++i) CHECK(r.coordinates()[i] == m.coordinates()[i]);
  auto c = read_off("OFF # header\n4 4 0\n# points\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 2 3\n3 0 3 1\n3 1 3 2\n");
  CHECK(c.vertex_count() == 4);
  CHECK(code_of([] { read_off("PLY\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_off("OFF\n4 4 0\n1 1 1\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_off("OFF\n1 0 0\nx 0 0\n"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { read_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n"); }) == ErrorCode::ParseError);
}

TEST_CASE("trace csv") {
  auto m = scrambled(10, 4);
  auto [out, trace] = greedy_descent(m);
  auto csv = trace_csv(trace);
  CHECK(csv.rfind("step,edge,objective\n0,,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == long(trace.move_count() + 2));
}
