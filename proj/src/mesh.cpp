#include "evohull/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "evohull/error.hpp"
#include "evohull/io.hpp"

namespace evohull {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint32_t apex_of(const Triangle& t, std::uint32_t a, std::uint32_t b) {
  for (auto v : t) {
    if (v != a && v != b) return v;
  }
  return t[0];
}

void insert_sorted(std::vector<std::uint32_t>& v, std::uint32_t x) {
  v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void erase_value(std::vector<std::uint32_t>& v, std::uint32_t x) {
  auto it = std::find(v.begin(), v.end(), x);
  if (it != v.end()) v.erase(it);
}

}  // namespace

TriSurface::TriSurface(std::vector<Vec3> coordinates, std::vector<Triangle> triangles)
    : coords_(std::move(coordinates)), tris_(std::move(triangles)) {
  build();
}

void TriSurface::build() {
  const auto nv = static_cast<std::uint32_t>(coords_.size());
  if (tris_.empty()) throw Error(ErrorCode::InvalidMesh, "mesh has no triangles");
  half_edges_.clear();
  half_edges_.reserve(tris_.size() * 3);
  neighbors_.assign(nv, {});
  incident_.assign(nv, {});
  for (std::uint32_t t = 0; t < tris_.size(); ++t) {
    const auto& tri = tris_[t];
    for (int k = 0; k < 3; ++k) {
      if (tri[k] >= nv) throw Error(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) + " has a bad vertex id");
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw Error(ErrorCode::InvalidMesh, "triangle " + std::to_string(t) + " repeats a vertex");
    }
    for (int k = 0; k < 3; ++k) {
      const auto a = tri[k], b = tri[(k + 1) % 3];
      if (!half_edges_.emplace(key(a, b), t).second) {
        throw Error(ErrorCode::InvalidMesh, "half-edge " + std::to_string(a) + "->" + std::to_string(b) +
                                                " used twice (non-manifold or inconsistent orientation)");
      }
      incident_[a].push_back(t);
    }
  }
  for (const auto& [k, t] : half_edges_) {
    const auto a = static_cast<std::uint32_t>(k >> 32), b = static_cast<std::uint32_t>(k & 0xffffffffu);
    if (!half_edges_.contains(key(b, a))) {
      throw Error(ErrorCode::InvalidMesh, "edge " + std::to_string(a) + "-" + std::to_string(b) + " is a boundary edge");
    }
    neighbors_[a].push_back(b);
  }
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (incident_[v].empty()) throw Error(ErrorCode::InvalidMesh, "vertex " + std::to_string(v) + " is isolated");
    std::sort(neighbors_[v].begin(), neighbors_[v].end());
    std::sort(incident_[v].begin(), incident_[v].end());
    // The link of v must be one cycle: follow next -> prev around v.
    std::map<std::uint32_t, std::uint32_t> link;
    for (auto t : incident_[v]) {
      const auto& tri = tris_[t];
      const int k = tri[0] == v ? 0 : (tri[1] == v ? 1 : 2);
      link[tri[(k + 1) % 3]] = tri[(k + 2) % 3];
    }
    std::size_t steps = 0;
    auto cur = link.begin()->first;
    do {
      auto it = link.find(cur);
      if (it == link.end()) throw Error(ErrorCode::InvalidMesh, "link of vertex " + std::to_string(v) + " is open");
      cur = it->second;
      ++steps;
    } while (cur != link.begin()->first && steps <= link.size());
    if (steps != link.size() || link.size() < 3) {
      throw Error(ErrorCode::InvalidMesh, "link of vertex " + std::to_string(v) + " is not a single cycle");
    }
  }
}

void TriSurface::require_sphere_topology() const {
  if (euler_characteristic() != 2) {
    throw Error(ErrorCode::InvalidMesh, "Euler characteristic " + std::to_string(euler_characteristic()) + " != 2");
  }
}

bool TriSurface::has_edge(std::uint32_t a, std::uint32_t b) const { return half_edges_.contains(key(a, b)); }

std::optional<std::uint32_t> TriSurface::triangle_of(std::uint32_t a, std::uint32_t b) const {
  auto it = half_edges_.find(key(a, b));
  if (it == half_edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<Edge> TriSurface::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (std::uint32_t a = 0; a < neighbors_.size(); ++a) {
    for (auto b : neighbors_[a]) {
      if (a < b) out.push_back({a, b});
    }
  }
  return out;
}

std::optional<SwapMove> TriSurface::move_for(Edge e) const {
  auto t1 = triangle_of(e.lo, e.hi);
  auto t2 = triangle_of(e.hi, e.lo);
  if (!t1 || !t2) return std::nullopt;
  SwapMove m;
  m.edge = e;
  m.t1 = *t1;
  m.t2 = *t2;
  m.c = apex_of(tris_[*t1], e.lo, e.hi);
  m.d = apex_of(tris_[*t2], e.lo, e.hi);
  return m;
}

bool TriSurface::is_legal(const SwapMove& m) const {
  const auto current = move_for(m.edge);
  if (!current || !(*current == m)) return false;
  if (m.c == m.d || has_edge(m.c, m.d)) return false;
  const auto a = m.edge.lo, b = m.edge.hi;
  return triangle_area(coords_[m.c], coords_[a], coords_[m.d]) > kMinSwapArea &&
         triangle_area(coords_[m.d], coords_[b], coords_[m.c]) > kMinSwapArea;
}

void TriSurface::apply(const SwapMove& m) {
  if (!is_legal(m)) {
    throw Error(ErrorCode::IllegalSwap, "swap of edge " + std::to_string(m.edge.lo) + "-" + std::to_string(m.edge.hi));
  }
  const auto a = m.edge.lo, b = m.edge.hi, c = m.c, d = m.d;
  tris_[m.t1] = {c, a, d};
  tris_[m.t2] = {d, b, c};
  half_edges_.erase(key(a, b));
  half_edges_.erase(key(b, a));
  half_edges_[key(a, d)] = m.t1;
  half_edges_[key(d, c)] = m.t1;
  half_edges_[key(b, c)] = m.t2;
  half_edges_[key(c, d)] = m.t2;
  erase_value(neighbors_[a], b);
  erase_value(neighbors_[b], a);
  insert_sorted(neighbors_[c], d);
  insert_sorted(neighbors_[d], c);
  erase_value(incident_[a], m.t2);
  erase_value(incident_[b], m.t1);
  insert_sorted(incident_[c], m.t2);
  insert_sorted(incident_[d], m.t1);
}

std::vector<Triangle> TriSurface::canonical_triangles() const {
  std::vector<Triangle> out = tris_;
  for (auto& t : out) std::rotate(t.begin(), std::min_element(t.begin(), t.end()), t.end());
  std::sort(out.begin(), out.end());
  return out;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) { return 0.5 * (b - a).cross(c - a).norm(); }

double corner_angle(const Vec3& p, const Vec3& q, const Vec3& r) {
  const Vec3 u = q - p, v = r - p;
  return std::atan2(u.cross(v).norm(), u.dot(v));
}

namespace {

double corner_angle_in(const TriSurface& m, const Triangle& t, std::uint32_t v) {
  const auto& x = m.coordinates();
  const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
  return corner_angle(x[t[k]], x[t[(k + 1) % 3]], x[t[(k + 2) % 3]]);
}

void check_triangle(const TriSurface& m, std::uint32_t t) {
  const auto& tri = m.triangles()[t];
  const auto& x = m.coordinates();
  if (!(triangle_area(x[tri[0]], x[tri[1]], x[tri[2]]) > kMinSwapArea)) {
    throw Error(ErrorCode::DegenerateTriangle, "triangle " + std::to_string(t) + " (" + std::to_string(tri[0]) + ", " +
                                                   std::to_string(tri[1]) + ", " + std::to_string(tri[2]) + ")");
  }
}

double angle_sum(const TriSurface& m, std::uint32_t v) {
  double s = 0.0;
  for (auto t : m.incident(v)) {
    check_triangle(m, t);
    s += corner_angle_in(m, m.triangles()[t], v);
  }
  return s;
}

}  // namespace

double angle_deficit(const TriSurface& m, std::uint32_t v) { return kTwoPi - angle_sum(m, v); }

std::vector<double> angle_deficits(const TriSurface& m) {
  std::vector<double> out(m.vertex_count());
  for (std::uint32_t v = 0; v < out.size(); ++v) out[v] = angle_deficit(m, v);
  return out;
}

double positive_curvature(const Vec3& apex, const std::vector<Vec3>& neighbors) {
  std::vector<Vec3> dirs;
  dirs.reserve(neighbors.size());
  for (const auto& q : neighbors) {
    const Vec3 e = q - apex;
    const double len = e.norm();
    if (len > 0.0) dirs.push_back(e / len);
  }
  if (dirs.size() < 2) return dirs.empty() ? 0.0 : kTwoPi;

  constexpr double eps = 1e-12;
  // Planar star: every direction in one plane through the apex.
  Vec3 plane_normal = Vec3::Zero();
  for (std::size_t i = 1; i < dirs.size(); ++i) {
    const Vec3 n = dirs[0].cross(dirs[i]);
    if (n.norm() > 1e-9) {
      plane_normal = n.normalized();
      break;
    }
  }
  if (plane_normal.isZero()) return 0.0;  // collinear directions
  const bool planar =
      std::all_of(dirs.begin(), dirs.end(), [&](const Vec3& e) { return std::abs(e.dot(plane_normal)) <= eps; });
  if (planar) {
    // Polar set is a lune of dihedral angle pi - span when the directions
    // fit in a half-plane, and a pair of antipodal points otherwise.
    const Vec3 e1 = dirs[0];
    const Vec3 e2 = plane_normal.cross(e1);
    std::vector<double> theta;
    for (const auto& e : dirs) theta.push_back(std::atan2(e.dot(e2), e.dot(e1)));
    std::sort(theta.begin(), theta.end());
    double max_gap = theta.front() + kTwoPi - theta.back();
    for (std::size_t i = 1; i < theta.size(); ++i) max_gap = std::max(max_gap, theta[i] - theta[i - 1]);
    const double span = kTwoPi - max_gap;
    return span < std::numbers::pi ? 2.0 * (std::numbers::pi - span) : 0.0;
  }

  // Extreme rays of the polar cone are the outward normals of the cone's
  // facets, each spanned by a pair of directions.
  std::vector<Vec3> rays;
  const auto add_ray = [&](const Vec3& r) {
    for (const auto& s : rays) {
      if ((s - r).squaredNorm() < 1e-18) return;
    }
    rays.push_back(r);
  };
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      Vec3 n = dirs[i].cross(dirs[j]);
      const double len = n.norm();
      if (len < 1e-12) continue;
      n /= len;
      bool all_le = true, all_ge = true;
      for (const auto& e : dirs) {
        const double s = e.dot(n);
        if (s > eps) all_le = false;
        if (s < -eps) all_ge = false;
        if (!all_le && !all_ge) break;
      }
      if (all_le) add_ray(n);
      if (all_ge) add_ray(-n);
    }
  }
  if (rays.size() < 3) return 0.0;

  Vec3 center = Vec3::Zero();
  for (const auto& r : rays) center += r;
  if (center.norm() < 1e-12) return 0.0;
  center.normalize();
  Vec3 u = center.cross(Vec3::UnitX());
  if (u.norm() < 0.1) u = center.cross(Vec3::UnitY());
  u.normalize();
  const Vec3 w = center.cross(u);
  std::sort(rays.begin(), rays.end(), [&](const Vec3& p, const Vec3& q) {
    return std::atan2(p.dot(w), p.dot(u)) < std::atan2(q.dot(w), q.dot(u));
  });
  // Fan of spherical triangles; each area from the Van Oosterom-Strackee
  // solid-angle formula.
  double area = 0.0;
  const Vec3& a = rays[0];
  for (std::size_t i = 1; i + 1 < rays.size(); ++i) {
    const Vec3& b = rays[i];
    const Vec3& c = rays[i + 1];
    const double num = std::abs(a.dot(b.cross(c)));
    const double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    area += 2.0 * std::atan2(num, den);
  }
  return area;
}

double positive_curvature(const TriSurface& m, std::uint32_t v) {
  std::vector<Vec3> nbr;
  for (auto u : m.neighbors(v)) nbr.push_back(m.coordinates()[u]);
  return positive_curvature(m.coordinates()[v], nbr);
}

double absolute_curvature(const TriSurface& m, std::uint32_t v) {
  return 2.0 * positive_curvature(m, v) - angle_deficit(m, v);
}

double l1_curvature(const TriSurface& m) {
  double s = 0.0;
  for (std::uint32_t v = 0; v < m.vertex_count(); ++v) s += absolute_curvature(m, v);
  return s;
}

double angle_deficit_l1(const TriSurface& m) {
  double s = 0.0;
  for (std::uint32_t v = 0; v < m.vertex_count(); ++v) s += std::abs(angle_deficit(m, v));
  return s;
}

double total_signed_curvature(const TriSurface& m) {
  double s = 0.0;
  for (std::uint32_t v = 0; v < m.vertex_count(); ++v) s += angle_deficit(m, v);
  return s;
}

double curvature_objective(const TriSurface& m, CurvatureMeasure measure) {
  return measure == CurvatureMeasure::Absolute ? l1_curvature(m) : angle_deficit_l1(m);
}

std::vector<SwapMove> legal_swaps(const TriSurface& m) {
  std::vector<SwapMove> out;
  for (const auto& e : m.edges()) {
    auto mv = m.move_for(e);
    if (mv && m.is_legal(*mv)) out.push_back(*mv);
  }
  return out;
}

TriSurface swap_edge(const TriSurface& m, const SwapMove& move) {
  TriSurface out = m;
  out.apply(move);
  return out;
}

double CurvatureCache::positive(const std::vector<Vec3>& coords, std::uint32_t v,
                                const std::vector<std::uint32_t>& sorted_neighbors) {
  const auto compute = [&] {
    std::vector<Vec3> nbr;
    nbr.reserve(sorted_neighbors.size());
    for (auto u : sorted_neighbors) nbr.push_back(coords[u]);
    return positive_curvature(coords[v], nbr);
  };
  if (coords.size() <= 58) {
    std::uint64_t k = std::uint64_t(v) << 58;
    for (auto u : sorted_neighbors) k |= std::uint64_t(1) << u;
    {
      std::lock_guard lock(mutex_);
      if (auto it = small_values_.find(k); it != small_values_.end()) return it->second;
    }
    const double value = compute();
    std::lock_guard lock(mutex_);
    if (small_values_.size() >= capacity_) small_values_.clear();
    small_values_.emplace(k, value);
    return value;
  }
  std::string k(sizeof(std::uint32_t) * (sorted_neighbors.size() + 1), '\0');
  std::memcpy(k.data(), &v, sizeof v);
  std::memcpy(k.data() + sizeof v, sorted_neighbors.data(), sizeof(std::uint32_t) * sorted_neighbors.size());
  {
    std::lock_guard lock(mutex_);
    if (auto it = values_.find(k); it != values_.end()) return it->second;
  }
  const double value = compute();
  std::lock_guard lock(mutex_);
  if (values_.size() >= capacity_) values_.clear();
  values_.emplace(std::move(k), value);
  return value;
}

std::size_t CurvatureCache::size() const {
  std::lock_guard lock(mutex_);
  return values_.size() + small_values_.size();
}

SwapEvaluator::SwapEvaluator(TriSurface mesh, CurvatureMeasure measure, std::shared_ptr<CurvatureCache> cache)
    : mesh_(std::move(mesh)), measure_(measure), cache_(std::move(cache)) {
  if (!cache_) cache_ = std::make_shared<CurvatureCache>();
  const auto n = mesh_.vertex_count();
  positive_.resize(n);
  angle_sum_.resize(n);
  term_.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    angle_sum_[v] = angle_sum(mesh_, v);
    if (measure_ == CurvatureMeasure::Absolute) positive_[v] = cache_->positive(mesh_.coordinates(), v, mesh_.neighbors(v));
    term_[v] = vertex_term(v);
  }
  objective_ = std::accumulate(term_.begin(), term_.end(), 0.0);
}

double SwapEvaluator::vertex_term(std::uint32_t v) const {
  const double deficit = kTwoPi - angle_sum_[v];
  return measure_ == CurvatureMeasure::Absolute ? 2.0 * positive_[v] - deficit : std::abs(deficit);
}

double SwapEvaluator::positive_without(std::uint32_t v, std::uint32_t removed) {
  scratch_ = mesh_.neighbors(v);
  erase_value(scratch_, removed);
  return cache_->positive(mesh_.coordinates(), v, scratch_);
}

double SwapEvaluator::positive_with(std::uint32_t v, std::uint32_t added) {
  scratch_ = mesh_.neighbors(v);
  insert_sorted(scratch_, added);
  return cache_->positive(mesh_.coordinates(), v, scratch_);
}

double SwapEvaluator::delta(const SwapMove& mv) {
  const auto a = mv.edge.lo, b = mv.edge.hi, c = mv.c, d = mv.d;
  if (measure_ == CurvatureMeasure::Absolute) {
    return 2.0 * ((positive_without(a, b) - positive_[a]) + (positive_without(b, a) - positive_[b]) +
                  (positive_with(c, d) - positive_[c]) + (positive_with(d, c) - positive_[d]));
  }
  const auto& x = mesh_.coordinates();
  const auto& t1 = mesh_.triangles()[mv.t1];
  const auto& t2 = mesh_.triangles()[mv.t2];
  const Triangle n1{c, a, d}, n2{d, b, c};
  const auto ang = [&](const Triangle& t, std::uint32_t v) {
    const int k = t[0] == v ? 0 : (t[1] == v ? 1 : 2);
    return corner_angle(x[t[k]], x[t[(k + 1) % 3]], x[t[(k + 2) % 3]]);
  };
  const double sa = angle_sum_[a] - ang(t1, a) - ang(t2, a) + ang(n1, a);
  const double sb = angle_sum_[b] - ang(t1, b) - ang(t2, b) + ang(n2, b);
  const double sc = angle_sum_[c] - ang(t1, c) + ang(n1, c) + ang(n2, c);
  const double sd = angle_sum_[d] - ang(t2, d) + ang(n1, d) + ang(n2, d);
  const auto term = [](double sum) { return std::abs(kTwoPi - sum); };
  return (term(sa) - term_[a]) + (term(sb) - term_[b]) + (term(sc) - term_[c]) + (term(sd) - term_[d]);
}

void SwapEvaluator::refresh(std::uint32_t v) {
  angle_sum_[v] = angle_sum(mesh_, v);
  if (measure_ == CurvatureMeasure::Absolute) positive_[v] = cache_->positive(mesh_.coordinates(), v, mesh_.neighbors(v));
  term_[v] = vertex_term(v);
}

void SwapEvaluator::apply(const SwapMove& mv) {
  mesh_.apply(mv);
  for (auto v : {mv.edge.lo, mv.edge.hi, mv.c, mv.d}) refresh(v);
  objective_ = std::accumulate(term_.begin(), term_.end(), 0.0);
}

std::pair<TriSurface, DescentTrace> greedy_descent(const TriSurface& m, DescentPolicy policy, CurvatureMeasure measure,
                                                   std::size_t max_moves) {
  SwapEvaluator ev(m, measure);
  DescentTrace trace;
  trace.initial_objective = ev.objective();
  while (trace.steps.size() < max_moves) {
    std::optional<SwapMove> chosen;
    double best = -kImprovementTolerance;
    for (const auto& mv : legal_swaps(ev.mesh())) {
      const double d = ev.delta(mv);
      if (d < best) {
        best = d;
        chosen = mv;
        if (policy == DescentPolicy::FirstImprovement) break;
      }
    }
    if (!chosen) break;
    const double before = ev.objective();
    ev.apply(*chosen);
    const double after = ev.objective();
    if (!(after < before)) break;  // rounding ate the improvement
    trace.steps.push_back({*chosen, before, after});
  }
  trace.terminal_objective = ev.objective();
  return {ev.mesh(), trace};
}

namespace {

// Orientation is ignored: a sequence of swaps can turn the surface inside out.
std::set<std::vector<VertexId>> unoriented(const std::vector<std::vector<VertexId>>& faces) {
  std::set<std::vector<VertexId>> out;
  for (auto f : faces) {
    std::sort(f.begin(), f.end());
    out.insert(std::move(f));
  }
  return out;
}

}  // namespace

bool matches_hull(const TriSurface& m, const HullResult& hull) {
  if (hull.hull_vertices.size() != m.vertex_count()) return false;
  std::vector<std::vector<VertexId>> mine, theirs;
  for (const auto& t : m.triangles()) mine.push_back({t[0], t[1], t[2]});
  for (const auto& f : hull.facets) theirs.push_back(f.vertices);
  return unoriented(mine) == unoriented(theirs);
}

bool is_convex_position_mesh(const TriSurface& m) {
  return matches_hull(m, convex_hull_oracle(to_points(m.coordinates())));
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace

std::size_t max_sublevel_components(const TriSurface& m, const Vec3& u) {
  const auto n = m.vertex_count();
  std::vector<double> h(n);
  for (std::uint32_t v = 0; v < n; ++v) h[v] = u.dot(m.coordinates()[v]);
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return h[a] < h[b]; });
  DisjointSets sets(n);
  std::vector<char> added(n, 0);
  std::size_t components = 0, worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = order[i];
    added[v] = 1;
    ++components;
    for (auto w : m.neighbors(v)) {
      if (added[w] && sets.unite(v, w)) --components;
    }
    // Only thresholds between distinct heights define a half-space.
    if (i + 1 == n || h[order[i + 1]] > h[v]) worst = std::max(worst, components);
  }
  return worst;
}

bool is_tight_2surface(const TriSurface& m, std::size_t directions, std::uint64_t seed) {
  if (directions < 100) throw Error(ErrorCode::InvalidInput, "tightness check needs at least 100 directions");
  RandomStream rng(seed);
  for (std::size_t i = 0; i < directions; ++i) {
    Vec3 u(rng.normal(), rng.normal(), rng.normal());
    if (u.norm() < 1e-12) continue;
    u.normalize();
    if (max_sublevel_components(m, u) > 1 || max_sublevel_components(m, -u) > 1) return false;
  }
  return true;
}

std::vector<Point> to_points(const std::vector<Vec3>& v) {
  std::vector<Point> out;
  out.reserve(v.size());
  for (const auto& p : v) out.emplace_back(p);
  return out;
}

std::vector<Vec3> to_vec3(const std::vector<Point>& p) {
  std::vector<Vec3> out;
  out.reserve(p.size());
  for (const auto& q : p) {
    if (q.size() != 3) throw Error(ErrorCode::InvalidInput, "expected points in space");
    out.emplace_back(q(0), q(1), q(2));
  }
  return out;
}

TriSurface mesh_from_hull(const std::vector<Vec3>& points) {
  const HullResult hull = convex_hull_oracle(to_points(points));
  if (hull.hull_vertices.size() != points.size()) {
    std::size_t interior = 0;
    while (interior < hull.hull_vertices.size() && hull.hull_vertices[interior] == interior) ++interior;
    throw Error(ErrorCode::InstanceRejected,
                "point " + std::to_string(interior) + " is not a hull vertex (points are not in convex position)");
  }
  std::vector<Triangle> tris;
  for (const auto& f : hull.facets) {
    tris.push_back({static_cast<std::uint32_t>(f.vertices[0]), static_cast<std::uint32_t>(f.vertices[1]),
                    static_cast<std::uint32_t>(f.vertices[2])});
  }
  return TriSurface(points, std::move(tris));
}

TriSurface regular_tetrahedron() {
  return mesh_from_hull({Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)});
}

TriSurface regular_octahedron() {
  return mesh_from_hull({Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0), Vec3(0, -1, 0), Vec3(0, 0, 1), Vec3(0, 0, -1)});
}

std::vector<Vec3> random_sphere_points(std::size_t count, RandomStream& rng) {
  std::vector<Vec3> out;
  out.reserve(count);
  while (out.size() < count) {
    Vec3 p(rng.normal(), rng.normal(), rng.normal());
    if (p.norm() < 1e-6) continue;
    out.push_back(p.normalized());
  }
  return out;
}

TriSurface scramble(const TriSurface& m, std::size_t swaps, RandomStream& rng) {
  TriSurface out = m;
  for (std::size_t i = 0; i < swaps; ++i) {
    const auto moves = legal_swaps(out);
    if (moves.empty()) break;
    out.apply(moves[rng.uniform_index(moves.size())]);
  }
  return out;
}

TriSurface read_off(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  // Comments start with '#'.
  const auto next_token = [&](std::string& tok) {
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return true;
    }
    return false;
  };
  if (!next_token(header) || header != "OFF") throw Error(ErrorCode::ParseError, "missing OFF header");
  std::string tok;
  std::size_t nv = 0, nf = 0;
  try {
    if (!next_token(tok)) throw Error(ErrorCode::ParseError, "missing counts");
    nv = std::stoul(tok);
    if (!next_token(tok)) throw Error(ErrorCode::ParseError, "missing face count");
    nf = std::stoul(tok);
    if (!next_token(tok)) throw Error(ErrorCode::ParseError, "missing edge count");
    std::vector<Vec3> pts(nv);
    for (auto& p : pts) {
      for (int k = 0; k < 3; ++k) {
        if (!next_token(tok)) throw Error(ErrorCode::ParseError, "truncated vertex list");
        p(k) = std::stod(tok);
      }
    }
    std::vector<Triangle> tris(nf);
    for (auto& t : tris) {
      if (!next_token(tok) || std::stoul(tok) != 3) throw Error(ErrorCode::ParseError, "only triangle faces are supported");
      for (int k = 0; k < 3; ++k) {
        if (!next_token(tok)) throw Error(ErrorCode::ParseError, "truncated face list");
        t[k] = static_cast<std::uint32_t>(std::stoul(tok));
      }
    }
    return TriSurface(std::move(pts), std::move(tris));
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::ParseError, "malformed number in OFF");
  } catch (const std::out_of_range&) {
    throw Error(ErrorCode::ParseError, "number out of range in OFF");
  }
}

std::string write_off(const TriSurface& m) {
  std::string out = "OFF\n" + std::to_string(m.vertex_count()) + " " + std::to_string(m.face_count()) + " 0\n";
  for (const auto& p : m.coordinates()) {
    out += format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z()) + "\n";
  }
  for (const auto& t : m.triangles()) {
    out += "3 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + "\n";
  }
  return out;
}

std::string trace_csv(const DescentTrace& trace) {
  std::string out = "step,edge,objective\n";
  out += "0,," + format_double(trace.initial_objective) + "\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    out += std::to_string(i + 1) + "," + std::to_string(s.move.edge.lo) + "-" + std::to_string(s.move.edge.hi) + "," +
           format_double(s.after) + "\n";
  }
  return out;
}

}  // namespace evohull
