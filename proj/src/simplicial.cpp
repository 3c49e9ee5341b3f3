#include "evohull/simplicial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evohull/error.hpp"
#include "evohull/io.hpp"

namespace evohull {

Simplex::Simplex(std::vector<VertexId> vertices) : vertices_(std::move(vertices)) {
  std::sort(vertices_.begin(), vertices_.end());
  if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end()) {
    throw Error(ErrorCode::InvalidInput, "simplex vertices must be distinct");
  }
}

bool Simplex::contains(VertexId v) const { return std::binary_search(vertices_.begin(), vertices_.end(), v); }

bool Simplex::is_face_of(const Simplex& other) const {
  return std::includes(other.vertices_.begin(), other.vertices_.end(), vertices_.begin(), vertices_.end());
}

std::vector<Simplex> Simplex::faces() const {
  std::vector<Simplex> out;
  const std::size_t n = vertices_.size();
  if (n == 0 || n > 20) {
    if (n > 20) throw Error(ErrorCode::InvalidInput, "simplex too large to enumerate faces");
    return out;
  }
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<VertexId> v;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) v.push_back(vertices_[i]);
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

void AbstractComplex::add(const Simplex& s) {
  for (auto& f : s.faces()) simplices_.insert(std::move(f));
}

std::set<VertexId> AbstractComplex::vertices() const {
  std::set<VertexId> out;
  for (const auto& s : simplices_) out.insert(s.vertices().begin(), s.vertices().end());
  return out;
}

std::size_t AbstractComplex::count(int dimension) const {
  return static_cast<std::size_t>(
      std::count_if(simplices_.begin(), simplices_.end(), [&](const Simplex& s) { return s.dimension() == dimension; }));
}

std::vector<Simplex> AbstractComplex::maximal() const {
  std::vector<Simplex> out;
  for (const auto& s : simplices_) {
    const bool proper_face = std::any_of(simplices_.begin(), simplices_.end(), [&](const Simplex& t) {
      return t.dimension() > s.dimension() && s.is_face_of(t);
    });
    if (!proper_face) out.push_back(s);
  }
  return out;
}

bool AbstractComplex::is_closed_under_faces() const {
  for (const auto& s : simplices_) {
    for (const auto& f : s.faces()) {
      if (!simplices_.contains(f)) return false;
    }
  }
  return true;
}

namespace {

std::size_t affine_rank(const std::vector<Point>& points) {
  if (points.size() <= 1) return 0;
  const auto dim = points.front().size();
  Eigen::MatrixXd m(dim, static_cast<Eigen::Index>(points.size() - 1));
  for (std::size_t i = 1; i < points.size(); ++i) m.col(static_cast<Eigen::Index>(i - 1)) = points[i] - points[0];
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<std::size_t>(lu.rank());
}

// Barycentric coordinates of x with respect to the simplex on `pts`, and the
// distance from x to the simplex's affine span.
std::pair<Eigen::VectorXd, double> barycentric(const std::vector<Point>& pts, const Point& x) {
  const auto k = static_cast<Eigen::Index>(pts.size());
  Eigen::VectorXd lambda(k);
  if (k == 1) {
    lambda(0) = 1.0;
    return {lambda, (x - pts[0]).norm()};
  }
  Eigen::MatrixXd m(x.size(), k - 1);
  for (Eigen::Index i = 1; i < k; ++i) m.col(i - 1) = pts[static_cast<std::size_t>(i)] - pts[0];
  const Eigen::VectorXd rhs = x - pts[0];
  const Eigen::VectorXd alpha = m.colPivHouseholderQr().solve(rhs);
  const double residual = (m * alpha - rhs).norm();
  lambda(0) = 1.0 - alpha.sum();
  lambda.tail(k - 1) = alpha;
  return {lambda, residual};
}

std::vector<Point> points_of(const Simplex& s, const std::map<VertexId, Point>& coords) {
  std::vector<Point> pts;
  for (auto v : s.vertices()) {
    auto it = coords.find(v);
    if (it == coords.end()) throw Error(ErrorCode::InvalidInput, "no coordinates for vertex " + std::to_string(v));
    pts.push_back(it->second);
  }
  return pts;
}

}  // namespace

bool affinely_independent(const std::vector<Point>& points) {
  if (points.empty()) return false;
  return affine_rank(points) == points.size() - 1;
}

GeometricComplex simplex_complex(const Simplex& s, const std::map<VertexId, Point>& coordinates) {
  GeometricComplex g;
  for (auto v : s.vertices()) {
    auto it = coordinates.find(v);
    if (it == coordinates.end()) throw Error(ErrorCode::InvalidInput, "no coordinates for vertex " + std::to_string(v));
    g.coordinates.emplace(v, it->second);
  }
  if (!affinely_independent(points_of(s, g.coordinates))) {
    throw Error(ErrorCode::NotInGeneralPosition, "simplex vertices are affinely dependent");
  }
  g.complex.add(s);
  return g;
}

GeometricComplex join(const Simplex& s1, const std::map<VertexId, Point>& c1, const Simplex& s2,
                      const std::map<VertexId, Point>& c2) {
  std::vector<VertexId> all = s1.vertices();
  for (auto v : s2.vertices()) {
    if (s1.contains(v)) throw Error(ErrorCode::NotInGeneralPosition, "joined simplices share vertex " + std::to_string(v));
    all.push_back(v);
  }
  std::map<VertexId, Point> coords;
  for (auto v : s1.vertices()) coords.emplace(v, points_of(Simplex{v}, c1).front());
  for (auto v : s2.vertices()) coords.emplace(v, points_of(Simplex{v}, c2).front());
  const Simplex joined(all);
  if (!affinely_independent(points_of(joined, coords))) {
    throw Error(ErrorCode::NotInGeneralPosition, "vertices of the join are affinely dependent");
  }
  GeometricComplex g;
  g.coordinates = std::move(coords);
  g.complex.add(joined);
  return g;
}

GeometricComplex stellar_subdivide(const GeometricComplex& complex, const Simplex& target, const Point& apex) {
  if (!complex.complex.contains(target)) throw Error(ErrorCode::InvalidInput, "target simplex not in complex");
  const auto pts = points_of(target, complex.coordinates);
  const auto [lambda, residual] = barycentric(pts, apex);
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  if (residual > kGeomEps * scale || lambda.minCoeff() <= kGeomEps) {
    throw Error(ErrorCode::InvalidApex, "apex is not in the relative interior of the target");
  }

  GeometricComplex out;
  out.coordinates = complex.coordinates;
  const VertexId apex_id = complex.coordinates.empty() ? 0 : complex.coordinates.rbegin()->first + 1;
  out.coordinates.emplace(apex_id, apex);

  // Simplices not containing the target survive unchanged. Each maximal
  // tau = target * eta is replaced by apex * (boundary of target) * eta.
  for (const auto& s : complex.complex.simplices()) {
    if (!target.is_face_of(s)) out.complex.add(s);
  }
  for (const auto& tau : complex.complex.maximal()) {
    if (!target.is_face_of(tau)) continue;
    std::vector<VertexId> eta;
    std::set_difference(tau.vertices().begin(), tau.vertices().end(), target.vertices().begin(),
                        target.vertices().end(), std::back_inserter(eta));
    const auto& tv = target.vertices();
    for (std::size_t skip = 0; skip < tv.size(); ++skip) {
      std::vector<VertexId> v = eta;
      for (std::size_t i = 0; i < tv.size(); ++i) {
        if (i != skip) v.push_back(tv[i]);
      }
      v.push_back(apex_id);
      out.complex.add(Simplex(v));
    }
  }
  return out;
}

AbstractComplex scheme(const GeometricComplex& complex) { return complex.complex; }

bool is_simplicial_map(const std::map<VertexId, VertexId>& vertex_map, const AbstractComplex& K,
                       const AbstractComplex& L) {
  for (const auto& s : K.simplices()) {
    std::vector<VertexId> image;
    for (auto v : s.vertices()) {
      auto it = vertex_map.find(v);
      if (it == vertex_map.end()) return false;
      image.push_back(it->second);
    }
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    if (!L.contains(Simplex(image))) return false;
  }
  return true;
}

bool body_contains(const GeometricComplex& complex, const Point& x, double eps) {
  for (const auto& s : complex.complex.maximal()) {
    const auto [lambda, residual] = barycentric(points_of(s, complex.coordinates), x);
    if (residual <= eps && lambda.minCoeff() >= -eps) return true;
  }
  return false;
}

HalfSpacePolytope HalfSpacePolytope::box(const std::vector<double>& lo, const std::vector<double>& hi) {
  HalfSpacePolytope p;
  p.dimension = lo.size();
  for (std::size_t d = 0; d < lo.size(); ++d) {
    Point up = Point::Zero(static_cast<Eigen::Index>(lo.size()));
    up(static_cast<Eigen::Index>(d)) = 1.0;
    p.inequalities.push_back({up, hi[d]});
    p.inequalities.push_back({-up, -lo[d]});
  }
  return p;
}

bool polytope_contains(const HalfSpacePolytope& p, const Point& x) {
  if (static_cast<std::size_t>(x.size()) != p.dimension) {
    throw Error(ErrorCode::InvalidInput, "point dimension " + std::to_string(x.size()) + " != polytope dimension " +
                                             std::to_string(p.dimension));
  }
  for (const auto& h : p.inequalities) {
    if (h.normal.size() != x.size()) throw Error(ErrorCode::InvalidInput, "inequality dimension mismatch");
    if (h.normal.dot(x) > h.offset + kGeomEps) return false;
  }
  return true;
}

namespace {

std::vector<Point> brute_force_vertices(const std::vector<HalfSpace>& rows, std::size_t n) {
  std::vector<Point> out;
  const std::size_t m = rows.size();
  if (m < n) return out;
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  const auto feasible = [&](const Point& x) {
    for (const auto& h : rows) {
      if (h.normal.dot(x) > h.offset + kGeomEps * std::max(1.0, h.normal.norm())) return false;
    }
    return true;
  };
  for (;;) {
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (std::size_t r = 0; r < n; ++r) {
      a.row(static_cast<Eigen::Index>(r)) = rows[idx[r]].normal.transpose();
      b(static_cast<Eigen::Index>(r)) = rows[idx[r]].offset;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    if (lu.rank() == static_cast<Eigen::Index>(n)) {
      Point x = lu.solve(b);
      if (x.allFinite() && feasible(x)) {
        const bool dup = std::any_of(out.begin(), out.end(), [&](const Point& q) { return (q - x).norm() < kMergeRadius; });
        if (!dup) out.push_back(std::move(x));
      }
    }
    // Next combination in lexicographic order.
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == m - n + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

void check_dimension(const HalfSpacePolytope& p) {
  if (p.dimension < 1 || p.dimension > 3) throw Error(ErrorCode::InvalidInput, "polytope dimension must be 1, 2 or 3");
  for (const auto& h : p.inequalities) {
    if (static_cast<std::size_t>(h.normal.size()) != p.dimension) {
      throw Error(ErrorCode::InvalidInput, "inequality dimension mismatch");
    }
  }
}

}  // namespace

bool is_bounded(const HalfSpacePolytope& p) {
  check_dimension(p);
  // The recession cone {d : A d <= 0} clipped to the unit box has a nonzero
  // vertex exactly when the cone is nontrivial.
  std::vector<HalfSpace> rows;
  for (const auto& h : p.inequalities) rows.push_back({h.normal, 0.0});
  const auto box = HalfSpacePolytope::box(std::vector<double>(p.dimension, -1.0), std::vector<double>(p.dimension, 1.0));
  rows.insert(rows.end(), box.inequalities.begin(), box.inequalities.end());
  for (const auto& v : brute_force_vertices(rows, p.dimension)) {
    if (v.norm() > kMergeRadius) return false;
  }
  return true;
}

std::vector<Point> enumerate_vertices(const HalfSpacePolytope& p) {
  check_dimension(p);
  if (!is_bounded(p)) throw Error(ErrorCode::UnboundedFeasibleSet, "feasible set is unbounded");
  auto vertices = brute_force_vertices(p.inequalities, p.dimension);
  if (vertices.empty()) throw Error(ErrorCode::InvalidProblem, "feasible set is empty");
  return vertices;
}

namespace {

// Corners of the planar convex hull of `ids`, counter-clockwise, collinear
// and duplicate points dropped. Coordinates are given by `uv`.
std::vector<VertexId> planar_corners(const std::vector<VertexId>& ids, const std::map<VertexId, Eigen::Vector2d>& uv) {
  std::vector<VertexId> sorted = ids;
  std::sort(sorted.begin(), sorted.end(), [&](VertexId a, VertexId b) {
    const auto& pa = uv.at(a);
    const auto& pb = uv.at(b);
    if (pa.x() != pb.x()) return pa.x() < pb.x();
    if (pa.y() != pb.y()) return pa.y() < pb.y();
    return a < b;
  });
  std::vector<VertexId> unique;
  for (auto id : sorted) {
    if (!unique.empty() && (uv.at(unique.back()) - uv.at(id)).norm() < kMergeRadius) {
      unique.back() = std::min(unique.back(), id);
      continue;
    }
    unique.push_back(id);
  }
  if (unique.size() < 3) return unique;
  const auto cross = [&](VertexId o, VertexId a, VertexId b) {
    const Eigen::Vector2d oa = uv.at(a) - uv.at(o);
    const Eigen::Vector2d ob = uv.at(b) - uv.at(o);
    const double c = oa.x() * ob.y() - oa.y() * ob.x();
    return c > kGeomEps * std::max(1.0, oa.norm() * ob.norm()) ? c : 0.0;
  };
  std::vector<VertexId> hull(2 * unique.size());
  std::size_t k = 0;
  for (auto id : unique) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], id) <= 0.0) --k;
    hull[k++] = id;
  }
  for (std::size_t i = unique.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], unique[i]) <= 0.0) --k;
    hull[k++] = unique[i];
  }
  hull.resize(k - 1);
  return hull;
}

HullResult hull_2d(const std::vector<Point>& pts) {
  HullResult res;
  res.dimension = 2;
  std::set<std::vector<VertexId>> seen;
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const Eigen::Vector2d d = pts[j] - pts[i];
      if (d.norm() < kMergeRadius) continue;
      Eigen::Vector2d n(d.y(), -d.x());
      n.normalize();
      bool all_le = true, all_ge = true;
      std::vector<VertexId> on;
      for (std::size_t k = 0; k < m; ++k) {
        const double s = n.dot(pts[k] - pts[i]);
        if (s > kGeomEps) all_le = false;
        if (s < -kGeomEps) all_ge = false;
        if (std::abs(s) <= kGeomEps) on.push_back(k);
      }
      if (!all_le && !all_ge) continue;
      if (!all_le) n = -n;
      if (!seen.insert(on).second) continue;
      // Extreme points of the collinear run, lowest index on ties.
      VertexId a = on.front(), b = on.front();
      double lo = d.dot(pts[a] - pts[i]), hi = lo;
      for (auto k : on) {
        const double t = d.dot(pts[k] - pts[i]);
        if (t < lo - kGeomEps) { lo = t; a = k; }
        if (t > hi + kGeomEps) { hi = t; b = k; }
      }
      Eigen::Vector2d e = pts[b] - pts[a];
      if (Eigen::Vector2d(e.y(), -e.x()).dot(n) < 0) std::swap(a, b);
      HullFacet f;
      f.vertices = {a, b};
      f.normal = n;
      f.offset = n.dot(pts[a]);
      res.facets.push_back(std::move(f));
    }
  }
  return res;
}

HullResult hull_3d(const std::vector<Point>& pts) {
  HullResult res;
  res.dimension = 3;
  std::set<std::vector<VertexId>> seen;
  const std::size_t m = pts.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      for (std::size_t k = j + 1; k < m; ++k) {
        const Eigen::Vector3d a = pts[i], b = pts[j], c = pts[k];
        Eigen::Vector3d n = (b - a).cross(c - a);
        if (n.norm() < kGeomEps * std::max(1.0, (b - a).norm() * (c - a).norm())) continue;
        n.normalize();
        bool all_le = true, all_ge = true;
        std::vector<VertexId> on;
        for (std::size_t l = 0; l < m; ++l) {
          const double s = n.dot(Eigen::Vector3d(pts[l]) - a);
          if (s > kGeomEps) all_le = false;
          if (s < -kGeomEps) all_ge = false;
          if (std::abs(s) <= kGeomEps) on.push_back(l);
        }
        if (!all_le && !all_ge) continue;
        if (!all_le) n = -n;
        if (!seen.insert(on).second) continue;

        const double offset = n.dot(a);
        const auto emit = [&](VertexId p, VertexId q, VertexId r) {
          HullFacet f;
          const Eigen::Vector3d pq = Eigen::Vector3d(pts[q]) - Eigen::Vector3d(pts[p]);
          const Eigen::Vector3d pr = Eigen::Vector3d(pts[r]) - Eigen::Vector3d(pts[p]);
          if (pq.cross(pr).dot(n) < 0) std::swap(q, r);
          f.vertices = {p, q, r};
          f.normal = n;
          f.offset = offset;
          res.facets.push_back(std::move(f));
        };
        if (on.size() == 3) {
          emit(on[0], on[1], on[2]);
          continue;
        }
        // Coplanar facet: corners in the (u, w) frame, where u x w = n, then
        // a fan from the lowest-index corner.
        Eigen::Vector3d u = (Eigen::Vector3d(pts[on[1]]) - a);
        for (auto l : on) {
          const Eigen::Vector3d cand = Eigen::Vector3d(pts[l]) - a;
          if (cand.norm() > u.norm()) u = cand;
        }
        u.normalize();
        const Eigen::Vector3d w = n.cross(u);
        std::map<VertexId, Eigen::Vector2d> uv;
        for (auto l : on) {
          const Eigen::Vector3d r = Eigen::Vector3d(pts[l]) - a;
          uv.emplace(l, Eigen::Vector2d(r.dot(u), r.dot(w)));
        }
        auto corners = planar_corners(on, uv);
        auto lowest = std::min_element(corners.begin(), corners.end());
        std::rotate(corners.begin(), lowest, corners.end());
        for (std::size_t t = 1; t + 1 < corners.size(); ++t) emit(corners[0], corners[t], corners[t + 1]);
      }
    }
  }
  return res;
}

}  // namespace

HullResult convex_hull_oracle(const std::vector<Point>& points) {
  if (points.empty()) throw Error(ErrorCode::DegenerateInput, "no points");
  const auto n = static_cast<std::size_t>(points.front().size());
  if (n != 2 && n != 3) throw Error(ErrorCode::InvalidInput, "hull oracle supports the plane and space only");
  for (const auto& p : points) {
    if (static_cast<std::size_t>(p.size()) != n) throw Error(ErrorCode::InvalidInput, "mixed point dimensions");
  }
  if (points.size() < n + 1 || affine_rank(points) < n) {
    throw Error(ErrorCode::DegenerateInput, "points do not span the space");
  }
  HullResult res = n == 2 ? hull_2d(points) : hull_3d(points);
  std::set<VertexId> vs;
  for (const auto& f : res.facets) vs.insert(f.vertices.begin(), f.vertices.end());
  res.hull_vertices.assign(vs.begin(), vs.end());
  return res;
}

std::set<std::vector<VertexId>> canonical_facets(const HullResult& hull) {
  std::set<std::vector<VertexId>> out;
  for (const auto& f : hull.facets) {
    auto v = f.vertices;
    std::rotate(v.begin(), std::min_element(v.begin(), v.end()), v.end());
    out.insert(std::move(v));
  }
  return out;
}

std::vector<Point> read_points_csv(const std::string& text) {
  std::vector<Point> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (out.empty() && lineno == 1) continue;  // header
      throw Error(ErrorCode::ParseError, "non-numeric point on line " + std::to_string(lineno));
    }
    if (vals.size() < 2 || vals.size() > 3) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + " needs 2 or 3 coordinates");
    }
    if (!out.empty() && out.front().size() != static_cast<Eigen::Index>(vals.size())) {
      throw Error(ErrorCode::ParseError, "mixed point dimensions on line " + std::to_string(lineno));
    }
    out.emplace_back(Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
  }
  return out;
}

std::string write_points_csv(const std::vector<Point>& points) {
  std::string out;
  for (const auto& p : points) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (i) out += ',';
      out += format_double(p(i));
    }
    out += '\n';
  }
  return out;
}

std::string hull_to_off(const std::vector<Point>& points, const HullResult& hull) {
  if (hull.dimension != 3) throw Error(ErrorCode::InvalidInput, "OFF output needs a 3D hull");
  std::string out = "OFF\n" + std::to_string(points.size()) + " " + std::to_string(hull.facets.size()) + " 0\n";
  for (const auto& p : points) {
    out += format_double(p(0)) + " " + format_double(p(1)) + " " + format_double(p(2)) + "\n";
  }
  for (const auto& f : hull.facets) {
    out += "3 " + std::to_string(f.vertices[0]) + " " + std::to_string(f.vertices[1]) + " " +
           std::to_string(f.vertices[2]) + "\n";
  }
  return out;
}

}  // namespace evohull
