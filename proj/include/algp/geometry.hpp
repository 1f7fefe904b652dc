#pragma once
// Convex polygonal domains: boundary arc-length parametrization, inner
// offsets (erosion), boundary distances, and rasterization onto uniform
// cell grids.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "algp/core.hpp"

namespace algp {

struct Edge {
  Vec2 a, b;
  Vec2 dir;     // unit tangent a -> b
  Vec2 normal;  // unit outward normal
  double length = 0;
  double arc0 = 0;  // arc length of a, measured from vertex 0
};

struct Domain {
  std::vector<Vec2> vertices;  // counterclockwise, strictly convex
  std::vector<Edge> edges;
  double total_arc_length = 0;
  double area = 0;
  Vec2 bbox_min, bbox_max;
  double coord_scale = 1.0;  // max(1, |coords|_inf), for tolerances
};

struct BoundaryPoint {
  double arc = 0;  // in [0, total_arc_length)
  Vec2 position;
  Vec2 outward_normal;
};

inline double polygon_signed_area(const std::vector<Vec2>& v) {
  double s = 0;
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(v[i], v[(i + 1) % n]);
  return 0.5 * s;
}

inline Domain build_convex_polygon(std::vector<Vec2> pts) {
  if (pts.size() < 3)
    throw Error(Errc::too_few_vertices, "polygon needs at least 3 vertices");
  if (polygon_signed_area(pts) < 0) std::reverse(pts.begin(), pts.end());
  double scale = 1.0;
  for (const Vec2& p : pts)
    scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
  const double len_tol = 1e-12 * scale;
  const double cross_tol = 1e-12 * scale * scale;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (norm(pts[(i + 1) % n] - pts[i]) <= len_tol)
      throw Error(Errc::degenerate_edge, "zero-length edge");
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 e1 = pts[(i + 1) % n] - pts[i];
    Vec2 e2 = pts[(i + 2) % n] - pts[(i + 1) % n];
    if (cross(e1, e2) <= cross_tol)
      throw Error(Errc::non_convex, "vertices not in strictly convex position");
  }
  Domain d;
  d.vertices = std::move(pts);
  d.coord_scale = scale;
  d.area = polygon_signed_area(d.vertices);
  d.bbox_min = d.bbox_max = d.vertices[0];
  for (const Vec2& p : d.vertices) {
    d.bbox_min.x = std::min(d.bbox_min.x, p.x);
    d.bbox_min.y = std::min(d.bbox_min.y, p.y);
    d.bbox_max.x = std::max(d.bbox_max.x, p.x);
    d.bbox_max.y = std::max(d.bbox_max.y, p.y);
  }
  double arc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Edge e;
    e.a = d.vertices[i];
    e.b = d.vertices[(i + 1) % n];
    e.length = norm(e.b - e.a);
    e.dir = {(e.b.x - e.a.x) / e.length, (e.b.y - e.a.y) / e.length};
    e.normal = perp_cw(e.dir);
    e.arc0 = arc;
    arc += e.length;
    d.edges.push_back(e);
  }
  d.total_arc_length = arc;
  return d;
}

// The domain of the worked unbounded-data example: |x-1| + |y| <= 1.
inline Domain diamond_domain() {
  return build_convex_polygon({{0, 0}, {1, -1}, {2, 0}, {1, 1}});
}

inline Domain unit_square_domain() {
  return build_convex_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

// Regular hexagon with unit side, leftmost vertex at the origin.
inline Domain regular_hexagon_domain() {
  const double s = std::sqrt(3.0) / 2.0;
  return build_convex_polygon(
      {{2, 0}, {1.5, s}, {0.5, s}, {0, 0}, {0.5, -s}, {1.5, -s}});
}

// Strict interior test; boundary points (edges and vertices) report false.
inline bool contains(const Domain& d, Vec2 p) {
  const double tol = 1e-12 * d.coord_scale * d.coord_scale;
  for (const Edge& e : d.edges) {
    if (cross(e.b - e.a, p - e.a) <= tol) return false;
  }
  return true;
}

// Point at arc length s from vertex 0. At a vertex the normal of the edge
// starting there is used (vertices carry no intrinsic normal).
inline BoundaryPoint boundary_point_at(const Domain& d, double s) {
  if (!(s >= 0.0) || s >= d.total_arc_length)
    throw Error(Errc::out_of_range, "arc parameter outside [0, L)");
  std::size_t lo = 0, hi = d.edges.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi + 1) / 2;
    if (d.edges[mid].arc0 <= s)
      lo = mid;
    else
      hi = mid - 1;
  }
  const Edge& e = d.edges[lo];
  double t = s - e.arc0;
  return {s, e.a + t * e.dir, e.normal};
}

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

struct ClosestBoundaryPoint {
  Vec2 point;
  double arc = 0;
  double dist = 0;
};

inline ClosestBoundaryPoint closest_boundary_point(const Domain& d, Vec2 p) {
  ClosestBoundaryPoint best;
  best.dist = std::numeric_limits<double>::infinity();
  for (const Edge& e : d.edges) {
    double t = std::clamp(dot(p - e.a, e.dir), 0.0, e.length);
    Vec2 q = e.a + t * e.dir;
    double dist = norm(p - q);
    if (dist < best.dist) {
      double arc = e.arc0 + t;
      if (arc >= d.total_arc_length) arc = 0.0;
      best = {q, arc, dist};
    }
  }
  return best;
}

inline double dist_to_boundary(const Domain& d, Vec2 p) {
  return closest_boundary_point(d, p).dist;
}

namespace detail {
// Clip a polygon against the half-plane dot(n, x) <= c.
inline std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, Vec2 n,
                                         double c) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    Vec2 a = poly[i];
    Vec2 b = poly[(i + 1) % m];
    double da = dot(n, a) - c;
    double db = dot(n, b) - c;
    bool ain = da <= 0, bin = db <= 0;
    if (ain) out.push_back(a);
    if (ain != bin) {
      double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

inline std::vector<Vec2> canonicalize_ring(std::vector<Vec2> v, double scale) {
  const double dup_tol = 1e-11 * scale;
  std::vector<Vec2> dedup;
  for (const Vec2& p : v) {
    if (dedup.empty() || norm(p - dedup.back()) > dup_tol) dedup.push_back(p);
  }
  while (dedup.size() > 1 && norm(dedup.front() - dedup.back()) <= dup_tol)
    dedup.pop_back();
  // drop collinear vertices
  std::vector<Vec2> out;
  const std::size_t n = dedup.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 prev = dedup[(i + n - 1) % n];
    Vec2 cur = dedup[i];
    Vec2 next = dedup[(i + 1) % n];
    Vec2 e1 = cur - prev, e2 = next - cur;
    if (std::abs(cross(e1, e2)) > 1e-10 * norm(e1) * norm(e2))
      out.push_back(cur);
  }
  return out;
}
}  // namespace detail

// Inner parallel body: the set of points of the domain at distance >= delta
// from the boundary. For convex polygons this is the intersection of the
// inward-offset edge half-planes.
inline Domain erode(const Domain& d, double delta) {
  if (!(delta > 0)) throw Error(Errc::out_of_range, "erosion depth must be positive");
  std::vector<Vec2> poly = d.vertices;
  for (const Edge& e : d.edges) {
    poly = detail::clip_half_plane(poly, e.normal, dot(e.normal, e.a) - delta);
    if (poly.size() < 3) throw Error(Errc::empty_erosion, "offset exceeds inradius");
  }
  poly = detail::canonicalize_ring(std::move(poly), d.coord_scale);
  if (poly.size() < 3 || polygon_signed_area(poly) <= 1e-14 * d.coord_scale * d.coord_scale)
    throw Error(Errc::empty_erosion, "offset exceeds inradius");
  try {
    return build_convex_polygon(std::move(poly));
  } catch (const Error&) {
    throw Error(Errc::empty_erosion, "offset polygon degenerate");
  }
}

// Minimum distance between the boundaries of nested convex polygons.
inline double boundary_distance(const Domain& outer, const Domain& inner) {
  for (const Vec2& v : inner.vertices) {
    if (!contains(outer, v))
      throw Error(Errc::not_nested, "inner polygon not strictly inside outer");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& v : inner.vertices) {
    for (const Edge& e : outer.edges)
      best = std::min(best, point_segment_distance(v, e.a, e.b));
  }
  for (const Vec2& v : outer.vertices) {
    for (const Edge& e : inner.edges)
      best = std::min(best, point_segment_distance(v, e.a, e.b));
  }
  return best;
}

struct GridSpec {
  double h = 0;    // cell spacing
  Vec2 origin;     // lower-left corner of cell (0, 0)
  int nx = 0, ny = 0;

  Vec2 cell_center(int i, int j) const {
    return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  bool in_range(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
};

// Grid covering the domain with `margin` whole cells of clearance per side.
inline GridSpec grid_for_domain(const Domain& d, double h, int margin = 3) {
  GridSpec g;
  g.h = h;
  g.origin = {d.bbox_min.x - margin * h, d.bbox_min.y - margin * h};
  g.nx = static_cast<int>(std::ceil((d.bbox_max.x - d.bbox_min.x) / h - 1e-9)) + 2 * margin;
  g.ny = static_cast<int>(std::ceil((d.bbox_max.y - d.bbox_min.y) / h - 1e-9)) + 2 * margin;
  return g;
}

struct RegionMask {
  GridSpec grid;
  std::vector<std::uint8_t> inside;

  int count() const {
    int c = 0;
    for (std::uint8_t b : inside) c += b;
    return c;
  }
};

// Cell-center rasterization: a cell belongs to the mask iff its center is
// strictly inside the polygon. Measure error is O(h * perimeter).
inline RegionMask rasterize(const Domain& d, const GridSpec& g) {
  const double tol = 1e-9 * g.h;
  if (d.bbox_min.x < g.origin.x + 2 * g.h - tol ||
      d.bbox_min.y < g.origin.y + 2 * g.h - tol ||
      d.bbox_max.x > g.origin.x + (g.nx - 2) * g.h + tol ||
      d.bbox_max.y > g.origin.y + (g.ny - 2) * g.h + tol)
    throw Error(Errc::grid_too_small, "grid lacks a 2-cell margin around the polygon");
  RegionMask m;
  m.grid = g;
  m.inside.assign(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (contains(d, g.cell_center(i, j))) m.inside[g.index(i, j)] = 1;
  return m;
}

inline double polygon_perimeter(const Domain& d) { return d.total_arc_length; }

}  // namespace algp
