#pragma once
// Discrete BV machinery on cell grids: grid functions, phi-total variation,
// superlevel sets with marching-squares contours, perimeters, boundary
// traces and their level measures, coarea / layer-cake identities, and the
// isoperimetric deficit.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "algp/anisotropy.hpp"
#include "algp/core.hpp"
#include "algp/geometry.hpp"

namespace algp {

struct GridFunction {
  GridSpec grid;
  RegionMask mask;                // the cells of the domain
  std::vector<double> values;     // full grid size; defined on masked cells

  double at(int i, int j) const { return values[grid.index(i, j)]; }
  bool masked(int i, int j) const { return mask.inside[grid.index(i, j)] != 0; }
};

inline GridFunction make_grid_function(const Domain& d, const GridSpec& g,
                                       const std::function<double(Vec2)>& f) {
  GridFunction u;
  u.grid = g;
  u.mask = rasterize(d, g);
  u.values.assign(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.mask.inside[g.index(i, j)])
        u.values[g.index(i, j)] = f(g.cell_center(i, j));
  return u;
}

inline std::pair<double, double> value_range(const GridFunction& u) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t k = 0; k < u.values.size(); ++k)
    if (u.mask.inside[k]) {
      lo = std::min(lo, u.values[k]);
      hi = std::max(hi, u.values[k]);
    }
  return {lo, hi};
}

// ---------------------------------------------------------------------------
// Boundary data

// Trace datum as a function of the boundary arc-length parameter s in [0, L).
// `singular_arcs` lists arc positions where |f| may blow up; quadratures
// refine geometrically toward them. A fixed midpoint sample cache backs the
// level-measure and ess-sup queries.
struct BoundaryData {
  Domain domain;
  std::function<double(double)> value;
  std::vector<double> singular_arcs;
  std::optional<double> integrability_p;  // declared: ||f||_p finite for p below this
  std::shared_ptr<const std::vector<double>> samples;  // midpoints of 2^16 partition

  static constexpr int kSampleCount = 1 << 16;
};

inline BoundaryData make_boundary_data(
    const Domain& d, std::function<double(double)> f,
    std::vector<double> singular_arcs = {},
    std::optional<double> integrability_p = std::nullopt) {
  BoundaryData b;
  b.domain = d;
  b.value = std::move(f);
  b.singular_arcs = std::move(singular_arcs);
  b.integrability_p = integrability_p;
  auto cache = std::make_shared<std::vector<double>>();
  cache->reserve(BoundaryData::kSampleCount);
  const double ds = d.total_arc_length / BoundaryData::kSampleCount;
  for (int k = 0; k < BoundaryData::kSampleCount; ++k)
    cache->push_back(b.value((k + 0.5) * ds));
  b.samples = std::move(cache);
  return b;
}

// Derived datum min(max(f, -cap), cap); bounded, so no singular arcs remain.
inline BoundaryData capped(const BoundaryData& f, double cap) {
  BoundaryData b;
  b.domain = f.domain;
  auto base = f.value;
  b.value = [base, cap](double s) {
    double v = base(s);
    if (std::isnan(v)) return 0.0;
    return std::clamp(v, -cap, cap);
  };
  b.integrability_p = std::nullopt;
  auto cache = std::make_shared<std::vector<double>>(*f.samples);
  for (double& v : *cache) v = std::isnan(v) ? 0.0 : std::clamp(v, -cap, cap);
  b.samples = std::move(cache);
  return b;
}

inline BoundaryData positive_part(const BoundaryData& f) {
  BoundaryData b;
  b.domain = f.domain;
  auto base = f.value;
  b.value = [base](double s) { return std::max(base(s), 0.0); };
  b.singular_arcs = f.singular_arcs;
  b.integrability_p = f.integrability_p;
  auto cache = std::make_shared<std::vector<double>>(*f.samples);
  for (double& v : *cache) v = std::max(v, 0.0);
  b.samples = std::move(cache);
  return b;
}

inline BoundaryData negative_part(const BoundaryData& f) {
  BoundaryData b;
  b.domain = f.domain;
  auto base = f.value;
  b.value = [base](double s) { return std::max(-base(s), 0.0); };
  b.singular_arcs = f.singular_arcs;
  b.integrability_p = f.integrability_p;
  auto cache = std::make_shared<std::vector<double>>(*f.samples);
  for (double& v : *cache) v = std::max(-v, 0.0);
  b.samples = std::move(cache);
  return b;
}

// --- built-in data families ------------------------------------------------

inline BoundaryData boundary_constant(const Domain& d, double c) {
  return make_boundary_data(d, [c](double) { return c; });
}

// Indicator-style step in the x coordinate of the boundary point:
// f = high where x >= threshold, low elsewhere.
inline BoundaryData boundary_step_x(const Domain& d, double threshold,
                                    double high = 1.0, double low = 0.0) {
  Domain dom = d;
  auto f = [dom, threshold, high, low](double s) {
    return boundary_point_at(dom, s).position.x >= threshold ? high : low;
  };
  return make_boundary_data(d, f);
}

// Decreasing power-law profile x^(-1 + 1/n) read off the x coordinate of the
// boundary point; blows up where the boundary touches { x = 0 }.
inline BoundaryData boundary_power_law(const Domain& d, int n) {
  if (n < 2) throw Error(Errc::out_of_range, "power-law index must be >= 2");
  Domain dom = d;
  const double expo = -1.0 + 1.0 / n;
  auto f = [dom, expo](double s) {
    double x = std::max(boundary_point_at(dom, s).position.x, 0.0);
    return std::pow(x, expo);
  };
  std::vector<double> singular;
  for (const Edge& e : d.edges) {
    if (std::abs(e.a.x) <= 1e-9 * d.coord_scale) {
      singular.push_back(e.arc0);
      if (e.arc0 == 0.0) singular.push_back(d.total_arc_length);
    }
  }
  // ||f||_p finite exactly for p < n/(n-1) when the contact is a vertex
  return make_boundary_data(d, f, singular, double(n) / (n - 1));
}

// Piecewise-linear datum in arc length through (s_i, v_i), cyclic in s.
inline BoundaryData boundary_piecewise_linear(
    const Domain& d, std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2)
    throw Error(Errc::out_of_range, "need at least two control points");
  std::sort(pts.begin(), pts.end());
  const double L = d.total_arc_length;
  for (const auto& [s, v] : pts) {
    (void)v;
    if (s < 0 || s >= L)
      throw Error(Errc::out_of_range, "control point outside [0, L)");
  }
  auto f = [pts, L](double s) {
    auto it = std::upper_bound(pts.begin(), pts.end(),
                               std::make_pair(s, std::numeric_limits<double>::infinity()));
    double s0, v0, s1, v1;
    if (it == pts.begin() || it == pts.end()) {
      s0 = pts.back().first;
      v0 = pts.back().second;
      s1 = pts.front().first + L;
      v1 = pts.front().second;
      if (s < s0) s += L;
    } else {
      s0 = (it - 1)->first;
      v0 = (it - 1)->second;
      s1 = it->first;
      v1 = it->second;
    }
    double w = (s1 > s0) ? (s - s0) / (s1 - s0) : 0.0;
    return v0 + w * (v1 - v0);
  };
  return make_boundary_data(d, f);
}

inline double ess_sup(const BoundaryData& f) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : *f.samples) hi = std::max(hi, v);
  return hi;
}

// Arc-length measure of { s : f(s) >= t } by the composite midpoint rule.
inline double trace_level_measure(const BoundaryData& f, double t) {
  const double ds = f.domain.total_arc_length / BoundaryData::kSampleCount;
  std::int64_t count = 0;
  for (double v : *f.samples)
    if (v >= t) ++count;
  return count * ds;
}

// A level is a plateau of f when { f = t } has positive arc measure; those
// levels are excluded from trace-coupled checks.
inline bool is_plateau_level(const BoundaryData& f, double t,
                             double delta = 1e-6) {
  const double L = f.domain.total_arc_length;
  const double ds = L / BoundaryData::kSampleCount;
  std::int64_t count = 0;
  for (double v : *f.samples)
    if (std::abs(v - t) <= delta) ++count;
  return count * ds > 10.0 * delta * L;
}

namespace detail {

// Composite midpoint rule over the boundary for a given arc integrand, with
// geometric refinement toward the listed singular arc positions. `stage`
// controls both the base resolution and the grading depth.
inline double arc_midpoint_pass(const Domain& d,
                                const std::function<double(double)>& g,
                                const std::vector<double>& singular,
                                int stage) {
  const double L = d.total_arc_length;
  const std::int64_t n = 4096ll << stage;
  const double ds = L / n;
  const int depth = 14 + 4 * stage;
  auto near_singular = [&](double a, double b) {
    for (double s : singular)
      if (s >= a - ds && s <= b + ds) return s;
    return std::numeric_limits<double>::quiet_NaN();
  };
  // geometric bisection of [lo, hi] toward one endpoint
  auto graded = [&](double lo, double hi, bool toward_left) {
    double sum = 0.0;
    for (int l = 0; l < depth; ++l) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;  // interval collapsed to fp width
      if (toward_left) {
        sum += g(0.5 * (mid + hi)) * (hi - mid);
        hi = mid;
      } else {
        sum += g(0.5 * (lo + mid)) * (mid - lo);
        lo = mid;
      }
    }
    // innermost cell; a non-finite sample here sits on the singular point
    // itself and the cell is geometrically negligible, so it is dropped
    double tail = g(0.5 * (lo + hi)) * (hi - lo);
    return std::isfinite(tail) ? sum + tail : sum;
  };
  double sum = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double a = k * ds, b = (k + 1) * ds;
    double s_star = near_singular(a, b);
    if (std::isnan(s_star)) {
      sum += g(0.5 * (a + b)) * ds;
    } else if (s_star > a && s_star < b) {
      sum += graded(a, s_star, false) + graded(s_star, b, true);
    } else {
      sum += graded(a, b, s_star <= a);
    }
  }
  return sum;
}

struct StagedIntegral {
  double value = 0.0;
  bool divergent = false;
};

// Run refinement stages until the integral stabilizes. Divergence is flagged
// when three consecutive doublings each grow the value by more than 10%, or
// when a non-finite sample appears.
inline StagedIntegral staged_arc_integral(
    const Domain& d, const std::function<double(double)>& g,
    const std::vector<double>& singular, int max_stage = 6,
    double rel_tol = 1e-5) {
  double prev = 0.0;
  int growth_streak = 0;
  for (int stage = 0; stage <= max_stage; ++stage) {
    double cur = arc_midpoint_pass(d, g, singular, stage);
    if (!std::isfinite(cur)) return {cur, true};
    if (stage > 0) {
      if (cur > 1.1 * prev) {
        if (++growth_streak >= 3) return {cur, true};
      } else {
        growth_streak = 0;
        if (std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300))
          return {cur, false};
      }
    }
    prev = cur;
  }
  return {prev, growth_streak > 0};
}

}  // namespace detail

// (integral of |f|^p dH^1)^(1/p). Throws Divergent when refinement keeps
// growing the partial sums (the datum fails to lie in L^p).
inline double boundary_lp_norm(const BoundaryData& f, double p) {
  if (!(p >= 1.0)) throw Error(Errc::out_of_range, "p must be >= 1");
  auto base = f.value;
  auto g = [base, p](double s) { return std::pow(std::abs(base(s)), p); };
  auto r = detail::staged_arc_integral(f.domain, g, f.singular_arcs);
  if (r.divergent)
    throw Error(Errc::divergent, "boundary norm fails to converge under refinement");
  return std::pow(r.value, 1.0 / p);
}

// Integral over the boundary of phi(x, nu) * |f| (used by the variation
// estimate); expects data that is already capped/bounded.
inline double weighted_boundary_integral(const BoundaryData& f,
                                         const MetricIntegrand& m) {
  const Domain& d = f.domain;
  auto base = f.value;
  auto g = [&d, base, &m](double s) {
    BoundaryPoint bp = boundary_point_at(d, s);
    return evaluate(m, bp.position, bp.outward_normal) * std::abs(base(s));
  };
  auto r = detail::staged_arc_integral(d, g, f.singular_arcs);
  if (r.divergent)
    throw Error(Errc::divergent, "boundary integral fails to converge");
  return r.value;
}

// Weak-L^p majorant of the trace level measure raised to 1/(N-1):
// ||f_+||_p^{p/(N-1)} / t^{p/(N-1)}.
inline double chebyshev_majorant(const BoundaryData& f, double p, double t,
                                 int N) {
  if (!(t > 0)) throw Error(Errc::out_of_range, "t must be positive");
  double np = boundary_lp_norm(positive_part(f), p);
  return std::pow(np, p / (N - 1)) / std::pow(t, p / (N - 1));
}

// ---------------------------------------------------------------------------
// Superlevel sets and contours

struct ContourSegment {
  Vec2 a, b;
  Vec2 normal;  // unit, points toward { u < t }
};

struct LevelSet {
  double level = 0;
  RegionMask region;                        // cells with u >= level
  std::vector<ContourSegment> segments;     // marching-squares interface
  std::vector<std::vector<Vec2>> contour;   // segments chained to polylines
};

namespace detail {

inline Vec2 ms_interp(Vec2 pa, double va, Vec2 pb, double vb, double t) {
  double s = (t - va) / (vb - va);
  return pa + s * (pb - pa);
}

inline void assemble_polylines(const std::vector<ContourSegment>& segs,
                               std::vector<std::vector<Vec2>>& out) {
  using Key = std::pair<double, double>;
  auto key = [](Vec2 p) { return Key{p.x, p.y}; };
  std::map<Key, std::vector<std::size_t>> at_node;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    at_node[key(segs[k].a)].push_back(k);
    at_node[key(segs[k].b)].push_back(k);
  }
  std::vector<bool> used(segs.size(), false);
  auto walk = [&](std::size_t start, bool from_a) {
    std::vector<Vec2> path;
    std::size_t cur = start;
    Vec2 tail = from_a ? segs[cur].a : segs[cur].b;
    path.push_back(tail);
    for (;;) {
      used[cur] = true;
      Vec2 next = (key(tail) == key(segs[cur].a)) ? segs[cur].b : segs[cur].a;
      path.push_back(next);
      tail = next;
      auto it = at_node.find(key(tail));
      std::size_t follow = segs.size();
      if (it != at_node.end())
        for (std::size_t c : it->second)
          if (!used[c]) {
            follow = c;
            break;
          }
      if (follow == segs.size()) break;
      cur = follow;
    }
    return path;
  };
  // open chains first (endpoints of degree 1, in node order), then loops
  for (const auto& [node, ks] : at_node) {
    if (ks.size() != 1) continue;
    std::size_t k = ks[0];
    if (used[k]) continue;
    bool from_a = key(segs[k].a) == node;
    out.push_back(walk(k, from_a));
  }
  for (std::size_t k = 0; k < segs.size(); ++k)
    if (!used[k]) out.push_back(walk(k, true));
}

}  // namespace detail

// Superlevel set { u >= t } with the closed-set convention: cells whose value
// equals t belong to the region. The contour is the marching-squares
// interface over blocks of four masked cells, with linear interpolation.
inline LevelSet superlevel_set(const GridFunction& u, double t) {
  LevelSet ls;
  ls.level = t;
  ls.region.grid = u.grid;
  ls.region.inside.assign(u.grid.size(), 0);
  const GridSpec& g = u.grid;
  for (std::size_t k = 0; k < g.size(); ++k)
    ls.region.inside[k] = (u.mask.inside[k] && u.values[k] >= t) ? 1 : 0;

  for (int j = 0; j + 1 < g.ny; ++j) {
    for (int i = 0; i + 1 < g.nx; ++i) {
      if (!(u.masked(i, j) && u.masked(i + 1, j) && u.masked(i, j + 1) &&
            u.masked(i + 1, j + 1)))
        continue;
      const double v00 = u.at(i, j), v10 = u.at(i + 1, j);
      const double v01 = u.at(i, j + 1), v11 = u.at(i + 1, j + 1);
      int code = (v00 >= t ? 1 : 0) | (v10 >= t ? 2 : 0) | (v11 >= t ? 4 : 0) |
                 (v01 >= t ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const Vec2 p00 = g.cell_center(i, j), p10 = g.cell_center(i + 1, j);
      const Vec2 p01 = g.cell_center(i, j + 1),
                 p11 = g.cell_center(i + 1, j + 1);
      // crossing points on the four block edges (canonical corner order so
      // shared edges of adjacent blocks produce bit-identical points)
      auto cross_pt = [&](int edge) -> Vec2 {
        switch (edge) {
          case 0: return detail::ms_interp(p00, v00, p10, v10, t);  // bottom
          case 1: return detail::ms_interp(p10, v10, p11, v11, t);  // right
          case 2: return detail::ms_interp(p01, v01, p11, v11, t);  // top
          default: return detail::ms_interp(p00, v00, p01, v01, t); // left
        }
      };
      Vec2 grad{((v10 - v00) + (v11 - v01)) * 0.5,
                ((v01 - v00) + (v11 - v10)) * 0.5};
      auto emit = [&](int ea, int eb) {
        ContourSegment s;
        s.a = cross_pt(ea);
        s.b = cross_pt(eb);
        Vec2 dirv = s.b - s.a;
        double len = norm(dirv);
        if (!(len > 0)) return;
        Vec2 n = perp_cw({dirv.x / len, dirv.y / len});
        if (dot(n, grad) > 0) n = {-n.x, -n.y};
        s.normal = n;
        ls.segments.push_back(s);
      };
      switch (code) {
        case 1: emit(3, 0); break;
        case 2: emit(0, 1); break;
        case 3: emit(3, 1); break;
        case 4: emit(1, 2); break;
        case 6: emit(0, 2); break;
        case 7: emit(3, 2); break;
        case 8: emit(2, 3); break;
        case 9: emit(0, 2); break;
        case 11: emit(1, 2); break;
        case 12: emit(3, 1); break;
        case 13: emit(0, 1); break;
        case 14: emit(3, 0); break;
        case 5:
          if (0.25 * (v00 + v10 + v01 + v11) >= t) {
            emit(0, 1);
            emit(2, 3);
          } else {
            emit(3, 0);
            emit(1, 2);
          }
          break;
        case 10:
          if (0.25 * (v00 + v10 + v01 + v11) >= t) {
            emit(3, 0);
            emit(1, 2);
          } else {
            emit(0, 1);
            emit(2, 3);
          }
          break;
        default: break;
      }
    }
  }
  detail::assemble_polylines(ls.segments, ls.contour);
  return ls;
}

inline double region_measure(const LevelSet& ls) {
  return ls.region.count() * ls.region.grid.h * ls.region.grid.h;
}

// Length of the contour inside the open disc B(x, r).
inline double contour_length_in_disc(const LevelSet& ls, Vec2 x, double r) {
  double total = 0.0;
  for (const ContourSegment& s : ls.segments) {
    Vec2 d = s.b - s.a, w = s.a - x;
    double A = dot(d, d);
    if (A == 0.0) continue;
    double B = 2.0 * dot(w, d);
    double C = dot(w, w) - r * r;
    double disc = B * B - 4.0 * A * C;
    if (disc <= 0.0) continue;
    double sq = std::sqrt(disc);
    double t0 = std::max((-B - sq) / (2.0 * A), 0.0);
    double t1 = std::min((-B + sq) / (2.0 * A), 1.0);
    if (t1 > t0) total += (t1 - t0) * std::sqrt(A);
  }
  return total;
}

// phi-perimeter of the level set inside the domain: sum over contour
// segments of phi(midpoint, normal) * length.
inline double perimeter(const LevelSet& ls, const MetricIntegrand& m) {
  double sum = 0.0;
  for (const ContourSegment& s : ls.segments) {
    Vec2 mid = 0.5 * (s.a + s.b);
    sum += evaluate(m, mid, s.normal) * norm(s.b - s.a);
  }
  return sum;
}

// Perimeter of the level set glued to the zero extension outside the domain:
// interior (Euclidean) perimeter plus the arc measure of { f >= t }.
inline double glued_perimeter(const LevelSet& ls, const BoundaryData& f) {
  return perimeter(ls, euclidean_integrand()) +
         trace_level_measure(f, ls.level);
}

// Sharp-constant isoperimetric deficit C_N * P - |E|^{(N-1)/N}; nonnegative
// (up to measurement error) for every set of finite perimeter.
inline double isoperimetric_deficit(double area, double glued_perim, int N) {
  if (area < 0 || glued_perim < 0)
    throw Error(Errc::negative_input, "area and perimeter must be nonnegative");
  if (area == 0 && glued_perim == 0) return 0.0;
  const double cn = 1.0 / (N * std::pow(unit_ball_volume(N), 1.0 / N));
  return cn * glued_perim - std::pow(area, double(N - 1) / N);
}

// ---------------------------------------------------------------------------
// Total variation and integral identities

// phi-total variation by forward differences: sum over cells of
// phi(center, grad_h u) h^2, one-sided at the mask boundary (a missing
// neighbour contributes a zero component).
inline double phi_total_variation(const GridFunction& u,
                                  const MetricIntegrand& m) {
  const GridSpec& g = u.grid;
  if (u.mask.count() == 0) throw Error(Errc::empty_mask, "no masked cells");
  double sum = 0.0;
  const double h = g.h;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!u.masked(i, j)) continue;
      double dx = 0.0, dy = 0.0;
      if (i + 1 < g.nx && u.masked(i + 1, j))
        dx = (u.at(i + 1, j) - u.at(i, j)) / h;
      if (j + 1 < g.ny && u.masked(i, j + 1))
        dy = (u.at(i, j + 1) - u.at(i, j)) / h;
      if (dx != 0.0 || dy != 0.0)
        sum += evaluate(m, g.cell_center(i, j), {dx, dy}) * h * h;
    }
  return sum;
}

namespace detail {

struct LevelGrid {
  std::vector<double> t;   // quadrature nodes
  std::vector<double> dt;  // node weights
};

// Uniform level grid, or geometric when the (positive) values span more
// than two decades.
inline LevelGrid make_level_grid(double lo, double hi, int n) {
  LevelGrid gr;
  bool geometric = lo > 0 && hi / lo > 100.0;
  if (geometric) {
    double r = std::pow(hi / lo, 1.0 / n);
    double a = lo;
    for (int k = 0; k < n; ++k) {
      double b = (k + 1 == n) ? hi : a * r;
      gr.t.push_back(std::sqrt(a * b));
      gr.dt.push_back(b - a);
      a = b;
    }
  } else {
    double dt = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      gr.t.push_back(lo + (k + 0.5) * dt);
      gr.dt.push_back(dt);
    }
  }
  return gr;
}

}  // namespace detail

// Relative gap between the total variation and the integral over levels of
// the perimeters of superlevel sets. Zero for (near-)constant functions.
inline double coarea_residual(const GridFunction& u, int levels) {
  if (levels < 16) throw Error(Errc::out_of_range, "need at least 16 levels");
  const MetricIntegrand euclid = euclidean_integrand();
  double tv = phi_total_variation(u, euclid);
  auto [lo, hi] = value_range(u);
  if (!(hi > lo) || tv <= 1e-14 * (1.0 + std::abs(hi))) return 0.0;
  detail::LevelGrid gr = detail::make_level_grid(lo, hi, levels);
  double integral = 0.0;
  for (std::size_t k = 0; k < gr.t.size(); ++k)
    integral += perimeter(superlevel_set(u, gr.t[k]), euclid) * gr.dt[k];
  return std::abs(tv - integral) / std::max(tv, 1e-300);
}

// Direct cell-sum q-norm of the positive part (oracle side of the layer-cake
// identity).
inline double direct_positive_lq_norm(const GridFunction& u, double q) {
  double sum = 0.0;
  const double h2 = u.grid.h * u.grid.h;
  for (std::size_t k = 0; k < u.values.size(); ++k)
    if (u.mask.inside[k] && u.values[k] > 0)
      sum += std::pow(u.values[k], q) * h2;
  return std::pow(sum, 1.0 / q);
}

// Layer-cake q-norm of the positive part: (q * sum_k t_k^{q-1} |{u >= t_k}|
// dt_k)^{1/q} over a level grid spanning (0, max u].
inline double layer_cake_norm(const GridFunction& u, double q, int levels) {
  if (!(q >= 1.0)) throw Error(Errc::out_of_range, "q must be >= 1");
  auto [lo, hi] = value_range(u);
  (void)lo;
  if (!(hi > 0)) return 0.0;
  double min_pos = hi;
  for (std::size_t k = 0; k < u.values.size(); ++k)
    if (u.mask.inside[k] && u.values[k] > 0)
      min_pos = std::min(min_pos, u.values[k]);
  detail::LevelGrid gr;
  if (min_pos > 0 && hi / min_pos > 100.0) {
    gr = detail::make_level_grid(min_pos, hi, levels);
    gr.t.insert(gr.t.begin(), 0.5 * min_pos);
    gr.dt.insert(gr.dt.begin(), min_pos);
  } else {
    gr = detail::make_level_grid(0.0, hi, levels);
  }
  const double h2 = u.grid.h * u.grid.h;
  double sum = 0.0;
  for (std::size_t k = 0; k < gr.t.size(); ++k) {
    const double t = gr.t[k];
    std::int64_t count = 0;
    for (std::size_t c = 0; c < u.values.size(); ++c)
      if (u.mask.inside[c] && u.values[c] >= t) ++count;
    sum += std::pow(t, q - 1.0) * (count * h2) * gr.dt[k];
  }
  return std::pow(q * sum, 1.0 / q);
}

}  // namespace algp
