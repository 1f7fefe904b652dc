#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "algp/geometry.hpp"

using namespace algp;

namespace {

const double kSqrt2 = std::sqrt(2.0);

// Random polygon with vertices in convex position on a jittered circle.
Domain random_convex_polygon(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> jitter(0.05, 0.95);
  std::uniform_real_distribution<double> radius(0.8, 1.6);
  std::uniform_real_distribution<double> shift(-0.5, 0.5);
  const double r = radius(rng);
  const Vec2 c{shift(rng), shift(rng)};
  std::vector<Vec2> pts;
  for (int k = 0; k < n; ++k) {
    double theta = 2.0 * kPi * (k + jitter(rng)) / n;
    pts.push_back({c.x + r * std::cos(theta), c.y + r * std::sin(theta)});
  }
  return build_convex_polygon(pts);
}

double max_vertex_to_boundary(const Domain& a, const Domain& b) {
  double worst = 0;
  for (const Vec2& v : a.vertices) {
    double best = std::numeric_limits<double>::infinity();
    for (const Edge& e : b.edges)
      best = std::min(best, point_segment_distance(v, e.a, e.b));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

TEST_CASE("build_convex_polygon basic examples") {
  Domain sq = build_convex_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  CHECK(sq.total_arc_length == Catch::Approx(4.0));
  CHECK(sq.area == Catch::Approx(1.0));

  Domain dia = build_convex_polygon({{0, 0}, {1, -1}, {2, 0}, {1, 1}});
  CHECK(dia.total_arc_length == Catch::Approx(4.0 * kSqrt2));

  CHECK_THROWS_AS(build_convex_polygon({{0, 0}, {1, 1}, {2, 2}}), Error);
  CHECK_THROWS_AS(build_convex_polygon({{0, 0}, {1, 0}}), Error);
  // clockwise input is normalized, concave input is rejected
  Domain cw = build_convex_polygon({{0, 1}, {1, 1}, {1, 0}, {0, 0}});
  CHECK(cw.area == Catch::Approx(1.0));
  CHECK_THROWS_AS(
      build_convex_polygon({{0, 0}, {2, 0}, {2, 2}, {1, 0.5}, {0, 2}}), Error);
  CHECK_THROWS_AS(build_convex_polygon({{0, 0}, {0, 0}, {1, 0}, {1, 1}}),
                  Error);
}

TEST_CASE("diamond_domain geometry") {
  Domain d = diamond_domain();
  CHECK(d.area == Catch::Approx(2.0));
  CHECK(contains(d, {1, 0}));
  CHECK_FALSE(contains(d, {0.5, 0.9}));  // |0.5-1| + 0.9 = 1.4 > 1
  CHECK_FALSE(contains(d, {0, 0}));      // vertex, not interior
}

TEST_CASE("contains is strict") {
  Domain sq = unit_square_domain();
  CHECK_FALSE(contains(sq, {2, 2}));
  CHECK_FALSE(contains(sq, {0.5, 0.0}));  // on an edge
  CHECK(contains(sq, {0.5, 0.5}));
  Domain d = diamond_domain();
  CHECK_FALSE(contains(d, {0.5, 0.5}));  // on edge x+y=... |x-1|+|y|=1
  CHECK(contains(d, {0.5, 0.4999}));
}

TEST_CASE("boundary_point_at positions and normals") {
  Domain sq = unit_square_domain();
  BoundaryPoint p = boundary_point_at(sq, 0.5);
  CHECK(p.position.x == Catch::Approx(0.5));
  CHECK(p.position.y == Catch::Approx(0.0));
  CHECK(p.outward_normal.x == Catch::Approx(0.0).margin(1e-15));
  CHECK(p.outward_normal.y == Catch::Approx(-1.0));

  Domain d = diamond_domain();
  BoundaryPoint q = boundary_point_at(d, kSqrt2 / 2);
  CHECK(q.position.x == Catch::Approx(0.5));
  CHECK(q.position.y == Catch::Approx(-0.5));
  // outward normal of the lower-left edge (0,0)->(1,-1); the interior lies
  // on the side x+y > 0, so the normal points along -(1,1)/sqrt(2)
  CHECK(q.outward_normal.x == Catch::Approx(-1.0 / kSqrt2));
  CHECK(q.outward_normal.y == Catch::Approx(-1.0 / kSqrt2));

  CHECK_THROWS_AS(boundary_point_at(sq, 4.0), Error);
  CHECK_THROWS_AS(boundary_point_at(sq, -0.1), Error);

  // vertex tie-break: the edge starting at the vertex provides the normal
  BoundaryPoint v = boundary_point_at(sq, 1.0);
  CHECK(v.outward_normal.x == Catch::Approx(1.0));
  CHECK(v.outward_normal.y == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("erode basic examples") {
  Domain sq = unit_square_domain();
  Domain in = erode(sq, 0.25);
  CHECK(in.area == Catch::Approx(0.25));
  CHECK(in.bbox_min.x == Catch::Approx(0.25));
  CHECK(in.bbox_max.y == Catch::Approx(0.75));

  Domain d = diamond_domain();
  Domain din = erode(d, 0.25);
  CHECK(din.bbox_min.x == Catch::Approx(0.25 * kSqrt2));
  CHECK(din.bbox_min.y == Catch::Approx(-(1.0 - 0.25 * kSqrt2)));

  CHECK_THROWS_AS(erode(sq, 0.6), Error);  // inradius is 0.5
  CHECK_THROWS_MATCHES(erode(sq, 0.5), Error, Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.code == Errc::empty_erosion; }));
}

TEST_CASE("boundary_distance examples") {
  Domain sq = unit_square_domain();
  Domain in = build_convex_polygon({{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}});
  CHECK(boundary_distance(sq, in) == Catch::Approx(0.25));

  Domain d = diamond_domain();
  CHECK(boundary_distance(d, erode(d, 0.1)) == Catch::Approx(0.1).epsilon(1e-9));

  Domain overlap = build_convex_polygon({{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}});
  CHECK_THROWS_AS(boundary_distance(sq, overlap), Error);
}

TEST_CASE("erosion composes and preserves offset distance") {
  std::mt19937 rng(12345);
  for (int iter = 0; iter < 40; ++iter) {
    Domain d = random_convex_polygon(rng, 5 + iter % 6);
    std::uniform_real_distribution<double> dd(0.02, 0.12);
    double d1 = dd(rng), d2 = dd(rng);
    Domain a = erode(erode(d, d1), d2);
    Domain b = erode(d, d1 + d2);
    CHECK(std::abs(a.area - b.area) < 1e-9);
    CHECK(max_vertex_to_boundary(a, b) < 1e-9);
    CHECK(max_vertex_to_boundary(b, a) < 1e-9);
    CHECK(boundary_distance(d, b) == Catch::Approx(d1 + d2).epsilon(1e-9));
  }
}

TEST_CASE("rasterize measures area to O(h)") {
  Domain d = diamond_domain();
  for (double h : {0.1, 0.05, 0.02, 0.01}) {
    GridSpec g = grid_for_domain(d, h);
    RegionMask m = rasterize(d, g);
    double est = m.count() * h * h;
    CHECK(std::abs(est - d.area) <= 2.0 * h * d.total_arc_length);
  }
  GridSpec coarse = grid_for_domain(d, 0.01);
  RegionMask m = rasterize(d, coarse);
  CHECK(std::abs(m.count() * 0.01 * 0.01 - 2.0) <= 0.12);
}

TEST_CASE("rasterize coarse square band") {
  Domain sq = unit_square_domain();
  GridSpec g{0.5, {-1.0, -1.0}, 6, 6};
  RegionMask m = rasterize(sq, g);
  double est = m.count() * 0.25;
  CHECK(est >= 0.5);
  CHECK(est <= 1.5);
}

TEST_CASE("rasterize rejects undersized grids") {
  Domain d = diamond_domain();
  GridSpec g{0.5, {0.0, -1.0}, 3, 3};
  CHECK_THROWS_MATCHES(rasterize(d, g), Error, Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.code == Errc::grid_too_small; }));
}

TEST_CASE("boundary walk reproduces the total arc length") {
  std::mt19937 rng(777);
  for (int iter = 0; iter < 10; ++iter) {
    Domain d = random_convex_polygon(rng, 4 + iter);
    std::vector<double> s;
    for (const Edge& e : d.edges) s.push_back(e.arc0);
    const int kSteps = 1000;
    for (int k = 0; k < kSteps; ++k)
      s.push_back(d.total_arc_length * k / kSteps);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    double walked = 0;
    for (std::size_t k = 0; k + 1 < s.size(); ++k)
      walked += norm(boundary_point_at(d, s[k + 1]).position -
                     boundary_point_at(d, s[k]).position);
    walked += norm(boundary_point_at(d, 0.0).position -
                   boundary_point_at(d, s.back()).position);
    CHECK(walked == Catch::Approx(d.total_arc_length).epsilon(1e-9));
  }
}

TEST_CASE("closest_boundary_point agrees with erosion depth") {
  Domain d = diamond_domain();
  Domain in = erode(d, 0.3);
  for (const Vec2& v : in.vertices)
    CHECK(dist_to_boundary(d, v) == Catch::Approx(0.3).epsilon(1e-9));
  auto cbp = closest_boundary_point(d, {1.0, 0.0});
  CHECK(cbp.dist == Catch::Approx(1.0 / kSqrt2));
}
