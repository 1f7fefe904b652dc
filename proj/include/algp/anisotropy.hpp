#pragma once
// Metric integrands phi(x, xi): evaluation, polar functions, ellipticity
// bounds, and exact projection onto the polar unit ball (the constraint set
// of the dual total-variation formulation).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "algp/core.hpp"
#include "algp/geometry.hpp"

namespace algp {

enum class IntegrandFamily { euclidean, weighted, axis_norm };

// Scalar weight field for the weighted family. Closed-form so it can be
// evaluated anywhere; `reciprocal` marks the polar of a weighted integrand.
struct WeightField {
  enum class Kind { constant, one_plus_quarter_x2 } kind = Kind::constant;
  double value = 1.0;     // for Kind::constant
  bool reciprocal = false;

  double operator()(Vec2 p) const {
    double w = 1.0;
    switch (kind) {
      case Kind::constant: w = value; break;
      case Kind::one_plus_quarter_x2: w = 1.0 + 0.25 * p.x * p.x; break;
    }
    return reciprocal ? 1.0 / w : w;
  }
};

struct MetricIntegrand {
  IntegrandFamily family = IntegrandFamily::euclidean;
  WeightField weight;          // weighted family only
  double p = 2.0;              // axis_norm family: 1, 2, or infinity
  double lambda = 1.0;         // declared ellipticity lower bound
  double Lambda = 1.0;         // declared ellipticity upper bound

  bool is_isotropic() const { return family == IntegrandFamily::euclidean; }
  bool has_constant_coefficients() const {
    return family != IntegrandFamily::weighted ||
           weight.kind == WeightField::Kind::constant;
  }
};

inline MetricIntegrand euclidean_integrand() { return {}; }

inline MetricIntegrand weighted_integrand(WeightField w, double lambda,
                                          double Lambda) {
  MetricIntegrand m;
  m.family = IntegrandFamily::weighted;
  m.weight = w;
  m.lambda = lambda;
  m.Lambda = Lambda;
  return m;
}

inline MetricIntegrand constant_weight_integrand(double c) {
  WeightField w;
  w.value = c;
  return weighted_integrand(w, c, c);
}

// Weight 1 + x^2/4 with exact ellipticity bounds on the given domain
// (the field is monotone in x^2, so extremes sit at the x-range endpoints).
inline MetricIntegrand quarter_x2_weight_integrand(const Domain& d) {
  WeightField w;
  w.kind = WeightField::Kind::one_plus_quarter_x2;
  auto f = [](double x) { return 1.0 + 0.25 * x * x; };
  double lo = d.bbox_min.x, hi = d.bbox_max.x;
  double wmax = std::max(f(lo), f(hi));
  double wmin = (lo <= 0.0 && hi >= 0.0) ? 1.0 : std::min(f(lo), f(hi));
  return weighted_integrand(w, wmin, wmax);
}

inline MetricIntegrand axis_norm_integrand(double p) {
  if (!(p == 1.0 || p == 2.0 || std::isinf(p)))
    throw Error(Errc::unsupported_family, "axis norm exponent must be 1, 2 or inf");
  MetricIntegrand m;
  m.family = IntegrandFamily::axis_norm;
  m.p = p;
  if (p == 2.0) {
    m.lambda = m.Lambda = 1.0;
  } else if (p == 1.0) {
    m.lambda = 1.0;
    m.Lambda = std::sqrt(2.0);
  } else {  // l-inf
    m.lambda = 1.0 / std::sqrt(2.0);
    m.Lambda = 1.0;
  }
  return m;
}

inline double evaluate(const MetricIntegrand& m, Vec2 x, Vec2 xi) {
  switch (m.family) {
    case IntegrandFamily::euclidean:
      return norm(xi);
    case IntegrandFamily::weighted:
      return m.weight(x) * norm(xi);
    case IntegrandFamily::axis_norm:
      if (m.p == 1.0) return std::abs(xi.x) + std::abs(xi.y);
      if (m.p == 2.0) return norm(xi);
      return std::max(std::abs(xi.x), std::abs(xi.y));
  }
  return 0.0;
}

struct PolarIntegrand {
  MetricIntegrand fn;              // the polar, usable as an integrand itself
  IntegrandFamily primal_family;   // family this is the polar of
};

inline PolarIntegrand polar(const MetricIntegrand& m) {
  PolarIntegrand out;
  out.primal_family = m.family;
  switch (m.family) {
    case IntegrandFamily::euclidean:
      out.fn = m;  // self-dual
      break;
    case IntegrandFamily::weighted: {
      MetricIntegrand q = m;
      q.weight.reciprocal = !m.weight.reciprocal;
      q.lambda = 1.0 / m.Lambda;
      q.Lambda = 1.0 / m.lambda;
      out.fn = q;
      break;
    }
    case IntegrandFamily::axis_norm: {
      double pd;
      if (m.p == 1.0)
        pd = std::numeric_limits<double>::infinity();
      else if (m.p == 2.0)
        pd = 2.0;
      else
        pd = 1.0;
      MetricIntegrand q = axis_norm_integrand(pd);
      out.fn = q;
      break;
    }
  }
  return out;
}

inline double evaluate(const PolarIntegrand& m, Vec2 x, Vec2 xi) {
  return evaluate(m.fn, x, xi);
}

namespace detail {
// Euclidean projection of z onto the l1 ball of radius 1 (2D closed form).
inline Vec2 project_l1_ball(Vec2 z) {
  double a = std::abs(z.x), b = std::abs(z.y);
  if (a + b <= 1.0) return z;
  double hi = std::max(a, b), lo = std::min(a, b);
  double theta = (hi - 1.0 >= lo) ? hi - 1.0 : 0.5 * (a + b - 1.0);
  auto shrink = [theta](double v) {
    double m = std::max(std::abs(v) - theta, 0.0);
    return v < 0 ? -m : m;
  };
  return {shrink(z.x), shrink(z.y)};
}
}  // namespace detail

// Projection onto { z : phi^0(x, z) <= 1 }. Exact for every supported
// family: radial scaling for Euclidean/weighted, componentwise clamping for
// the l-inf ball, soft-threshold shrinkage for the l1 ball.
inline Vec2 project_polar_ball(const MetricIntegrand& m, Vec2 x, Vec2 z) {
  switch (m.family) {
    case IntegrandFamily::euclidean: {
      double n = norm(z);
      return n <= 1.0 ? z : (1.0 / n) * z;
    }
    case IntegrandFamily::weighted: {
      double r = m.weight(x);  // polar ball is |z| <= w(x)
      double n = norm(z);
      return n <= r ? z : (r / n) * z;
    }
    case IntegrandFamily::axis_norm: {
      if (m.p == 1.0)  // polar ball is the l-inf ball
        return {std::clamp(z.x, -1.0, 1.0), std::clamp(z.y, -1.0, 1.0)};
      if (m.p == 2.0) {
        double n = norm(z);
        return n <= 1.0 ? z : (1.0 / n) * z;
      }
      return detail::project_l1_ball(z);  // polar ball of l-inf is l1
    }
  }
  return z;
}

// Empirical ellipticity bounds: min/max of phi(x, xi) over sampled points of
// the closed domain and unit directions. Vertices, edge midpoints, and the
// axis/diagonal directions are always included so the extremes of the
// supported families are hit exactly.
inline std::pair<double, double> ellipticity_bounds(const MetricIntegrand& m,
                                                    const Domain& d,
                                                    int samples) {
  std::vector<Vec2> xs;
  for (const Vec2& v : d.vertices) xs.push_back(v);
  for (const Edge& e : d.edges) xs.push_back(e.a + 0.5 * e.length * e.dir);
  int side = std::max(2, static_cast<int>(std::sqrt(double(samples))));
  for (int j = 0; j <= side; ++j)
    for (int i = 0; i <= side; ++i) {
      Vec2 p{d.bbox_min.x + (d.bbox_max.x - d.bbox_min.x) * i / side,
             d.bbox_min.y + (d.bbox_max.y - d.bbox_min.y) * j / side};
      if (contains(d, p)) xs.push_back(p);
    }
  std::vector<Vec2> dirs;
  const int ndir = std::max(8, samples);
  for (int k = 0; k < ndir; ++k) {
    double th = 2.0 * kPi * k / ndir;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  dirs.push_back({1, 0});
  dirs.push_back({0, 1});
  dirs.push_back({1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)});
  dirs.push_back({1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const Vec2& x : xs)
    for (const Vec2& xi : dirs) {
      double v = evaluate(m, x, xi);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  return {lo, hi};
}

inline std::pair<double, double> ellipticity_bounds(const PolarIntegrand& m,
                                                    const Domain& d,
                                                    int samples) {
  return ellipticity_bounds(m.fn, d, samples);
}

// Max over samples of | sup_{phi^0(x,z) <= 1} <z, xi> - phi(x, xi) |, the
// sup taken over an angular grid of the polar ball boundary. The grid size
// is divisible by 8 so the vertices of the polygonal balls are hit exactly.
inline double bipolar_residual(const MetricIntegrand& m, int samples,
                               int angular_grid = 3600) {
  PolarIntegrand q = polar(m);
  std::vector<Vec2> xs;
  const int nx = std::max(3, static_cast<int>(std::sqrt(double(samples))));
  for (int j = 0; j < nx; ++j)
    for (int i = 0; i < nx; ++i)
      xs.push_back({2.0 * (i + 0.5) / nx, -1.0 + 2.0 * (j + 0.5) / nx});
  std::vector<Vec2> dirs;
  const int ndir = std::max(8, samples / 4);
  for (int k = 0; k < ndir; ++k) {
    double th = 2.0 * kPi * (k + 0.37) / ndir;
    dirs.push_back({std::cos(th), std::sin(th)});
  }
  double worst = 0.0;
  for (const Vec2& x : xs) {
    // boundary of the polar ball: r(theta) = 1 / phi^0(x, e(theta))
    std::vector<Vec2> ring;
    ring.reserve(static_cast<std::size_t>(angular_grid));
    for (int k = 0; k < angular_grid; ++k) {
      double th = 2.0 * kPi * k / angular_grid;
      Vec2 e{std::cos(th), std::sin(th)};
      double r = 1.0 / evaluate(q, x, e);
      ring.push_back(r * e);
    }
    for (const Vec2& xi : dirs) {
      double sup = 0.0;
      for (const Vec2& z : ring) sup = std::max(sup, dot(z, xi));
      worst = std::max(worst, std::abs(sup - evaluate(m, x, xi)));
    }
  }
  return worst;
}

}  // namespace algp
