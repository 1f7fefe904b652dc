#pragma once
// Small shared pieces: 2D vectors, error codes, formatting and hashing
// helpers used across the library.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace algp {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline Vec2 operator*(Vec2 v, double s) { return s * v; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) {
  double n = norm(v);
  return {v.x / n, v.y / n};
}
// Rotation by -90 degrees; maps a CCW edge tangent to the outward normal.
inline Vec2 perp_cw(Vec2 v) { return {v.y, -v.x}; }

enum class Errc {
  too_few_vertices,
  non_convex,
  degenerate_edge,
  out_of_range,
  empty_erosion,
  not_nested,
  grid_too_small,
  outside_domain,
  unsupported_family,
  empty_mask,
  divergent,
  non_monotone,
  step_size_violation,
  diverged,
  radius_too_large,
  negative_input,
  bad_bracket,
  config_invalid,
  io_failure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::too_few_vertices: return "TooFewVertices";
    case Errc::non_convex: return "NonConvex";
    case Errc::degenerate_edge: return "DegenerateEdge";
    case Errc::out_of_range: return "OutOfRange";
    case Errc::empty_erosion: return "EmptyErosion";
    case Errc::not_nested: return "NotNested";
    case Errc::grid_too_small: return "GridTooSmall";
    case Errc::outside_domain: return "OutsideDomain";
    case Errc::unsupported_family: return "UnsupportedFamily";
    case Errc::empty_mask: return "EmptyMask";
    case Errc::divergent: return "Divergent";
    case Errc::non_monotone: return "NonMonotone";
    case Errc::step_size_violation: return "StepSizeViolation";
    case Errc::diverged: return "Diverged";
    case Errc::radius_too_large: return "RadiusTooLarge";
    case Errc::negative_input: return "NegativeInput";
    case Errc::bad_bracket: return "BadBracket";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::io_failure: return "IOFailure";
  }
  return "Unknown";
}

struct Error : std::runtime_error {
  Errc code;
  Error(Errc c, const std::string& msg)
      : std::runtime_error(std::string(errc_name(c)) + ": " + msg), code(c) {}
};

// Fixed 12-significant-digit formatting; all emitted files use this so that
// identical inputs produce byte-identical outputs.
inline std::string fmt_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Midpoints of a uniform partition of [lo, hi] into n intervals.
inline std::vector<double> midpoints(double lo, double hi, int n) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  const double dt = (hi - lo) / n;
  for (int k = 0; k < n; ++k) out.push_back(lo + (k + 0.5) * dt);
  return out;
}

// Volume of the unit ball in R^k.
inline double unit_ball_volume(int k) {
  return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace algp
