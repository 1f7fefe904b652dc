#pragma once
// Run configuration: JSON schema, validation, and construction of the
// domain / integrand / boundary-data objects it describes.

#include <json.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "algp/anisotropy.hpp"
#include "algp/bv.hpp"
#include "algp/core.hpp"
#include "algp/geometry.hpp"

namespace algp {

inline constexpr const char* kVersion = "0.1.0";

struct DomainSpec {
  std::string type = "diamond";  // diamond | square | hexagon | polygon
  std::vector<Vec2> vertices;    // polygon only
};

struct IntegrandSpec {
  std::string family = "euclidean";  // euclidean | weighted | axis_norm
  std::optional<double> weight;      // weighted: constant value
  std::optional<std::string> field;  // weighted: named builtin field
  std::optional<double> p;           // axis_norm: 1, 2, or "inf" via p<=0
};

struct BoundarySpec {
  std::string family = "constant";  // constant | step | g_n | piecewise_linear
  double value = 1.0;               // constant
  std::optional<double> threshold;  // step; defaults to the x mid-range
  double high = 1.0, low = 0.0;     // step
  int n = 3;                        // g_n
  std::vector<std::pair<double, double>> points;  // piecewise_linear
};

struct SolverOptions {
  int collar_cells = 2;
  double tau = 0.0, sigma = 0.0;  // 0 -> default h/4
  int max_iterations = 40000;
  double tolerance = 1e-9;
  double cap = 1e6;
  bool warm_start = true;
};

struct CertifierOptions {
  int levels = 24;
  std::vector<double> exponents = {1.0, 1.5};
  std::vector<double> deltas = {0.1, 0.25};
  std::vector<double> radii;  // empty -> {2h, 4h, 6h, 8h}
  int monotonicity_points = 10;
  std::string solution = "auto";  // auto | oracle | primal_dual | both
  std::vector<double> caps = {100.0, 1000.0, 10000.0};
};

struct RunConfig {
  std::string command = "certify";  // solve | certify | example-optimal | sweep
  DomainSpec domain;
  IntegrandSpec integrand;
  BoundarySpec boundary;
  double h = 1.0 / 64;
  SolverOptions solver;
  CertifierOptions certifier;
  int experiment_n = 3;
  std::string output_dir = "out";
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& msg) {
  if (!ok) throw Error(Errc::config_invalid, field + ": " + msg);
}

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(Errc::config_invalid, std::string(key) + ": wrong type");
  }
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using detail::get_or;
  using detail::require;
  RunConfig c;
  c.command = get_or<std::string>(j, "command", c.command);
  require(c.command == "solve" || c.command == "certify" ||
              c.command == "example-optimal" || c.command == "sweep",
          "command", "must be solve|certify|example-optimal|sweep");

  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    c.domain.type = get_or<std::string>(d, "type", "diamond");
    require(c.domain.type == "diamond" || c.domain.type == "square" ||
                c.domain.type == "hexagon" || c.domain.type == "polygon",
            "domain.type", "unknown domain type");
    if (c.domain.type == "polygon") {
      require(d.contains("vertices"), "domain.vertices", "missing");
      for (const auto& v : d.at("vertices")) {
        require(v.is_array() && v.size() == 2, "domain.vertices",
                "each vertex must be [x, y]");
        c.domain.vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      }
      require(c.domain.vertices.size() >= 3, "domain.vertices",
              "need at least 3 vertices");
    }
  }

  if (j.contains("integrand")) {
    const auto& m = j.at("integrand");
    c.integrand.family = get_or<std::string>(m, "family", "euclidean");
    require(c.integrand.family == "euclidean" ||
                c.integrand.family == "weighted" ||
                c.integrand.family == "axis_norm",
            "integrand.family", "unknown family");
    if (m.contains("weight")) c.integrand.weight = m.at("weight").get<double>();
    if (m.contains("field"))
      c.integrand.field = m.at("field").get<std::string>();
    if (c.integrand.family == "weighted") {
      require(c.integrand.weight.has_value() != c.integrand.field.has_value(),
              "integrand", "weighted needs exactly one of weight|field");
      if (c.integrand.weight)
        require(*c.integrand.weight > 0, "integrand.weight", "must be positive");
      if (c.integrand.field)
        require(*c.integrand.field == "one_plus_quarter_x2", "integrand.field",
                "unknown weight field");
    }
    if (m.contains("p")) {
      if (m.at("p").is_string()) {
        require(m.at("p").get<std::string>() == "inf", "integrand.p",
                "must be 1, 2 or \"inf\"");
        c.integrand.p = std::numeric_limits<double>::infinity();
      } else {
        c.integrand.p = m.at("p").get<double>();
      }
    }
    if (c.integrand.family == "axis_norm") {
      require(c.integrand.p.has_value(), "integrand.p", "missing");
      double p = *c.integrand.p;
      require(p == 1.0 || p == 2.0 || std::isinf(p), "integrand.p",
              "must be 1, 2 or \"inf\"");
    }
  }

  if (j.contains("boundary")) {
    const auto& b = j.at("boundary");
    c.boundary.family = get_or<std::string>(b, "family", "constant");
    require(c.boundary.family == "constant" || c.boundary.family == "step" ||
                c.boundary.family == "g_n" ||
                c.boundary.family == "piecewise_linear",
            "boundary.family", "unknown family");
    c.boundary.value = get_or<double>(b, "value", 1.0);
    if (b.contains("threshold"))
      c.boundary.threshold = b.at("threshold").get<double>();
    c.boundary.high = get_or<double>(b, "high", 1.0);
    c.boundary.low = get_or<double>(b, "low", 0.0);
    c.boundary.n = get_or<int>(b, "n", 3);
    require(c.boundary.n >= 2, "boundary.n", "must be >= 2");
    if (b.contains("points"))
      for (const auto& pv : b.at("points")) {
        require(pv.is_array() && pv.size() == 2, "boundary.points",
                "each point must be [s, value]");
        c.boundary.points.push_back({pv[0].get<double>(), pv[1].get<double>()});
      }
    if (c.boundary.family == "piecewise_linear")
      require(c.boundary.points.size() >= 2, "boundary.points",
              "need at least 2 points");
  }

  if (j.contains("grid")) {
    c.h = get_or<double>(j.at("grid"), "h", c.h);
  }
  require(c.h > 0, "grid.h", "must be positive");

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.collar_cells = get_or<int>(s, "collar_cells", 2);
    require(c.solver.collar_cells >= 1, "solver.collar_cells", "must be >= 1");
    c.solver.tau = get_or<double>(s, "tau", 0.0);
    c.solver.sigma = get_or<double>(s, "sigma", 0.0);
    require(c.solver.tau >= 0 && c.solver.sigma >= 0, "solver.tau",
            "steps must be nonnegative");
    c.solver.max_iterations = get_or<int>(s, "max_iterations", 40000);
    require(c.solver.max_iterations > 0, "solver.max_iterations",
            "must be positive");
    c.solver.tolerance = get_or<double>(s, "tolerance", 1e-9);
    require(c.solver.tolerance > 0, "solver.tolerance", "must be positive");
    c.solver.cap = get_or<double>(s, "cap", 1e6);
    require(c.solver.cap > 0, "solver.cap", "must be positive");
    c.solver.warm_start = get_or<bool>(s, "warm_start", true);
  }

  if (j.contains("certifier")) {
    const auto& t = j.at("certifier");
    c.certifier.levels = get_or<int>(t, "levels", 24);
    require(c.certifier.levels >= 1, "certifier.levels", "must be >= 1");
    if (t.contains("exponents"))
      c.certifier.exponents = t.at("exponents").get<std::vector<double>>();
    for (double p : c.certifier.exponents)
      require(p >= 1.0, "certifier.exponents", "exponents must be >= 1");
    if (t.contains("deltas"))
      c.certifier.deltas = t.at("deltas").get<std::vector<double>>();
    for (double d : c.certifier.deltas)
      require(d > 0, "certifier.deltas", "must be positive");
    if (t.contains("radii"))
      c.certifier.radii = t.at("radii").get<std::vector<double>>();
    c.certifier.monotonicity_points =
        get_or<int>(t, "monotonicity_points", 10);
    c.certifier.solution = get_or<std::string>(t, "solution", "auto");
    require(c.certifier.solution == "auto" ||
                c.certifier.solution == "oracle" ||
                c.certifier.solution == "primal_dual" ||
                c.certifier.solution == "both",
            "certifier.solution", "must be auto|oracle|primal_dual|both");
    if (t.contains("caps"))
      c.certifier.caps = t.at("caps").get<std::vector<double>>();
    require(c.certifier.caps.size() >= 2, "certifier.caps",
            "need at least 2 caps");
  }

  c.experiment_n = detail::get_or<int>(j, "experiment_n", 3);
  require(c.experiment_n >= 2, "experiment_n", "must be >= 2");
  c.output_dir = detail::get_or<std::string>(j, "output_dir", "out");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
  return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  j["domain"]["type"] = c.domain.type;
  if (c.domain.type == "polygon") {
    nlohmann::json verts = nlohmann::json::array();
    for (const Vec2& v : c.domain.vertices) verts.push_back({v.x, v.y});
    j["domain"]["vertices"] = verts;
  }
  j["integrand"]["family"] = c.integrand.family;
  if (c.integrand.weight) j["integrand"]["weight"] = *c.integrand.weight;
  if (c.integrand.field) j["integrand"]["field"] = *c.integrand.field;
  if (c.integrand.p) {
    if (std::isinf(*c.integrand.p))
      j["integrand"]["p"] = "inf";
    else
      j["integrand"]["p"] = *c.integrand.p;
  }
  j["boundary"]["family"] = c.boundary.family;
  j["boundary"]["value"] = c.boundary.value;
  if (c.boundary.threshold) j["boundary"]["threshold"] = *c.boundary.threshold;
  j["boundary"]["high"] = c.boundary.high;
  j["boundary"]["low"] = c.boundary.low;
  j["boundary"]["n"] = c.boundary.n;
  if (!c.boundary.points.empty()) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [s, v] : c.boundary.points) pts.push_back({s, v});
    j["boundary"]["points"] = pts;
  }
  j["grid"]["h"] = c.h;
  j["solver"]["collar_cells"] = c.solver.collar_cells;
  j["solver"]["tau"] = c.solver.tau;
  j["solver"]["sigma"] = c.solver.sigma;
  j["solver"]["max_iterations"] = c.solver.max_iterations;
  j["solver"]["tolerance"] = c.solver.tolerance;
  j["solver"]["cap"] = c.solver.cap;
  j["solver"]["warm_start"] = c.solver.warm_start;
  j["certifier"]["levels"] = c.certifier.levels;
  j["certifier"]["exponents"] = c.certifier.exponents;
  j["certifier"]["deltas"] = c.certifier.deltas;
  j["certifier"]["radii"] = c.certifier.radii;
  j["certifier"]["monotonicity_points"] = c.certifier.monotonicity_points;
  j["certifier"]["solution"] = c.certifier.solution;
  j["certifier"]["caps"] = c.certifier.caps;
  j["experiment_n"] = c.experiment_n;
  j["output_dir"] = c.output_dir;
  return j;
}

// Hash of the mathematical inputs; where the artifacts go (and which
// pipeline consumes them) does not change the identity of the run.
inline std::string config_hash(const RunConfig& c) {
  nlohmann::json j = to_json(c);
  j.erase("output_dir");
  j.erase("command");
  return hex64(fnv1a64(j.dump()));
}

// --- construction of the described objects ---------------------------------

inline Domain build_domain(const DomainSpec& s) {
  if (s.type == "diamond") return diamond_domain();
  if (s.type == "square") return unit_square_domain();
  if (s.type == "hexagon") return regular_hexagon_domain();
  return build_convex_polygon(s.vertices);
}

inline MetricIntegrand build_integrand(const IntegrandSpec& s,
                                       const Domain& d) {
  if (s.family == "euclidean") return euclidean_integrand();
  if (s.family == "axis_norm") return axis_norm_integrand(*s.p);
  if (s.weight) return constant_weight_integrand(*s.weight);
  return quarter_x2_weight_integrand(d);
}

inline BoundaryData build_boundary(const BoundarySpec& s, const Domain& d) {
  if (s.family == "constant") return boundary_constant(d, s.value);
  if (s.family == "step") {
    double thr = s.threshold
                     ? *s.threshold
                     : 0.5 * (d.bbox_min.x + d.bbox_max.x);
    return boundary_step_x(d, thr, s.high, s.low);
  }
  if (s.family == "g_n") return boundary_power_law(d, s.n);
  return boundary_piecewise_linear(d, s.points);
}

// The chord oracle is certified only for isotropic or constant-coefficient
// integrands and for data that is a monotone profile of x.
inline bool oracle_applicable(const RunConfig& c) {
  bool integrand_ok =
      c.integrand.family == "euclidean" ||
      (c.integrand.family == "weighted" && c.integrand.weight.has_value());
  bool data_ok = c.boundary.family == "constant" ||
                 c.boundary.family == "step" || c.boundary.family == "g_n";
  return integrand_ok && data_ok;
}

// Profile of x realizing the configured boundary family (for the oracle).
inline std::function<double(double)> oracle_profile(const RunConfig& c,
                                                    const Domain& d) {
  if (c.boundary.family == "constant") {
    double v = c.boundary.value;
    return [v](double) { return v; };
  }
  if (c.boundary.family == "step") {
    double thr = c.boundary.threshold
                     ? *c.boundary.threshold
                     : 0.5 * (d.bbox_min.x + d.bbox_max.x);
    double hi = c.boundary.high, lo = c.boundary.low;
    return [thr, hi, lo](double x) { return x >= thr ? hi : lo; };
  }
  double expo = -1.0 + 1.0 / c.boundary.n;
  return [expo](double x) { return std::pow(std::max(x, 0.0), expo); };
}

}  // namespace algp
