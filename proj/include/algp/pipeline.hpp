#pragma once
// Batch orchestration: run a configured solve / certify / experiment /
// sweep pipeline and emit deterministic JSON reports, CSV tables, and SVG
// level-line plots. All float output goes through fmt_g12 so identical
// configs produce byte-identical artifacts.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "algp/certifier.hpp"
#include "algp/config.hpp"
#include "algp/core.hpp"
#include "algp/solver.hpp"

namespace algp {

struct RunArtifacts {
  std::string report_json_path;
  std::string report_txt_path;
  std::vector<std::string> csv_paths;
  std::vector<std::string> svg_paths;
  std::string meta_path;
  std::string version;
  std::string timestamp;
  std::string config_hash;
  int failed_checks = 0;
  int passed_checks = 0;
  int skipped_checks = 0;
  bool experiment_passed = true;
};

namespace detail {

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path);
  out << content;
  out.flush();
  if (!out) throw Error(Errc::io_failure, "write failed for " + path);
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string iso_timestamp() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc;
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SVG level lines

inline void render_level_lines(const GridFunction& u, const Domain& d,
                               const std::vector<double>& levels,
                               const std::string& path) {
  static const char* kPalette[] = {"#1b6ca8", "#c03546", "#2e8540",
                                   "#8e44ad", "#d4881e", "#13867d"};
  const double pad =
      0.05 * std::max(d.bbox_max.x - d.bbox_min.x, d.bbox_max.y - d.bbox_min.y);
  const double x0 = d.bbox_min.x - pad, y1 = d.bbox_max.y + pad;
  const double w = d.bbox_max.x - d.bbox_min.x + 2 * pad;
  const double hgt = d.bbox_max.y - d.bbox_min.y + 2 * pad;
  const double scale = 512.0 / std::max(w, hgt);
  auto sx = [&](double x) { return fmt_g12((x - x0) * scale); };
  auto sy = [&](double y) { return fmt_g12((y1 - y) * scale); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 "
      << fmt_g12(w * scale) << " " << fmt_g12(hgt * scale) << "\">\n";
  svg << "<polygon fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < d.vertices.size(); ++k) {
    if (k) svg << " ";
    svg << sx(d.vertices[k].x) << "," << sy(d.vertices[k].y);
  }
  svg << "\"/>\n";
  for (std::size_t li = 0; li < levels.size(); ++li) {
    LevelSet ls = superlevel_set(u, levels[li]);
    const char* color = kPalette[li % 6];
    for (const auto& pathline : ls.contour) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < pathline.size(); ++k) {
        if (k) svg << " ";
        svg << sx(pathline[k].x) << "," << sy(pathline[k].y);
      }
      svg << "\"/>\n";
    }
  }
  svg << "</svg>\n";
  detail::write_file(path, svg.str());
}

// ---------------------------------------------------------------------------
// Certification pipeline

namespace detail {

struct Prepared {
  Domain domain;
  MetricIntegrand integrand;
  BoundaryData data_raw;
  BoundaryData data_cap;
  DirichletProblem problem;  // carries the capped data
};

inline Prepared prepare(const RunConfig& c) {
  Prepared p;
  p.domain = build_domain(c.domain);
  p.integrand = build_integrand(c.integrand, p.domain);
  p.data_raw = build_boundary(c.boundary, p.domain);
  p.data_cap = capped(p.data_raw, c.solver.cap);
  p.problem = DirichletProblem{p.domain, p.integrand, p.data_cap, 2};
  return p;
}

inline SolverConfig solver_config(const RunConfig& c) {
  SolverConfig sc;
  sc.h = c.h;
  sc.collar_cells = c.solver.collar_cells;
  sc.tau = c.solver.tau;
  sc.sigma = c.solver.sigma;
  sc.max_iterations = c.solver.max_iterations;
  sc.tolerance = c.solver.tolerance;
  sc.value_cap = c.solver.cap;
  return sc;
}

struct NamedSolution {
  std::string label;  // "oracle" | "primal_dual"
  GridFunction u;
  std::vector<std::pair<int, double>> energy_history;
};

inline NamedSolution solve_oracle(const RunConfig& c, const Prepared& p) {
  GridSpec grid = grid_for_domain(p.domain, c.h, c.solver.collar_cells + 1);
  GridFunction u = chord_oracle(oracle_profile(c, p.domain), {1, 0}, p.domain,
                                grid, c.solver.cap);
  return {"oracle", std::move(u), {}};
}

inline NamedSolution solve_pd(const RunConfig& c, const Prepared& p) {
  SolverConfig sc = solver_config(c);
  Solution s;
  if (c.solver.warm_start) {
    int levels = 0;
    while (sc.h * std::pow(2.0, levels + 1) <= 1.0 / 16 + 1e-12) ++levels;
    s = solve_multilevel(p.problem, sc, levels);
  } else {
    s = solve_primal_dual(p.problem, sc);
  }
  return {"primal_dual", std::move(s.u), std::move(s.energy_history)};
}

inline std::vector<NamedSolution> make_solutions(const RunConfig& c,
                                                 const Prepared& p) {
  std::vector<NamedSolution> out;
  const std::string& mode = c.certifier.solution;
  bool oracle_ok = oracle_applicable(c);
  if (mode == "oracle" || mode == "both") {
    if (!oracle_ok)
      throw Error(Errc::config_invalid,
                  "certifier.solution: oracle not certified for this problem");
    out.push_back(solve_oracle(c, p));
  }
  if (mode == "primal_dual" || mode == "both") out.push_back(solve_pd(c, p));
  if (mode == "auto")
    out.push_back(oracle_ok ? solve_oracle(c, p) : solve_pd(c, p));
  return out;
}

inline std::vector<double> level_grid(const Prepared& p, int count) {
  double hi = 0.98 * std::max(ess_sup(p.data_cap), 0.0);
  if (!(hi > 0)) return {};
  return midpoints(0.0, hi, count);
}

// Identity checks shared by the certification run (coarea, layer cake,
// isoperimetric deficit, bipolar residual).
inline void append_identity_checks(std::vector<CertificateReport>& out,
                                   const RunConfig& c, const Prepared& p,
                                   const NamedSolution& sol,
                                   const std::vector<double>& levels) {
  {
    CertificateReport r;
    r.name = sol.label + "/coarea_identity";
    r.anchor = "coarea_identity";
    r.inputs = "levels=400";
    r.measured = coarea_residual(sol.u, 400);
    r.bound = 0.03;
    r.tolerance = 0.0;
    out.push_back(CertificateReport::verdict_from_margin(r));
  }
  {
    CertificateReport r;
    r.name = sol.label + "/layer_cake_identity";
    r.anchor = "layer_cake_identity";
    r.inputs = "q=2 levels=400";
    double direct = direct_positive_lq_norm(sol.u, 2.0);
    double layered = layer_cake_norm(sol.u, 2.0, 400);
    double d2 = direct * direct;
    r.measured = d2 > 0 ? std::abs(layered * layered - d2) / d2 : 0.0;
    r.bound = 0.01;
    r.tolerance = 0.0;
    out.push_back(CertificateReport::verdict_from_margin(r));
  }
  {
    CertificateReport r;
    r.name = sol.label + "/isoperimetric_deficit";
    r.anchor = "isoperimetric_deficit";
    r.inputs = "levels=" + std::to_string(levels.size());
    double worst = 0.0;
    double worst_t = 0.0;
    for (double t : levels) {
      if (is_plateau_level(p.data_cap, t)) continue;
      LevelSet ls = superlevel_set(sol.u, t);
      double glued = glued_perimeter(ls, p.data_cap);
      double deficit = isoperimetric_deficit(region_measure(ls), glued, 2);
      double violation = -deficit - 0.05 * glued * c.h;
      if (violation > worst) {
        worst = violation;
        worst_t = t;
      }
    }
    r.measured = worst;
    r.bound = 0.0;
    r.tolerance = 0.0;
    r.inputs += " worst_t=" + fmt_g12(worst_t);
    out.push_back(CertificateReport::verdict_from_margin(r));
  }
}

inline std::vector<CertificateReport> run_checks(
    const RunConfig& c, const Prepared& p,
    const std::vector<NamedSolution>& sols) {
  std::vector<CertificateReport> out;
  std::vector<double> levels = level_grid(p, c.certifier.levels);

  {
    CertificateReport r;
    r.name = "bipolar_identity";
    r.anchor = "bipolar_identity";
    r.inputs = "angular_grid=3600";
    r.measured = bipolar_residual(p.integrand, 64);
    r.bound = 1e-3;
    r.tolerance = 0.0;
    out.push_back(CertificateReport::verdict_from_margin(r));
  }

  for (const NamedSolution& sol : sols) {
    auto lvl = check_level_measure(
        sol.u, p.data_cap,
        RegularityConstants::make(2, 1.0, p.integrand.lambda,
                                  p.integrand.Lambda),
        levels);
    for (CertificateReport& r : lvl) {
      r.name = sol.label + "/" + r.name;
      out.push_back(std::move(r));
    }

    for (double pexp : c.certifier.exponents) {
      RegularityConstants consts = RegularityConstants::make(
          2, pexp, p.integrand.lambda, p.integrand.Lambda);
      auto lq = check_lq_norm(sol.u, p.data_raw, c.solver.cap, pexp, consts);
      for (CertificateReport& r : lq) {
        r.name = sol.label + "/" + r.name;
        out.push_back(std::move(r));
      }
    }

    {
      CertificateReport r = check_max_principle(sol.u, p.data_cap);
      r.name = sol.label + "/" + r.name;
      out.push_back(std::move(r));
    }
    {
      CertificateReport r =
          check_variation_estimate(sol.u, p.data_cap, p.integrand);
      r.name = sol.label + "/" + r.name;
      out.push_back(std::move(r));
    }

    RegularityConstants c1 = RegularityConstants::make(
        2, 1.0, p.integrand.lambda, p.integrand.Lambda);
    for (double delta : c.certifier.deltas) {
      CertificateReport r =
          check_oscillation(sol.u, p.data_raw, delta, c1, p.domain);
      r.name = sol.label + "/" + r.name;
      out.push_back(std::move(r));
    }

    if (p.integrand.is_isotropic()) {
      std::vector<double> radii = c.certifier.radii;
      if (radii.empty())
        radii = {2 * c.h, 4 * c.h, 6 * c.h, 8 * c.h};
      double clearance = radii.back() + 2 * c.h;
      std::vector<std::pair<double, Vec2>> picks;
      if (!levels.empty()) {
        for (double frac : {0.25, 0.5, 0.75}) {
          double t = levels[static_cast<std::size_t>(frac * (levels.size() - 1))];
          LevelSet ls = superlevel_set(sol.u, t);
          int want = (c.certifier.monotonicity_points + 2) / 3;
          for (const Vec2& x :
               sample_contour_points(ls, p.domain, clearance, want))
            if (picks.size() <
                static_cast<std::size_t>(c.certifier.monotonicity_points))
              picks.push_back({t, x});
        }
      }
      if (picks.empty()) {
        CertificateReport r;
        r.name = sol.label + "/monotonicity";
        r.anchor = "interior_density_monotonicity";
        r.verdict = "skipped";
        r.reason = "no contour points with the required clearance";
        out.push_back(std::move(r));
      } else {
        for (const auto& [t, x] : picks) {
          LevelSet ls = superlevel_set(sol.u, t);
          CertificateReport r = check_monotonicity(ls, x, radii, p.domain);
          r.name = sol.label + "/" + r.name;
          r.inputs += " t=" + fmt_g12(t);
          out.push_back(std::move(r));
        }
      }
    }

    append_identity_checks(out, c, p, sol, levels);
  }
  return out;
}

inline std::string render_report_json(const RunConfig& c,
                                      const std::vector<CertificateReport>& rs) {
  std::ostringstream js;
  js << "{\n";
  js << "  \"version\": \"" << kVersion << "\",\n";
  js << "  \"config_hash\": \"" << config_hash(c) << "\",\n";
  int pass = 0, fail = 0, skip = 0;
  for (const CertificateReport& r : rs) {
    if (r.verdict == "pass") ++pass;
    else if (r.verdict == "fail") ++fail;
    else ++skip;
  }
  js << "  \"summary\": {\"pass\": " << pass << ", \"fail\": " << fail
     << ", \"skipped\": " << skip << "},\n";
  js << "  \"checks\": [\n";
  for (std::size_t k = 0; k < rs.size(); ++k) {
    const CertificateReport& r = rs[k];
    js << "    {\"name\": \"" << json_escape(r.name) << "\", \"anchor\": \""
       << json_escape(r.anchor) << "\", \"inputs\": \""
       << json_escape(r.inputs) << "\", \"measured\": " << fmt_g12(r.measured)
       << ", \"bound\": " << fmt_g12(r.bound)
       << ", \"margin\": " << fmt_g12(r.margin)
       << ", \"tolerance\": " << fmt_g12(r.tolerance) << ", \"verdict\": \""
       << r.verdict << "\", \"reason\": \"" << json_escape(r.reason) << "\"}"
       << (k + 1 < rs.size() ? "," : "") << "\n";
  }
  js << "  ]\n}\n";
  return js.str();
}

inline std::string render_report_table(const std::vector<CertificateReport>& rs) {
  std::ostringstream t;
  t << "check                                              verdict   measured"
       "          bound             margin            tolerance\n";
  for (const CertificateReport& r : rs) {
    std::string name = r.name;
    if (name.size() > 50) name = name.substr(0, 47) + "...";
    t << name << std::string(51 - name.size(), ' ');
    t << r.verdict << std::string(10 - r.verdict.size(), ' ');
    auto col = [&](double v) {
      std::string s = fmt_g12(v);
      if (s.size() < 18) s += std::string(18 - s.size(), ' ');
      return s;
    };
    if (r.verdict == "skipped")
      t << "(" << r.reason << ")";
    else
      t << col(r.measured) << col(r.bound) << col(r.margin)
        << fmt_g12(r.tolerance);
    t << "\n";
  }
  return t.str();
}

inline std::string render_sweep_csv(const Prepared& p, const GridFunction& u,
                                    const std::vector<double>& levels) {
  std::ostringstream csv;
  csv << "t,measure,perimeter,phi_perimeter,trace_measure,glued_perimeter,"
         "deficit\n";
  for (double t : levels) {
    LevelSet ls = superlevel_set(u, t);
    double area = region_measure(ls);
    double per = perimeter(ls, euclidean_integrand());
    double pphi = perimeter(ls, p.integrand);
    double trace = trace_level_measure(p.data_cap, t);
    double glued = per + trace;
    double deficit = isoperimetric_deficit(area, glued, 2);
    csv << fmt_g12(t) << "," << fmt_g12(area) << "," << fmt_g12(per) << ","
        << fmt_g12(pphi) << "," << fmt_g12(trace) << "," << fmt_g12(glued)
        << "," << fmt_g12(deficit) << "\n";
  }
  return csv.str();
}

inline std::string render_solution_csv(const GridFunction& u) {
  std::ostringstream csv;
  csv << "x,y,u\n";
  const GridSpec& g = u.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      std::size_t idx = g.index(i, j);
      if (!u.mask.inside[idx]) continue;
      Vec2 x = g.cell_center(i, j);
      csv << fmt_g12(x.x) << "," << fmt_g12(x.y) << "," << fmt_g12(u.values[idx])
          << "\n";
    }
  return csv.str();
}

inline std::string render_convergence_csv(
    const std::vector<std::pair<int, double>>& hist) {
  std::ostringstream csv;
  csv << "iteration,energy\n";
  for (const auto& [it, e] : hist) csv << it << "," << fmt_g12(e) << "\n";
  return csv.str();
}

inline std::string render_experiment_csv(const ExperimentResult& res) {
  std::ostringstream csv;
  csv << "p,cap,norm,flag\n";
  for (const ExperimentRow& row : res.rows)
    csv << fmt_g12(row.p) << "," << fmt_g12(row.cap) << ","
        << fmt_g12(row.norm) << "," << row.flag << "\n";
  return csv.str();
}

}  // namespace detail

// Executes the configured pipeline and writes its artifacts below the output
// directory (optionally re-rooted by the ALGP_OUTPUT_ROOT environment
// variable). The report files carry no timestamps; identical configs yield
// byte-identical artifacts.
inline RunArtifacts run(const RunConfig& c) {
  namespace fs = std::filesystem;
  RunArtifacts art;
  art.version = kVersion;
  art.config_hash = config_hash(c);
  art.timestamp = detail::iso_timestamp();

  fs::path outdir = c.output_dir;
  if (const char* root = std::getenv("ALGP_OUTPUT_ROOT");
      root != nullptr && outdir.is_relative())
    outdir = fs::path(root) / outdir;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw Error(Errc::io_failure, "cannot create " + outdir.string());

  auto emit_meta = [&]() {
    std::ostringstream js;
    js << "{\"version\": \"" << kVersion << "\", \"command\": \"" << c.command
       << "\", \"config_hash\": \"" << art.config_hash
       << "\", \"timestamp\": \"" << art.timestamp << "\"}\n";
    art.meta_path = (outdir / "meta.json").string();
    detail::write_file(art.meta_path, js.str());
  };

  if (c.command == "example-optimal") {
    ExperimentResult res = optimal_exponent_experiment(
        c.experiment_n, c.certifier.exponents, c.certifier.caps);
    art.experiment_passed = res.passed;
    std::string csv = detail::render_experiment_csv(res);
    std::string path = (outdir / "experiment.csv").string();
    detail::write_file(path, csv);
    art.csv_paths.push_back(path);
    emit_meta();
    return art;
  }

  detail::Prepared p = detail::prepare(c);

  if (c.command == "solve") {
    std::vector<detail::NamedSolution> sols = detail::make_solutions(c, p);
    for (const detail::NamedSolution& sol : sols) {
      std::string base = sol.label;
      std::string upath = (outdir / (base + "_solution.csv")).string();
      detail::write_file(upath, detail::render_solution_csv(sol.u));
      art.csv_paths.push_back(upath);
      if (!sol.energy_history.empty()) {
        std::string cpath = (outdir / (base + "_convergence.csv")).string();
        detail::write_file(cpath,
                           detail::render_convergence_csv(sol.energy_history));
        art.csv_paths.push_back(cpath);
      }
      auto [lo, hi] = value_range(sol.u);
      std::vector<double> levels;
      if (hi > lo) levels = midpoints(lo, hi, 8);
      std::string spath = (outdir / (base + "_levels.svg")).string();
      render_level_lines(sol.u, p.domain, levels, spath);
      art.svg_paths.push_back(spath);
    }
    emit_meta();
    return art;
  }

  if (c.command == "sweep") {
    std::vector<detail::NamedSolution> sols = detail::make_solutions(c, p);
    std::vector<double> levels = detail::level_grid(p, c.certifier.levels);
    for (const detail::NamedSolution& sol : sols) {
      std::string path = (outdir / (sol.label + "_sweep.csv")).string();
      detail::write_file(path, detail::render_sweep_csv(p, sol.u, levels));
      art.csv_paths.push_back(path);
    }
    emit_meta();
    return art;
  }

  // certify
  std::vector<detail::NamedSolution> sols = detail::make_solutions(c, p);
  std::vector<CertificateReport> reports = detail::run_checks(c, p, sols);
  for (const CertificateReport& r : reports) {
    if (r.verdict == "pass") ++art.passed_checks;
    else if (r.verdict == "fail") ++art.failed_checks;
    else ++art.skipped_checks;
  }
  art.report_json_path = (outdir / "report.json").string();
  detail::write_file(art.report_json_path, detail::render_report_json(c, reports));
  art.report_txt_path = (outdir / "report.txt").string();
  detail::write_file(art.report_txt_path, detail::render_report_table(reports));
  {
    std::vector<double> levels = detail::level_grid(p, c.certifier.levels);
    std::string path = (outdir / (sols.front().label + "_sweep.csv")).string();
    detail::write_file(path, detail::render_sweep_csv(p, sols.front().u, levels));
    art.csv_paths.push_back(path);
  }
  emit_meta();
  return art;
}

}  // namespace algp
