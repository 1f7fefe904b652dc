#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "algp/pipeline.hpp"

using namespace algp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json tiny_certify_json(const std::string& outdir) {
  return nlohmann::json{
      {"command", "certify"},
      {"domain", {{"type", "diamond"}}},
      {"integrand", {{"family", "euclidean"}}},
      {"boundary", {{"family", "g_n"}, {"n", 3}}},
      {"grid", {{"h", 1.0 / 64}}},
      {"solver", {{"cap", 3.0}}},
      {"certifier",
       {{"levels", 8}, {"exponents", {1.0}}, {"deltas", {0.25}},
        {"monotonicity_points", 3}, {"solution", "oracle"}}},
      {"output_dir", outdir}};
}

fs::path test_root() {
  fs::path p = fs::temp_directory_path() / "algp_pipeline_tests";
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config parsing applies defaults and validates") {
  RunConfig c = parse_run_config(nlohmann::json::object());
  CHECK(c.command == "certify");
  CHECK(c.domain.type == "diamond");
  CHECK(c.h == Catch::Approx(1.0 / 64));
  CHECK(c.certifier.exponents.size() == 2);

  auto expect_invalid = [](nlohmann::json j, const std::string& needle) {
    try {
      parse_run_config(j);
      FAIL("expected ConfigInvalid for " + needle);
    } catch (const Error& e) {
      CHECK(e.code == Errc::config_invalid);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_invalid({{"command", "dance"}}, "command");
  expect_invalid({{"grid", {{"h", -0.1}}}}, "grid.h");
  expect_invalid({{"integrand", {{"family", "weighted"}}}}, "integrand");
  expect_invalid({{"integrand", {{"family", "axis_norm"}, {"p", 3.0}}}},
                 "integrand.p");
  expect_invalid({{"boundary", {{"family", "piecewise_linear"}}}},
                 "boundary.points");
  expect_invalid({{"solver", {{"cap", 0.0}}}}, "solver.cap");
  expect_invalid({{"certifier", {{"solution", "guess"}}}},
                 "certifier.solution");
  expect_invalid({{"output_dir", ""}}, "output_dir");
  expect_invalid({{"experiment_n", 1}}, "experiment_n");
}

TEST_CASE("config round-trips through serialization") {
  nlohmann::json j = tiny_certify_json("out_rt");
  j["integrand"] = {{"family", "weighted"}, {"field", "one_plus_quarter_x2"}};
  j["boundary"] = {{"family", "step"}, {"threshold", 0.75}, {"high", 2.0}};
  RunConfig c = parse_run_config(j);
  RunConfig c2 = parse_run_config(to_json(c));
  CHECK(to_json(c).dump() == to_json(c2).dump());
  CHECK(config_hash(c) == config_hash(c2));

  RunConfig c3 = c;
  c3.output_dir = "elsewhere";
  CHECK(config_hash(c3) == config_hash(c));  // outputs do not change identity
  c3.h = 1.0 / 16;
  CHECK(config_hash(c3) != config_hash(c));
}

TEST_CASE("oracle applicability rules") {
  RunConfig c = parse_run_config(tiny_certify_json("x"));
  CHECK(oracle_applicable(c));
  c.integrand.family = "weighted";
  c.integrand.weight = 2.0;
  CHECK(oracle_applicable(c));
  c.integrand.weight.reset();
  c.integrand.field = "one_plus_quarter_x2";
  CHECK_FALSE(oracle_applicable(c));
  c.integrand.family = "euclidean";
  c.boundary.family = "piecewise_linear";
  CHECK_FALSE(oracle_applicable(c));
}

TEST_CASE("certify run emits a consistent report") {
  fs::path out = test_root() / "certify_a";
  fs::remove_all(out);
  RunConfig c = parse_run_config(tiny_certify_json(out.string()));
  RunArtifacts art = run(c);
  CHECK(art.failed_checks == 0);
  CHECK(art.passed_checks > 10);
  CHECK(fs::exists(art.report_json_path));
  CHECK(fs::exists(art.report_txt_path));
  CHECK(fs::exists(art.meta_path));
  REQUIRE(art.csv_paths.size() == 1);

  std::string js = slurp(art.report_json_path);
  nlohmann::json parsed = nlohmann::json::parse(js);  // valid JSON
  CHECK(parsed["summary"]["fail"] == 0);
  CHECK(parsed["checks"].size() ==
        std::size_t(art.passed_checks + art.failed_checks + art.skipped_checks));
  bool has_level = false, has_bipolar = false;
  for (const auto& chk : parsed["checks"]) {
    std::string name = chk["name"];
    if (name.find("level_measure") != std::string::npos) has_level = true;
    if (name.find("bipolar") != std::string::npos) has_bipolar = true;
  }
  CHECK(has_level);
  CHECK(has_bipolar);

  std::string csv = slurp(art.csv_paths[0]);
  CHECK(csv.rfind("t,measure,perimeter,phi_perimeter,trace_measure,"
                  "glued_perimeter,deficit\n", 0) == 0);
  int rows = std::count(csv.begin(), csv.end(), '\n') - 1;
  CHECK(rows == 8);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  fs::path out = test_root() / "certify_det";
  fs::remove_all(out);
  RunConfig c = parse_run_config(tiny_certify_json(out.string()));
  RunArtifacts first = run(c);
  std::string json1 = slurp(first.report_json_path);
  std::string txt1 = slurp(first.report_txt_path);
  std::string csv1 = slurp(first.csv_paths[0]);
  RunArtifacts second = run(c);
  CHECK(slurp(second.report_json_path) == json1);
  CHECK(slurp(second.report_txt_path) == txt1);
  CHECK(slurp(second.csv_paths[0]) == csv1);
}

TEST_CASE("primal-dual certify of a weighted problem passes") {
  fs::path out = test_root() / "certify_pd";
  fs::remove_all(out);
  nlohmann::json j = tiny_certify_json(out.string());
  j["integrand"] = {{"family", "weighted"}, {"field", "one_plus_quarter_x2"}};
  j["certifier"]["solution"] = "auto";  // -> primal dual
  j["solver"]["max_iterations"] = 20000;
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  CHECK(art.failed_checks == 0);
}

TEST_CASE("solve run dumps solution, convergence log, and SVG") {
  fs::path out = test_root() / "solve_a";
  fs::remove_all(out);
  nlohmann::json j = tiny_certify_json(out.string());
  j["command"] = "solve";
  j["certifier"]["solution"] = "both";
  j["solver"]["max_iterations"] = 4000;
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  REQUIRE(art.svg_paths.size() == 2);
  std::string svg = slurp(art.svg_paths[0]);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polygon") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  bool has_solution_csv = false, has_convergence = false;
  for (const std::string& p : art.csv_paths) {
    if (p.find("solution") != std::string::npos) {
      has_solution_csv = true;
      CHECK(slurp(p).rfind("x,y,u\n", 0) == 0);
    }
    if (p.find("convergence") != std::string::npos) {
      has_convergence = true;
      CHECK(slurp(p).rfind("iteration,energy\n", 0) == 0);
    }
  }
  CHECK(has_solution_csv);
  CHECK(has_convergence);
}

TEST_CASE("SVG output is byte-identical across renders") {
  fs::path out = test_root() / "svg_det";
  fs::create_directories(out);
  Domain d = diamond_domain();
  GridFunction u = make_grid_function(d, grid_for_domain(d, 1.0 / 32),
                                      [](Vec2 p) { return p.x + 0.3 * p.y; });
  std::string a = (out / "a.svg").string(), b = (out / "b.svg").string();
  render_level_lines(u, d, {0.5, 1.0, 1.5}, a);
  render_level_lines(u, d, {0.5, 1.0, 1.5}, b);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(a).find("<polyline") != std::string::npos);
}

TEST_CASE("constant solution renders outline-only SVG") {
  fs::path out = test_root() / "solve_const";
  fs::remove_all(out);
  nlohmann::json j = tiny_certify_json(out.string());
  j["command"] = "solve";
  j["boundary"] = {{"family", "constant"}, {"value", 2.0}};
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  std::string svg = slurp(art.svg_paths[0]);
  CHECK(svg.find("<polygon") != std::string::npos);
  CHECK(svg.find("<polyline") == std::string::npos);
}

TEST_CASE("example-optimal run writes the experiment table") {
  fs::path out = test_root() / "exp_a";
  fs::remove_all(out);
  nlohmann::json j = {{"command", "example-optimal"},
                      {"certifier",
                       {{"exponents", {2.0, 2.5, 3.5, 4.0}},
                        {"caps", {100.0, 1000.0, 10000.0}}}},
                      {"experiment_n", 3},
                      {"output_dir", out.string()}};
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  CHECK(art.experiment_passed);
  std::string csv = slurp(art.csv_paths[0]);
  CHECK(csv.rfind("p,cap,norm,flag\n", 0) == 0);
  CHECK(csv.find("stable") != std::string::npos);
  CHECK(csv.find("diverging") != std::string::npos);
}

TEST_CASE("sweep run writes the level table") {
  fs::path out = test_root() / "sweep_a";
  fs::remove_all(out);
  nlohmann::json j = tiny_certify_json(out.string());
  j["command"] = "sweep";
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  REQUIRE(art.csv_paths.size() == 1);
  CHECK(slurp(art.csv_paths[0]).rfind("t,", 0) == 0);
}

TEST_CASE("output root override via environment") {
  fs::path root = test_root() / "env_root";
  fs::remove_all(root);
  setenv("ALGP_OUTPUT_ROOT", root.string().c_str(), 1);
  nlohmann::json j = tiny_certify_json("relative_out");
  j["command"] = "sweep";
  RunConfig c = parse_run_config(j);
  RunArtifacts art = run(c);
  unsetenv("ALGP_OUTPUT_ROOT");
  CHECK(art.csv_paths[0].rfind(root.string(), 0) == 0);
  CHECK(fs::exists(art.csv_paths[0]));
}

TEST_CASE("unwritable outputs raise IOFailure") {
  RunConfig c = parse_run_config(tiny_certify_json("/dev/null/nope"));
  CHECK_THROWS_MATCHES(run(c), Error, Catch::Matchers::Predicate<Error>(
      [](const Error& e) { return e.code == Errc::io_failure; }));

  Domain d = diamond_domain();
  GridFunction u = make_grid_function(d, grid_for_domain(d, 1.0 / 16),
                                      [](Vec2 p) { return p.x; });
  CHECK_THROWS_MATCHES(
      render_level_lines(u, d, {1.0}, "/dev/null/nope.svg"), Error,
      Catch::Matchers::Predicate<Error>(
          [](const Error& e) { return e.code == Errc::io_failure; }));
}

TEST_CASE("cli binary honors the exit-code contract") {
  fs::path root = test_root();
  fs::path cfg_ok = root / "cli_ok.json";
  fs::path out_ok = root / "cli_ok_out";
  fs::remove_all(out_ok);
  {
    std::ofstream f(cfg_ok);
    f << tiny_certify_json(out_ok.string()).dump(2);
  }
  std::string cmd = std::string(ALGP_CLI_PATH) + " certify --config " +
                    cfg_ok.string() + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);

  // a coarse, uncapped run blows the coarea identity budget: exit 1
  fs::path cfg_fail = root / "cli_fail.json";
  fs::path out_fail = root / "cli_fail_out";
  fs::remove_all(out_fail);
  {
    nlohmann::json j = tiny_certify_json(out_fail.string());
    j["solver"]["cap"] = 1e6;
    std::ofstream f(cfg_fail);
    f << j.dump(2);
  }
  cmd = std::string(ALGP_CLI_PATH) + " certify --config " + cfg_fail.string() +
        " > /dev/null 2>&1";
  status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 1);

  // invalid config: exit 2
  fs::path cfg_bad = root / "cli_bad.json";
  {
    std::ofstream f(cfg_bad);
    f << "{\"grid\": {\"h\": -1}}";
  }
  cmd = std::string(ALGP_CLI_PATH) + " certify --config " + cfg_bad.string() +
        " > /dev/null 2>&1";
  status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 2);
}
