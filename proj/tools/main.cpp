// Command-line front end: solve, certify, example-optimal, and sweep
// pipelines driven by a JSON run config.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "algp/pipeline.hpp"

namespace {

algp::RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in)
    throw algp::Error(algp::Errc::io_failure, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw algp::Error(algp::Errc::config_invalid,
                      std::string("config is not valid JSON: ") + e.what());
  }
  algp::RunConfig c = algp::parse_run_config(j);
  c.command = command;
  return c;
}

int run_command(const algp::RunConfig& c) {
  algp::RunArtifacts art = algp::run(c);
  if (c.command == "certify") {
    std::ifstream table(art.report_txt_path);
    std::cout << table.rdbuf();
    std::cout << "pass: " << art.passed_checks
              << "  fail: " << art.failed_checks
              << "  skipped: " << art.skipped_checks << "\n";
    std::cout << "report: " << art.report_json_path << "\n";
    return art.failed_checks > 0 ? 1 : 0;
  }
  if (c.command == "example-optimal") {
    for (const std::string& p : art.csv_paths) {
      std::ifstream csv(p);
      std::cout << csv.rdbuf();
    }
    std::cout << (art.experiment_passed ? "experiment: pass\n"
                                        : "experiment: fail\n");
    return art.experiment_passed ? 0 : 1;
  }
  for (const std::string& p : art.csv_paths) std::cout << p << "\n";
  for (const std::string& p : art.svg_paths) std::cout << p << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic least-gradient solver and regularity certifier"};
  app.require_subcommand(1);

  std::string config_path;
  int n_override = -1;

  CLI::App* solve = app.add_subcommand("solve", "solve one problem and dump the solution");
  solve->add_option("--config", config_path, "run config (JSON)")->required();

  CLI::App* certify = app.add_subcommand("certify", "run all regularity checks");
  certify->add_option("--config", config_path, "run config (JSON)")->required();

  CLI::App* example = app.add_subcommand(
      "example-optimal", "cap sweep of ||u||_p for the power-law example");
  example->add_option("--config", config_path, "run config (JSON)")->required();
  example->add_option("--n", n_override, "power-law index override");

  CLI::App* sweep = app.add_subcommand("sweep", "level sweep CSV of one solution");
  sweep->add_option("--config", config_path, "run config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  std::string command;
  if (solve->parsed()) command = "solve";
  if (certify->parsed()) command = "certify";
  if (example->parsed()) command = "example-optimal";
  if (sweep->parsed()) command = "sweep";

  try {
    algp::RunConfig c = load_config(config_path, command);
    if (n_override > 0) c.experiment_n = n_override;
    return run_command(c);
  } catch (const algp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
