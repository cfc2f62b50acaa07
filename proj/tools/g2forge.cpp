#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "g2forge/config.hpp"
#include "g2forge/report.hpp"

using namespace g2forge;

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for G2-structures"};
  std::string suite, config, seed, grid, amplitude, out;
  bool json = false;
  app.add_option("suite,--suite", suite,
                 "identities | curvature | gradients | symbols | variations | hessian | "
                 "flow | all");
  app.add_option("--config", config, "YAML configuration file");
  app.add_option("--seed", seed, "Random seed (unsigned 64-bit)");
  app.add_option("--grid", grid, "Points per axis, a power of two in [16, 256]");
  app.add_option("--amplitude", amplitude, "Random-field perturbation size");
  app.add_option("--out", out, "Directory for report.json, report.txt and flow output");
  app.add_flag("--json", json, "Print the JSON report instead of the table");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    ConfigOverrides flags;
    if (!suite.empty()) flags.suite = parse_suite(suite, "suite");
    if (!seed.empty()) flags.seed = parse_seed(seed, "--seed");
    if (!grid.empty()) flags.grid = parse_grid_shape(grid, "--grid");
    if (!amplitude.empty()) flags.amplitude = parse_number(amplitude, "--amplitude");
    if (!out.empty()) flags.output_dir = out;
    cfg = config.empty() ? apply_overrides(RunConfig{}, flags)
                         : parse_config_file(config, flags);
  } catch (const ConfigError& e) {
    std::cerr << "g2forge: " << e.what() << "\n";
    return 2;
  }

  try {
    const Report report = run(cfg);
    if (cfg.output_dir) write_report(report, *cfg.output_dir);
    std::cout << (json ? report_json(report) : report_text(report));
    return report.pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "g2forge: " << e.what() << "\n";
    return 1;
  }
}
