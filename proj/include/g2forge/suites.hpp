#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace g2forge {

inline constexpr const char* kVersion = "0.1.0";

enum class Suite { identities, curvature, gradients, symbols, variations, hessian, flow, all };

inline constexpr std::array<Suite, 7> kAllSuites = {
    Suite::identities, Suite::curvature,  Suite::gradients, Suite::symbols,
    Suite::variations, Suite::hessian,    Suite::flow};

std::string to_string(Suite s);
std::optional<Suite> suite_from_string(std::string_view name);

struct GridConfig {
  int shape = 64;                          // points per active axis
  double period = 6.283185307179586;       // length of every active axis
  double amplitude = 0.05;                 // random-field perturbation size
};

struct RunConfig {
  Suite suite = Suite::all;
  std::uint64_t seed = 42;
  GridConfig grid;
  // Multiplies every error tolerance of the suite; order thresholds and
  // exact counts are unaffected.
  std::map<Suite, double> tolerances;
  std::optional<std::filesystem::path> output_dir;

  double tolerance_scale(Suite s) const;
};

using CheckValue = std::variant<double, std::int64_t, std::string>;

struct Check {
  std::string name;
  int criterion = 0;  // acceptance criterion number, 0 for supplementary checks
  std::string expected;
  CheckValue actual;
  std::optional<double> tolerance;
  bool pass = false;
};

struct SuiteReport {
  Suite suite = Suite::identities;
  std::vector<Check> checks;
  double wall_time_s = 0;
  bool pass() const;
};

struct Report {
  RunConfig config;
  std::vector<SuiteReport> suites;
  std::string started;  // UTC, ISO 8601
  double wall_time_s = 0;
  bool pass() const;
};

SuiteReport run_suite(Suite s, const RunConfig& cfg);
// Every suite for Suite::all, otherwise the one requested.
Report run(const RunConfig& cfg);

}  // namespace g2forge
