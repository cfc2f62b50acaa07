#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "g2forge/errors.hpp"
#include "g2forge/suites.hpp"

namespace g2forge {

// Values given on the command line; they win over the file.
struct ConfigOverrides {
  std::optional<Suite> suite;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> amplitude;
  std::optional<std::filesystem::path> output_dir;
};

// YAML document with the optional keys
//   suite, seed, grid (a shape, or a map of shape / period / amplitude),
//   tolerances (suite name -> positive scale), output_dir.
// Unknown keys and malformed values raise ConfigError with the key path
// and line.
RunConfig parse_config_text(const std::string& yaml, const ConfigOverrides& flags = {});
RunConfig parse_config_file(const std::filesystem::path& path,
                            const ConfigOverrides& flags = {});
RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& flags);

// Scalar parsers shared with the command line; key names the setting in
// errors.
Suite parse_suite(const std::string& text, const std::string& key, int line = 0);
std::uint64_t parse_seed(const std::string& text, const std::string& key, int line = 0);
int parse_grid_shape(const std::string& text, const std::string& key, int line = 0);
double parse_number(const std::string& text, const std::string& key, int line = 0);

}  // namespace g2forge
