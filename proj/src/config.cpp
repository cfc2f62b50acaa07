#include "g2forge/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace g2forge {

namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

std::string scalar(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) throw ConfigError(key, line_of(n), "expected a scalar value");
  return n.Scalar();
}

void validate_shape(int n, const std::string& key, int line) {
  if (n < 16 || n > 256 || (n & (n - 1)) != 0)
    throw ConfigError(key, line, "grid shape must be a power of two in [16, 256], got " +
                                     std::to_string(n));
}

void validate_amplitude(double a, const std::string& key, int line) {
  if (!(a >= 0)) throw ConfigError(key, line, "amplitude must be nonnegative");
}

void read_grid(const YAML::Node& n, GridConfig& g) {
  if (n.IsScalar()) {
    g.shape = parse_grid_shape(n.Scalar(), "grid", line_of(n));
    return;
  }
  if (!n.IsMap()) throw ConfigError("grid", line_of(n), "expected a shape or a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.Scalar();
    const std::string path = "grid." + k;
    const int line = line_of(kv.first);
    if (k == "shape") {
      g.shape = parse_grid_shape(scalar(kv.second, path), path, line);
    } else if (k == "period") {
      g.period = parse_number(scalar(kv.second, path), path, line);
      if (!(g.period > 0)) throw ConfigError(path, line, "period must be positive");
    } else if (k == "amplitude") {
      g.amplitude = parse_number(scalar(kv.second, path), path, line);
      validate_amplitude(g.amplitude, path, line);
    } else {
      throw ConfigError(path, line, "unknown key");
    }
  }
}

void read_tolerances(const YAML::Node& n, RunConfig& cfg) {
  if (!n.IsMap()) throw ConfigError("tolerances", line_of(n), "expected a mapping");
  for (const auto& kv : n) {
    const std::string k = kv.first.Scalar();
    const std::string path = "tolerances." + k;
    const int line = line_of(kv.first);
    const std::optional<Suite> s = suite_from_string(k);
    if (!s || *s == Suite::all) throw ConfigError(path, line, "unknown suite");
    const double v = parse_number(scalar(kv.second, path), path, line);
    if (!(v > 0)) throw ConfigError(path, line, "tolerance must be positive");
    cfg.tolerances[*s] = v;
  }
}

}  // namespace

Suite parse_suite(const std::string& text, const std::string& key, int line) {
  const std::optional<Suite> s = suite_from_string(text);
  if (!s) throw ConfigError(key, line, "unknown suite '" + text + "'");
  return *s;
}

std::uint64_t parse_seed(const std::string& text, const std::string& key, int line) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(key, line, "expected an unsigned 64-bit integer, got '" + text + "'");
  return v;
}

int parse_grid_shape(const std::string& text, const std::string& key, int line) {
  int v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError(key, line, "expected an integer, got '" + text + "'");
  validate_shape(v, key, line);
  return v;
}

double parse_number(const std::string& text, const std::string& key, int line) {
  double v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(v))
    throw ConfigError(key, line, "expected a finite number, got '" + text + "'");
  return v;
}

RunConfig apply_overrides(RunConfig cfg, const ConfigOverrides& flags) {
  if (flags.suite) cfg.suite = *flags.suite;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.grid) {
    validate_shape(*flags.grid, "--grid", 0);
    cfg.grid.shape = *flags.grid;
  }
  if (flags.amplitude) {
    validate_amplitude(*flags.amplitude, "--amplitude", 0);
    cfg.grid.amplitude = *flags.amplitude;
  }
  if (flags.output_dir) cfg.output_dir = flags.output_dir;
  return cfg;
}

RunConfig parse_config_text(const std::string& yaml, const ConfigOverrides& flags) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<document>", e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  RunConfig cfg;
  if (root.IsNull()) return apply_overrides(cfg, flags);
  if (!root.IsMap()) throw ConfigError("<document>", line_of(root), "expected a mapping");
  for (const auto& kv : root) {
    const std::string k = kv.first.Scalar();
    const int line = line_of(kv.first);
    const YAML::Node& v = kv.second;
    if (k == "suite") {
      cfg.suite = parse_suite(scalar(v, k), k, line);
    } else if (k == "seed") {
      cfg.seed = parse_seed(scalar(v, k), k, line);
    } else if (k == "grid") {
      read_grid(v, cfg.grid);
    } else if (k == "tolerances") {
      read_tolerances(v, cfg);
    } else if (k == "output_dir") {
      cfg.output_dir = scalar(v, k);
    } else {
      throw ConfigError(k, line, "unknown key");
    }
  }
  return apply_overrides(cfg, flags);
}

RunConfig parse_config_file(const std::filesystem::path& path, const ConfigOverrides& flags) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", 0, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), flags);
}

}  // namespace g2forge
