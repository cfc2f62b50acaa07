#include "g2forge/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace g2forge {

namespace {

using Json = nlohmann::ordered_json;

Json value_json(const CheckValue& v) {
  return std::visit([](const auto& x) { return Json(x); }, v);
}

std::string value_text(const CheckValue& v) {
  if (const double* d = std::get_if<double>(&v)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", *d);
    return buf;
  }
  if (const std::int64_t* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

std::string clip(const std::string& s, std::size_t width) {
  if (s.size() <= width) return s;
  return s.substr(0, width - 3) + "...";
}

}  // namespace

std::string report_json(const Report& r) {
  Json doc;
  doc["tool"] = "g2forge";
  doc["environment"] = {{"version", kVersion}, {"seed", r.config.seed}};
  Json tol = Json::object();
  for (const auto& [s, v] : r.config.tolerances) tol[to_string(s)] = v;
  doc["config"] = {{"suite", to_string(r.config.suite)},
                   {"grid",
                    {{"shape", r.config.grid.shape},
                     {"period", r.config.grid.period},
                     {"amplitude", r.config.grid.amplitude}}},
                   {"tolerances", tol}};
  doc["pass"] = r.pass();
  Json suites = Json::array();
  Json times = Json::object();
  for (const SuiteReport& s : r.suites) {
    Json checks = Json::array();
    for (const Check& c : s.checks) {
      checks.push_back({{"name", c.name},
                        {"criterion", c.criterion},
                        {"expected", c.expected},
                        {"actual", value_json(c.actual)},
                        {"tolerance", c.tolerance ? Json(*c.tolerance) : Json(nullptr)},
                        {"pass", c.pass}});
    }
    suites.push_back({{"name", to_string(s.suite)}, {"pass", s.pass()}, {"checks", checks}});
    times[to_string(s.suite)] = s.wall_time_s;
  }
  doc["suites"] = suites;
  doc["timestamp"] = {{"started", r.started}, {"wall_time_s", r.wall_time_s}, {"suites", times}};
  return doc.dump(2) + "\n";
}

std::string report_text(const Report& r) {
  std::ostringstream os;
  char line[512];
  os << "g2forge " << kVersion << "  suite=" << to_string(r.config.suite)
     << "  seed=" << r.config.seed << "  grid=" << r.config.grid.shape
     << "  period=" << r.config.grid.period << "  amplitude=" << r.config.grid.amplitude
     << "\n";
  int failed = 0, total = 0;
  for (const SuiteReport& s : r.suites) {
    std::snprintf(line, sizeof line, "\n[%s]  %s  %.2f s\n", to_string(s.suite).c_str(),
                  s.pass() ? "PASS" : "FAIL", s.wall_time_s);
    os << line;
    std::snprintf(line, sizeof line, "  %-4s  %-78s  %-16s  %-16s  %s\n", "crit", "check",
                  "expected", "actual", "result");
    os << line;
    for (const Check& c : s.checks) {
      const std::string crit = c.criterion ? std::to_string(c.criterion) : "-";
      std::snprintf(line, sizeof line, "  %-4s  %-78s  %-16s  %-16s  %s\n", crit.c_str(),
                    clip(c.name, 78).c_str(), clip(c.expected, 16).c_str(),
                    clip(value_text(c.actual), 16).c_str(), c.pass ? "pass" : "FAIL");
      os << line;
      ++total;
      failed += !c.pass;
    }
  }
  std::snprintf(line, sizeof line, "\n%d checks, %d failed, %.2f s: %s\n", total, failed,
                r.wall_time_s, r.pass() ? "PASS" : "FAIL");
  os << line;
  return os.str();
}

void write_report(const Report& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json") << report_json(r);
  std::ofstream(dir / "report.txt") << report_text(r);
}

}  // namespace g2forge
