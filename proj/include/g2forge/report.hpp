#pragma once

#include <filesystem>
#include <string>

#include "g2forge/suites.hpp"

namespace g2forge {

// JSON document. Everything that varies between identical runs (start
// time, wall times) sits under the top-level "timestamp" object.
std::string report_json(const Report& r);
// Fixed-width table for terminals.
std::string report_text(const Report& r);

// report.json and report.txt in dir.
void write_report(const Report& r, const std::filesystem::path& dir);

}  // namespace g2forge
