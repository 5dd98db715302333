#pragma once

// Residual reports: per-check max/mean statistics over a seeded sample, each
// check annotated with the identity it verifies and the tolerance it is held
// to.  Serialization is byte-stable: keys are emitted in a fixed order and
// floating-point values use %.12e formatting.

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "hktl/version.hpp"

namespace hktl {

struct ResidualCheck {
  std::string name;
  std::string anchor;  // the identity under test, e.g. "d(omega_A) = 0"
  double tolerance = 0.0;
  double max = 0.0;
  double mean = 0.0;
  long count = 0;
  bool pass = false;
  std::map<std::string, double> details;
};

struct PointResidual {
  std::vector<double> coords;
  int check = 0;  // index into checks
  double value = 0.0;
};

struct ResidualReport {
  std::vector<ResidualCheck> checks;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  std::string version = kVersion;
  std::vector<PointResidual> per_point;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  const ResidualCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

inline std::string emit_report_json(const ResidualReport& r) {
  using detail::fmt_double;
  using detail::json_escape;
  std::string o;
  o += "{\n";
  o += "  \"checks\": [\n";
  for (size_t i = 0; i < r.checks.size(); ++i) {
    const ResidualCheck& c = r.checks[i];
    o += "    {\n";
    o += "      \"anchor\": \"" + json_escape(c.anchor) + "\",\n";
    o += "      \"count\": " + std::to_string(c.count) + ",\n";
    if (!c.details.empty()) {
      o += "      \"details\": {";
      bool first = true;
      for (const auto& [k, v] : c.details) {
        o += std::string(first ? "" : ", ") + "\"" + json_escape(k) + "\": " + fmt_double(v);
        first = false;
      }
      o += "},\n";
    }
    o += "      \"max\": " + fmt_double(c.max) + ",\n";
    o += "      \"mean\": " + fmt_double(c.mean) + ",\n";
    o += "      \"name\": \"" + json_escape(c.name) + "\",\n";
    o += std::string("      \"pass\": ") + (c.pass ? "true" : "false") + ",\n";
    o += "      \"tolerance\": " + fmt_double(c.tolerance) + "\n";
    o += (i + 1 < r.checks.size()) ? "    },\n" : "    }\n";
  }
  o += "  ],\n";
  o += "  \"environment\": {\n";
  o += "    \"seed\": " + std::to_string(r.seed) + ",\n";
  o += "    \"tolerances\": {";
  {
    bool first = true;
    for (const auto& [k, v] : r.tolerances) {
      o += std::string(first ? "" : ", ") + "\"" + json_escape(k) + "\": " + fmt_double(v);
      first = false;
    }
  }
  o += "},\n";
  o += "    \"version\": \"" + json_escape(r.version) + "\"\n";
  o += "  }\n";
  o += "}\n";
  return o;
}

inline std::string emit_report_csv(const ResidualReport& r) {
  std::string o;
  size_t dim = 0;
  for (const auto& pr : r.per_point) dim = std::max(dim, pr.coords.size());
  for (size_t i = 0; i < dim; ++i) o += "x" + std::to_string(i) + ",";
  o += "check,residual\n";
  for (const auto& pr : r.per_point) {
    for (size_t i = 0; i < dim; ++i)
      o += (i < pr.coords.size() ? detail::fmt_double(pr.coords[i]) : "") + std::string(",");
    o += r.checks[static_cast<size_t>(pr.check)].name + "," + detail::fmt_double(pr.value) + "\n";
  }
  return o;
}

}  // namespace hktl
