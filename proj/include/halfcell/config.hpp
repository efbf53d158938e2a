#pragma once

#include <map>
#include <string>
#include <vector>

#include "halfcell/model.hpp"

namespace halfcell {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Line-oriented `key = value` configuration with [section] headers.
// Values may be quoted (quotes stripped); '#' and ';' start comments.
struct RunConfig {
  std::map<std::string, std::map<std::string, std::string>> sections;

  static RunConfig parse_text(const std::string& text);
  static RunConfig parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback = "") const;
  std::string require(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  int get_int(const std::string& section, const std::string& key, int fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key,
                               const std::vector<double>& fallback) const;
  Expr get_expr(const std::string& section, const std::string& key) const;  // invalid if absent

  // "section.key=value" (section defaults to "problem" when omitted)
  void apply_override(const std::string& spec);
};

// Builds the problem data from the [problem] section.
CoefficientSet problem_from_config(const RunConfig& cfg);

}  // namespace halfcell
