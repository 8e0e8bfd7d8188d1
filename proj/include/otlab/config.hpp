#pragma once

// Declarative experiment configs: a flat key = value text format with one
// optional [check NAME] section per requested check.  Full-line # comments
// are allowed; keys before the first section configure the target, the map
// method, and the run; keys inside a section are free-form per-check
// parameters.  parse_config validates as it goes and reports the offending
// field and line on error, so configs stay hand-editable.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace otlab {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, int line, const std::string& what);
  const std::string& field() const { return field_; }
  int line() const { return line_; }  // 0 when no source text is involved

 private:
  std::string field_;
  int line_;
};

struct CheckConfig {
  std::string name;
  std::map<std::string, std::string> params;

  bool operator==(const CheckConfig&) const = default;
};

struct ExperimentConfig {
  std::string target_family = "gaussian";  // gaussian | laplace | power
  std::map<std::string, double> target_params;
  int dim = 1;
  std::string method = "exact-1d";  // exact-1d | exact-radial | semi-discrete | entropic
  std::map<std::string, double> method_params;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double budget_scale = 1.0;
  std::vector<CheckConfig> checks;

  bool operator==(const ExperimentConfig&) const = default;
};

// Parses and validates; throws ConfigError with field and line.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Semantic validation only (family, method/target compatibility, check
// names and parameter keys, positive budgets).  parse_config calls this
// with line information attached.
void validate_config(const ExperimentConfig& config);

// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace otlab
