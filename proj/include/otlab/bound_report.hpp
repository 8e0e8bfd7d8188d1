#pragma once

// Result records for bound checks and whole runs.  CSV output is byte-stable
// across reruns of the same seed (no timing in it); wall-clock lives only in
// the JSON report.

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "otlab/numerics.hpp"

namespace otlab {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct BoundReport {
  std::string check;      // instance name, e.g. "displacement"
  std::string statement;  // human-readable form of the inequality tested
  bool gated = true;      // gated checks drive the process exit code
  bool pass = true;
  double constant = kNan;  // fitted constant, never assumed
  double exponent = kNan;  // fitted growth exponent where applicable
  Band exponent_band{kNan, kNan};
  double margin = kNan;  // min slack of the bound over probes, >0 means strict
  std::map<std::string, double> values;
  std::vector<std::string> notes;

  struct Row {
    double radius = kNan;
    double value = kNan;
    double bound = kNan;
    bool extrapolated = false;
  };
  std::vector<Row> rows;

  void note(const std::string& s) { notes.push_back(s); }
};

struct RunReport {
  std::uint64_t seed = 0;
  std::string target;
  std::string method;
  std::string config_echo;
  std::vector<BoundReport> reports;
  std::vector<std::string> failures;  // solver errors that did not abort the run
  double wall_seconds = 0.0;

  bool all_gated_pass() const;
};

std::string report_csv(const std::vector<BoundReport>& reports);
std::string report_json(const RunReport& run);

// Writes report.json, summary.csv and config.echo into dir (created if needed).
void write_run_report(const std::string& dir, const RunReport& run);

}  // namespace otlab
