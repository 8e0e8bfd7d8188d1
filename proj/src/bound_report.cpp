#include "otlab/bound_report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace otlab {

namespace {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

// JSON cannot hold nan/inf as numbers; fall back to strings for those.
nlohmann::json jnum(double x) {
  if (std::isfinite(x)) return x;
  return fmt_double(x);
}

}  // namespace

bool RunReport::all_gated_pass() const {
  for (const auto& r : reports)
    if (r.gated && !r.pass) return false;
  return true;
}

std::string report_csv(const std::vector<BoundReport>& reports) {
  std::string out = "check,constant,exponent,exponent_lo,exponent_hi,margin,gated,pass\n";
  for (const auto& r : reports) {
    out += r.check + ',' + fmt_double(r.constant) + ',' + fmt_double(r.exponent) + ',' +
           fmt_double(r.exponent_band.lo) + ',' + fmt_double(r.exponent_band.hi) + ',' +
           fmt_double(r.margin) + ',' + (r.gated ? "1" : "0") + ',' + (r.pass ? "1" : "0") + '\n';
  }
  return out;
}

std::string report_json(const RunReport& run) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = run.seed;
  j["target"] = run.target;
  j["method"] = run.method;
  j["wall_seconds"] = jnum(run.wall_seconds);
  j["failures"] = run.failures;
  j["all_gated_pass"] = run.all_gated_pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : run.reports) {
    nlohmann::json e;
    e["check"] = r.check;
    e["statement"] = r.statement;
    e["gated"] = r.gated;
    e["pass"] = r.pass;
    e["constant"] = jnum(r.constant);
    e["exponent"] = jnum(r.exponent);
    e["exponent_band"] = {jnum(r.exponent_band.lo), jnum(r.exponent_band.hi)};
    e["margin"] = jnum(r.margin);
    nlohmann::json vals;
    for (const auto& [k, v] : r.values) vals[k] = jnum(v);
    e["values"] = vals;
    e["notes"] = r.notes;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
      rows.push_back({{"radius", jnum(row.radius)},
                      {"value", jnum(row.value)},
                      {"bound", jnum(row.bound)},
                      {"extrapolated", row.extrapolated}});
    e["rows"] = rows;
    arr.push_back(e);
  }
  j["reports"] = arr;
  return j.dump(2);
}

void write_run_report(const std::string& dir, const RunReport& run) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "report.json");
    if (!f) throw std::runtime_error("write_run_report: cannot open report.json in " + dir);
    f << report_json(run) << '\n';
  }
  {
    std::ofstream f(fs::path(dir) / "summary.csv");
    f << report_csv(run.reports);
  }
  {
    std::ofstream f(fs::path(dir) / "config.echo");
    f << run.config_echo;
  }
}

}  // namespace otlab
