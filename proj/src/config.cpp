#include "otlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace otlab {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& field, int line, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(field, line, "expected a number, got '" + v + "'");
  return x;
}

long parse_long(const std::string& field, int line, const std::string& v) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(field, line, "expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& field, int line, const std::string& v) {
  if (!v.empty() && v[0] == '-')
    throw ConfigError(field, line, "expected a nonnegative integer, got '" + v + "'");
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(field, line, "expected an integer, got '" + v + "'");
  return static_cast<std::uint64_t>(x);
}

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

// per-check parameter keys; true marks numeric values
const std::map<std::string, std::map<std::string, bool>>& known_checks() {
  static const std::map<std::string, std::map<std::string, bool>> t = {
      {"displacement", {{"n_directions", true}}},
      {"displacement-explicit", {{"kind", false}, {"rate", true}}},
      {"lp-norm", {{"p", true}, {"direction", false}, {"n", true}}},
      {"opnorm", {{"n_directions", true}}},
      {"eigenvar", {{"n", true}}},
      {"monotonicity", {{"n_pairs", true}}},
      {"pushforward", {{"n", true}}},
      {"ball-certificate", {{"radius", true}, {"budget", true}}},
      {"ma-residual", {{"n", true}, {"tol", true}}},
      {"concentration", {{"kind", false}, {"n", true}, {"n_directions", true}}},
      {"hessian-band", {{"n", true}}},
  };
  return t;
}

const std::map<std::string, std::set<std::string>>& target_param_keys() {
  static const std::map<std::string, std::set<std::string>> t = {
      {"gaussian", {"sigma"}},
      {"laplace", {}},
      {"power", {"p", "amplitude"}},
  };
  return t;
}

const std::map<std::string, std::set<std::string>>& method_param_keys() {
  static const std::map<std::string, std::set<std::string>> t = {
      {"exact-1d", {"n_anchors"}},
      {"exact-radial", {"n_nodes", "n_anchors"}},
      {"semi-discrete", {"n_support", "mc_budget", "tol", "max_iters"}},
      {"entropic", {"epsilon", "n", "max_iters", "tol"}},
  };
  return t;
}

// checks that evaluate the map jacobian somewhere
const std::set<std::string>& jacobian_checks() {
  static const std::set<std::string> s = {"lp-norm", "opnorm", "eigenvar",
                                          "ma-residual"};
  return s;
}

using LineTable = std::map<std::string, int>;

int line_of(const LineTable& lines, const std::string& field) {
  auto it = lines.find(field);
  return it == lines.end() ? 0 : it->second;
}

void validate_with_lines(const ExperimentConfig& c, const LineTable& lines) {
  const auto& tkeys = target_param_keys();
  auto tfam = tkeys.find(c.target_family);
  if (tfam == tkeys.end())
    throw ConfigError("target", line_of(lines, "target"),
                      "unknown target family '" + c.target_family +
                          "' (known: gaussian, laplace, power)");
  if (c.dim < 1)
    throw ConfigError("dim", line_of(lines, "dim"), "dim must be at least 1");
  for (const auto& [k, v] : c.target_params) {
    const std::string field = "target." + k;
    if (!tfam->second.count(k))
      throw ConfigError(field, line_of(lines, field),
                        "unknown parameter for target family '" +
                            c.target_family + "'");
    if ((k == "sigma" || k == "amplitude") && v <= 0)
      throw ConfigError(field, line_of(lines, field), "must be positive");
  }
  if (c.target_family == "power") {
    auto it = c.target_params.find("p");
    if (it == c.target_params.end())
      throw ConfigError("target.p", line_of(lines, "target"),
                        "power family requires target.p");
    if (it->second < 1.0 || it->second > 2.0)
      throw ConfigError("target.p", line_of(lines, "target.p"),
                        "power exponent must lie in [1, 2]");
  }

  const auto& mkeys = method_param_keys();
  auto mfam = mkeys.find(c.method);
  if (mfam == mkeys.end())
    throw ConfigError("method", line_of(lines, "method"),
                      "unknown method '" + c.method +
                          "' (known: exact-1d, exact-radial, semi-discrete, "
                          "entropic)");
  for (const auto& [k, v] : c.method_params) {
    const std::string field = "method." + k;
    if (!mfam->second.count(k))
      throw ConfigError(field, line_of(lines, field),
                        "unknown parameter for method '" + c.method + "'");
    if (v <= 0)
      throw ConfigError(field, line_of(lines, field), "must be positive");
  }
  if (c.method == "exact-1d" && c.dim != 1)
    throw ConfigError("method", line_of(lines, "method"),
                      "exact-1d requires dim = 1, target has dim = " +
                          std::to_string(c.dim));
  if (c.method == "exact-radial" && c.target_family == "laplace" && c.dim != 1)
    throw ConfigError(
        "method", line_of(lines, "method"),
        "exact-radial needs a rotation invariant target; the laplace product "
        "is only radial at dim = 1, target has dim = " + std::to_string(c.dim));

  if (!(c.budget_scale > 0))
    throw ConfigError("budget_scale", line_of(lines, "budget_scale"),
                      "must be positive");

  const auto& ctable = known_checks();
  std::set<std::string> seen;
  for (const auto& ck : c.checks) {
    const std::string field = "check " + ck.name;
    auto it = ctable.find(ck.name);
    if (it == ctable.end())
      throw ConfigError(field, line_of(lines, field),
                        "unknown check '" + ck.name + "'");
    if (!seen.insert(ck.name).second)
      throw ConfigError(field, line_of(lines, field),
                        "check listed twice; each check runs once per config");
    for (const auto& [k, v] : ck.params) {
      const std::string pfield = field + "." + k;
      auto pk = it->second.find(k);
      if (pk == it->second.end())
        throw ConfigError(pfield, line_of(lines, pfield),
                          "unknown parameter for check '" + ck.name + "'");
      if (pk->second) parse_double(pfield, line_of(lines, pfield), v);
    }
    if (auto dir = ck.params.find("direction"); dir != ck.params.end()) {
      if (dir->second != "radial" && dir->second != "tangential")
        throw ConfigError(field + ".direction",
                          line_of(lines, field + ".direction"),
                          "expected radial or tangential");
      if (dir->second == "tangential" && c.dim < 2)
        throw ConfigError(field + ".direction",
                          line_of(lines, field + ".direction"),
                          "tangential direction needs dim >= 2");
    }
    if (auto kind = ck.params.find("kind"); kind != ck.params.end()) {
      const bool mixed_ok = ck.name == "concentration";
      if (kind->second != "exponential" && kind->second != "gaussian" &&
          !(mixed_ok && kind->second == "mixed"))
        throw ConfigError(field + ".kind", line_of(lines, field + ".kind"),
                          mixed_ok
                              ? "expected exponential, gaussian, or mixed"
                              : "expected exponential or gaussian");
    }
    if (c.method == "semi-discrete" && jacobian_checks().count(ck.name))
      throw ConfigError(field, line_of(lines, field),
                        "check '" + ck.name +
                            "' needs a map jacobian; semi-discrete maps do "
                            "not carry one");
  }
}

}  // namespace

ConfigError::ConfigError(std::string field, int line, const std::string& what)
    : std::runtime_error(
          (line > 0 ? "line " + std::to_string(line) + ", " : std::string()) +
          "field '" + field + "': " + what),
      field_(std::move(field)),
      line_(line) {}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  LineTable lines;
  CheckConfig* section = nullptr;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;

    if (line[0] == '[') {
      if (line.back() != ']')
        throw ConfigError("section", lineno, "unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner.rfind("check ", 0) != 0)
        throw ConfigError("section", lineno,
                          "expected [check NAME], got [" + inner + "]");
      const std::string name = trim(inner.substr(6));
      if (name.empty())
        throw ConfigError("section", lineno, "check name missing");
      c.checks.push_back(CheckConfig{name, {}});
      section = &c.checks.back();
      lines["check " + name] = lineno;  // duplicates report the later line
      continue;
    }

    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, lineno, "empty key");

    if (section != nullptr) {
      const std::string field = "check " + section->name + "." + key;
      if (!section->params.emplace(key, val).second)
        throw ConfigError(field, lineno, "duplicate key");
      lines.emplace(field, lineno);
      continue;
    }

    std::string field = key;
    if (!lines.emplace(field, lineno).second)
      throw ConfigError(field, lineno, "duplicate key");
    if (key == "target") {
      c.target_family = val;
    } else if (key == "dim") {
      c.dim = static_cast<int>(parse_long(field, lineno, val));
    } else if (key == "method") {
      c.method = val;
    } else if (key == "seed") {
      c.seed = parse_u64(field, lineno, val);
    } else if (key == "out_dir") {
      c.out_dir = val;
    } else if (key == "budget_scale") {
      c.budget_scale = parse_double(field, lineno, val);
    } else if (key.rfind("target.", 0) == 0) {
      c.target_params[key.substr(7)] = parse_double(field, lineno, val);
    } else if (key.rfind("method.", 0) == 0) {
      c.method_params[key.substr(7)] = parse_double(field, lineno, val);
    } else {
      throw ConfigError(field, lineno, "unknown key");
    }
  }

  validate_with_lines(c, lines);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, 0, "cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void validate_config(const ExperimentConfig& config) {
  validate_with_lines(config, {});
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "target = " << c.target_family << "\n";
  out << "dim = " << c.dim << "\n";
  for (const auto& [k, v] : c.target_params)
    out << "target." << k << " = " << fmt_double(v) << "\n";
  out << "method = " << c.method << "\n";
  for (const auto& [k, v] : c.method_params)
    out << "method." << k << " = " << fmt_double(v) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "out_dir = " << c.out_dir << "\n";
  out << "budget_scale = " << fmt_double(c.budget_scale) << "\n";
  for (const auto& ck : c.checks) {
    out << "\n[check " << ck.name << "]\n";
    for (const auto& [k, v] : ck.params) out << k << " = " << v << "\n";
  }
  return out.str();
}

}  // namespace otlab
