#include "otlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "otlab/numerics.hpp"
#include "otlab/rng.hpp"

namespace otlab {

namespace {

std::vector<Eigen::VectorXd> unit_directions(int d, int n_directions,
                                             Philox4x32& rng) {
  std::vector<Eigen::VectorXd> dirs;
  if (d == 1) {
    dirs.push_back(Eigen::VectorXd::Constant(1, 1.0));
    dirs.push_back(Eigen::VectorXd::Constant(1, -1.0));
    return dirs;
  }
  dirs.push_back(Eigen::VectorXd::Unit(d, 0));
  for (int k = 1; k < n_directions; ++k) {
    Eigen::VectorXd u = rng.normal_vec(d);
    const double nrm = u.norm();
    if (nrm < 1e-12) {
      --k;
      continue;
    }
    dirs.push_back(u / nrm);
  }
  return dirs;
}

double max_abs_map_norm(const TransportMap& map, const ProbeLevel& level) {
  double worst = 0;
  for (const auto& x : level.points)
    worst = std::max(worst, map.eval(x).norm());
  return worst;
}

double max_opnorm(const TransportMap& map, const ProbeLevel& level) {
  double worst = 0;
  for (const auto& x : level.points) {
    const Eigen::VectorXd eigs = map.jacobian_eigenvalues(x);
    worst = std::max({worst, std::abs(eigs[0]),
                      std::abs(eigs[eigs.size() - 1])});
  }
  return worst;
}

// log-log slope over the largest available radius decade with a bootstrap
// band; degenerate inputs (all-zero values) report slope 0
struct DecadeSlope {
  double slope = 0;
  Band band{0, 0};
  int n_used = 0;
  bool degenerate = false;
};

DecadeSlope fit_largest_decade(const std::vector<double>& radii,
                               const std::vector<double>& values,
                               std::uint64_t seed, std::uint64_t stream) {
  DecadeSlope out;
  double r_max = 0;
  for (double r : radii) r_max = std::max(r_max, r);
  std::vector<double> lr, lv;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (radii[i] >= r_max / 10 && radii[i] > 0 && values[i] > 0) {
      lr.push_back(std::log(radii[i]));
      lv.push_back(std::log(values[i]));
    }
  }
  out.n_used = static_cast<int>(lr.size());
  if (out.n_used < 2) {
    out.degenerate = true;
    return out;
  }
  out.slope = fit_linear(lr, lv).slope;
  out.band = bootstrap_slope_band(lr, lv, 200, seed, stream);
  return out;
}

} // namespace

ProbeSet build_probes(int d, int n_directions, std::uint64_t seed,
                      std::uint64_t stream,
                      const std::vector<double>& far_radii) {
  if (d < 1) throw std::invalid_argument("build_probes: dimension must be >= 1");
  Philox4x32 rng(seed, stream);
  const std::vector<Eigen::VectorXd> dirs =
      unit_directions(d, n_directions, rng);

  const std::vector<double> probs = {1e-4, 1e-3, 0.01, 0.05, 0.1,
                                     0.25, 0.5,  0.75, 0.9,  0.95,
                                     0.99, 0.999, 0.9999, 1 - 1e-5, 1 - 1e-6};
  std::set<double> radii;
  for (double p : probs) radii.insert(chi_quantile(d, p));

  ProbeSet set;
  set.dim = d;
  set.extrapolation_radius = chi_quantile(d, 1 - 1e-6);
  for (double r : far_radii)
    if (r > 0) radii.insert(r);

  for (double r : radii) {
    ProbeLevel level;
    level.r = r;
    level.extrapolated = r > set.extrapolation_radius;
    for (const auto& u : dirs) level.points.push_back(r * u);
    set.levels.push_back(std::move(level));
  }
  return set;
}

BoundReport displacement_bound_check(const TransportMap& map,
                                     const ProbeSet& probes,
                                     std::uint64_t seed,
                                     std::uint64_t stream) {
  if (map.dim() != probes.dim)
    throw std::invalid_argument("displacement_bound_check: probe dimension mismatch");
  const double d = static_cast<double>(probes.dim);

  BoundReport rep;
  rep.check = "displacement";
  rep.statement =
      "|T(x)| <= C (d + |x|^2) with fitted C; growth exponent of the radial "
      "max of |T| at most 2 (+0.1 tolerance)";

  std::vector<double> radii, vals;
  double c_hat = 0;
  for (const auto& level : probes.levels) {
    const double v = max_abs_map_norm(map, level);
    radii.push_back(level.r);
    vals.push_back(v);
    c_hat = std::max(c_hat, v / (d + level.r * level.r));
  }
  for (size_t i = 0; i < radii.size(); ++i)
    rep.rows.push_back({radii[i], vals[i],
                        c_hat * (d + radii[i] * radii[i]),
                        probes.levels[i].extrapolated});

  const DecadeSlope fit = fit_largest_decade(radii, vals, seed, stream);
  if (fit.degenerate)
    rep.note("map vanishes on the probe radii; growth exponent taken as 0");

  rep.constant = c_hat;
  rep.exponent = fit.slope;
  rep.exponent_band = fit.band;
  rep.margin = 2.1 - fit.slope;
  rep.values["n_decade_rows"] = fit.n_used;
  rep.pass = std::isfinite(c_hat) && fit.slope <= 2.1;
  return rep;
}

BoundReport concentration_constant_bound_check(const TransportMap& map,
                                               const ConcentrationSpec& spec,
                                               const ProbeSet& probes) {
  if (map.dim() != probes.dim)
    throw std::invalid_argument(
        "concentration_constant_bound_check: probe dimension mismatch");
  if (!(spec.constant > 0))
    throw std::invalid_argument(
        "concentration_constant_bound_check: constant must be positive");
  const double d = static_cast<double>(probes.dim);

  BoundReport rep;
  rep.check = "displacement-explicit";
  double factor = kNan;
  bool gaussian_kind = false;
  switch (spec.kind) {
    case ConcentrationSpec::Kind::kExponential:
      factor = std::max(12.0 / spec.constant, 8.0);
      rep.statement =
          "|T(x)| <= max(12/alpha, 8) (|x|^2 + 17d) for an exponentially "
          "concentrated target";
      break;
    case ConcentrationSpec::Kind::kGaussian:
      factor = std::max(12.0 / std::sqrt(spec.constant), 8.0);
      gaussian_kind = true;
      rep.statement =
          "|T(x)| <= max(12 beta^{-1/2}, 8) sqrt(|x|^2 + 17d) for a gaussian "
          "concentrated target";
      break;
    case ConcentrationSpec::Kind::kMixedProfile:
      throw std::invalid_argument(
          "concentration_constant_bound_check: no explicit displacement bound "
          "for the mixed profile kind");
  }

  double margin = std::numeric_limits<double>::infinity();
  double worst_r = kNan;
  for (const auto& level : probes.levels) {
    const double v = max_abs_map_norm(map, level);
    const double base = level.r * level.r + 17 * d;
    const double bound = gaussian_kind ? factor * std::sqrt(base) : factor * base;
    rep.rows.push_back({level.r, v, bound, level.extrapolated});
    if (bound - v < margin) {
      margin = bound - v;
      worst_r = level.r;
    }
  }

  rep.constant = factor;
  rep.margin = margin;
  rep.values["declared_rate"] = spec.constant;
  rep.values["worst_radius"] = worst_r;
  rep.pass = margin >= 0;
  return rep;
}

namespace {

// Shared estimator core; chooser maps a sample point to the (unit)
// differentiation direction.
BoundReport lp_derivative_core(
    const TransportMap& map, double p, long n, std::uint64_t seed,
    std::uint64_t stream, const std::string& direction_label,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& chooser) {
  if (!(p >= 0) || p + 2 > 40)
    throw std::invalid_argument("lp_derivative_norm: p must be in [0, 38]");
  if (!map.has_jacobian())
    throw std::invalid_argument("lp_derivative_norm: map has no jacobian");
  const int d = map.dim();
  if (d > 1 && !map.has_full_jacobian())
    throw std::invalid_argument(
        "lp_derivative_norm: directional second derivative needs the full "
        "jacobian in dimension > 1");

  Philox4x32 rng(seed, stream);
  const double q = p + 2;
  std::vector<double> terms(static_cast<size_t>(n));
  long n_negative = 0;
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd x = rng.normal_vec(d);
    double dd;
    if (d == 1) {
      dd = map.jacobian_eigenvalues(x)[0];
    } else {
      const Eigen::VectorXd u = chooser(x);
      dd = u.dot(map.jacobian(x) * u);
    }
    if (dd < 0) {
      ++n_negative;
      dd = 0;
    }
    terms[static_cast<size_t>(i)] =
        std::pow(dd / std::sqrt(d + x.squaredNorm()), q);
  }

  const double moment = mean_of(terms);
  const double se_moment = std::sqrt(pop_variance(terms) / static_cast<double>(n));
  const double est = moment > 0 ? std::pow(moment, 1.0 / q) : 0.0;
  const double rel = moment > 0 ? se_moment / moment / q : 0.0;

  // share of the moment carried by the top percentile of samples
  std::vector<double> sorted = terms;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const long top = std::max(1L, n / 100);
  double sum_top = 0, sum_all = 0;
  for (long i = 0; i < n; ++i) {
    sum_all += sorted[static_cast<size_t>(i)];
    if (i < top) sum_top += sorted[static_cast<size_t>(i)];
  }
  const double share = sum_all > 0 ? sum_top / sum_all : 0.0;

  BoundReport rep;
  rep.check = "lp-derivative-norm";
  rep.statement =
      "L^{p+2} gaussian norm of the directional map derivative (" +
      direction_label +
      ") scaled by sqrt(d + |x|^2), monte carlo estimate with delta-method "
      "band";
  rep.gated = false;
  rep.constant = est;
  rep.values["p"] = p;
  rep.values["estimate"] = est;
  rep.values["estimate_lo"] = est * (1 - 3 * rel);
  rep.values["estimate_hi"] = est * (1 + 3 * rel);
  rep.values["moment"] = moment;
  rep.values["moment_se"] = se_moment;
  rep.values["top_percentile_share"] = share;
  rep.values["n"] = static_cast<double>(n);
  if (share > 0.5)
    rep.note("heavy tail: top 1% of samples carries more than half of the "
             "moment; estimate unreliable");
  if (n_negative > 0)
    rep.note("negative directional derivative at " +
             std::to_string(n_negative) + " samples, clamped to 0");
  rep.pass = std::isfinite(est);
  return rep;
}

}  // namespace

BoundReport lp_derivative_norm(const TransportMap& map,
                               const Eigen::VectorXd& e, double p, long n,
                               std::uint64_t seed, std::uint64_t stream) {
  if (e.size() != map.dim())
    throw std::invalid_argument("lp_derivative_norm: direction dimension mismatch");
  const double enorm = e.norm();
  if (enorm < 1e-12)
    throw std::invalid_argument("lp_derivative_norm: zero direction");
  const Eigen::VectorXd u = e / enorm;
  return lp_derivative_core(map, p, n, seed, stream, "fixed direction",
                            [&u](const Eigen::VectorXd&) { return u; });
}

BoundReport lp_derivative_norm(const TransportMap& map,
                               DerivativeDirection mode, double p, long n,
                               std::uint64_t seed, std::uint64_t stream) {
  const int d = map.dim();
  if (mode == DerivativeDirection::kTangential && d < 2)
    throw std::invalid_argument(
        "lp_derivative_norm: tangential direction needs dimension >= 2");
  const bool radial = mode == DerivativeDirection::kRadial;
  auto chooser = [radial, d](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double r = x.norm();
    if (r < 1e-12) return Eigen::VectorXd::Unit(d, 0);
    const Eigen::VectorXd xhat = x / r;
    if (radial) return xhat;
    // axis least aligned with x, projected off the radial direction
    int k = 0;
    for (int j = 1; j < d; ++j)
      if (std::abs(xhat[j]) < std::abs(xhat[k])) k = j;
    Eigen::VectorXd t = Eigen::VectorXd::Unit(d, k) - xhat[k] * xhat;
    return t / t.norm();
  };
  return lp_derivative_core(map, p, n, seed, stream,
                            radial ? "radial direction" : "tangential direction",
                            chooser);
}

BoundReport opnorm_growth_check(const TransportMap& map,
                                const ProbeSet& probes, std::uint64_t seed,
                                std::uint64_t stream) {
  if (!map.has_jacobian())
    throw std::invalid_argument("opnorm_growth_check: map has no jacobian");
  if (map.dim() != probes.dim)
    throw std::invalid_argument("opnorm_growth_check: probe dimension mismatch");
  const double d = static_cast<double>(probes.dim);

  BoundReport rep;
  rep.check = "opnorm-growth";
  rep.statement =
      "jacobian operator norm against the proved (d+|x|^2)^2 envelope, the "
      "refined d^{4/3}+|x|^2 envelope, and the conjectural sqrt(d+|x|^2); "
      "gate: observed growth exponent at most 2.1";

  std::vector<double> radii, vals;
  double c_proved = 0, c_strong = 0, c_conj = 0;
  for (const auto& level : probes.levels) {
    const double v = max_opnorm(map, level);
    const double r2 = level.r * level.r;
    radii.push_back(level.r);
    vals.push_back(v);
    c_proved = std::max(c_proved, v / ((d + r2) * (d + r2)));
    c_strong = std::max(c_strong, v / (std::pow(d, 4.0 / 3.0) + r2));
    c_conj = std::max(c_conj, v / std::sqrt(d + r2));
  }
  for (size_t i = 0; i < radii.size(); ++i) {
    const double r2 = radii[i] * radii[i];
    rep.rows.push_back({radii[i], vals[i], c_proved * (d + r2) * (d + r2),
                        probes.levels[i].extrapolated});
  }

  const DecadeSlope fit = fit_largest_decade(radii, vals, seed, stream);
  if (fit.degenerate)
    rep.note("operator norm vanishes on the probe radii; exponent taken as 0");

  rep.constant = c_proved;
  rep.exponent = fit.slope;
  rep.exponent_band = fit.band;
  rep.margin = 2.1 - fit.slope;
  rep.values["c_proved_envelope"] = c_proved;
  rep.values["c_refined_envelope"] = c_strong;
  rep.values["c_conjecture_envelope"] = c_conj;
  rep.pass = fit.slope <= 2.1;
  return rep;
}

BoundReport eigen_log_variance(const TransportMap& map, long n,
                               std::uint64_t seed, std::uint64_t stream) {
  if (!map.has_jacobian())
    throw std::invalid_argument("eigen_log_variance: map has no jacobian");
  const int d = map.dim();

  Philox4x32 rng(seed, stream);
  std::vector<std::vector<double>> logs(static_cast<size_t>(d));
  for (auto& v : logs) v.reserve(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd x = rng.normal_vec(d);
    const Eigen::VectorXd eigs = map.jacobian_eigenvalues(x);
    for (int k = 0; k < d; ++k) {
      if (!(eigs[k] > 0))
        throw std::runtime_error(
            "eigen_log_variance: nonpositive jacobian eigenvalue, map "
            "degenerate");
      logs[static_cast<size_t>(k)].push_back(std::log(eigs[k]));
    }
  }

  double var_max = -1;
  int worst = 0;
  for (int k = 0; k < d; ++k) {
    const double v = pop_variance(logs[static_cast<size_t>(k)]);
    if (v > var_max) {
      var_max = v;
      worst = k;
    }
  }
  // sampling band of a variance estimate from the fourth central moment
  const auto& wl = logs[static_cast<size_t>(worst)];
  const double m = mean_of(wl);
  double m4 = 0;
  for (double z : wl) m4 += std::pow(z - m, 4);
  m4 /= static_cast<double>(wl.size());
  const double se =
      std::sqrt(std::max(m4 - var_max * var_max, 0.0) / static_cast<double>(n));

  BoundReport rep;
  rep.check = "eigen-log-variance";
  rep.statement =
      "variance under the gaussian of log jacobian eigenvalues, each index at "
      "most 4 plus a 3-sigma sampling band";
  rep.constant = var_max;
  rep.margin = 4 + 3 * se - var_max;
  rep.values["var_max"] = var_max;
  rep.values["band_3sigma"] = 3 * se;
  rep.values["worst_index"] = worst;
  rep.values["n"] = static_cast<double>(n);
  rep.pass = var_max <= 4 + 3 * se;
  return rep;
}

BoundReport monotonicity_check(const TransportMap& map, long n_pairs,
                               std::uint64_t seed, std::uint64_t stream) {
  const int d = map.dim();
  Philox4x32 rng(seed, stream);
  double min_inner = std::numeric_limits<double>::infinity();
  for (long i = 0; i < n_pairs; ++i) {
    const Eigen::VectorXd x = rng.normal_vec(d);
    const Eigen::VectorXd y = rng.normal_vec(d);
    const double inner = (map.eval(y) - map.eval(x)).dot(y - x);
    min_inner = std::min(min_inner, inner);
  }
  const double tol = std::max(1e-8, map.monotonicity_tol());

  BoundReport rep;
  rep.check = "monotonicity";
  rep.statement =
      "<T(y) - T(x), y - x> >= 0 over random gaussian pairs, up to the map's "
      "documented tolerance";
  rep.constant = min_inner;
  rep.margin = min_inner + tol;
  rep.values["min_inner"] = min_inner;
  rep.values["tolerance"] = tol;
  rep.values["n_pairs"] = static_cast<double>(n_pairs);
  rep.pass = min_inner >= -tol;
  return rep;
}

} // namespace otlab
