#include "otlab/concentration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otlab/rng.hpp"

namespace otlab {

std::string to_string(ConcentrationSpec::Kind kind) {
  switch (kind) {
    case ConcentrationSpec::Kind::kExponential: return "exponential";
    case ConcentrationSpec::Kind::kGaussian: return "gaussian";
    case ConcentrationSpec::Kind::kMixedProfile: return "mixed-profile";
  }
  return "unknown";
}

namespace {

// centered functional values, sorted ascending for fast tail counting
struct Functional {
  std::string name;
  std::vector<double> dev;
};

double tail_fraction(const std::vector<double>& sorted_dev, double r) {
  const auto it =
      std::lower_bound(sorted_dev.begin(), sorted_dev.end(), r);
  return static_cast<double>(sorted_dev.end() - it) /
         static_cast<double>(sorted_dev.size());
}

struct RateFit {
  double rate = kNan;
  double se = kNan;
  int n_used = 0;
};

// weighted least squares of y on the given regressor columns; returns the
// leading coefficient and its standard error
RateFit wls_leading(const std::vector<std::vector<double>>& cols,
                    const std::vector<double>& y,
                    const std::vector<double>& w) {
  const int k = static_cast<int>(cols.size());
  const int m = static_cast<int>(y.size());
  RateFit out;
  out.n_used = m;
  if (m < k + 1) return out;
  Eigen::MatrixXd x(m, k);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < m; ++i) x(i, c) = cols[static_cast<size_t>(c)][static_cast<size_t>(i)];
  Eigen::VectorXd yy(m), ww(m);
  for (int i = 0; i < m; ++i) {
    yy[i] = y[static_cast<size_t>(i)];
    ww[i] = w[static_cast<size_t>(i)];
  }
  Eigen::MatrixXd xtw = x.transpose() * ww.asDiagonal();
  Eigen::MatrixXd gram = xtw * x;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) return out;
  Eigen::VectorXd beta = ldlt.solve(xtw * yy);
  const Eigen::VectorXd resid = yy - x * beta;
  const double dof = std::max(1.0, static_cast<double>(m - k));
  const double s2 = (ww.array() * resid.array().square()).sum() / dof;
  Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k)) * s2;
  out.rate = beta[0];
  out.se = std::sqrt(std::max(cov(0, 0), 0.0));
  return out;
}

} // namespace

ConcentrationFit concentration_profile(const SampleBatch& samples,
                                       int n_directions,
                                       const std::vector<double>& rs,
                                       ConcentrationSpec::Kind kind,
                                       std::uint64_t seed, std::uint64_t stream,
                                       const ConcentrationOptions& opt) {
  const long n = samples.n();
  const int d = samples.d();
  if (n < 100)
    throw std::invalid_argument("concentration_profile: too few samples");
  if (rs.empty())
    throw std::invalid_argument("concentration_profile: empty radius grid");

  ConcentrationFit fit;
  fit.kind = kind;
  Philox4x32 rng(seed, stream);

  std::vector<Functional> fns;
  for (int k = 0; k < n_directions; ++k) {
    Eigen::VectorXd u = rng.normal_vec(d);
    u /= u.norm();
    Eigen::VectorXd v = samples.points * u;
    Functional f;
    f.name = "dir-" + std::to_string(k);
    f.dev.resize(static_cast<size_t>(n));
    const double mean = v.mean();
    for (long i = 0; i < n; ++i) f.dev[static_cast<size_t>(i)] = v[i] - mean;
    fns.push_back(std::move(f));
  }
  {
    Eigen::VectorXd norms = samples.points.rowwise().norm();
    Functional f;
    f.name = "norm";
    f.dev.resize(static_cast<size_t>(n));
    const double mean = norms.mean();
    for (long i = 0; i < n; ++i) f.dev[static_cast<size_t>(i)] = norms[i] - mean;
    fns.push_back(std::move(f));
  }
  for (auto& f : fns) std::sort(f.dev.begin(), f.dev.end());

  const double nn = static_cast<double>(n);
  double worst_rate = std::numeric_limits<double>::infinity();
  double worst_se = kNan;
  std::string worst_name;
  double certified = std::numeric_limits<double>::infinity();

  for (const auto& f : fns) {
    TailCurve curve;
    curve.functional = f.name;
    int excluded = 0;

    std::vector<std::vector<double>> cols;
    std::vector<double> y, w;
    const bool gaussian = kind == ConcentrationSpec::Kind::kGaussian;
    const int n_regressors = gaussian ? 3 : 2;
    cols.resize(static_cast<size_t>(n_regressors));

    for (double r : rs) {
      const double p = tail_fraction(f.dev, r);
      const double slack = 3 * std::sqrt(p * (1 - p) / nn) + 3 / nn;
      const long hits = std::lround(p * nn);
      const bool usable =
          r > 0 && hits >= opt.min_count && p <= opt.p_max_fit;
      curve.r.push_back(r);
      curve.p_hat.push_back(p);
      curve.slack.push_back(slack);
      curve.in_fit.push_back(usable);
      if (r > 0 && hits < opt.min_count) ++excluded;

      if (usable && kind != ConcentrationSpec::Kind::kMixedProfile) {
        // certified rate: the largest the tail allows after slack
        const double p_low = p - slack;
        if (p_low > 0) {
          const double c =
              gaussian ? -2 * std::log(p_low) / (r * r) : -std::log(p_low) / r;
          certified = std::min(certified, c);
        }
        cols[0].push_back(gaussian ? r * r / 2 : r);
        if (gaussian) cols[1].push_back(std::log(r));
        cols[static_cast<size_t>(n_regressors) - 1].push_back(1.0);
        y.push_back(-std::log(p));
        w.push_back(nn * p / (1 - p + 1e-12));
      }
    }
    if (excluded > 0)
      fit.notes.push_back(f.name + ": " + std::to_string(excluded) +
                          " radii excluded (fewer than " +
                          std::to_string(opt.min_count) + " tail hits)");

    if (kind != ConcentrationSpec::Kind::kMixedProfile) {
      RateFit rf = wls_leading(cols, y, w);
      if (std::isfinite(rf.rate) && rf.rate < worst_rate) {
        worst_rate = rf.rate;
        worst_se = rf.se;
        worst_name = f.name;
      } else if (!std::isfinite(rf.rate)) {
        fit.notes.push_back(f.name + ": too few tail radii for a rate fit");
      }
    }
    fit.curves.push_back(std::move(curve));
  }

  if (kind == ConcentrationSpec::Kind::kMixedProfile) {
    // both sides depend on the constant; scan a grid for the largest
    // feasible value against every functional and radius
    const double sqd = std::sqrt(static_cast<double>(d));
    double best = kNan;
    for (double c = 5.0; c > 1e-3; c *= 0.95) {
      bool ok = true;
      for (const auto& f : fns) {
        for (double r : rs) {
          if (r <= 0) continue;
          const double p = tail_fraction(f.dev, c * r);
          const double slack = 3 * std::sqrt(p * (1 - p) / nn) + 3 / nn;
          if (p - slack > std::exp(-c * r * r / (r + sqd))) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) {
        best = c;
        break;
      }
    }
    fit.rate_certified = best;
    fit.rate_fit = best;
    fit.notes.push_back(
        "mixed profile constant from a feasibility scan; no regression form");
    return fit;
  }

  if (std::isfinite(worst_rate)) {
    fit.rate_fit = worst_rate;
    fit.fit_band = {worst_rate - 3 * worst_se, worst_rate + 3 * worst_se};
    fit.notes.push_back("rate from functional " + worst_name);
  } else {
    fit.notes.push_back("no functional had enough tail data for a rate fit");
  }
  if (std::isfinite(certified)) fit.rate_certified = certified;
  return fit;
}

} // namespace otlab
