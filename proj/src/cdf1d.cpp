#include "otlab/cdf1d.hpp"

#include <algorithm>
#include <cmath>

#include "otlab/numerics.hpp"

namespace otlab {

namespace {

constexpr double kLogDrop = 60.0;  // density ratio cutoff e^{-60} for truncation

// smallest h (by doubling/halving from 1) with g(h) >= kLogDrop; g increasing
double reach(const std::function<double(double)>& g) {
  double h = 1.0;
  if (g(h) < kLogDrop) {
    while (g(h) < kLogDrop && h < 1e12) h *= 2.0;
  } else {
    while (h > 1e-12 && g(0.5 * h) >= kLogDrop) h *= 0.5;
  }
  return h;
}

}  // namespace

Cdf1D::Cdf1D(const Potential& pot, int n_anchors) : pot_(pot) {
  if (pot.dim() != 1) throw std::invalid_argument("Cdf1D: potential must be 1d");
  auto V = [&](double x) { return pot_.value1(x); };

  double L = 1.0;
  while ((V(-L) - V(0.0) < kLogDrop || V(L) - V(0.0) < kLogDrop) && L < 1e9) L *= 2.0;
  mode_ = minimize_1d(V, -L, L, 1e-11 * L);
  v_mode_ = V(mode_);

  double left = reach([&](double h) { return vrel(mode_ - h); });
  double right = reach([&](double h) { return vrel(mode_ + h); });
  double lo = mode_ - left, hi = mode_ + right;

  xs_.reserve(n_anchors + 3);
  for (int i = 0; i <= n_anchors; ++i) xs_.push_back(lo + (hi - lo) * i / n_anchors);
  xs_.push_back(mode_);
  if (0.0 > lo && 0.0 < hi) xs_.push_back(0.0);  // kink of the non-smooth families
  std::sort(xs_.begin(), xs_.end());
  xs_.erase(std::unique(xs_.begin(), xs_.end()), xs_.end());

  const size_t m = xs_.size();
  std::vector<double> cum(m);
  cum[0] = std::exp(tail_left(xs_.front()) - vrel(xs_.front()));
  for (size_t i = 1; i < m; ++i) {
    double piece = integrate([&](double t) { return std::exp(-vrel(t)); }, xs_[i - 1], xs_[i], 1e-13);
    cum[i] = cum[i - 1] + piece;
  }
  double z = cum.back() + std::exp(tail_right(xs_.back()) - vrel(xs_.back()));
  log_z_ = std::log(z);

  log_sf_.resize(m);
  log_cf_.resize(m);
  for (size_t i = 0; i < m; ++i) {
    double s = z - cum[i];
    log_sf_[i] = (s >= 0.5 * z) ? std::log(s) - log_z_
                                : tail_right(xs_[i]) - vrel(xs_[i]) - log_z_;
    log_cf_[i] = (cum[i] >= 0.5 * z) ? std::log(cum[i]) - log_z_
                                     : tail_left(xs_[i]) - vrel(xs_[i]) - log_z_;
  }
}

double Cdf1D::tail_right(double x) const {
  auto vdiff = [&](double t) { return vrel(t) - vrel(x); };
  double h = reach([&](double s) { return vdiff(x + s); });
  auto f = [&](double t) { return std::exp(-vdiff(t)); };
  double J;
  if (!pot_.info().smooth && x < 0.0 && x + h > 0.0)
    J = integrate(f, x, 0.0, 1e-13) + integrate(f, 0.0, x + h, 1e-13);
  else
    J = integrate(f, x, x + h, 1e-13);
  return std::log(J);
}

double Cdf1D::tail_left(double x) const {
  auto vdiff = [&](double t) { return vrel(t) - vrel(x); };
  double h = reach([&](double s) { return vdiff(x - s); });
  auto f = [&](double t) { return std::exp(-vdiff(t)); };
  double J;
  if (!pot_.info().smooth && x > 0.0 && x - h < 0.0)
    J = integrate(f, 0.0, x, 1e-13) + integrate(f, x - h, 0.0, 1e-13);
  else
    J = integrate(f, x - h, x, 1e-13);
  return std::log(J);
}

double Cdf1D::log_density(double x) const { return -vrel(x) - log_z_; }
double Cdf1D::density(double x) const { return std::exp(log_density(x)); }

double Cdf1D::log_survival(double x) const {
  if (x >= mode_) return tail_right(x) - vrel(x) - log_z_;
  return std::log1p(-std::exp(log_cdf_lower(x)));
}

double Cdf1D::log_cdf_lower(double x) const {
  if (x <= mode_) return tail_left(x) - vrel(x) - log_z_;
  double ls = tail_right(x) - vrel(x) - log_z_;
  return std::log1p(-std::exp(ls));
}

double Cdf1D::cdf(double x) const { return std::exp(log_cdf_lower(x)); }
double Cdf1D::survival(double x) const { return std::exp(log_survival(x)); }

double Cdf1D::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("Cdf1D::quantile: u outside (0,1)");
  return (u <= 0.5) ? quantile_from_log_cdf(std::log(u))
                    : quantile_from_log_survival(std::log1p(-u));
}

// Bracket against the anchor tables, expanding beyond them when needed, then
// hand over to safeguarded Newton on the log scale.
double Cdf1D::solve_monotone(double target, bool survival_side, double lo, double hi) const {
  auto g = [&](double t) {
    return (survival_side ? log_survival(t) : log_cdf_lower(t)) - target;
  };
  auto dg = [&](double t) {
    double lt = survival_side ? log_survival(t) : log_cdf_lower(t);
    double d = std::exp(log_density(t) - lt);
    return survival_side ? -d : d;
  };
  double xtol = 1e-13 * (1.0 + std::min(std::abs(lo), std::abs(hi)));
  return root_newton_bisect(g, dg, lo, hi, xtol);
}

double Cdf1D::quantile_from_log_survival(double ls) const {
  if (!(ls < 0.0)) throw std::domain_error("Cdf1D: log survival target must be negative");
  // log_sf_ decreases along anchors
  if (ls <= log_sf_.back()) {
    double a = xs_.back(), step = std::max(1.0, 0.01 * (xs_.back() - xs_.front()));
    double b = a + step;
    while (log_survival(b) > ls) {
      a = b;
      step *= 2.0;
      b = a + step;
      if (b > a + 1e12) throw std::runtime_error("Cdf1D: right quantile bracket failed");
    }
    return solve_monotone(ls, true, a, b);
  }
  if (ls >= log_sf_.front()) {
    double b = xs_.front(), step = std::max(1.0, 0.01 * (xs_.back() - xs_.front()));
    double a = b - step;
    while (log_survival(a) < ls) {
      b = a;
      step *= 2.0;
      a = b - step;
      if (a < b - 1e12) throw std::runtime_error("Cdf1D: left quantile bracket failed");
    }
    return solve_monotone(ls, true, a, b);
  }
  auto it = std::lower_bound(log_sf_.begin(), log_sf_.end(), ls, std::greater<double>());
  size_t j = static_cast<size_t>(it - log_sf_.begin());  // first anchor with log_sf < ls
  return solve_monotone(ls, true, xs_[j - 1], xs_[j]);
}

double Cdf1D::quantile_from_log_cdf(double lf) const {
  if (!(lf < 0.0)) throw std::domain_error("Cdf1D: log cdf target must be negative");
  // log_cf_ increases along anchors
  if (lf <= log_cf_.front()) {
    double b = xs_.front(), step = std::max(1.0, 0.01 * (xs_.back() - xs_.front()));
    double a = b - step;
    while (log_cdf_lower(a) > lf) {
      b = a;
      step *= 2.0;
      a = b - step;
      if (a < b - 1e12) throw std::runtime_error("Cdf1D: left quantile bracket failed");
    }
    return solve_monotone(lf, false, a, b);
  }
  if (lf >= log_cf_.back()) {
    double a = xs_.back(), step = std::max(1.0, 0.01 * (xs_.back() - xs_.front()));
    double b = a + step;
    while (log_cdf_lower(b) < lf) {
      a = b;
      step *= 2.0;
      b = a + step;
      if (b > a + 1e12) throw std::runtime_error("Cdf1D: right quantile bracket failed");
    }
    return solve_monotone(lf, false, a, b);
  }
  auto it = std::lower_bound(log_cf_.begin(), log_cf_.end(), lf);
  size_t j = static_cast<size_t>(it - log_cf_.begin());
  return solve_monotone(lf, false, xs_[j - 1], xs_[j]);
}

}  // namespace otlab
