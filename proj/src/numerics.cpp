#include "otlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "otlab/rng.hpp"

namespace otlab {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 15, tol);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::sqrt(2.0)); }

double normal_sf(double x) { return 0.5 * boost::math::erfc(x / std::sqrt(2.0)); }

double log_normal_sf(double x) {
  if (x < 36.0) return std::log(normal_sf(x));
  // Phi_bar(x) = phi(x)/x * (1 - 1/x^2 + 3/x^4 - ...), terms (-1)^k (2k-1)!!/x^2k
  double inv2 = 1.0 / (x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(2.0 * k - 1.0) * inv2;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return -0.5 * x * x - std::log(x) - 0.5 * std::log(2.0 * M_PI) + std::log(sum);
}

double normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("normal_quantile: u outside (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double log_gamma_q(double a, double z) {
  if (z <= 0.0) return 0.0;
  if (z < 600.0) return std::log(boost::math::gamma_q(a, z));
  // Q(a,z) ~ z^{a-1} e^{-z} / Gamma(a) * sum_k prod_{j<=k}(a-j)/z^k
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 40; ++k) {
    term *= (a - k) / z;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return (a - 1.0) * std::log(z) - z - std::lgamma(a) + std::log(sum);
}

double chi_cdf(int d, double r) {
  if (r <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * d, 0.5 * r * r);
}

double chi_sf(int d, double r) {
  if (r <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * d, 0.5 * r * r);
}

double log_chi_sf(int d, double r) {
  if (r <= 0.0) return 0.0;
  return log_gamma_q(0.5 * d, 0.5 * r * r);
}

double chi_quantile(int d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("chi_quantile: p outside (0,1)");
  boost::math::chi_squared dist(d);
  double q2 = (p <= 0.5) ? boost::math::quantile(dist, p)
                         : boost::math::quantile(boost::math::complement(dist, 1.0 - p));
  return std::sqrt(q2);
}

double log_chi_norm(int d) {
  return (0.5 * d - 1.0) * std::log(2.0) + std::lgamma(0.5 * d);
}

double chi_log_pdf(int d, double r) {
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  return (d - 1.0) * std::log(r) - 0.5 * r * r - log_chi_norm(d);
}

double logsumexp(const std::vector<double>& v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_linear: need >= 2 points");
  size_t n = x.size();
  double mx = mean_of(x), my = mean_of(y);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy == 0.0) ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  lx.reserve(x.size());
  ly.reserve(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return fit_linear(lx, ly);
}

Band bootstrap_slope_band(const std::vector<double>& x, const std::vector<double>& y,
                          int n_resample, std::uint64_t seed, std::uint64_t stream) {
  size_t n = x.size();
  if (n < 3) return {0.0, 0.0};
  Philox4x32 rng(seed, stream);
  std::vector<double> slopes;
  slopes.reserve(n_resample);
  std::vector<double> rx(n), ry(n);
  for (int b = 0; b < n_resample; ++b) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (size_t i = 0; i < n; ++i) {
        size_t j = static_cast<size_t>(rng.uniform01() * n);
        if (j >= n) j = n - 1;
        rx[i] = x[j];
        ry[i] = y[j];
      }
      double lo = *std::min_element(rx.begin(), rx.end());
      double hi = *std::max_element(rx.begin(), rx.end());
      if (hi > lo) break;  // need spread to fit a slope
    }
    slopes.push_back(fit_linear(rx, ry).slope);
  }
  return {percentile(slopes, 0.025), percentile(slopes, 0.975)};
}

double root_newton_bisect(const std::function<double(double)>& f,
                          const std::function<double(double)>& df, double lo,
                          double hi, double xtol, int max_iter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("root_newton_bisect: root not bracketed");
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fhi > 0.0)) {
      hi = x;
      fhi = fx;
    } else {
      lo = x;
      flo = fx;
    }
    double d = df(x);
    double step = (d != 0.0) ? fx / d : 0.0;
    double xn = x - step;
    if (!(xn > lo && xn < hi) || step == 0.0) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) < xtol) return xn;
    x = xn;
  }
  return x;
}

double minimize_1d(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double pop_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("percentile: empty");
  std::sort(v.begin(), v.end());
  double pos = q * (v.size() - 1);
  size_t i = static_cast<size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  double frac = pos - i;
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

}  // namespace otlab
