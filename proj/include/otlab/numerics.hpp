#pragma once

// Shared numeric kernels: adaptive quadrature, normal/chi distribution
// helpers with log-space tails (needed far beyond where the plain cdf
// underflows), log-log slope fits with bootstrap bands, and 1d root/min
// searches.  Thin wrappers over Boost.Math where a mature routine exists.

#include <cstdint>
#include <functional>
#include <vector>

namespace otlab {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

// --- standard normal ---
double normal_pdf(double x);
double normal_cdf(double x);
double normal_sf(double x);
double log_normal_sf(double x);  // accurate for all x, asymptotic series past erfc underflow
double normal_quantile(double u);

// --- chi distribution (norm of a standard gaussian vector in R^d) ---
double log_gamma_q(double a, double z);  // log of the regularized upper gamma, any z
double chi_cdf(int d, double r);
double chi_sf(int d, double r);
double log_chi_sf(int d, double r);
double chi_quantile(int d, double p);
double chi_log_pdf(int d, double r);
double log_chi_norm(int d);  // log(2^{d/2-1} Gamma(d/2))

double logsumexp(const std::vector<double>& v);

// --- fits ---
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
SlopeFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct Band {
  double lo = 0.0;
  double hi = 0.0;
};
// Pair-resampling bootstrap of the linear slope, percentile [2.5, 97.5].
Band bootstrap_slope_band(const std::vector<double>& x, const std::vector<double>& y,
                          int n_resample, std::uint64_t seed, std::uint64_t stream);

// --- 1d searches ---
// Newton with bisection safeguard; f must be monotone with a root in [lo, hi].
double root_newton_bisect(const std::function<double(double)>& f,
                          const std::function<double(double)>& df, double lo,
                          double hi, double xtol = 1e-13, int max_iter = 200);
double minimize_1d(const std::function<double(double)>& f, double lo, double hi,
                   double tol = 1e-10);

// --- small statistics helpers (population convention, divide by n) ---
double mean_of(const std::vector<double>& v);
double pop_variance(const std::vector<double>& v);
double percentile(std::vector<double> v, double q);

}  // namespace otlab
