#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "otlab/batch.hpp"
#include "otlab/bound_report.hpp"

namespace otlab {

// Tail law a measure is declared (or fitted) to satisfy, for 1-Lipschitz f:
//   exponential:  mu(f >= mean f + r) <= exp(-alpha r)
//   gaussian:     mu(f >= mean f + r) <= exp(-beta r^2 / 2)
//   mixed profile: mu(f >= mean f + c r) <= exp(-c r^2 / (r + sqrt(d)))
struct ConcentrationSpec {
  enum class Kind { kExponential, kGaussian, kMixedProfile };
  Kind kind = Kind::kGaussian;
  double constant = 1.0; // alpha, beta, or the profile constant
  int dim = 1;
};

std::string to_string(ConcentrationSpec::Kind kind);

// Empirical upper-tail curve of one functional over the radius grid.
struct TailCurve {
  std::string functional; // "dir-<k>" or "norm"
  std::vector<double> r;
  std::vector<double> p_hat; // one-sided tail mass
  std::vector<double> slack; // 3-sigma binomial band plus a small-count guard
  std::vector<bool> in_fit;  // enough hits and inside the tail regime
};

struct ConcentrationFit {
  ConcentrationSpec::Kind kind;
  // regression estimate of the rate for the worst functional; the headline
  // number, since the pointwise certificate is biased upward at finite n
  double rate_fit = kNan;
  Band fit_band{kNan, kNan}; // +-3 se on rate_fit
  // largest rate every empirical tail allows within its slack band
  double rate_certified = kNan;
  std::vector<TailCurve> curves;
  std::vector<std::string> notes;
};

struct ConcentrationOptions {
  int min_count = 20;      // radii with fewer tail hits stay out of the fits
  double p_max_fit = 0.2;  // only the genuine tail enters the regression
};

// Scans random unit-vector functionals plus the norm functional.  Rates are
// fitted per functional by weighted least squares on -log tail mass, with a
// log-radius regressor in the gaussian case to absorb the polynomial factor
// of true gaussian tails; the reported rate is the minimum over functionals.
ConcentrationFit concentration_profile(const SampleBatch& samples,
                                       int n_directions,
                                       const std::vector<double>& rs,
                                       ConcentrationSpec::Kind kind,
                                       std::uint64_t seed, std::uint64_t stream,
                                       const ConcentrationOptions& opt = {});

} // namespace otlab
