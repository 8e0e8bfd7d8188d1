#pragma once

// Normalized law of a 1d log-concave density e^{-V}.  Tail quantities keep
// relative accuracy arbitrarily far out: survival/lower-cdf are local
// integrals with the exponent factored at the evaluation point, never a
// subtraction of nearby masses, and quantiles can be asked for in log space.

#include <vector>

#include "otlab/potential.hpp"

namespace otlab {

class Cdf1D {
 public:
  explicit Cdf1D(const Potential& pot, int n_anchors = 512);

  const Potential& potential() const { return pot_; }
  double mode() const { return mode_; }
  double log_mass() const { return log_z_ - v_mode_; }  // log of the e^{-V} integral

  double log_density(double x) const;
  double density(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  double log_survival(double x) const;
  double log_cdf_lower(double x) const;

  double quantile(double u) const;
  double quantile_from_log_cdf(double lf) const;
  double quantile_from_log_survival(double ls) const;

  double anchor_lo() const { return xs_.front(); }
  double anchor_hi() const { return xs_.back(); }

 private:
  double vrel(double x) const { return pot_.value1(x) - v_mode_; }
  double tail_right(double x) const;  // log int_x^inf e^{-(V(t)-V(x))} dt
  double tail_left(double x) const;
  double solve_monotone(double target, bool survival_side, double lo, double hi) const;

  Potential pot_;
  double mode_ = 0.0;
  double v_mode_ = 0.0;
  double log_z_ = 0.0;  // log of the mass on the e^{-(V - v_mode)} scale
  std::vector<double> xs_;
  std::vector<double> log_sf_;  // normalized log survival at anchors
  std::vector<double> log_cf_;  // normalized log cdf at anchors
};

}  // namespace otlab
