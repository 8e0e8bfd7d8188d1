#include "otlab/transport_1d.hpp"

#include <cmath>

#include "otlab/numerics.hpp"

namespace otlab {

Brenier1DMap::Brenier1DMap(const Potential& pot, int n_anchors) : dist_(pot, n_anchors) {}

double Brenier1DMap::eval1(double x) const {
  // Phi(x) = Phi_bar(-x); pick the representation that stays relative-accurate
  if (x <= 0.0) return dist_.quantile_from_log_cdf(log_normal_sf(-x));
  return dist_.quantile_from_log_survival(log_normal_sf(x));
}

double Brenier1DMap::deriv1(double x) const {
  double t = eval1(x);
  double log_phi = -0.5 * x * x - 0.5 * std::log(2.0 * M_PI);
  return std::exp(log_phi - dist_.log_density(t));
}

}  // namespace otlab
