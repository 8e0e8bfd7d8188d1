#pragma once

// Residual of the change-of-variables identity along a map with analytic
// jacobian structure: log gaussian density at x minus log target density at
// T(x) minus log det of the jacobian.  The target potential is only known up
// to an additive constant, so residuals are reported centered at their
// median; a correctly wired exact map centers to zero within quadrature
// noise.

#include <vector>

#include "otlab/potential.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

struct MongeAmpereResult {
  std::vector<double> centered;  // residuals after removing the median
  double median_raw = 0.0;
  double max_abs_centered = 0.0;
};

MongeAmpereResult monge_ampere_residual(const TransportMap& map, const Potential& pot,
                                        const std::vector<Eigen::VectorXd>& points);

}  // namespace otlab
