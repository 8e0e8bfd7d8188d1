#pragma once

#include <cstdint>

#include "otlab/bound_report.hpp"
#include "otlab/potential.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

// Pushes gaussian draws through the map and compares them against direct
// target samples: mean and covariance everywhere, plus a two-sample KS
// statistic in one dimension.  Thresholds are 3-sigma CLT bands with the
// target side widened by its effective sample size when draws are correlated.
BoundReport pushforward_test(const TransportMap& map, const Potential& pot,
                             long n, std::uint64_t seed);

// Two-sample Kolmogorov-Smirnov distance between sorted-merge empirical cdfs.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

} // namespace otlab
