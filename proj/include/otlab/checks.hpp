#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "otlab/batch.hpp"
#include "otlab/bound_report.hpp"
#include "otlab/concentration.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

// Probe points grouped by radius: gaussian-norm quantile radii plus fixed far
// radii.  Levels beyond the resolvable quantile range are flagged so reports
// can mark values that rely on asymptotic continuation of a map.
struct ProbeLevel {
  double r = 0;
  bool extrapolated = false;
  std::vector<Eigen::VectorXd> points;
};

struct ProbeSet {
  int dim = 1;
  double extrapolation_radius = 0;
  std::vector<ProbeLevel> levels; // ascending radius
};

ProbeSet build_probes(int d, int n_directions, std::uint64_t seed,
                      std::uint64_t stream,
                      const std::vector<double>& far_radii = {8, 12, 18, 28,
                                                              45});

// max |T(x)| <= C (d + |x|^2): fits C and the log-log growth exponent of
// max_{|x|=r} |T| over the largest radius decade; gates the exponent at 2.1.
BoundReport displacement_bound_check(const TransportMap& map,
                                     const ProbeSet& probes,
                                     std::uint64_t seed, std::uint64_t stream);

// Explicit displacement bounds for declared concentration: |T(x)| bounded by
// max(12/alpha, 8)(|x|^2 + 17d) or max(12 beta^{-1/2}, 8) sqrt(|x|^2 + 17d).
BoundReport concentration_constant_bound_check(const TransportMap& map,
                                               const ConcentrationSpec& spec,
                                               const ProbeSet& probes);

// Monte-Carlo L^{p+2} norm of e.(grad T)e / sqrt(d + |x|^2) under the
// gaussian, with a delta-method error band and a heavy-tail reliability flag.
BoundReport lp_derivative_norm(const TransportMap& map,
                               const Eigen::VectorXd& e, double p, long n,
                               std::uint64_t seed, std::uint64_t stream);

// Same statistic with the direction chosen per sample: along x/|x|, or
// orthogonal to it.  Tangential needs dimension >= 2.
enum class DerivativeDirection { kRadial, kTangential };
BoundReport lp_derivative_norm(const TransportMap& map,
                               DerivativeDirection mode, double p, long n,
                               std::uint64_t seed, std::uint64_t stream);

// Operator norm growth of the jacobian against three envelopes:
// (d+|x|^2)^2 (gated), d^{4/3}+|x|^2, and the conjectural sqrt(d+|x|^2).
BoundReport opnorm_growth_check(const TransportMap& map,
                                const ProbeSet& probes, std::uint64_t seed,
                                std::uint64_t stream);

// Max over eigenvalue indices of Var(log lambda_i) under the gaussian,
// gated at 4 plus a 3-sigma sampling band.
BoundReport eigen_log_variance(const TransportMap& map, long n,
                               std::uint64_t seed, std::uint64_t stream);

// Min over random gaussian pairs of <T(y)-T(x), y-x>; monotone maps stay
// above -max(1e-8, map tolerance).
BoundReport monotonicity_check(const TransportMap& map, long n_pairs,
                               std::uint64_t seed, std::uint64_t stream);

// Gaussian-mass and mean-displacement certificate for the ball
// B(x + 4 sqrt(d) u, 2 sqrt(d)), u along T(x)-x:
//  (a) gamma(B) >= exp(-|x|^2 - 17d) and gamma(B(0, 2 sqrt(d))) >= 3/4, by MC;
//  (b) with target samples and |Tx| >= max(8(1+|x|^2), 6 sqrt(d)):
//      mean of f(z) = <z-Tx, u> + |z-Tx|/2 is <= -|Tx|/8;
//  (c) f is 3/2-Lipschitz on sampled pairs.
BoundReport ball_certificate(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& Tx, long mc_budget,
                             std::uint64_t seed, std::uint64_t stream,
                             const SampleBatch* target_samples = nullptr);

} // namespace otlab
