#include "otlab/samplers.hpp"

#include <cmath>

#include "otlab/rng.hpp"

namespace otlab {

SampleBatch sample_gaussian(int d, long n, std::uint64_t seed, std::uint64_t stream) {
  Philox4x32 rng(seed, stream);
  SampleBatch b;
  b.seed = seed;
  b.stream = stream;
  b.provenance = BatchProvenance::kGaussianDirect;
  b.points.resize(n, d);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) b.points(i, j) = rng.normal();
  return b;
}

SampleBatch sample_inverse_cdf(const Cdf1D& dist, long n, std::uint64_t seed,
                               std::uint64_t stream) {
  Philox4x32 rng(seed, stream);
  SampleBatch b;
  b.seed = seed;
  b.stream = stream;
  b.provenance = BatchProvenance::kInverseCdf;
  b.points.resize(n, 1);
  for (long i = 0; i < n; ++i) {
    double u = (static_cast<double>(rng.next_u64() >> 11) + 0.5) * 0x1.0p-53;  // open (0,1)
    b.points(i, 0) = dist.quantile(u);
  }
  return b;
}

SampleBatch sample_mala(const Potential& pot, long n, std::uint64_t seed,
                        std::uint64_t stream, MalaOptions opt) {
  const int d = pot.dim();
  Philox4x32 rng(seed, stream);

  Eigen::VectorXd x = rng.normal_vec(d);
  while (!pot.smooth_at(x)) x = rng.normal_vec(d);
  double vx = pot.value(x);
  Eigen::VectorXd gx = pot.gradient(x);

  double h = opt.step > 0.0 ? opt.step : std::pow(static_cast<double>(d), -1.0 / 6.0);

  // One MALA transition; returns true on acceptance.
  auto transition = [&]() {
    Eigen::VectorXd xi = rng.normal_vec(d);
    Eigen::VectorXd mx = x - 0.5 * h * h * gx;
    Eigen::VectorXd xp = mx + h * xi;
    if (!pot.smooth_at(xp)) return false;  // null set; dropping it keeps the chain exact
    double vp = pot.value(xp);
    Eigen::VectorXd gp = pot.gradient(xp);
    Eigen::VectorXd mp = xp - 0.5 * h * h * gp;
    double log_fwd = -(xp - mx).squaredNorm() / (2.0 * h * h);
    double log_bwd = -(x - mp).squaredNorm() / (2.0 * h * h);
    double log_alpha = (vx - vp) + (log_bwd - log_fwd);
    if (std::log(rng.uniform_pos()) < log_alpha) {
      x = xp;
      vx = vp;
      gx = gp;
      return true;
    }
    return false;
  };

  if (opt.step <= 0.0) {
    double factor = 1.15;
    int prev_dir = 0;
    for (int c = 0; c < opt.max_pilot_chunks; ++c) {
      long acc = 0;
      for (long s = 0; s < opt.pilot_chunk; ++s) acc += transition() ? 1 : 0;
      double rate = static_cast<double>(acc) / opt.pilot_chunk;
      int dir = rate > opt.accept_hi ? 1 : (rate < opt.accept_lo ? -1 : 0);
      if (dir == 0) break;
      if (prev_dir != 0 && dir != prev_dir) factor = std::sqrt(factor);  // crossed the band
      h *= (dir > 0) ? factor : 1.0 / factor;
      prev_dir = dir;
    }
  }

  for (long s = 0; s < opt.burn_in; ++s) transition();

  SampleBatch b;
  b.seed = seed;
  b.stream = stream;
  b.provenance = BatchProvenance::kMala;
  b.step_size = h;
  b.burn_in = opt.burn_in;
  b.thin = opt.thin;
  b.points.resize(n, d);
  long accepted = 0, proposed = 0;
  for (long i = 0; i < n; ++i) {
    for (long t = 0; t < opt.thin; ++t) {
      accepted += transition() ? 1 : 0;
      ++proposed;
    }
    b.points.row(i) = x.transpose();
  }
  b.acceptance_rate = proposed > 0 ? static_cast<double>(accepted) / proposed : 1.0;
  return b;
}

SampleBatch sample_target(const Potential& pot, long n, std::uint64_t seed,
                          std::uint64_t stream) {
  if (pot.dim() == 1) {
    Cdf1D dist(pot);
    return sample_inverse_cdf(dist, n, seed, stream);
  }
  return sample_mala(pot, n, seed, stream);
}

}  // namespace otlab
