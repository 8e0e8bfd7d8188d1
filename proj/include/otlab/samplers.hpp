#pragma once

// Sample generation: direct gaussian draws, inverse-cdf draws for 1d targets,
// and MALA with pilot step tuning for everything else.  All draws come from
// named counter-RNG streams, so batches are reproducible bit for bit.

#include "otlab/batch.hpp"
#include "otlab/cdf1d.hpp"
#include "otlab/potential.hpp"

namespace otlab {

SampleBatch sample_gaussian(int d, long n, std::uint64_t seed, std::uint64_t stream);

SampleBatch sample_inverse_cdf(const Cdf1D& dist, long n, std::uint64_t seed,
                               std::uint64_t stream);

struct MalaOptions {
  long burn_in = 2000;
  long thin = 3;
  double step = 0.0;  // 0 = pilot-tune until acceptance lands in the band
  double accept_lo = 0.55;
  double accept_hi = 0.60;
  long pilot_chunk = 400;
  int max_pilot_chunks = 60;
};

SampleBatch sample_mala(const Potential& pot, long n, std::uint64_t seed,
                        std::uint64_t stream, MalaOptions opt = {});

// Dispatch: inverse-cdf when the target is 1d, MALA otherwise.
SampleBatch sample_target(const Potential& pot, long n, std::uint64_t seed,
                          std::uint64_t stream);

}  // namespace otlab
