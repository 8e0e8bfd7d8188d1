#pragma once

// Sample batches with provenance and the diagnostics shared by every
// consumer: moments, per-coordinate effective sample size, degeneracy flags.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace otlab {

enum class BatchProvenance { kGaussianDirect, kInverseCdf, kMala };
std::string to_string(BatchProvenance p);

struct SampleBatch {
  Eigen::MatrixXd points;  // n x d, one sample per row
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  BatchProvenance provenance = BatchProvenance::kGaussianDirect;
  // chain metadata, NaN / 0 where not applicable
  double acceptance_rate = -1.0;
  double step_size = -1.0;
  long burn_in = 0;
  long thin = 1;

  long n() const { return points.rows(); }
  int d() const { return static_cast<int>(points.cols()); }
};

struct BatchDiagnostics {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // population normalization (divide by n)
  Eigen::VectorXd ess;         // per coordinate; == n for independent draws
  bool degenerate = false;     // covariance numerically rank-deficient
  std::vector<std::string> warnings;
};

BatchDiagnostics batch_diagnostics(const SampleBatch& b);

void write_batch_csv(const std::string& path, const SampleBatch& b);
SampleBatch read_batch_csv(const std::string& path);

}  // namespace otlab
