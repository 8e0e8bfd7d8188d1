#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "otlab/batch.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

struct SemiDiscreteOptions {
  double tol = 1e-3;        // max-norm cell mass tolerance
  long mc_budget = 400000;  // gaussian pool size, shared across iterations
  long first_stage = 25000; // initial pool prefix; doubled per stage
  int max_iters = 600;      // total ascent iterations across all stages
  int stage_iters = 120;    // per-stage iteration cap
  double step_cap = 2.0;    // clamp on a single weight update
};

// Dual solution of the quadratic-cost transport problem from the standard
// gaussian onto a weighted point cloud.  Cell i of the induced power diagram
// is {x : |x-y_i|^2/2 - w_i <= |x-y_j|^2/2 - w_j for all j}.
struct SemiDiscretePlan {
  Eigen::MatrixXd support;   // N x d target points
  Eigen::VectorXd masses;    // prescribed masses, positive, sum 1
  Eigen::VectorXd weights;   // dual weights, mean fixed to 0
  Eigen::VectorXd cell_mass; // monte carlo cell masses at the final iterate
  double mass_residual = 0;  // max_i |cell_mass_i - masses_i|
  long budget_used = 0;      // pool prefix the final iterate was scored on
  int iterations = 0;
  bool converged = false;
  uint64_t seed = 0;
  uint64_t stream = 0;
  // dual objective per accepted iteration and the prefix it was scored on;
  // monotone non-decreasing within a fixed prefix
  std::vector<double> objective;
  std::vector<long> objective_prefix;

  long n() const { return support.rows(); }
  int d() const { return static_cast<int>(support.cols()); }
};

// Damped diagonal-newton ascent on the concave Kantorovich dual.  Cell masses
// are estimated on prefixes of one fixed gaussian pool (common random numbers),
// so each stage optimizes a deterministic piecewise-affine concave objective.
SemiDiscretePlan semidiscrete_solve(const Eigen::MatrixXd& support,
                                    const Eigen::VectorXd& masses,
                                    const SemiDiscreteOptions& opt,
                                    uint64_t seed, uint64_t stream);

// Uniform masses on the batch points themselves.
SemiDiscretePlan semidiscrete_solve(const SampleBatch& target,
                                    const SemiDiscreteOptions& opt);

// Lloyd iterations from a k-means++ seeding; empty clusters are reseeded at
// the point farthest from its assigned center.  Deterministic given the seed.
Eigen::MatrixXd kmeans_quantize(const Eigen::MatrixXd& points, int n_centers,
                                uint64_t seed, uint64_t stream,
                                int max_iters = 40);

// Piecewise constant map x -> support point of the winning cell.  Ties are
// broken toward the lowest index.  Monotone by cell geometry; there is no
// jacobian to expose.
class SemiDiscreteMap final : public TransportMap {
 public:
  explicit SemiDiscreteMap(SemiDiscretePlan plan);

  int dim() const override;
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override;
  bool has_jacobian() const override { return false; }
  std::string describe() const override;
  double monotonicity_tol() const override;

  const SemiDiscretePlan& plan() const { return plan_; }
  long cell_index(const Eigen::VectorXd& x) const;

 private:
  SemiDiscretePlan plan_;
  Eigen::VectorXd offsets_; // |y_i|^2/2 - w_i
};

// CSV rows are y_0..y_{d-1},mass,weight; residuals and budgets travel in a
// JSON sidecar next to the CSV (path + ".meta.json").
void write_semidiscrete_plan(const SemiDiscretePlan& plan,
                             const std::string& csv_path);
SemiDiscretePlan read_semidiscrete_plan(const std::string& csv_path);

} // namespace otlab
