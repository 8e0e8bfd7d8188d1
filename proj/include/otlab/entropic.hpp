#pragma once

#include <Eigen/Core>

#include <string>

#include "otlab/transport_map.hpp"

namespace otlab {

struct EntropicOptions {
  double epsilon = 0.05;    // target regularization
  int max_iters = 5000;     // sinkhorn sweeps across all scaling levels
  double tol = 1e-6;        // L1 marginal residual at the target epsilon
  double scale_start = 0;   // initial epsilon for warm levels; 0 picks from cost scale
  double scale_factor = 0.5;
};

// Barycentric projection of the entropic plan between two empirical measures
// under quadratic cost.  Evaluation extends off-sample through the fitted
// target potential:
//   T(x) = sum_j p_j(x) y_j,  p = softmax((g_j - |x-y_j|^2/2) / epsilon),
// with jacobian Cov_p(y)/epsilon, symmetric PSD, so the map is monotone.
class EntropicMap final : public TransportMap {
 public:
  EntropicMap(Eigen::MatrixXd target, Eigen::VectorXd potential,
              double epsilon, double marginal_error, int iterations);

  int dim() const override;
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override;
  bool has_jacobian() const override { return true; }
  Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const override;
  bool has_full_jacobian() const override { return true; }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const override;
  std::string describe() const override;
  double monotonicity_tol() const override;

  double epsilon() const { return epsilon_; }
  double marginal_error() const { return marginal_error_; }
  int iterations() const { return iterations_; }

 private:
  Eigen::VectorXd soft_weights(const Eigen::VectorXd& x) const;

  Eigen::MatrixXd target_;    // m x d support of the fitted plan
  Eigen::VectorXd potential_; // dual potential g on the target points
  double epsilon_;
  double marginal_error_;
  int iterations_;
};

// Log-domain Sinkhorn with epsilon scaling on uniform empirical marginals.
// Throws on non-convergence or numeric breakdown.
EntropicMap entropic_map(const Eigen::MatrixXd& source,
                         const Eigen::MatrixXd& target,
                         const EntropicOptions& opt);

} // namespace otlab
