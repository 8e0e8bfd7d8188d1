#pragma once

// Monotone rearrangement of the standard gaussian onto a 1d log-concave
// target: T = Q_mu (Phi(x)), with both composition legs evaluated in log
// space so far-tail arguments keep relative accuracy.

#include "otlab/cdf1d.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

class Brenier1DMap : public TransportMap {
 public:
  explicit Brenier1DMap(const Potential& pot, int n_anchors = 512);

  double eval1(double x) const;
  // T'(x) = phi(x) / rho(T(x)); computed as a log-space ratio, valid even
  // where both densities underflow.
  double deriv1(double x) const;
  const Cdf1D& dist() const { return dist_; }

  int dim() const override { return 1; }
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override {
    return Eigen::VectorXd::Constant(1, eval1(x[0]));
  }
  bool has_jacobian() const override { return true; }
  Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const override {
    return Eigen::VectorXd::Constant(1, deriv1(x[0]));
  }
  bool has_full_jacobian() const override { return true; }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const override {
    return Eigen::MatrixXd::Constant(1, 1, deriv1(x[0]));
  }
  std::string describe() const override { return "exact-1d"; }
  double monotonicity_tol() const override { return 1e-9; }

 private:
  Cdf1D dist_;
};

}  // namespace otlab
