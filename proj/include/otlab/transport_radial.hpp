#pragma once

// Radial Brenier map for rotationally invariant targets: T(x) = s(|x|) x/|x|
// with the profile s matching the chi distribution of |x| under the gaussian
// to the radial law of the target.  The profile is tabulated on a log-spaced
// node grid for warm starts and diagnostics; evaluations refine the tabulated
// guess by Newton on the exact cdf matching equation, so accuracy does not
// depend on the grid.  Everything runs on the substitution u = ln r, which
// turns the radial law into a bona fide 1d log-concave law on the line.

#include <memory>
#include <vector>

#include "otlab/cdf1d.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

struct RadialProfileOptions {
  int n_nodes = 512;
  double q_lo = 1e-8;        // chi quantile range covered by the node grid
  double q_hi = 1.0 - 1e-8;
  int n_anchors = 512;       // resolution of the radial cdf machinery
};

class BrenierRadialMap : public TransportMap {
 public:
  explicit BrenierRadialMap(const Potential& pot, RadialProfileOptions opt = {});

  double profile(double r) const;        // s(r)
  double profile_prime(double r) const;  // s'(r) as a log-space density ratio
  double origin_slope() const { return k0_; }

  const std::vector<double>& grid_r() const { return gr_; }
  const std::vector<double>& grid_s() const { return gs_; }
  double grid_r_min() const { return gr_.front(); }
  double grid_r_max() const { return gr_.back(); }
  // monotone interpolant through the nodes (log-log pchip); the warm-start
  // surface, also handy for derivative consistency tests
  double spline_value(double r) const;
  double spline_prime(double r) const;

  void write_profile_csv(const std::string& path) const;

  int dim() const override { return d_; }
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override;
  bool has_jacobian() const override { return true; }
  Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const override;
  bool has_full_jacobian() const override { return true; }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const override;
  std::string describe() const override { return "exact-radial"; }
  double monotonicity_tol() const override { return 1e-9; }
  bool extrapolated_at(const Eigen::VectorXd& x) const override {
    return x.norm() > extrap_r_;
  }
  double extrapolation_radius() const { return extrap_r_; }

 private:
  double solve_u(double r, double u0) const;  // newton on the matching equation
  double log_radial_density(double s) const;

  int d_;
  Cdf1D wdist_;  // law of u = ln|Y|, Y ~ target
  double k0_ = 0.0;
  double extrap_r_ = 0.0;
  std::vector<double> gr_, gs_;
  struct Spline;
  std::shared_ptr<const Spline> spline_;
};

}  // namespace otlab
