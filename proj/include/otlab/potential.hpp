#pragma once

// Log-concave target measures mu = e^{-V} dx.  Each family carries whatever
// closed-form structure it has (radial profile, hessian eigenvalues, curvature
// band constants, concentration constants) so downstream checks never have to
// rediscover analytic facts numerically.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "otlab/bound_report.hpp"

namespace otlab {

// Raised when a gradient/hessian is requested exactly on a kink.
struct NonSmoothError : std::domain_error {
  using std::domain_error::domain_error;
};

struct HessianBand {
  bool declared = false;
  double c1 = kNan;     // Hess V <= c1 Id
  double c2 = kNan;     // Hess V >= c2 / (d + |x|) Id
  double r_max = kNan;  // radius range the constants were established on
};

struct PotentialInfo {
  std::string family;
  std::map<std::string, double> params;
  bool centered = true;
  bool isotropic = true;
  bool smooth = true;  // false: gradient undefined on a Lebesgue-null set
  HessianBand band;
  double alpha = kNan;  // exponential concentration constant, when known
  double beta = kNan;   // gaussian concentration constant, when known
};

struct RadialForm {
  // V(x) = f(|x|)
  std::function<double(double)> f, df, d2f;
};

class PotentialKernel;

class Potential {
 public:
  explicit Potential(std::shared_ptr<const PotentialKernel> k) : k_(std::move(k)) {}

  int dim() const;
  double value(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;
  bool smooth_at(const Eigen::VectorXd& x) const;

  bool has_radial_form() const;
  const RadialForm& radial_form() const;
  // (f''(r), f'(r)/r): hessian eigenvalues of a radial potential at radius r.
  std::pair<double, double> radial_hessian_eigs(double r) const;

  const PotentialInfo& info() const;

  // 1d conveniences (dim() == 1 only).
  double value1(double x) const;
  double grad1(double x) const;

 private:
  std::shared_ptr<const PotentialKernel> k_;
};

Potential make_gaussian(int d, double sigma = 1.0);
// Arbitrary smooth 1d potential from callables (building block for internal
// change-of-variable tricks and test fixtures).
Potential make_custom_1d(std::function<double(double)> v, std::function<double(double)> dv,
                         std::function<double(double)> d2v, PotentialInfo info = {});
Potential make_laplace_product(int d);
// f(r) = a (d + r^2)^{p/2}, p in [1, 2].  Without an explicit amplitude, a is
// calibrated so the target has unit componentwise second moment (E|X|^2 = d).
Potential make_power(int d, double p, std::optional<double> amplitude = std::nullopt);

// Affine pull-back used for empirical whitening: if X ~ e^{-V} then
// L^{-1}(X - m) follows the returned potential, V~(x) = V(m + L x).
Potential affine_pullback(const Potential& base, const Eigen::VectorXd& m,
                          const Eigen::MatrixXd& L);

struct SampleBatch;
// Empirical whitening: recenters and rescales by the batch mean and the
// Cholesky factor of the batch covariance.
Potential isotropize(const Potential& pot, const SampleBatch& batch);

// Verifies c1 Id >= Hess V >= c2/(d+|x|) Id at the given points using the
// declared band constants.  Fails when no positive band is declared.
BoundReport hessian_band_check(const Potential& pot,
                               const std::vector<Eigen::VectorXd>& points,
                               double tol = 1e-9);

}  // namespace otlab
