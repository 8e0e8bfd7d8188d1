#pragma once

// Common interface for transport maps plus the simple concrete maps used as
// references and as deliberate failure doubles in harness self-tests.

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "otlab/batch.hpp"

namespace otlab {

class TransportMap {
 public:
  virtual ~TransportMap() = default;

  virtual int dim() const = 0;
  virtual Eigen::VectorXd eval(const Eigen::VectorXd& x) const = 0;

  // Eigenvalues of the map jacobian, ascending.  Only maps with analytic
  // derivative structure provide them.
  virtual bool has_jacobian() const = 0;
  virtual Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const;
  virtual bool has_full_jacobian() const { return false; }
  virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

  virtual std::string describe() const = 0;
  // Slack allowed when testing <T(y)-T(x), y-x> >= 0; documents how exact the
  // construction is (0 for closed forms, small positive for solver output).
  virtual double monotonicity_tol() const { return 0.0; }
  // True where the evaluation left the resolved range and relies on the
  // asymptotic continuation of the profile.
  virtual bool extrapolated_at(const Eigen::VectorXd& x) const {
    (void)x;
    return false;
  }
};

// T(x) = A x + b.
class AffineMap : public TransportMap {
 public:
  AffineMap(Eigen::MatrixXd A, Eigen::VectorXd b);
  static AffineMap identity(int d);
  static AffineMap scaling(int d, double s);

  int dim() const override { return static_cast<int>(b_.size()); }
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override { return A_ * x + b_; }
  bool has_jacobian() const override { return true; }
  Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const override;
  bool has_full_jacobian() const override { return true; }
  Eigen::MatrixXd jacobian(const Eigen::VectorXd&) const override { return A_; }
  std::string describe() const override { return "affine"; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

// T(x) = g(|x|) x/|x| for a scalar profile g; jacobian eigenvalues are g'(r)
// once and g(r)/r with multiplicity d-1.  Used for synthetic profiles.
class RadialFunctionMap : public TransportMap {
 public:
  RadialFunctionMap(int d, std::function<double(double)> g, std::function<double(double)> dg,
                    std::string label);

  int dim() const override { return d_; }
  Eigen::VectorXd eval(const Eigen::VectorXd& x) const override;
  bool has_jacobian() const override { return true; }
  Eigen::VectorXd jacobian_eigenvalues(const Eigen::VectorXd& x) const override;
  std::string describe() const override { return label_; }

 private:
  int d_;
  std::function<double(double)> g_, dg_;
  std::string label_;
};

// Pushes a batch through a map row by row.
SampleBatch map_batch(const TransportMap& map, const SampleBatch& in);

}  // namespace otlab
