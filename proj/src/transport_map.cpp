#include "otlab/transport_map.hpp"

#include <stdexcept>

#include <Eigen/Dense>

namespace otlab {

Eigen::VectorXd TransportMap::jacobian_eigenvalues(const Eigen::VectorXd&) const {
  throw std::logic_error(describe() + ": jacobian eigenvalues unavailable");
}

Eigen::MatrixXd TransportMap::jacobian(const Eigen::VectorXd&) const {
  throw std::logic_error(describe() + ": full jacobian unavailable");
}

AffineMap::AffineMap(Eigen::MatrixXd A, Eigen::VectorXd b) : A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != b_.size() || A_.cols() != b_.size())
    throw std::invalid_argument("AffineMap: shape mismatch");
}

AffineMap AffineMap::identity(int d) {
  return AffineMap(Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d));
}

AffineMap AffineMap::scaling(int d, double s) {
  return AffineMap(s * Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d));
}

Eigen::VectorXd AffineMap::jacobian_eigenvalues(const Eigen::VectorXd&) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (A_ + A_.transpose()));
  return es.eigenvalues();
}

RadialFunctionMap::RadialFunctionMap(int d, std::function<double(double)> g,
                                     std::function<double(double)> dg, std::string label)
    : d_(d), g_(std::move(g)), dg_(std::move(dg)), label_(std::move(label)) {}

Eigen::VectorXd RadialFunctionMap::eval(const Eigen::VectorXd& x) const {
  double r = x.norm();
  if (r == 0.0) return Eigen::VectorXd::Zero(d_);
  return (g_(r) / r) * x;
}

Eigen::VectorXd RadialFunctionMap::jacobian_eigenvalues(const Eigen::VectorXd& x) const {
  double r = x.norm();
  Eigen::VectorXd ev(d_);
  if (r == 0.0) {
    ev.setConstant(dg_(0.0));
    return ev;
  }
  double radial = dg_(r), tangential = g_(r) / r;
  for (int i = 0; i + 1 < d_; ++i) ev[i] = tangential;
  ev[d_ - 1] = radial;
  std::sort(ev.data(), ev.data() + d_);
  return ev;
}

SampleBatch map_batch(const TransportMap& map, const SampleBatch& in) {
  if (in.d() != map.dim()) throw std::invalid_argument("map_batch: dimension mismatch");
  SampleBatch out = in;
  for (long i = 0; i < in.n(); ++i)
    out.points.row(i) = map.eval(in.points.row(i).transpose()).transpose();
  return out;
}

}  // namespace otlab
