#include "otlab/entropic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace otlab {

namespace {

// Row-wise -eps * logsumexp((row + shift)/eps); shift carries the opposite
// marginal's log weight so the result is the conjugate potential.
Eigen::VectorXd softmin_rows(const Eigen::MatrixXd& kernel, double eps,
                             double shift) {
  const Eigen::VectorXd row_max = kernel.rowwise().maxCoeff();
  const Eigen::VectorXd lse =
      ((kernel.colwise() - row_max) / eps).array().exp().rowwise().sum().log();
  return -eps * (row_max / eps + lse +
                 Eigen::VectorXd::Constant(kernel.rows(), shift));
}

} // namespace

EntropicMap entropic_map(const Eigen::MatrixXd& source,
                         const Eigen::MatrixXd& target,
                         const EntropicOptions& opt) {
  const long n = source.rows();
  const long m = target.rows();
  if (n < 1 || m < 1)
    throw std::invalid_argument("entropic_map: empty sample set");
  if (source.cols() != target.cols())
    throw std::invalid_argument("entropic_map: dimension mismatch");
  if (!(opt.epsilon > 0))
    throw std::invalid_argument("entropic_map: epsilon must be positive");

  // quadratic cost; marginals are uniform over the two clouds
  Eigen::MatrixXd cost =
      (0.5 * source.rowwise().squaredNorm()).replicate(1, m);
  cost.rowwise() += (0.5 * target.rowwise().squaredNorm()).transpose();
  cost.noalias() -= source * target.transpose();
  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(m));

  std::vector<double> levels;
  double eps0 = opt.scale_start > 0 ? opt.scale_start
                                    : std::max(opt.epsilon, 0.25 * cost.mean());
  for (double e = eps0; e > opt.epsilon * (1 + 1e-12); e *= opt.scale_factor)
    levels.push_back(e);
  levels.push_back(opt.epsilon);

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  Eigen::MatrixXd work(n, m);
  double residual = std::numeric_limits<double>::infinity();
  int sweeps = 0;

  for (size_t level = 0; level < levels.size(); ++level) {
    const double eps = levels[level];
    const bool last = level + 1 == levels.size();
    const double level_tol = last ? opt.tol : std::max(opt.tol, 1e-3);

    while (sweeps < opt.max_iters) {
      ++sweeps;
      work = (-cost).rowwise() + g.transpose();
      f = softmin_rows(work, eps, log_b);
      work = (-cost).colwise() + f;
      const Eigen::VectorXd g_next =
          softmin_rows(work.transpose(), eps, log_a);
      if (!f.allFinite() || !g_next.allFinite())
        throw std::runtime_error("entropic_map: numeric breakdown in scaling");

      // column marginal of the row-balanced plan, in L1
      residual =
          (((g - g_next) / eps).array().exp() - 1.0).abs().sum() *
          std::exp(log_b);
      g = g_next;
      if (residual <= level_tol) break;
    }
    if (last && residual > opt.tol)
      throw std::runtime_error(
          "entropic_map: sinkhorn did not reach marginal tolerance, residual " +
          std::to_string(residual));
  }

  return EntropicMap(target, g, opt.epsilon, residual, sweeps);
}

EntropicMap::EntropicMap(Eigen::MatrixXd target, Eigen::VectorXd potential,
                         double epsilon, double marginal_error, int iterations)
    : target_(std::move(target)),
      potential_(std::move(potential)),
      epsilon_(epsilon),
      marginal_error_(marginal_error),
      iterations_(iterations) {
  if (target_.rows() != potential_.size())
    throw std::invalid_argument("EntropicMap: potential/target mismatch");
}

int EntropicMap::dim() const { return static_cast<int>(target_.cols()); }

Eigen::VectorXd EntropicMap::soft_weights(const Eigen::VectorXd& x) const {
  if (x.size() != target_.cols())
    throw std::invalid_argument("EntropicMap: dimension mismatch");
  Eigen::VectorXd score =
      potential_ - 0.5 * (target_.rowwise() - x.transpose()).rowwise().squaredNorm();
  score /= epsilon_;
  const double top = score.maxCoeff();
  Eigen::VectorXd p = (score.array() - top).exp();
  p /= p.sum();
  return p;
}

Eigen::VectorXd EntropicMap::eval(const Eigen::VectorXd& x) const {
  return target_.transpose() * soft_weights(x);
}

Eigen::MatrixXd EntropicMap::jacobian(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd p = soft_weights(x);
  const Eigen::VectorXd mean = target_.transpose() * p;
  Eigen::MatrixXd second =
      target_.transpose() * p.asDiagonal() * target_;
  return (second - mean * mean.transpose()) / epsilon_;
}

Eigen::VectorXd EntropicMap::jacobian_eigenvalues(
    const Eigen::VectorXd& x) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobian(x));
  return es.eigenvalues();
}

std::string EntropicMap::describe() const { return "entropic"; }

double EntropicMap::monotonicity_tol() const { return 1e-9; }

} // namespace otlab
