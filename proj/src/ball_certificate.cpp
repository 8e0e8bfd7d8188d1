#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otlab/checks.hpp"
#include "otlab/numerics.hpp"
#include "otlab/rng.hpp"

namespace otlab {

BoundReport ball_certificate(const Eigen::VectorXd& x,
                             const Eigen::VectorXd& Tx, long mc_budget,
                             std::uint64_t seed, std::uint64_t stream,
                             const SampleBatch* target_samples) {
  const int d = static_cast<int>(x.size());
  if (Tx.size() != d)
    throw std::invalid_argument("ball_certificate: x/Tx dimension mismatch");
  if (mc_budget < 1000)
    throw std::invalid_argument("ball_certificate: budget too small");

  BoundReport rep;
  rep.check = "ball-certificate";
  rep.statement =
      "gaussian mass of B(x + 4 sqrt(d) u, 2 sqrt(d)) at least "
      "exp(-|x|^2 - 17d) and of B(0, 2 sqrt(d)) at least 3/4; mean target "
      "displacement against f(z) = <z-Tx, u> + |z-Tx|/2 at most -|Tx|/8";

  const double sqd = std::sqrt(static_cast<double>(d));
  Eigen::VectorXd u = Tx - x;
  const double sep = u.norm();
  if (sep > 0) {
    u /= sep;
  } else {
    u = Eigen::VectorXd::Unit(d, 0);
    rep.note("T(x) = x; certificate direction fixed to the first axis");
  }
  const Eigen::VectorXd center = x + 4 * sqd * u;
  const double radius = 2 * sqd;

  Philox4x32 rng(seed, stream);
  long hits_shifted = 0, hits_origin = 0;
  for (long i = 0; i < mc_budget; ++i) {
    const Eigen::VectorXd z = rng.normal_vec(d);
    if ((z - center).norm() <= radius) ++hits_shifted;
    if (z.norm() <= radius) ++hits_origin;
  }
  const double n = static_cast<double>(mc_budget);
  const double p1 = static_cast<double>(hits_shifted) / n;
  const double p0 = static_cast<double>(hits_origin) / n;
  const double se1 = std::sqrt(p1 * (1 - p1) / n);
  const double se0 = std::sqrt(p0 * (1 - p0) / n);
  const double bound1 = std::exp(-x.squaredNorm() - 17.0 * d);

  const bool pass_shifted = p1 - 3 * se1 > bound1;
  const bool pass_origin = p0 - 3 * se0 >= 0.75;

  rep.values["gamma_ball"] = p1;
  rep.values["gamma_ball_se"] = se1;
  rep.values["gamma_ball_lower_bound"] = bound1;
  rep.values["gamma_origin_ball"] = p0;
  rep.values["gamma_origin_se"] = se0;
  rep.values["gamma_origin_lower_bound"] = 0.75;
  rep.values["mc_budget"] = n;

  // 3/2-Lipschitz spot check of f on pairs spread around the target point
  double lip = 0;
  const double spread = 1 + sqd + Tx.norm();
  for (long i = 0; i < 10000; ++i) {
    const Eigen::VectorXd a = Tx + spread * rng.normal_vec(d);
    const Eigen::VectorXd b = Tx + spread * rng.normal_vec(d);
    const double gap = (a - b).norm();
    if (gap < 1e-12) continue;
    const double fa = (a - Tx).dot(u) + 0.5 * (a - Tx).norm();
    const double fb = (b - Tx).dot(u) + 0.5 * (b - Tx).norm();
    lip = std::max(lip, std::abs(fa - fb) / gap);
  }
  rep.values["lipschitz_max"] = lip;
  const bool pass_lip = lip <= 1.5 + 1e-12;

  bool pass_mean = true;
  const double tnorm = Tx.norm();
  if (target_samples != nullptr) {
    const bool precondition =
        tnorm >= 8 * (1 + x.squaredNorm()) && tnorm >= 6 * sqd;
    if (precondition) {
      const long m = target_samples->n();
      if (target_samples->d() != d)
        throw std::invalid_argument(
            "ball_certificate: target sample dimension mismatch");
      std::vector<double> fv(static_cast<size_t>(m));
      for (long i = 0; i < m; ++i) {
        const Eigen::VectorXd z =
            target_samples->points.row(i).transpose();
        fv[static_cast<size_t>(i)] = (z - Tx).dot(u) + 0.5 * (z - Tx).norm();
      }
      const double f_mean = mean_of(fv);
      const double ess =
          std::max(batch_diagnostics(*target_samples).ess.minCoeff(), 2.0);
      const double f_se = std::sqrt(pop_variance(fv) / ess);
      const double f_bound = -tnorm / 8;
      rep.values["f_mean"] = f_mean;
      rep.values["f_se"] = f_se;
      rep.values["f_bound"] = f_bound;
      pass_mean = f_mean <= f_bound + 3 * f_se;
    } else {
      rep.note(
          "mean-displacement branch skipped: |Tx| below the 8(1+|x|^2) and "
          "6 sqrt(d) thresholds, nothing to certify");
    }
  } else {
    rep.note("no target samples supplied; mean-displacement branch skipped");
  }

  rep.margin = std::min(p1 - 3 * se1 - bound1, p0 - 3 * se0 - 0.75);
  rep.pass = pass_shifted && pass_origin && pass_lip && pass_mean;
  return rep;
}

} // namespace otlab
