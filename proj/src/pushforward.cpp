#include "otlab/pushforward.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "otlab/rng.hpp"
#include "otlab/samplers.hpp"
#include "otlab/transport_map.hpp"

namespace otlab {

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0, j = 0;
  double d = 0;
  // advance past ties on both sides before comparing the empirical cdfs
  while (i < a.size() && j < b.size()) {
    const double z = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= z) ++i;
    while (j < b.size() && b[j] <= z) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na -
                             static_cast<double>(j) / nb));
  }
  return d;
}

BoundReport pushforward_test(const TransportMap& map, const Potential& pot,
                             long n, std::uint64_t seed) {
  const int d = map.dim();
  if (d != pot.dim())
    throw std::invalid_argument("pushforward_test: map/target dimension mismatch");

  SampleBatch source =
      sample_gaussian(d, n, seed, derive_stream("pushforward-source"));
  SampleBatch direct =
      sample_target(pot, n, seed, derive_stream("pushforward-target"));

  SampleBatch pushed = map_batch(map, source);
  BatchDiagnostics dp = batch_diagnostics(pushed);
  BatchDiagnostics dt = batch_diagnostics(direct);

  const double np = static_cast<double>(n);
  // correlated chains shrink the effective target sample; take the worst axis
  const double nt = std::min(static_cast<double>(direct.n()),
                             std::max(dt.ess.minCoeff(), 2.0));

  BoundReport rep;
  rep.check = "pushforward";
  rep.statement =
      "pushed-forward gaussian draws and direct target draws agree in mean, "
      "covariance and (1d) distribution within 3-sigma sampling bands";
  rep.gated = false;

  // per-coordinate mean z-scores
  double mean_z = 0;
  for (int c = 0; c < d; ++c) {
    const double se = std::sqrt(dp.covariance(c, c) / np +
                                dt.covariance(c, c) / nt);
    mean_z = std::max(mean_z,
                      std::abs(dp.mean[c] - dt.mean[c]) / std::max(se, 1e-300));
  }

  // element-wise covariance z-scores from centered second-moment spreads
  Eigen::MatrixXd cp = pushed.points.rowwise() - dp.mean.transpose();
  Eigen::MatrixXd ct = direct.points.rowwise() - dt.mean.transpose();
  double cov_z = 0;
  for (int r = 0; r < d; ++r)
    for (int c = r; c < d; ++c) {
      std::vector<double> up(static_cast<size_t>(cp.rows()));
      for (long i = 0; i < cp.rows(); ++i) up[static_cast<size_t>(i)] = cp(i, r) * cp(i, c);
      std::vector<double> ut(static_cast<size_t>(ct.rows()));
      for (long i = 0; i < ct.rows(); ++i) ut[static_cast<size_t>(i)] = ct(i, r) * ct(i, c);
      const double se =
          std::sqrt(pop_variance(up) / np + pop_variance(ut) / nt);
      cov_z = std::max(cov_z, std::abs(dp.covariance(r, c) - dt.covariance(r, c)) /
                                  std::max(se, 1e-300));
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dp.covariance -
                                                    dt.covariance);
  const double cov_opnorm = es.eigenvalues().cwiseAbs().maxCoeff();

  rep.values["mean_max_z"] = mean_z;
  rep.values["cov_max_z"] = cov_z;
  rep.values["cov_opnorm"] = cov_opnorm;
  rep.values["n_pushed"] = np;
  rep.values["n_direct_effective"] = nt;

  bool ok = mean_z <= 3.0 && cov_z <= 3.0;

  if (d == 1) {
    std::vector<double> a(static_cast<size_t>(pushed.n()));
    for (long i = 0; i < pushed.n(); ++i) a[static_cast<size_t>(i)] = pushed.points(i, 0);
    std::vector<double> b(static_cast<size_t>(direct.n()));
    for (long i = 0; i < direct.n(); ++i) b[static_cast<size_t>(i)] = direct.points(i, 0);
    const double ks = ks_two_sample(a, b);
    // 99% two-sample critical value
    const double crit = 1.628 * std::sqrt((np + nt) / (np * nt));
    rep.values["ks_stat"] = ks;
    rep.values["ks_crit_99"] = crit;
    ok = ok && ks < crit;
  }

  for (const std::string& w : dt.warnings)
    rep.note("target sampler: " + w);
  rep.pass = ok;
  rep.margin = 3.0 - std::max(mean_z, cov_z);
  return rep;
}

} // namespace otlab
