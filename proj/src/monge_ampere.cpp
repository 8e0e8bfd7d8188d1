#include "otlab/monge_ampere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otlab/numerics.hpp"

namespace otlab {

MongeAmpereResult monge_ampere_residual(const TransportMap& map, const Potential& pot,
                                        const std::vector<Eigen::VectorXd>& points) {
  if (!map.has_jacobian())
    throw std::invalid_argument("monge_ampere_residual: map carries no jacobian (" +
                                map.describe() + ")");
  if (map.dim() != pot.dim())
    throw std::invalid_argument("monge_ampere_residual: dimension mismatch");
  if (points.empty()) throw std::invalid_argument("monge_ampere_residual: no points");

  const int d = map.dim();
  std::vector<double> raw;
  raw.reserve(points.size());
  for (const auto& x : points) {
    Eigen::VectorXd lam = map.jacobian_eigenvalues(x);
    double log_det = 0.0;
    for (int j = 0; j < d; ++j) {
      if (!(lam[j] > 0.0))
        throw std::runtime_error("monge_ampere_residual: non-positive jacobian eigenvalue, "
                                 "map is not locally injective at a probe");
      log_det += std::log(lam[j]);
    }
    double log_gauss = -0.5 * x.squaredNorm() - 0.5 * d * std::log(2.0 * M_PI);
    raw.push_back(log_gauss + pot.value(map.eval(x)) - log_det);
  }

  MongeAmpereResult out;
  out.median_raw = percentile(raw, 0.5);
  out.centered.resize(raw.size());
  double worst = 0.0;
  for (size_t i = 0; i < raw.size(); ++i) {
    out.centered[i] = raw[i] - out.median_raw;
    worst = std::max(worst, std::abs(out.centered[i]));
  }
  out.max_abs_centered = worst;
  return out;
}

}  // namespace otlab
