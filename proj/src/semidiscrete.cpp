#include "otlab/semidiscrete.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "otlab/rng.hpp"

namespace otlab {

namespace {

constexpr long kChunk = 8192;

// Winning cell per pool point plus the score gap to the runner-up; the gap
// distribution near zero estimates the boundary density (dual curvature).
struct Assignment {
  Eigen::VectorXd cell_mass;
  double objective = 0;
  double residual = 0;
  std::vector<int> winner;
  std::vector<int> runner;
  std::vector<double> slack;
};

void score_prefix(const Eigen::MatrixXd& pool, long n_prefix,
                  const Eigen::MatrixXd& support,
                  const Eigen::VectorXd& masses,
                  const Eigen::VectorXd& weights, Assignment& out) {
  const long n_cells = support.rows();
  Eigen::VectorXd offsets =
      0.5 * support.rowwise().squaredNorm() - weights;

  out.winner.resize(static_cast<size_t>(n_prefix));
  out.runner.resize(static_cast<size_t>(n_prefix));
  out.slack.resize(static_cast<size_t>(n_prefix));
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_cells);

  double acc = 0; // sum of per-point transport scores
  Eigen::MatrixXd dots;
  for (long lo = 0; lo < n_prefix; lo += kChunk) {
    const long len = std::min(kChunk, n_prefix - lo);
    const auto block = pool.middleRows(lo, len);
    dots.noalias() = block * support.transpose();
    for (long r = 0; r < len; ++r) {
      double best = std::numeric_limits<double>::infinity();
      double second = best;
      int best_j = 0;
      int second_j = -1;
      for (long j = 0; j < n_cells; ++j) {
        const double s = offsets[j] - dots(r, j);
        if (s < best) {
          second = best;
          second_j = best_j;
          best = s;
          best_j = static_cast<int>(j);
        } else if (s < second) {
          second = s;
          second_j = static_cast<int>(j);
        }
      }
      const size_t i = static_cast<size_t>(lo + r);
      out.winner[i] = best_j;
      out.runner[i] = n_cells > 1 ? second_j : -1;
      out.slack[i] = n_cells > 1 ? second - best
                                 : std::numeric_limits<double>::infinity();
      counts[best_j] += 1.0;
      acc += best + 0.5 * block.row(r).squaredNorm();
    }
  }

  out.cell_mass = counts / static_cast<double>(n_prefix);
  out.objective = acc / static_cast<double>(n_prefix) + masses.dot(weights);
  out.residual = (out.cell_mass - masses).cwiseAbs().maxCoeff();
}

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) return 0;
  const size_t k = static_cast<size_t>(q * static_cast<double>(v.size() - 1));
  std::nth_element(v.begin(), v.begin() + static_cast<long>(k), v.end());
  return v[k];
}

// Diagonal-newton direction: gradient (m - cell_mass) over the boundary
// density of each cell, estimated from slacks below a small bandwidth.
Eigen::VectorXd newton_direction(const Assignment& a,
                                 const Eigen::VectorXd& masses,
                                 double step_cap) {
  const long n_cells = masses.size();
  const long n = static_cast<long>(a.winner.size());
  Eigen::VectorXd grad = masses - a.cell_mass;

  std::vector<double> finite;
  finite.reserve(a.slack.size());
  for (double s : a.slack)
    if (std::isfinite(s)) finite.push_back(s);
  const double scale = quantile_of(finite, 0.5);
  const double delta = std::max(quantile_of(finite, 0.10), 1e-8 * (1 + scale));

  Eigen::VectorXd hits = Eigen::VectorXd::Zero(n_cells);
  for (long i = 0; i < n; ++i) {
    const size_t k = static_cast<size_t>(i);
    if (a.slack[k] < delta) {
      hits[a.winner[k]] += 1.0;
      if (a.runner[k] >= 0) hits[a.runner[k]] += 1.0;
    }
  }
  Eigen::VectorXd curv = hits / (2.0 * delta * static_cast<double>(n));

  std::vector<double> positive;
  for (long j = 0; j < n_cells; ++j)
    if (curv[j] > 0) positive.push_back(curv[j]);
  const double floor = std::max(1e-12, 0.05 * quantile_of(positive, 0.5));

  Eigen::VectorXd step(n_cells);
  for (long j = 0; j < n_cells; ++j) {
    const double raw = grad[j] / std::max(curv[j], floor);
    step[j] = std::clamp(raw, -step_cap, step_cap);
  }
  step.array() -= step.mean(); // dual is shift-invariant
  return step;
}

void validate_problem(const Eigen::MatrixXd& support,
                      const Eigen::VectorXd& masses) {
  if (support.rows() < 1 || support.cols() < 1)
    throw std::invalid_argument("semidiscrete_solve: empty support");
  if (masses.size() != support.rows())
    throw std::invalid_argument("semidiscrete_solve: masses/support mismatch");
  if (masses.minCoeff() <= 0)
    throw std::invalid_argument("semidiscrete_solve: masses must be positive");
  if (std::abs(masses.sum() - 1.0) > 1e-8)
    throw std::invalid_argument("semidiscrete_solve: masses must sum to 1");
  for (long i = 0; i < support.rows(); ++i)
    for (long j = i + 1; j < support.rows(); ++j)
      if ((support.row(i) - support.row(j)).squaredNorm() < 1e-24)
        throw std::invalid_argument(
            "semidiscrete_solve: duplicate support points");
}

} // namespace

SemiDiscretePlan semidiscrete_solve(const Eigen::MatrixXd& support,
                                    const Eigen::VectorXd& masses,
                                    const SemiDiscreteOptions& opt,
                                    uint64_t seed, uint64_t stream) {
  validate_problem(support, masses);
  if (opt.mc_budget < 1)
    throw std::invalid_argument("semidiscrete_solve: mc_budget must be >= 1");

  const long n_cells = support.rows();
  const int d = static_cast<int>(support.cols());

  Philox4x32 rng(seed, stream);
  Eigen::MatrixXd pool(opt.mc_budget, d);
  for (long i = 0; i < opt.mc_budget; ++i)
    pool.row(i) = rng.normal_vec(d).transpose();

  std::vector<long> prefixes;
  for (long p = std::min(std::max(opt.first_stage, 1L), opt.mc_budget);
       p < opt.mc_budget; p *= 2)
    prefixes.push_back(p);
  prefixes.push_back(opt.mc_budget);

  SemiDiscretePlan plan;
  plan.support = support;
  plan.masses = masses;
  plan.weights = Eigen::VectorXd::Zero(n_cells);
  plan.seed = seed;
  plan.stream = stream;

  const double max_mass = masses.maxCoeff();
  double eta = 1.0;
  Assignment cur, trial;

  for (long prefix : prefixes) {
    score_prefix(pool, prefix, support, masses, plan.weights, cur);
    plan.objective.push_back(cur.objective);
    plan.objective_prefix.push_back(prefix);
    const bool final_stage = prefix == opt.mc_budget;
    const double stage_tol =
        final_stage ? opt.tol
                    : std::max(opt.tol, 3 * std::sqrt(max_mass /
                                                      static_cast<double>(prefix)));

    for (int it = 0; it < opt.stage_iters; ++it) {
      if (cur.residual <= stage_tol || plan.iterations >= opt.max_iters) break;
      const Eigen::VectorXd dir =
          newton_direction(cur, masses, opt.step_cap);

      bool accepted = false;
      Eigen::VectorXd w_try;
      for (int bt = 0; bt < 12; ++bt) {
        w_try = plan.weights + eta * dir;
        score_prefix(pool, prefix, support, masses, w_try, trial);
        if (trial.objective >=
            cur.objective - 1e-12 * (1 + std::abs(cur.objective))) {
          accepted = true;
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break; // objective flat at this prefix resolution

      plan.weights = w_try;
      std::swap(cur, trial);
      eta = std::min(1.0, eta * 1.3);
      ++plan.iterations;
      plan.objective.push_back(cur.objective);
      plan.objective_prefix.push_back(prefix);
    }
    plan.cell_mass = cur.cell_mass;
    plan.mass_residual = cur.residual;
    plan.budget_used = prefix;
  }

  plan.converged = plan.mass_residual <= opt.tol;
  return plan;
}

SemiDiscretePlan semidiscrete_solve(const SampleBatch& target,
                                    const SemiDiscreteOptions& opt) {
  const long n = target.n();
  if (n < 1) throw std::invalid_argument("semidiscrete_solve: empty batch");
  Eigen::VectorXd masses =
      Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return semidiscrete_solve(target.points, masses, opt, target.seed,
                            derive_stream("semidiscrete-pool"));
}

Eigen::MatrixXd kmeans_quantize(const Eigen::MatrixXd& points, int n_centers,
                                uint64_t seed, uint64_t stream,
                                int max_iters) {
  const long m = points.rows();
  const int d = static_cast<int>(points.cols());
  if (n_centers < 1 || m < n_centers)
    throw std::invalid_argument("kmeans_quantize: need at least one point per center");

  Philox4x32 rng(seed, stream);
  Eigen::MatrixXd centers(n_centers, d);

  // k-means++ seeding: next center drawn with probability proportional to
  // the squared distance to the nearest one chosen so far
  centers.row(0) = points.row(static_cast<long>(rng.next_u64() % static_cast<uint64_t>(m)));
  Eigen::VectorXd d2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < n_centers; ++k) {
    const double total = d2.sum();
    long pick = m - 1;
    if (total > 0) {
      double u = rng.uniform01() * total;
      for (long i = 0; i < m; ++i) {
        u -= d2[i];
        if (u <= 0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<long>(rng.next_u64() % static_cast<uint64_t>(m));
    }
    centers.row(k) = points.row(pick);
    d2 = d2.cwiseMin(
        (points.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }

  std::vector<int> assign(static_cast<size_t>(m), -1);
  Eigen::MatrixXd dots;
  for (int it = 0; it < max_iters; ++it) {
    const Eigen::VectorXd half_sq = 0.5 * centers.rowwise().squaredNorm();
    bool changed = false;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_centers, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_centers);
    Eigen::VectorXd worst = Eigen::VectorXd::Constant(m, 0);

    for (long lo = 0; lo < m; lo += kChunk) {
      const long len = std::min(kChunk, m - lo);
      dots.noalias() = points.middleRows(lo, len) * centers.transpose();
      for (long r = 0; r < len; ++r) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (int k = 0; k < n_centers; ++k) {
          const double s = half_sq[k] - dots(r, k);
          if (s < best) {
            best = s;
            best_k = k;
          }
        }
        const long i = lo + r;
        if (assign[static_cast<size_t>(i)] != best_k) {
          assign[static_cast<size_t>(i)] = best_k;
          changed = true;
        }
        sums.row(best_k) += points.row(i);
        counts[best_k] += 1.0;
        worst[i] =
            (points.row(i) - centers.row(best_k)).squaredNorm();
      }
    }

    for (int k = 0; k < n_centers; ++k) {
      if (counts[k] > 0) {
        centers.row(k) = sums.row(k) / counts[k];
      } else {
        long far = 0;
        worst.maxCoeff(&far);
        centers.row(k) = points.row(far);
        worst[far] = 0;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return centers;
}

SemiDiscreteMap::SemiDiscreteMap(SemiDiscretePlan plan)
    : plan_(std::move(plan)) {
  if (plan_.support.rows() < 1 ||
      plan_.weights.size() != plan_.support.rows())
    throw std::invalid_argument("SemiDiscreteMap: incomplete plan");
  offsets_ = 0.5 * plan_.support.rowwise().squaredNorm() - plan_.weights;
}

int SemiDiscreteMap::dim() const { return plan_.d(); }

long SemiDiscreteMap::cell_index(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd dots = plan_.support * x;
  double best = std::numeric_limits<double>::infinity();
  long best_j = 0;
  for (long j = 0; j < plan_.n(); ++j) {
    const double s = offsets_[j] - dots[j];
    if (s < best) { // strict: ties stay with the lowest index
      best = s;
      best_j = j;
    }
  }
  return best_j;
}

Eigen::VectorXd SemiDiscreteMap::eval(const Eigen::VectorXd& x) const {
  if (x.size() != plan_.support.cols())
    throw std::invalid_argument("SemiDiscreteMap: dimension mismatch");
  return plan_.support.row(cell_index(x)).transpose();
}

std::string SemiDiscreteMap::describe() const { return "semi-discrete"; }

double SemiDiscreteMap::monotonicity_tol() const { return 1e-9; }

void write_semidiscrete_plan(const SemiDiscretePlan& plan,
                             const std::string& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot open " + csv_path);
  const int d = plan.d();
  for (int c = 0; c < d; ++c) out << "y" << c << ",";
  out << "mass,weight\n";
  char buf[64];
  auto put = [&](double v, char tail) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << tail;
  };
  for (long i = 0; i < plan.n(); ++i) {
    for (int c = 0; c < d; ++c) put(plan.support(i, c), ',');
    put(plan.masses[i], ',');
    put(plan.weights[i], '\n');
  }

  nlohmann::json meta;
  meta["schema_version"] = 1;
  meta["n_support"] = plan.n();
  meta["dim"] = d;
  meta["mass_residual"] = plan.mass_residual;
  meta["budget_used"] = plan.budget_used;
  meta["iterations"] = plan.iterations;
  meta["converged"] = plan.converged;
  meta["seed"] = plan.seed;
  meta["stream"] = plan.stream;
  std::ofstream side(csv_path + ".meta.json");
  if (!side) throw std::runtime_error("cannot open " + csv_path + ".meta.json");
  side << meta.dump(2) << "\n";
}

SemiDiscretePlan read_semidiscrete_plan(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty plan file " + csv_path);
  const long n_cols = std::count(line.begin(), line.end(), ',') + 1;
  if (n_cols < 3) throw std::runtime_error("malformed plan header");
  const int d = static_cast<int>(n_cols - 2);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (static_cast<long>(row.size()) != n_cols)
      throw std::runtime_error("malformed plan row");
    rows.push_back(std::move(row));
  }

  SemiDiscretePlan plan;
  const long n = static_cast<long>(rows.size());
  plan.support.resize(n, d);
  plan.masses.resize(n);
  plan.weights.resize(n);
  for (long i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) plan.support(i, c) = rows[static_cast<size_t>(i)][static_cast<size_t>(c)];
    plan.masses[i] = rows[static_cast<size_t>(i)][static_cast<size_t>(d)];
    plan.weights[i] = rows[static_cast<size_t>(i)][static_cast<size_t>(d) + 1];
  }

  std::ifstream side(csv_path + ".meta.json");
  if (side) {
    nlohmann::json meta = nlohmann::json::parse(side);
    plan.mass_residual = meta.value("mass_residual", 0.0);
    plan.budget_used = meta.value("budget_used", 0L);
    plan.iterations = meta.value("iterations", 0);
    plan.converged = meta.value("converged", false);
    plan.seed = meta.value("seed", uint64_t{0});
    plan.stream = meta.value("stream", uint64_t{0});
  }
  return plan;
}

} // namespace otlab
