#include "otlab/batch.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

namespace otlab {

std::string to_string(BatchProvenance p) {
  switch (p) {
    case BatchProvenance::kGaussianDirect: return "gaussian-direct";
    case BatchProvenance::kInverseCdf: return "inverse-cdf";
    case BatchProvenance::kMala: return "mala";
  }
  return "unknown";
}

namespace {

BatchProvenance provenance_from(const std::string& s) {
  if (s == "gaussian-direct") return BatchProvenance::kGaussianDirect;
  if (s == "inverse-cdf") return BatchProvenance::kInverseCdf;
  if (s == "mala") return BatchProvenance::kMala;
  throw std::invalid_argument("unknown batch provenance: " + s);
}

// Effective sample size from the autocorrelation sum, truncated at the first
// lag where consecutive estimates turn non-positive (Geyer-style cutoff).
double ess_1d(const Eigen::VectorXd& x) {
  const long n = x.size();
  if (n < 4) return static_cast<double>(n);
  double m = x.mean();
  Eigen::VectorXd c = x.array() - m;
  double var = c.squaredNorm() / n;
  if (var <= 0.0) return static_cast<double>(n);
  double acf_sum = 0.0;
  long max_lag = std::min<long>(n - 2, 2000);
  for (long k = 1; k <= max_lag; ++k) {
    double rho = 0.0;
    for (long i = 0; i + k < n; ++i) rho += c[i] * c[i + k];
    rho /= (n * var);
    if (rho <= 0.0) break;
    acf_sum += rho;
  }
  double ess = n / (1.0 + 2.0 * acf_sum);
  return std::min(ess, static_cast<double>(n));
}

}  // namespace

BatchDiagnostics batch_diagnostics(const SampleBatch& b) {
  BatchDiagnostics out;
  const long n = b.n();
  const int d = b.d();
  if (n == 0 || d == 0) {
    out.degenerate = true;
    out.warnings.push_back("empty batch");
    return out;
  }
  out.mean = b.points.colwise().mean();
  Eigen::MatrixXd centered = b.points.rowwise() - out.mean.transpose();
  out.covariance = (centered.transpose() * centered) / static_cast<double>(n);
  out.ess.resize(d);
  bool iid = b.provenance != BatchProvenance::kMala;
  for (int j = 0; j < d; ++j) out.ess[j] = iid ? static_cast<double>(n) : ess_1d(b.points.col(j));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.covariance);
  double lmax = es.eigenvalues().maxCoeff();
  double lmin = es.eigenvalues().minCoeff();
  if (n < 2 || lmax <= 0.0 || lmin < 1e-12 * lmax) {
    out.degenerate = true;
    out.warnings.push_back("covariance numerically rank-deficient");
  }
  if (!iid && out.ess.minCoeff() < 0.02 * static_cast<double>(n))
    out.warnings.push_back("low effective sample size");
  if (b.acceptance_rate >= 0.0 && (b.acceptance_rate < 0.45 || b.acceptance_rate > 0.7))
    out.warnings.push_back("acceptance rate outside the tuned band");
  return out;
}

void write_batch_csv(const std::string& path, const SampleBatch& b) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_batch_csv: cannot open " + path);
  f << "# seed=" << b.seed << " stream=" << b.stream
    << " provenance=" << to_string(b.provenance) << " acceptance=" << b.acceptance_rate
    << " step=" << b.step_size << " burn_in=" << b.burn_in << " thin=" << b.thin << '\n';
  const long n = b.n();
  const int d = b.d();
  for (int j = 0; j < d; ++j) f << (j ? ",x" : "x") << j;
  f << '\n';
  char buf[40];
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", b.points(i, j));
      f << (j ? "," : "") << buf;
    }
    f << '\n';
  }
}

SampleBatch read_batch_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("read_batch_csv: cannot open " + path);
  SampleBatch b;
  std::string line;
  if (!std::getline(f, line) || line.empty() || line[0] != '#')
    throw std::runtime_error("read_batch_csv: missing metadata line");
  {
    std::istringstream ss(line.substr(1));
    std::string tok;
    while (ss >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
      if (k == "seed") b.seed = std::stoull(v);
      else if (k == "stream") b.stream = std::stoull(v);
      else if (k == "provenance") b.provenance = provenance_from(v);
      else if (k == "acceptance") b.acceptance_rate = std::stod(v);
      else if (k == "step") b.step_size = std::stod(v);
      else if (k == "burn_in") b.burn_in = std::stol(v);
      else if (k == "thin") b.thin = std::stol(v);
    }
  }
  if (!std::getline(f, line)) throw std::runtime_error("read_batch_csv: missing header");
  int d = 1;
  for (char c : line)
    if (c == ',') ++d;
  std::vector<double> vals;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
  }
  if (vals.size() % d != 0) throw std::runtime_error("read_batch_csv: ragged rows");
  long n = static_cast<long>(vals.size()) / d;
  b.points.resize(n, d);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) b.points(i, j) = vals[i * d + j];
  return b;
}

}  // namespace otlab
