#include "otlab/potential.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "otlab/batch.hpp"
#include "otlab/numerics.hpp"

namespace otlab {

class PotentialKernel {
 public:
  virtual ~PotentialKernel() = default;
  virtual int dim() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const = 0;
  virtual bool smooth_at(const Eigen::VectorXd&) const { return true; }
  virtual const RadialForm* radial() const { return nullptr; }
  PotentialInfo info;
};

int Potential::dim() const { return k_->dim(); }
double Potential::value(const Eigen::VectorXd& x) const { return k_->value(x); }
Eigen::VectorXd Potential::gradient(const Eigen::VectorXd& x) const { return k_->gradient(x); }
Eigen::MatrixXd Potential::hessian(const Eigen::VectorXd& x) const { return k_->hessian(x); }
bool Potential::smooth_at(const Eigen::VectorXd& x) const { return k_->smooth_at(x); }
bool Potential::has_radial_form() const { return k_->radial() != nullptr; }
const PotentialInfo& Potential::info() const { return k_->info; }

const RadialForm& Potential::radial_form() const {
  const RadialForm* r = k_->radial();
  if (!r) throw std::logic_error("potential has no radial form");
  return *r;
}

std::pair<double, double> Potential::radial_hessian_eigs(double r) const {
  const RadialForm& rf = radial_form();
  if (r <= 0.0) {
    double v = rf.d2f(0.0);
    return {v, v};
  }
  return {rf.d2f(r), rf.df(r) / r};
}

double Potential::value1(double x) const {
  return value(Eigen::VectorXd::Constant(1, x));
}
double Potential::grad1(double x) const {
  return gradient(Eigen::VectorXd::Constant(1, x))[0];
}

namespace {

// --- radial kernels: V(x) = f(|x|) ---
class RadialKernel : public PotentialKernel {
 public:
  RadialKernel(int d, RadialForm rf) : d_(d), rf_(std::move(rf)) {}
  int dim() const override { return d_; }
  double value(const Eigen::VectorXd& x) const override { return rf_.f(x.norm()); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    double r = x.norm();
    if (r == 0.0) return Eigen::VectorXd::Zero(d_);  // df(0)=0 for every smooth family here
    return (rf_.df(r) / r) * x;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    double r = x.norm();
    if (r == 0.0) return rf_.d2f(0.0) * Eigen::MatrixXd::Identity(d_, d_);
    Eigen::VectorXd u = x / r;
    double t = rf_.df(r) / r;
    return t * Eigen::MatrixXd::Identity(d_, d_) + (rf_.d2f(r) - t) * (u * u.transpose());
  }
  const RadialForm* radial() const override { return &rf_; }

 private:
  int d_;
  RadialForm rf_;
};

class LaplaceKernel : public PotentialKernel {
 public:
  explicit LaplaceKernel(int d) : d_(d) {}
  int dim() const override { return d_; }
  double value(const Eigen::VectorXd& x) const override {
    return kRate * x.lpNorm<1>() + d_ * 0.5 * std::log(2.0);
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    if (!smooth_at(x)) throw NonSmoothError("laplace gradient at a kink");
    Eigen::VectorXd g(d_);
    for (int i = 0; i < d_; ++i) g[i] = x[i] > 0.0 ? kRate : -kRate;
    return g;
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    if (!smooth_at(x)) throw NonSmoothError("laplace hessian at a kink");
    return Eigen::MatrixXd::Zero(d_, d_);
  }
  bool smooth_at(const Eigen::VectorXd& x) const override {
    for (int i = 0; i < d_; ++i)
      if (x[i] == 0.0) return false;
    return true;
  }
  const RadialForm* radial() const override { return d_ == 1 ? &rf1_ : nullptr; }

  static constexpr double kRate = M_SQRT2;  // unit variance per coordinate

 private:
  int d_;
  RadialForm rf1_{[](double r) { return kRate * r + 0.5 * std::log(2.0); },
                  [](double) { return kRate; }, [](double) { return 0.0; }};
};

class CustomKernel1D : public PotentialKernel {
 public:
  CustomKernel1D(std::function<double(double)> v, std::function<double(double)> dv,
                 std::function<double(double)> d2v)
      : v_(std::move(v)), dv_(std::move(dv)), d2v_(std::move(d2v)) {}
  int dim() const override { return 1; }
  double value(const Eigen::VectorXd& x) const override { return v_(x[0]); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return Eigen::VectorXd::Constant(1, dv_(x[0]));
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return Eigen::MatrixXd::Constant(1, 1, d2v_(x[0]));
  }

 private:
  std::function<double(double)> v_, dv_, d2v_;
};

class AffineKernel : public PotentialKernel {
 public:
  AffineKernel(Potential base, Eigen::VectorXd m, Eigen::MatrixXd L)
      : base_(std::move(base)), m_(std::move(m)), L_(std::move(L)) {}
  int dim() const override { return static_cast<int>(m_.size()); }
  double value(const Eigen::VectorXd& x) const override { return base_.value(m_ + L_ * x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    return L_.transpose() * base_.gradient(m_ + L_ * x);
  }
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const override {
    return L_.transpose() * base_.hessian(m_ + L_ * x) * L_;
  }
  bool smooth_at(const Eigen::VectorXd& x) const override { return base_.smooth_at(m_ + L_ * x); }

 private:
  Potential base_;
  Eigen::VectorXd m_;
  Eigen::MatrixXd L_;
};

RadialForm power_form(int d, double p, double a) {
  return RadialForm{
      [=](double r) { return a * std::pow(d + r * r, 0.5 * p); },
      [=](double r) { return a * p * r * std::pow(d + r * r, 0.5 * p - 1.0); },
      [=](double r) {
        return a * p * std::pow(d + r * r, 0.5 * p - 2.0) * (d + (p - 1.0) * r * r);
      }};
}

// E|X|^2 under density prop to e^{-f(r)} in R^d, by radial quadrature.
double radial_second_moment(int d, const std::function<double(double)>& f) {
  double f0 = f(0.0);
  // integration cutoff where the density has dropped by e^{-60} from the mode
  double hi = 1.0;
  while (f(hi) - f0 < 60.0 && hi < 1e6) hi *= 2.0;
  auto w = [&](double r) { return std::exp(-(f(r) - f0)); };
  double num = integrate([&](double r) { return std::pow(r, d + 1) * w(r); }, 0.0, hi, 1e-13);
  double den = integrate([&](double r) { return std::pow(r, d - 1) * w(r); }, 0.0, hi, 1e-13);
  return num / den;
}

// min over [0, r_max] of (d + r) * lambda_min(Hess V at radius r)
double power_band_c2(int d, double p, double a, double r_max) {
  RadialForm rf = power_form(d, p, a);
  auto g = [&](double r) { return (d + r) * std::min(rf.d2f(r), r > 0 ? rf.df(r) / r : rf.d2f(0.0)); };
  double best = g(0.0), best_r = 0.0;
  const int grid = 400;
  for (int i = 0; i <= grid; ++i) {
    double r = std::expm1(std::log1p(r_max) * i / grid);
    double v = g(r);
    if (v < best) {
      best = v;
      best_r = r;
    }
  }
  double lo = std::max(0.0, best_r * 0.5), hi = std::min(r_max, best_r * 2.0 + 1e-3);
  double r_star = minimize_1d(g, lo, hi, 1e-10 * (1.0 + hi));
  return std::min(best, g(r_star));
}

}  // namespace

Potential make_gaussian(int d, double sigma) {
  if (d < 1 || sigma <= 0.0) throw std::invalid_argument("make_gaussian: bad parameters");
  double s2 = sigma * sigma;
  double c = 0.5 * d * std::log(2.0 * M_PI * s2);
  auto k = std::make_shared<RadialKernel>(
      d, RadialForm{[=](double r) { return 0.5 * r * r / s2 + c; },
                    [=](double r) { return r / s2; }, [=](double) { return 1.0 / s2; }});
  k->info.family = "gaussian";
  k->info.params = {{"d", double(d)}, {"sigma", sigma}};
  k->info.band = {true, 1.0 / s2, d / s2, std::numeric_limits<double>::infinity()};
  // largest a with 2 e^{-a t} dominating the two-sided gaussian tail at every t
  k->info.alpha = std::sqrt(2.0 * std::log(2.0)) / sigma;
  k->info.beta = 1.0 / s2;
  return Potential(k);
}

Potential make_laplace_product(int d) {
  if (d < 1) throw std::invalid_argument("make_laplace_product: bad dimension");
  auto k = std::make_shared<LaplaceKernel>(d);
  k->info.family = "laplace";
  k->info.params = {{"d", double(d)}};
  k->info.smooth = false;
  // hessian vanishes a.e.: no positive curvature band exists
  k->info.band = {true, 0.0, 0.0, std::numeric_limits<double>::infinity()};
  k->info.alpha = M_SQRT2;  // per-coordinate two-sided tail rate
  return Potential(k);
}

Potential make_power(int d, double p, std::optional<double> amplitude) {
  if (d < 1 || p < 1.0 || p > 2.0) throw std::invalid_argument("make_power: need d>=1, p in [1,2]");
  double a;
  if (amplitude) {
    a = *amplitude;
    if (a <= 0.0) throw std::invalid_argument("make_power: amplitude must be positive");
  } else {
    // calibrate a so that E|X|^2 = d (second moment of the unit gaussian)
    auto moment_gap = [&](double cand) {
      return radial_second_moment(d, [&](double r) { return power_form(d, p, cand).f(r); }) - d;
    };
    a = root_newton_bisect(moment_gap, [](double) { return 0.0; }, 1e-4, 32.0, 1e-12);
  }
  auto k = std::make_shared<RadialKernel>(d, power_form(d, p, a));
  k->info.family = "power";
  k->info.params = {{"d", double(d)}, {"p", p}, {"a", a}};
  double r_max = std::max(50.0, 2.0 * chi_quantile(d, 1.0 - 1e-8));
  double c1 = a * p * std::pow(double(d), 0.5 * p - 1.0);  // eigenvalues peak at the origin for p<=2
  k->info.band = {true, c1, power_band_c2(d, p, a, r_max), r_max};
  if (p == 2.0) k->info.beta = 2.0 * a;
  return Potential(k);
}

Potential make_custom_1d(std::function<double(double)> v, std::function<double(double)> dv,
                         std::function<double(double)> d2v, PotentialInfo info) {
  auto k = std::make_shared<CustomKernel1D>(std::move(v), std::move(dv), std::move(d2v));
  if (info.family.empty()) info.family = "custom-1d";
  k->info = std::move(info);
  return Potential(k);
}

Potential affine_pullback(const Potential& base, const Eigen::VectorXd& m,
                          const Eigen::MatrixXd& L) {
  if (m.size() != base.dim() || L.rows() != base.dim() || L.cols() != base.dim())
    throw std::invalid_argument("affine_pullback: shape mismatch");
  auto k = std::make_shared<AffineKernel>(base, m, L);
  k->info.family = base.info().family + "+affine";
  k->info.params = base.info().params;
  k->info.smooth = base.info().smooth;
  k->info.isotropic = false;
  k->info.centered = true;
  return Potential(k);
}

Potential isotropize(const Potential& pot, const SampleBatch& batch) {
  if (batch.d() != pot.dim()) throw std::invalid_argument("isotropize: dimension mismatch");
  BatchDiagnostics diag = batch_diagnostics(batch);
  if (diag.degenerate) throw std::invalid_argument("isotropize: degenerate batch covariance");
  Eigen::LLT<Eigen::MatrixXd> llt(diag.covariance);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("isotropize: covariance not positive definite");
  return affine_pullback(pot, diag.mean, llt.matrixL());
}

BoundReport hessian_band_check(const Potential& pot, const std::vector<Eigen::VectorXd>& points,
                               double tol) {
  BoundReport rep;
  rep.check = "hessian-band";
  rep.statement = "c1 I >= Hess V >= c2/(d+|x|) I on the probe set";
  const HessianBand& band = pot.info().band;
  rep.values["c1"] = band.c1;
  rep.values["c2"] = band.c2;
  rep.values["band_r_max"] = band.r_max;
  if (!band.declared || !(band.c2 > 0.0) || !std::isfinite(band.c1)) {
    rep.pass = false;
    rep.margin = kNan;
    rep.note("no positive curvature band declared for this target");
    return rep;
  }
  const int d = pot.dim();
  double worst = std::numeric_limits<double>::infinity();
  long skipped_kink = 0, skipped_range = 0;
  for (const auto& x : points) {
    if (!pot.smooth_at(x)) {
      ++skipped_kink;
      continue;
    }
    double r = x.norm();
    if (r > band.r_max) {
      ++skipped_range;
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pot.hessian(x));
    double lmin = es.eigenvalues().minCoeff();
    double lmax = es.eigenvalues().maxCoeff();
    double m = std::min(band.c1 - lmax, lmin - band.c2 / (d + r));
    worst = std::min(worst, m);
    rep.rows.push_back({r, lmin, band.c2 / (d + r), false});
  }
  if (skipped_kink) rep.note(std::to_string(skipped_kink) + " probe(s) on the non-smooth locus skipped");
  if (skipped_range) rep.note(std::to_string(skipped_range) + " probe(s) beyond the declared band range skipped");
  rep.margin = worst;
  rep.pass = std::isfinite(worst) && worst >= -tol;
  return rep;
}

}  // namespace otlab
