// pchip.hpp relies on an unqualified isnan and must come before Eigen.
#include <cmath>
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>

#include "otlab/transport_radial.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "otlab/numerics.hpp"

namespace otlab {

struct BrenierRadialMap::Spline {
  using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
  Pchip interp;
  double lr_lo, lr_hi;
  double slope_lo, slope_hi;  // d ln s / d ln r at the grid ends

  Spline(std::vector<double> lr, std::vector<double> ls)
      : interp(std::move(lr), std::move(ls)), lr_lo(0), lr_hi(0), slope_lo(0), slope_hi(0) {}

  double value(double lr) const {
    if (lr < lr_lo) return interp(lr_lo) + slope_lo * (lr - lr_lo);
    if (lr > lr_hi) return interp(lr_hi) + slope_hi * (lr - lr_hi);
    return interp(lr);
  }
  double prime(double lr) const {
    if (lr < lr_lo) return slope_lo;
    if (lr > lr_hi) return slope_hi;
    return interp.prime(lr);
  }
};

namespace {

Potential log_radius_potential(const Potential& pot) {
  if (!pot.has_radial_form())
    throw std::invalid_argument("BrenierRadialMap: target has no radial form");
  const RadialForm rf = pot.radial_form();
  const double d = pot.dim();
  PotentialInfo info;
  info.family = pot.info().family + "+log-radius";
  return make_custom_1d(
      [rf, d](double u) { return rf.f(std::exp(u)) - d * u; },
      [rf, d](double u) {
        double r = std::exp(u);
        return rf.df(r) * r - d;
      },
      [rf](double u) {
        double r = std::exp(u);
        return rf.d2f(r) * r * r + rf.df(r) * r;
      },
      info);
}

}  // namespace

BrenierRadialMap::BrenierRadialMap(const Potential& pot, RadialProfileOptions opt)
    : d_(pot.dim()), wdist_(log_radius_potential(pot), opt.n_anchors) {
  const RadialForm& rf = pot.radial_form();

  // s(r) ~ k0 r near the origin; k0^d = mass * e^{f(0)} / chi normalizer
  k0_ = std::exp((wdist_.log_mass() + rf.f(0.0) - log_chi_norm(d_)) / d_);
  extrap_r_ = chi_quantile(d_, 1.0 - 1e-6);

  double r_lo = chi_quantile(d_, opt.q_lo), r_hi = chi_quantile(d_, opt.q_hi);
  gr_.resize(opt.n_nodes);
  gs_.resize(opt.n_nodes);
  std::vector<double> lr(opt.n_nodes), ls(opt.n_nodes);
  for (int i = 0; i < opt.n_nodes; ++i) {
    double t = static_cast<double>(i) / (opt.n_nodes - 1);
    double lri = std::log(r_lo) + t * (std::log(r_hi) - std::log(r_lo));
    double r = std::exp(lri);
    double fc = chi_cdf(d_, r);
    double u = (fc <= 0.5) ? wdist_.quantile_from_log_cdf(std::log(fc))
                           : wdist_.quantile_from_log_survival(log_chi_sf(d_, r));
    gr_[i] = r;
    gs_[i] = std::exp(u);
    lr[i] = lri;
    ls[i] = u;
  }
  double lr0 = lr.front(), lrN = lr.back();
  auto sp = std::make_shared<Spline>(std::move(lr), std::move(ls));
  sp->lr_lo = lr0;
  sp->lr_hi = lrN;
  sp->slope_lo = sp->interp.prime(lr0);
  sp->slope_hi = sp->interp.prime(lrN);
  spline_ = std::move(sp);
}

double BrenierRadialMap::spline_value(double r) const {
  return std::exp(spline_->value(std::log(r)));
}

double BrenierRadialMap::spline_prime(double r) const {
  double lr = std::log(r);
  return std::exp(spline_->value(lr)) / r * spline_->prime(lr);
}

double BrenierRadialMap::log_radial_density(double s) const {
  // rho_R(s) = rho_W(ln s)/s
  return wdist_.log_density(std::log(s)) - std::log(s);
}

// Newton in u = ln s on the cdf matching equation, warm-started from the
// spline; falls back to the bracketed quantile solver on the rare miss.
double BrenierRadialMap::solve_u(double r, double u0) const {
  double fc = chi_cdf(d_, r);
  bool lower = fc <= 0.5;
  double target = lower ? std::log(fc) : log_chi_sf(d_, r);
  double u = u0;
  for (int it = 0; it < 50; ++it) {
    double g, dg;
    if (lower) {
      double lc = wdist_.log_cdf_lower(u);
      g = lc - target;
      dg = std::exp(wdist_.log_density(u) - lc);
    } else {
      double lsv = wdist_.log_survival(u);
      g = lsv - target;
      dg = -std::exp(wdist_.log_density(u) - lsv);
    }
    if (dg == 0.0) break;
    double step = -g / dg;
    if (step > 2.0) step = 2.0;
    if (step < -2.0) step = -2.0;
    u += step;
    if (std::abs(step) < 1e-12 * (1.0 + std::abs(u))) return u;
  }
  return lower ? wdist_.quantile_from_log_cdf(target)
               : wdist_.quantile_from_log_survival(target);
}

double BrenierRadialMap::profile(double r) const {
  if (r <= 0.0) return 0.0;
  if (r < gr_.front()) return k0_ * r;
  double u0 = spline_->value(std::log(r));
  return std::exp(solve_u(r, u0));
}

double BrenierRadialMap::profile_prime(double r) const {
  if (r < gr_.front()) return k0_;
  double s = profile(r);
  return std::exp(chi_log_pdf(d_, r) - log_radial_density(s));
}

Eigen::VectorXd BrenierRadialMap::eval(const Eigen::VectorXd& x) const {
  double r = x.norm();
  if (r == 0.0) return Eigen::VectorXd::Zero(d_);
  return (profile(r) / r) * x;
}

Eigen::VectorXd BrenierRadialMap::jacobian_eigenvalues(const Eigen::VectorXd& x) const {
  double r = x.norm();
  Eigen::VectorXd ev(d_);
  if (r < gr_.front()) {  // linear regime: isotropic slope
    ev.setConstant(k0_);
    return ev;
  }
  double s = profile(r);
  double radial = std::exp(chi_log_pdf(d_, r) - log_radial_density(s));
  double tangential = s / r;
  for (int i = 0; i + 1 < d_; ++i) ev[i] = tangential;
  ev[d_ - 1] = radial;
  std::sort(ev.data(), ev.data() + d_);
  return ev;
}

Eigen::MatrixXd BrenierRadialMap::jacobian(const Eigen::VectorXd& x) const {
  double r = x.norm();
  if (r < gr_.front()) return k0_ * Eigen::MatrixXd::Identity(d_, d_);
  double s = profile(r);
  double radial = std::exp(chi_log_pdf(d_, r) - log_radial_density(s));
  double tangential = s / r;
  Eigen::VectorXd u = x / r;
  return tangential * Eigen::MatrixXd::Identity(d_, d_) +
         (radial - tangential) * (u * u.transpose());
}

void BrenierRadialMap::write_profile_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_profile_csv: cannot open " + path);
  f << "r,s,s_prime\n";
  char buf[128];
  for (size_t i = 0; i < gr_.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", gr_[i], gs_[i],
                  profile_prime(gr_[i]));
    f << buf;
  }
}

}  // namespace otlab
