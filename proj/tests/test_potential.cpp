#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "otlab/batch.hpp"
#include "otlab/potential.hpp"
#include "otlab/rng.hpp"

using namespace otlab;

namespace {

// independent second-moment oracle: plain Simpson on a fine fixed grid
double simpson_second_moment(int d, double p, double a) {
  auto f = [&](double r) { return a * std::pow(d + r * r, 0.5 * p); };
  double hi = 1.0;
  while (f(hi) - f(0.0) < 70.0) hi *= 1.5;
  const int n = 40000;  // even
  double h = hi / n;
  double num = 0.0, den = 0.0;
  for (int i = 0; i <= n; ++i) {
    double r = i * h;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    double g = std::exp(-(f(r) - f(0.0)));
    num += w * std::pow(r, d + 1) * g;
    den += w * std::pow(r, d - 1) * g;
  }
  return num / den;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<int>(v.size()));
  int i = 0;
  for (double t : v) x[i++] = t;
  return x;
}

}  // namespace

TEST_CASE("gaussian potential closed forms") {
  Potential g = make_gaussian(3, 2.0);
  Eigen::VectorXd x = vec({1.0, -2.0, 0.5});
  CHECK(g.value(x) == doctest::Approx(x.squaredNorm() / 8.0 + 1.5 * std::log(8.0 * M_PI)).epsilon(1e-14));
  CHECK((g.gradient(x) - x / 4.0).norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK((g.hessian(x) - 0.25 * Eigen::MatrixXd::Identity(3, 3)).norm() ==
        doctest::Approx(0.0).epsilon(1e-13));
  CHECK(g.info().band.c1 == doctest::Approx(0.25));
  CHECK(g.info().band.c2 == doctest::Approx(0.75));  // d / sigma^2
  CHECK(g.info().beta == doctest::Approx(0.25));
  CHECK(g.has_radial_form());
}

TEST_CASE("laplace potential: kinks, band, radial form in 1d only") {
  Potential l2 = make_laplace_product(2);
  Eigen::VectorXd x = vec({1.0, -3.0});
  CHECK(l2.value(x) == doctest::Approx(4.0 * M_SQRT2 + std::log(2.0)).epsilon(1e-14));
  Eigen::VectorXd grad = l2.gradient(x);
  CHECK(grad[0] == doctest::Approx(M_SQRT2));
  CHECK(grad[1] == doctest::Approx(-M_SQRT2));
  CHECK_THROWS_AS((void)l2.gradient(vec({0.0, 1.0})), NonSmoothError);
  CHECK_FALSE(l2.smooth_at(vec({0.0, 1.0})));
  CHECK(l2.smooth_at(x));
  CHECK_FALSE(l2.has_radial_form());
  CHECK_FALSE(l2.info().smooth);
  CHECK(l2.info().alpha == doctest::Approx(M_SQRT2));

  Potential l1 = make_laplace_product(1);
  CHECK(l1.has_radial_form());
  CHECK(l1.radial_form().f(2.0) == doctest::Approx(2.0 * M_SQRT2 + 0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("power potential hessian eigenvalues at the origin") {
  // d=4, p=3/2, explicit amplitude 1: second derivative at 0 is 1.5 d^{-1/4}
  Potential pw = make_power(4, 1.5, 1.0);
  auto [rad0, tan0] = pw.radial_hessian_eigs(0.0);
  CHECK(rad0 == doctest::Approx(1.5 * std::pow(4.0, -0.25)).epsilon(1e-13));
  CHECK(tan0 == doctest::Approx(rad0).epsilon(1e-13));

  // interior closed forms
  double r = 2.0, a = 1.0, p = 1.5, d = 4.0;
  auto [rad, tan] = pw.radial_hessian_eigs(r);
  CHECK(rad == doctest::Approx(a * p * std::pow(d + r * r, 0.5 * p - 2.0) * (d + (p - 1.0) * r * r)).epsilon(1e-13));
  CHECK(tan == doctest::Approx(a * p * std::pow(d + r * r, 0.5 * p - 1.0)).epsilon(1e-13));
  CHECK(rad < tan);  // radial direction is the soft one for p < 2
}

TEST_CASE("power amplitude calibration hits unit second moment") {
  // p = 2 solves in closed form: density exp(-a(d+r^2)) has E|X|^2 = d/(2a)
  Potential p2 = make_power(3, 2.0);
  CHECK(p2.info().params.at("a") == doctest::Approx(0.5).epsilon(1e-10));

  Potential p15 = make_power(3, 1.5);
  double a = p15.info().params.at("a");
  CHECK(simpson_second_moment(3, 1.5, a) == doctest::Approx(3.0).epsilon(1e-7));

  Potential p1 = make_power(2, 1.0);
  CHECK(simpson_second_moment(2, 1.0, p1.info().params.at("a")) == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("gradients agree with finite differences") {
  Philox4x32 rng(5, 0);
  for (Potential pot : {make_gaussian(3, 1.3), make_power(3, 1.5), make_power(2, 1.0, 0.7)}) {
    int d = pot.dim();
    for (int it = 0; it < 5; ++it) {
      Eigen::VectorXd x = rng.normal_vec(d);
      Eigen::VectorXd g = pot.gradient(x);
      for (int j = 0; j < d; ++j) {
        double h = 1e-6;
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        double fd = (pot.value(xp) - pot.value(xm)) / (2 * h);
        CHECK(g[j] == doctest::Approx(fd).epsilon(2e-6));
      }
      Eigen::MatrixXd H = pot.hessian(x);
      for (int j = 0; j < d; ++j) {
        double h = 1e-5;
        Eigen::VectorXd xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        Eigen::VectorXd fd = (pot.gradient(xp) - pot.gradient(xm)) / (2 * h);
        CHECK((H.col(j) - fd).norm() < 2e-5 * (1.0 + H.col(j).norm()));
      }
    }
  }
}

TEST_CASE("hessian band check passes smooth families and rejects laplace") {
  Philox4x32 rng(17, 0);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(rng.normal_vec(3));
  pts.push_back(Eigen::VectorXd::Zero(3));  // margin is exactly zero here for the gaussian

  BoundReport g = hessian_band_check(make_gaussian(3), pts);
  CHECK(g.pass);
  CHECK(g.margin == doctest::Approx(0.0).epsilon(1e-12));

  BoundReport pw = hessian_band_check(make_power(3, 1.5), pts);
  CHECK(pw.pass);
  CHECK(pw.margin >= 0.0);

  std::vector<Eigen::VectorXd> pts1;
  for (int i = 0; i < 20; ++i) pts1.push_back(rng.normal_vec(1));
  BoundReport lp = hessian_band_check(make_laplace_product(1), pts1);
  CHECK_FALSE(lp.pass);  // no positive lower curvature exists
}

TEST_CASE("isotropize whitens an affine-deformed target") {
  // build correlated gaussian samples directly, whiten, check the pullback
  Philox4x32 rng(23, 0);
  Eigen::MatrixXd A(2, 2);
  A << 2.0, 0.0, 0.6, 0.5;
  Eigen::VectorXd mu = vec({1.0, -2.0});
  SampleBatch b;
  b.points.resize(20000, 2);
  for (long i = 0; i < b.points.rows(); ++i)
    b.points.row(i) = (mu + A * rng.normal_vec(2)).transpose();

  // the matching potential for those samples: V(x) = |A^{-1}(x-mu)|^2/2 + const,
  // i.e. the standard gaussian pulled back through x -> A^{-1} x - A^{-1} mu
  Eigen::MatrixXd Ainv = A.inverse();
  Potential base = affine_pullback(make_gaussian(2), Eigen::VectorXd(-(Ainv * mu)), Ainv);
  Potential white = isotropize(base, b);

  BatchDiagnostics diag = batch_diagnostics(b);
  Eigen::LLT<Eigen::MatrixXd> llt(diag.covariance);
  Eigen::MatrixXd L = llt.matrixL();
  // whitened batch must be close to standard: hessian of the whitened
  // potential is L^T Sigma^{-1}-ish L ~ I up to sampling error
  Eigen::MatrixXd H = white.hessian(Eigen::VectorXd::Zero(2));
  CHECK((H - Eigen::MatrixXd::Identity(2, 2)).norm() < 0.05);
  // mapped sample mean near zero
  Eigen::VectorXd z = L.triangularView<Eigen::Lower>().solve(b.points.row(0).transpose() - diag.mean);
  CHECK(white.value(z) == doctest::Approx(base.value(b.points.row(0).transpose())).epsilon(1e-10));
}

TEST_CASE("isotropize rejects degenerate batches") {
  SampleBatch b;
  b.points = Eigen::MatrixXd::Zero(100, 2);  // rank zero
  CHECK_THROWS_AS((void)isotropize(make_gaussian(2), b), std::invalid_argument);
}
