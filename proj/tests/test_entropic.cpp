#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "otlab/cdf1d.hpp"
#include "otlab/checks.hpp"
#include "otlab/entropic.hpp"
#include "otlab/numerics.hpp"
#include "otlab/potential.hpp"
#include "otlab/rng.hpp"
#include "otlab/samplers.hpp"
#include "otlab/transport_1d.hpp"

using namespace otlab;

TEST_CASE("matching clouds give a near-identity map") {
  SampleBatch cloud = sample_gaussian(2, 1200, 5, 1);
  EntropicOptions opt;
  opt.epsilon = 0.01;
  opt.tol = 1e-5;  // near-deterministic coupling, sinkhorn tail is slow
  EntropicMap map = entropic_map(cloud.points, cloud.points, opt);
  CHECK(map.marginal_error() <= opt.tol);

  Philox4x32 rng(6, 0);
  double err = 0;
  const int probes = 200;
  for (int i = 0; i < probes; ++i) {
    Eigen::VectorXd x = rng.normal_vec(2);
    err += (map.eval(x) - x).norm();
  }
  err /= probes;
  CHECK(err < 3 * std::sqrt(opt.epsilon));
}

TEST_CASE("doubling map is recovered within the smoothing bias") {
  SampleBatch source = sample_gaussian(1, 1500, 8, 1);
  Eigen::MatrixXd target = 2.0 * source.points;
  EntropicOptions opt;
  opt.epsilon = 0.02;
  EntropicMap map = entropic_map(source.points, target, opt);

  // slope through the bulk; entropic smoothing shrinks it slightly
  std::vector<double> xs, ts;
  for (double x = -1.5; x <= 1.5 + 1e-9; x += 0.125) {
    xs.push_back(x);
    ts.push_back(map.eval(Eigen::VectorXd::Constant(1, x))[0]);
  }
  SlopeFit fit = fit_linear(xs, ts);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("huge epsilon collapses the map to the target mean") {
  SampleBatch source = sample_gaussian(2, 400, 12, 1);
  SampleBatch target = sample_gaussian(2, 400, 12, 2);
  EntropicOptions opt;
  opt.epsilon = 50.0;
  EntropicMap map = entropic_map(source.points, target.points, opt);

  const Eigen::VectorXd mean = target.points.colwise().mean().transpose();
  for (double r : {0.0, 1.0, 2.5}) {
    Eigen::VectorXd x = Eigen::VectorXd::Constant(2, r / std::sqrt(2.0));
    CHECK((map.eval(x) - mean).norm() < 0.1);
  }
}

TEST_CASE("shrinking epsilon reduces the error against the exact 1d map") {
  // common random numbers: both solves share source and target clouds
  Potential laplace = make_laplace_product(1);
  SampleBatch source = sample_gaussian(1, 2000, 31, 1);
  SampleBatch target = sample_target(laplace, 2000, 31, 2);
  Brenier1DMap exact(laplace);

  auto mean_err = [&](double eps) {
    EntropicOptions opt;
    opt.epsilon = eps;
    EntropicMap map = entropic_map(source.points, target.points, opt);
    Philox4x32 rng(31, 3);
    double err = 0;
    const int probes = 300;
    for (int i = 0; i < probes; ++i) {
      const double x = rng.normal();
      err += std::abs(map.eval(Eigen::VectorXd::Constant(1, x))[0] -
                      exact.eval1(x));
    }
    return err / probes;
  };

  // at eps = 1 the smoothing bias dominates the n = 2000 sampling floor
  const double coarse = mean_err(1.0);
  const double fine = mean_err(0.01);
  CHECK(fine < coarse);
}

TEST_CASE("analytic jacobian matches finite differences and is psd") {
  SampleBatch source = sample_gaussian(2, 600, 44, 1);
  SampleBatch target = sample_gaussian(2, 600, 44, 2);
  EntropicOptions opt;
  opt.epsilon = 0.1;
  EntropicMap map = entropic_map(source.points, target.points, opt);
  REQUIRE(map.has_full_jacobian());

  Philox4x32 rng(44, 9);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = rng.normal_vec(2);
    Eigen::MatrixXd J = map.jacobian(x);

    // symmetry and positive semidefiniteness (exact monotonicity)
    CHECK((J - J.transpose()).norm() < 1e-12 * (1 + J.norm()));
    Eigen::VectorXd eig = map.jacobian_eigenvalues(x);
    CHECK(eig.minCoeff() >= -1e-12);

    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      Eigen::VectorXd fd = (map.eval(xp) - map.eval(xm)) / (2 * h);
      CHECK((J.col(j) - fd).norm() < 1e-5 * (1 + fd.norm()));
    }
  }

  BoundReport mono = monotonicity_check(map, 4000, 91, 0);
  CHECK(mono.pass);
}

TEST_CASE("solver rejects malformed input and reports non-convergence") {
  SampleBatch a = sample_gaussian(2, 50, 3, 1);
  SampleBatch b = sample_gaussian(3, 50, 3, 2);
  EntropicOptions opt;
  CHECK_THROWS_AS(entropic_map(a.points, b.points, opt), std::invalid_argument);

  Eigen::MatrixXd empty(0, 2);
  CHECK_THROWS_AS(entropic_map(empty, a.points, opt), std::invalid_argument);

  opt.epsilon = 0.0;
  CHECK_THROWS_AS(entropic_map(a.points, a.points, opt), std::invalid_argument);

  opt.epsilon = 0.001;
  opt.max_iters = 2;  // far too few sweeps to balance at this epsilon
  SampleBatch c = sample_gaussian(2, 200, 9, 1);
  SampleBatch d = sample_gaussian(2, 200, 9, 2);
  CHECK_THROWS_AS(entropic_map(c.points, d.points, opt), std::runtime_error);
}
