#include <doctest.h>

#include <cmath>

#include "otlab/numerics.hpp"
#include "otlab/rng.hpp"
#include "otlab/transport_1d.hpp"
#include "otlab/transport_radial.hpp"

using namespace otlab;

TEST_CASE("radial map on gaussian targets is the exact scaling") {
  BrenierRadialMap id(make_gaussian(3, 1.0));
  CHECK(id.origin_slope() == doctest::Approx(1.0).epsilon(1e-10));
  for (double r : {0.01, 0.5, 1.0, 2.5, 6.0, 12.0, 30.0, 40.0}) {
    CHECK(id.profile(r) == doctest::Approx(r).epsilon(1e-10));
    CHECK(id.profile_prime(r) == doctest::Approx(1.0).epsilon(1e-9));
  }
  Eigen::VectorXd x(3);
  x << 1.0, -2.0, 0.5;
  CHECK((id.eval(x) - x).norm() < 1e-9);
  Eigen::VectorXd ev = id.jacobian_eigenvalues(x);
  for (int i = 0; i < 3; ++i) CHECK(ev[i] == doctest::Approx(1.0).epsilon(1e-9));

  BrenierRadialMap twice(make_gaussian(2, 2.0));
  CHECK(twice.origin_slope() == doctest::Approx(2.0).epsilon(1e-10));
  for (double r : {0.3, 1.0, 4.0, 9.0}) CHECK(twice.profile(r) == doctest::Approx(2.0 * r).epsilon(1e-10));
}

TEST_CASE("radial map in 1d agrees with the 1d map") {
  Potential pot = make_gaussian(1, 1.3);
  BrenierRadialMap rad(pot);
  Brenier1DMap one(pot);
  for (double x : {0.2, 0.9, 2.4, 5.5}) {
    CHECK(rad.profile(x) == doctest::Approx(one.eval1(x)).epsilon(1e-9));
    CHECK(rad.profile(x) == doctest::Approx(-one.eval1(-x)).epsilon(1e-9));
  }

  Potential lap = make_laplace_product(1);
  BrenierRadialMap radl(lap);
  Brenier1DMap onel(lap);
  for (double x : {0.4, 1.0, 3.2, 8.0}) {
    CHECK(radl.profile(x) == doctest::Approx(onel.eval1(x)).epsilon(1e-9));
  }
}

TEST_CASE("radial profile derivative is consistent") {
  BrenierRadialMap pw(make_power(2, 1.5));
  // analytic ratio vs centered finite difference of the profile
  for (double r : {0.3, 0.9, 2.0, 4.0}) {
    double h = 1e-5 * (1.0 + r);
    double fd = (pw.profile(r + h) - pw.profile(r - h)) / (2 * h);
    CHECK(pw.profile_prime(r) == doctest::Approx(fd).epsilon(1e-5));
  }
  // warm-start spline tracks the exact profile and its slope
  for (double r : {0.5, 1.5, 3.0}) {
    CHECK(pw.spline_value(r) == doctest::Approx(pw.profile(r)).epsilon(1e-6));
    CHECK(pw.spline_prime(r) == doctest::Approx(pw.profile_prime(r)).epsilon(1e-3));
  }
}

TEST_CASE("radial map pushes the gaussian onto the calibrated target") {
  // E|T(Z)|^2 must equal d for the moment-calibrated power family
  BrenierRadialMap pw(make_power(2, 1.5));
  Philox4x32 rng(31, 0);
  const int n = 40000;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) s2 += pw.eval(rng.normal_vec(2)).squaredNorm();
  s2 /= n;
  CHECK(s2 == doctest::Approx(2.0).epsilon(0.03));
}

TEST_CASE("radial origin behavior and extrapolation flag") {
  BrenierRadialMap pw(make_power(3, 1.5));
  CHECK(pw.eval(Eigen::VectorXd::Zero(3)).norm() == 0.0);
  // eigenvalues at the origin collapse to the common slope
  Eigen::VectorXd ev0 = pw.jacobian_eigenvalues(1e-12 * Eigen::VectorXd::Ones(3));
  for (int i = 0; i < 3; ++i) CHECK(ev0[i] == doctest::Approx(pw.origin_slope()).epsilon(1e-9));
  // profile continues smoothly past the grid edge (linear regime boundary)
  double rb = pw.grid_r_min();
  CHECK(pw.profile(rb * 1.0000001) == doctest::Approx(pw.origin_slope() * rb).epsilon(1e-4));

  Eigen::VectorXd far(3);
  far << 0.0, 0.0, chi_quantile(3, 1.0 - 1e-6) + 0.5;
  CHECK(pw.extrapolated_at(far));
  Eigen::VectorXd near = Eigen::VectorXd::Ones(3);
  CHECK_FALSE(pw.extrapolated_at(near));
  // far evaluations remain monotone and finite
  double prev = 0.0;
  for (double r : {8.0, 12.0, 20.0, 45.0}) {
    double s = pw.profile(r);
    CHECK(std::isfinite(s));
    CHECK(s > prev);
    prev = s;
  }
}

TEST_CASE("radial profile csv export") {
  BrenierRadialMap pw(make_power(2, 1.5), {64, 1e-6, 1.0 - 1e-6, 256});
  pw.write_profile_csv("/tmp/otlab_profile_test.csv");
  FILE* f = std::fopen("/tmp/otlab_profile_test.csv", "r");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof(line), f) != nullptr);
  CHECK(std::string(line) == "r,s,s_prime\n");
  int rows = 0;
  while (std::fgets(line, sizeof(line), f)) ++rows;
  std::fclose(f);
  CHECK(rows == 64);
}

TEST_CASE("radial map rejects non-radial targets") {
  CHECK_THROWS_AS(BrenierRadialMap(make_laplace_product(2)), std::invalid_argument);
}
