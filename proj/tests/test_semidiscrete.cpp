#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <vector>

#include "otlab/checks.hpp"
#include "otlab/rng.hpp"
#include "otlab/semidiscrete.hpp"

using namespace otlab;

namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  long i = 0;
  for (const auto& row : rows) {
    long j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

TEST_CASE("single support point absorbs everything") {
  SemiDiscreteOptions opt;
  opt.mc_budget = 4000;
  opt.first_stage = 4000;
  SemiDiscretePlan plan = semidiscrete_solve(
      mat({{2.0, -1.0}}), Eigen::VectorXd::Constant(1, 1.0), opt, 3, 0);
  CHECK(plan.converged);
  CHECK(plan.mass_residual == 0.0);
  CHECK(plan.weights[0] == 0.0);  // mean-zero gauge

  SemiDiscreteMap map(plan);
  Eigen::VectorXd y = map.eval(mat({{5.0, 5.0}}).row(0).transpose());
  CHECK(y[0] == 2.0);
  CHECK(y[1] == -1.0);
}

TEST_CASE("symmetric two-point problem splits the mass evenly") {
  Eigen::MatrixXd support = mat({{1.0, 0.0}, {-1.0, 0.0}});
  Eigen::VectorXd masses = Eigen::VectorXd::Constant(2, 0.5);
  SemiDiscreteOptions opt;
  opt.tol = 0.01;
  opt.mc_budget = 60000;
  SemiDiscretePlan plan = semidiscrete_solve(support, masses, opt, 11, 5);

  CHECK(plan.converged);
  CHECK(plan.mass_residual <= opt.tol);
  // symmetry: the optimal weights agree, and the gauge pins them to zero
  CHECK(std::abs(plan.weights[0] - plan.weights[1]) < 0.05);
  CHECK(std::abs(plan.weights.mean()) < 1e-12);

  SemiDiscreteMap map(plan);
  CHECK(map.eval(mat({{3.0, 0.0}}).row(0).transpose())[0] == 1.0);
  CHECK(map.eval(mat({{-3.0, 0.0}}).row(0).transpose())[0] == -1.0);
}

TEST_CASE("cell boundary ties break toward the lowest index") {
  // equal weights by hand: the midline belongs to point 0
  SemiDiscretePlan plan;
  plan.support = mat({{1.0, 0.0}, {-1.0, 0.0}});
  plan.masses = Eigen::VectorXd::Constant(2, 0.5);
  plan.weights = Eigen::VectorXd::Zero(2);
  plan.cell_mass = plan.masses;
  SemiDiscreteMap map(plan);

  CHECK(map.cell_index(mat({{0.0, 7.0}}).row(0).transpose()) == 0);
  CHECK(map.cell_index(mat({{0.0, -7.0}}).row(0).transpose()) == 0);
  CHECK(map.cell_index(mat({{-1e-9, 0.0}}).row(0).transpose()) == 1);
}

TEST_CASE("four-point symmetric cloud converges with near-equal weights") {
  Eigen::MatrixXd support =
      mat({{1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}});
  Eigen::VectorXd masses = Eigen::VectorXd::Constant(4, 0.25);
  SemiDiscreteOptions opt;
  opt.tol = 0.01;
  opt.mc_budget = 80000;
  SemiDiscretePlan plan = semidiscrete_solve(support, masses, opt, 17, 2);

  CHECK(plan.converged);
  CHECK(plan.mass_residual <= opt.tol);
  CHECK(plan.weights.maxCoeff() - plan.weights.minCoeff() < 0.05);
  CHECK(std::abs(plan.cell_mass.sum() - 1.0) < 1e-12);

  // the ascent never decreases the objective while the pool prefix is fixed
  REQUIRE(plan.objective.size() == plan.objective_prefix.size());
  for (size_t i = 1; i < plan.objective.size(); ++i)
    if (plan.objective_prefix[i] == plan.objective_prefix[i - 1])
      CHECK(plan.objective[i] >= plan.objective[i - 1] - 1e-12);
}

TEST_CASE("asymmetric masses move the diagram boundary") {
  Eigen::MatrixXd support = mat({{1.0}, {-1.0}});
  Eigen::VectorXd masses(2);
  masses << 0.9, 0.1;
  SemiDiscreteOptions opt;
  opt.tol = 0.01;
  opt.mc_budget = 60000;
  SemiDiscretePlan plan = semidiscrete_solve(support, masses, opt, 29, 0);

  CHECK(plan.converged);
  // cell of the heavy point must reach left of the midpoint: its boundary
  // sits at the 10% gaussian quantile, about -1.2816
  SemiDiscreteMap map(plan);
  CHECK(map.eval(Eigen::VectorXd::Constant(1, -1.0))[0] == 1.0);
  CHECK(map.eval(Eigen::VectorXd::Constant(1, -1.5))[0] == -1.0);
}

TEST_CASE("solver rejects malformed problems") {
  SemiDiscreteOptions opt;
  Eigen::MatrixXd empty(0, 2);
  CHECK_THROWS_AS(
      semidiscrete_solve(empty, Eigen::VectorXd(), opt, 1, 0),
      std::invalid_argument);

  Eigen::MatrixXd sup = mat({{1.0, 0.0}, {-1.0, 0.0}});
  Eigen::VectorXd bad_sum(2);
  bad_sum << 0.6, 0.6;
  CHECK_THROWS_AS(semidiscrete_solve(sup, bad_sum, opt, 1, 0),
                  std::invalid_argument);

  Eigen::VectorXd nonpos(2);
  nonpos << 1.0, 0.0;
  CHECK_THROWS_AS(semidiscrete_solve(sup, nonpos, opt, 1, 0),
                  std::invalid_argument);

  Eigen::MatrixXd dup = mat({{1.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(
      semidiscrete_solve(dup, Eigen::VectorXd::Constant(2, 0.5), opt, 1, 0),
      std::invalid_argument);
}

TEST_CASE("same seed and stream reproduce the plan bit for bit") {
  Eigen::MatrixXd support = mat({{0.5, 0.5}, {-0.5, 0.2}, {0.0, -0.7}});
  Eigen::VectorXd masses = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  SemiDiscreteOptions opt;
  opt.mc_budget = 30000;
  SemiDiscretePlan a = semidiscrete_solve(support, masses, opt, 101, 7);
  SemiDiscretePlan b = semidiscrete_solve(support, masses, opt, 101, 7);
  CHECK(a.weights == b.weights);
  CHECK(a.mass_residual == b.mass_residual);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("semi-discrete maps are monotone") {
  Eigen::MatrixXd support(8, 2);
  Philox4x32 rng(31, 1);
  for (long i = 0; i < 8; ++i) support.row(i) = rng.normal_vec(2).transpose();
  Eigen::VectorXd masses = Eigen::VectorXd::Constant(8, 0.125);
  SemiDiscreteOptions opt;
  opt.tol = 0.02;
  opt.mc_budget = 60000;
  SemiDiscretePlan plan = semidiscrete_solve(support, masses, opt, 13, 0);
  SemiDiscreteMap map(plan);

  BoundReport rep = monotonicity_check(map, 5000, 99, 0);
  CHECK(rep.pass);

  // direct pair check with zero tolerance: cell geometry makes this exact
  Philox4x32 pairs(55, 2);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Eigen::VectorXd x = 3.0 * pairs.normal_vec(2);
    Eigen::VectorXd y = 3.0 * pairs.normal_vec(2);
    worst = std::min(worst, (map.eval(y) - map.eval(x)).dot(y - x));
  }
  CHECK(worst >= -1e-9);
}

TEST_CASE("kmeans recovers separated blobs and is deterministic") {
  Philox4x32 rng(7, 3);
  const int per = 300;
  Eigen::MatrixXd pts(3 * per, 2);
  const double cx[3] = {0.0, 10.0, -10.0};
  const double cy[3] = {0.0, 10.0, 5.0};
  for (int b = 0; b < 3; ++b)
    for (int i = 0; i < per; ++i)
      pts.row(b * per + i) =
          (Eigen::Vector2d(cx[b], cy[b]) + 0.3 * rng.normal_vec(2)).transpose();

  Eigen::MatrixXd centers = kmeans_quantize(pts, 3, 42, 0);
  REQUIRE(centers.rows() == 3);
  // every blob center is approximated by exactly one quantizer
  for (int b = 0; b < 3; ++b) {
    double best = 1e300;
    for (int j = 0; j < 3; ++j)
      best = std::min(best,
                      (centers.row(j) - Eigen::RowVector2d(cx[b], cy[b])).norm());
    CHECK(best < 0.1);
  }

  CHECK(kmeans_quantize(pts, 3, 42, 0) == centers);
  CHECK_THROWS_AS(kmeans_quantize(pts, 3 * per + 1, 42, 0),
                  std::invalid_argument);
}

TEST_CASE("plan round-trips through csv plus sidecar") {
  Eigen::MatrixXd support = mat({{0.25, -1.5}, {-0.75, 2.0}});
  Eigen::VectorXd masses(2);
  masses << 0.3, 0.7;
  SemiDiscreteOptions opt;
  opt.tol = 0.02;
  opt.mc_budget = 40000;
  SemiDiscretePlan plan = semidiscrete_solve(support, masses, opt, 19, 4);

  const std::string path = "test-plan.csv";
  write_semidiscrete_plan(plan, path);
  SemiDiscretePlan back = read_semidiscrete_plan(path);

  CHECK(back.support == plan.support);
  CHECK(back.masses == plan.masses);
  CHECK(back.weights == plan.weights);
  CHECK(back.mass_residual == plan.mass_residual);
  CHECK(back.budget_used == plan.budget_used);
  CHECK(back.converged == plan.converged);
  CHECK(back.seed == plan.seed);

  std::remove(path.c_str());
  std::remove((path + ".meta.json").c_str());
}
