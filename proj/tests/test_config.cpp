#include <doctest.h>

#include <string>

#include "otlab/config.hpp"

using namespace otlab;

namespace {

// field and line of the ConfigError raised by parsing text
std::pair<std::string, int> parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return {e.field(), e.line()};
  }
  FAIL("expected a ConfigError");
  return {};
}

}  // namespace

TEST_CASE("config parses keys, sections, comments and blank lines") {
  const std::string text =
      "# demo config\n"
      "target = power\n"
      "dim = 2\n"
      "target.p = 1.5\n"
      "\n"
      "method = exact-radial\n"
      "method.n_nodes = 256\n"
      "seed = 99\n"
      "out_dir = results/demo\n"
      "budget_scale = 0.5\n"
      "\n"
      "[check displacement]\n"
      "n_directions = 8\n"
      "\n"
      "[check monotonicity]\n"
      "# inherit the default budget\n";
  ExperimentConfig c = parse_config(text);
  CHECK(c.target_family == "power");
  CHECK(c.dim == 2);
  CHECK(c.target_params.at("p") == 1.5);
  CHECK(c.method == "exact-radial");
  CHECK(c.method_params.at("n_nodes") == 256);
  CHECK(c.seed == 99);
  CHECK(c.out_dir == "results/demo");
  CHECK(c.budget_scale == 0.5);
  REQUIRE(c.checks.size() == 2);
  CHECK(c.checks[0].name == "displacement");
  CHECK(c.checks[0].params.at("n_directions") == "8");
  CHECK(c.checks[1].name == "monotonicity");
  CHECK(c.checks[1].params.empty());
}

TEST_CASE("config round-trips through serialization losslessly") {
  ExperimentConfig c;
  c.target_family = "power";
  c.dim = 3;
  c.target_params = {{"p", 1.5}, {"amplitude", 0.1}};
  c.method = "entropic";
  c.method_params = {{"epsilon", 0.05}, {"n", 2048}};
  c.seed = 123456789012345ull;
  c.out_dir = "out/x";
  c.budget_scale = 0.25;
  c.checks = {{"monotonicity", {{"n_pairs", "777"}}},
              {"concentration", {{"kind", "mixed"}, {"n", "1000"}}}};
  CHECK(parse_config(serialize_config(c)) == c);

  // defaults survive the trip too
  ExperimentConfig def;
  CHECK(parse_config(serialize_config(def)) == def);
}

TEST_CASE("config errors name the offending field and line") {
  // syntax
  CHECK(parse_error("target = gaussian\nbogus_key = 1\n") ==
        std::pair<std::string, int>{"bogus_key", 2});
  CHECK(parse_error("dim 2\n").second == 1);
  CHECK(parse_error("dim = two\n") == std::pair<std::string, int>{"dim", 1});
  CHECK(parse_error("seed = -4\n") == std::pair<std::string, int>{"seed", 1});
  CHECK(parse_error("[check]\n").second == 1);
  CHECK(parse_error("[run foo]\n").second == 1);
  CHECK(parse_error("dim = 1\ndim = 2\n") ==
        std::pair<std::string, int>{"dim", 2});

  // semantics, still carrying the line of the key
  CHECK(parse_error("target = cauchy\n") ==
        std::pair<std::string, int>{"target", 1});
  CHECK(parse_error("target = gaussian\ntarget.p = 2\n") ==
        std::pair<std::string, int>{"target.p", 2});
  CHECK(parse_error("target = gaussian\ntarget.sigma = -1\n") ==
        std::pair<std::string, int>{"target.sigma", 2});
  CHECK(parse_error("target = power\n") ==
        std::pair<std::string, int>{"target.p", 1});
  CHECK(parse_error("target = power\ntarget.p = 3\n") ==
        std::pair<std::string, int>{"target.p", 2});
  CHECK(parse_error("method = sinkhorn\n") ==
        std::pair<std::string, int>{"method", 1});
  CHECK(parse_error("budget_scale = 0\n") ==
        std::pair<std::string, int>{"budget_scale", 1});
  CHECK(parse_error("[check warp]\n") ==
        std::pair<std::string, int>{"check warp", 1});
  CHECK(parse_error("[check eigenvar]\nn = 100\nn = 200\n") ==
        std::pair<std::string, int>{"check eigenvar.n", 3});
  CHECK(parse_error("[check eigenvar]\nburn = 1\n") ==
        std::pair<std::string, int>{"check eigenvar.burn", 2});
  CHECK(parse_error("[check eigenvar]\nn = ten\n") ==
        std::pair<std::string, int>{"check eigenvar.n", 2});
  CHECK(parse_error("[check monotonicity]\n\n[check monotonicity]\n") ==
        std::pair<std::string, int>{"check monotonicity", 3});
}

TEST_CASE("config validation enforces method and target compatibility") {
  // exact-1d needs a 1d target
  auto [f1, l1] = parse_error("target = gaussian\ndim = 2\nmethod = exact-1d\n");
  CHECK(f1 == "method");
  CHECK(l1 == 3);

  // the laplace product is only radial in 1d
  auto [f2, l2] = parse_error("target = laplace\ndim = 3\nmethod = exact-radial\n");
  CHECK(f2 == "method");

  // jacobian checks cannot run on a piecewise constant map
  auto [f3, l3] =
      parse_error("target = gaussian\ndim = 2\nmethod = semi-discrete\n"
                  "[check eigenvar]\n");
  CHECK(f3 == "check eigenvar");
  CHECK(l3 == 4);

  // direction and kind values are validated up front
  CHECK(parse_error("dim = 1\n[check lp-norm]\ndirection = sideways\n").first ==
        "check lp-norm.direction");
  CHECK(parse_error("dim = 1\n[check lp-norm]\ndirection = tangential\n").first ==
        "check lp-norm.direction");
  CHECK(parse_error("[check concentration]\nkind = cubic\n").first ==
        "check concentration.kind");
  CHECK(parse_error("[check displacement-explicit]\nkind = mixed\n").first ==
        "check displacement-explicit.kind");

  // the same rules apply to configs built in code (line 0)
  ExperimentConfig c;
  c.dim = 2;
  c.method = "exact-1d";
  try {
    validate_config(c);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "method");
    CHECK(e.line() == 0);
  }
}

TEST_CASE("valid configs for every method pass validation") {
  for (const char* text : {
           "target = gaussian\ndim = 1\nmethod = exact-1d\n",
           "target = power\ntarget.p = 1.5\ndim = 4\nmethod = exact-radial\n",
           "target = laplace\ndim = 1\nmethod = exact-radial\n",
           "target = laplace\ndim = 3\nmethod = semi-discrete\n"
           "[check monotonicity]\n[check pushforward]\n",
           "target = gaussian\ntarget.sigma = 2\ndim = 2\nmethod = entropic\n"
           "method.epsilon = 0.05\n[check eigenvar]\n",
       })
    CHECK_NOTHROW(parse_config(text));
}
