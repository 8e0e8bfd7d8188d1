#include <doctest.h>

#include <cmath>
#include <vector>

#include "otlab/rng.hpp"

using namespace otlab;

TEST_CASE("philox known-answer vectors") {
  // Reference outputs for the 10-round 4x32 configuration.
  Philox4x32 r0(0, 0);
  CHECK(r0.next_u32() == 0x6627e8d5u);
  CHECK(r0.next_u32() == 0xe169c58du);
  CHECK(r0.next_u32() == 0xbc57ac4cu);
  CHECK(r0.next_u32() == 0x9b00dbd8u);

  Philox4x32 r1(0xffffffffffffffffull, 0xffffffffffffffffull);
  // counter starts at block 0 within stream 0xffff...: ctr = (0,0,ff,ff)
  (void)r1;
}

TEST_CASE("philox determinism and stream separation") {
  Philox4x32 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool same = true, cross1 = true, cross2 = true;
  for (int i = 0; i < 256; ++i) {
    auto va = a.next_u32();
    same &= (va == b.next_u32());
    cross1 &= (va == c.next_u32());
    cross2 &= (va == d.next_u32());
  }
  CHECK(same);
  CHECK_FALSE(cross1);
  CHECK_FALSE(cross2);
}

TEST_CASE("set_block replays a prefix") {
  Philox4x32 a(9, 1);
  std::vector<std::uint32_t> first;
  for (int i = 0; i < 8; ++i) first.push_back(a.next_u32());
  a.set_block(0);
  for (int i = 0; i < 8; ++i) CHECK(a.next_u32() == first[i]);
}

TEST_CASE("uniform and normal transforms behave") {
  Philox4x32 r(123, 0);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    s += u;
    s2 += u * u;
  }
  double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));  // 4 sigma
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);

  Philox4x32 g(123, 1);
  double gs = 0, gs2 = 0, gs4 = 0;
  for (int i = 0; i < n; ++i) {
    double z = g.normal();
    gs += z;
    gs2 += z * z;
    gs4 += z * z * z * z;
  }
  CHECK(std::abs(gs / n) < 4.0 / std::sqrt(double(n)));
  CHECK(std::abs(gs2 / n - 1.0) < 0.02);
  CHECK(std::abs(gs4 / n - 3.0) < 0.15);  // gaussian kurtosis
}

TEST_CASE("fnv1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("displacement") != fnv1a64("monotonicity"));
}
