#pragma once

// Counter-based RNG (Philox4x32-10) plus the uniform/normal transforms used
// everywhere in the lab.  Counter-based so that independent streams are cheap:
// a stream is just a different 64-bit lane of the counter, and draws are
// reproducible bit-for-bit for a given (seed, stream) on any platform.

#include <array>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace otlab {

// 64-bit FNV-1a.  Stable across platforms; used to derive per-check streams
// from check names so adding a check never perturbs another check's draws.
std::uint64_t fnv1a64(std::string_view s);

class Philox4x32 {
 public:
  explicit Philox4x32(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // 53-bit uniform in [0, 1).
  double uniform01();
  // Uniform in (0, 1]; safe to pass to log().
  double uniform_pos();

  // Standard normal via Box-Muller (second value cached).
  double normal();
  Eigen::VectorXd normal_vec(int d);

  // Jump to an absolute block position; used to replay prefixes of a pool.
  void set_block(std::uint64_t block);

 private:
  void refill();

  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> out_;
  int idx_ = 4;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Stream id for a named consumer under a master seed.
inline std::uint64_t derive_stream(std::string_view name) { return fnv1a64(name); }

}  // namespace otlab
