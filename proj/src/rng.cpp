#include "otlab/rng.hpp"

#include <cmath>

namespace otlab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream) {
  key_ = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  ctr_ = {0u, 0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

void Philox4x32::set_block(std::uint64_t block) {
  ctr_[0] = static_cast<std::uint32_t>(block);
  ctr_[1] = static_cast<std::uint32_t>(block >> 32);
  idx_ = 4;
  has_cached_ = false;
}

void Philox4x32::refill() {
  std::array<std::uint32_t, 4> x = ctr_;
  std::uint32_t k0 = key_[0], k1 = key_[1];
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      k0 += kW0;
      k1 += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, x[0], hi0, lo0);
    mulhilo(kM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
  }
  out_ = x;
  idx_ = 0;
  if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; stream lanes untouched
}

std::uint32_t Philox4x32::next_u32() {
  if (idx_ >= 4) refill();
  return out_[idx_++];
}

std::uint64_t Philox4x32::next_u64() {
  std::uint64_t lo = next_u32();
  std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double Philox4x32::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Philox4x32::uniform_pos() { return 1.0 - uniform01(); }

double Philox4x32::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  double u1 = uniform_pos();
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  double t = 2.0 * M_PI * u2;
  cached_ = r * std::sin(t);
  has_cached_ = true;
  return r * std::cos(t);
}

Eigen::VectorXd Philox4x32::normal_vec(int d) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = normal();
  return v;
}

}  // namespace otlab
