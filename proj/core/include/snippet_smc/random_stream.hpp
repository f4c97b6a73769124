#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>

namespace snippet_smc {

// Counter-based stream built on Philox4x32-10. Each stream is identified by
// a 64-bit key derived from (seed, substream path); draws advance a 128-bit
// counter. Substreams are cheap, reproducible from (seed, index) and never
// share state, so results do not depend on thread scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : key_(mix64(seed)) {}

  /// Child stream i; independent of the parent and of any sibling j != i.
  RandomStream substream(std::uint64_t i) const {
    RandomStream child(*this);
    child.key_ = mix64(key_ ^ mix64(i + 0x9E3779B97F4A7C15ull));
    child.ctr_hi_ = 0;
    child.ctr_lo_ = 0;
    child.block_pos_ = 4;
    child.have_cached_normal_ = false;
    return child;
  }

  /// Uniform draw in the open interval (0, 1).
  double uniform() {
    const std::uint64_t bits = next_u64();
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the second draw of each pair is cached.
  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(a);
    have_cached_normal_ = true;
    return r * std::cos(a);
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    // Rejection sampling on the top multiple of n; at most a couple of spins.
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Categorical draw over normalized probabilities (inverse CDF).
  std::size_t categorical(std::span<const double> p) {
    const double u = uniform();
    double c = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      c += p[i];
      if (u <= c) return i;
    }
    return p.size() - 1;
  }

  std::uint64_t next_u64() {
    const std::uint32_t lo = next_u32();
    const std::uint32_t hi = next_u32();
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
  }

 private:
  std::uint32_t next_u32() {
    if (block_pos_ >= 4) {
      block_ = philox4x32(ctr_hi_, ctr_lo_, key_);
      if (++ctr_lo_ == 0) ++ctr_hi_;
      block_pos_ = 0;
    }
    return block_[block_pos_++];
  }

  // SplitMix64 finalizer; used to derive child keys.
  static std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  static std::array<std::uint32_t, 4> philox4x32(std::uint64_t ctr_hi,
                                                 std::uint64_t ctr_lo,
                                                 std::uint64_t key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::uint32_t c0 = static_cast<std::uint32_t>(ctr_lo);
    std::uint32_t c1 = static_cast<std::uint32_t>(ctr_lo >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(ctr_hi);
    std::uint32_t c3 = static_cast<std::uint32_t>(ctr_hi >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      const std::uint32_t n0 = hi1 ^ c1 ^ k0;
      const std::uint32_t n1 = lo1;
      const std::uint32_t n2 = hi0 ^ c3 ^ k1;
      const std::uint32_t n3 = lo0;
      c0 = n0;
      c1 = n1;
      c2 = n2;
      c3 = n3;
      k0 += kW0;
      k1 += kW1;
    }
    return {c0, c1, c2, c3};
  }

  std::uint64_t key_;
  std::uint64_t ctr_hi_ = 0;
  std::uint64_t ctr_lo_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 4;
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;
};

}  // namespace snippet_smc
