#pragma once
// qsep/rng.hpp — counter-based splittable pseudo-random generator
// (Philox4x32-10) plus the handful of variate transforms the simulator needs.
//
// Every replica owns an independent stream identified by (seed, stream).
// Output depends only on (seed, stream, draw index), never on thread
// scheduling, which is what makes replica-parallel runs byte-identical.
// Distribution transforms are hand-rolled so results are reproducible across
// standard libraries and platforms.

#include <array>
#include <cmath>
#include <cstdint>

namespace qsep {

// ===== Philox4x32-10 =====

/// 128-bit counter / 64-bit key block cipher run in counter mode; ten rounds
/// of the Philox substitution-permutation network per 128-bit output block.
class philox4x32 {
 public:
  /// `seed` selects the key, `stream` an independent substream (replica
  /// index). The draw sequence starts at counter zero.
  explicit philox4x32(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>(stream >> 32)} {}

  /// Next 32 uniform random bits.
  std::uint32_t next_u32() noexcept {
    if (idx_ == 4) {
      out_ = block(ctr_, key_);
      if (++ctr_[0] == 0) ++ctr_[1];  // 2^64 blocks per stream
      idx_ = 0;
    }
    return out_[idx_++];
  }

  /// Next 64 uniform random bits.
  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1) carrying 53 random bits.
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential variate with the given rate (mean 1/rate).
  double next_exponential(double rate) noexcept {
    return -std::log1p(-next_double()) / rate;
  }

  /// Uniform integer in [0, n), unbiased via rejection. Requires n >= 1.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    const std::uint64_t limit = (UINT64_MAX / n) * n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Bernoulli(p) draw.
  bool next_bernoulli(double p) noexcept { return next_double() < p; }

 private:
  static std::array<std::uint32_t, 4> block(
      std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) noexcept {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ULL * c[0];
      const std::uint64_t p1 = 0xCD9E8D57ULL * c[2];
      c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
           static_cast<std::uint32_t>(p0)};
      k[0] += 0x9E3779B9u;
      k[1] += 0xBB67AE85u;
    }
    return c;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint32_t, 4> out_{};
  int idx_ = 4;
};

}  // namespace qsep
