#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "age/error.hpp"

namespace age {

/// Deterministic PCG32 (XSH-RR 64/32) generator with selectable streams.
///
/// A generator is fully determined by (seed, stream_id): the stream id picks
/// the LCG increment (2*stream_id + 1), so distinct ids give independent
/// sequences for the same seed. Identical (seed, stream_id) and call sequence
/// reproduce identical outputs on every platform. The derived draws
/// (next_double, next_below, shuffles, Beta sampling) are defined purely in
/// terms of next_u32 so other language implementations can match them
/// bit-exactly; docs/rng.md spells out each recipe.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), inc_((stream_id << 1u) | 1u) {
    state_ = 0u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  /// Child generator for purpose `k`; ids are partitioned as
  /// stream_id * kStreamFanout + k, valid for one level of derivation
  /// with k < kStreamFanout.
  static constexpr std::uint64_t kStreamFanout = 8;
  SeededRng substream(std::uint64_t k) const {
    return SeededRng(seed_, stream_id_ * kStreamFanout + k);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    std::uint64_t lo = next_u32();
    return (hi << 32u) | lo;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11u) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound); unbiased via rejection.
  std::uint32_t next_below(std::uint32_t bound) {
    if (bound == 0) throw UsageError("next_below: bound must be positive");
    std::uint32_t min = (-bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= min) return r % bound;
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t state_ = 0;
  std::uint64_t inc_;
};

/// Beta(1, n) draw by inverse transform: 1 - U^(1/n) with U uniform on (0,1).
/// Mean is 1/(1+n).
double sample_beta_1_n(SeededRng& rng, double n);

/// First k elements of a uniform draw without replacement from `pool`,
/// returned in ascending order. Partial Fisher-Yates over a copy of the pool.
std::vector<int> sample_without_replacement(std::span<const int> pool, int k,
                                            SeededRng& rng);

}  // namespace age
