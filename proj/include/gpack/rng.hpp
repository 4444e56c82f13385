#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gpack/errors.hpp"

namespace gpack {

// Named substreams. Every stochastic decision kind draws from its own
// counter, keyed additionally by job-type index, so replays stay aligned:
// adding or removing draws of one kind never shifts another kind's sequence.
enum class Sub : std::uint32_t {
  Arrivals = 0,
  Departures,
  Placement,
  Acceptance,
  Clocks,
  Fill,
  Ties,
  Jump,
};
inline constexpr std::size_t kSubCount = 8;

// Counter-based generator (SplitMix64 finalizer over a keyed counter).
// Value semantics: copying the stream snapshots all counters, which tests
// use to peek upcoming draws.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_bits(Sub sub, std::size_t idx = 0) {
    auto& lane = counters_[static_cast<std::size_t>(sub)];
    if (idx >= lane.size()) lane.resize(idx + 1, 0);
    std::uint64_t key = mix(mix(seed_ + kGolden) ^
                            (0x6a09e667f3bcc909ULL * (static_cast<std::uint64_t>(sub) + 1)) ^
                            (0xbb67ae8584caa73bULL * (static_cast<std::uint64_t>(idx) + 1)));
    return mix(key + (++lane[idx]) * kGolden);
  }

  // Uniform on [0, 1), 53-bit resolution.
  double u01(Sub sub, std::size_t idx = 0) {
    return static_cast<double>(next_bits(sub, idx) >> 11) * 0x1.0p-53;
  }

  // Uniform on {0, ..., n-1} without modulo bias (Lemire rejection).
  std::uint64_t uniform_int(Sub sub, std::size_t idx, std::uint64_t n) {
    if (n == 0) throw DomainError("uniform_int: empty range");
    std::uint64_t x = next_bits(sub, idx);
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        x = next_bits(sub, idx);
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Exponential with the given rate (mean 1/rate).
  double exponential(Sub sub, std::size_t idx, double rate) {
    if (!(rate > 0)) throw DomainError("exponential: rate must be > 0");
    return -std::log1p(-u01(sub, idx)) / rate;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::array<std::vector<std::uint64_t>, kSubCount> counters_;
};

}  // namespace gpack
