#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "bets/error.hpp"

namespace bets {

namespace detail {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace detail

/// Deterministic random stream. The engine is std::mt19937_64 (bit-exact by
/// the standard); the variate mappings below are spelled out rather than
/// delegating to std::*_distribution, whose algorithms are
/// implementation-defined, so draws are reproducible across toolchains.
class RngStream {
public:
  RngStream() : engine_(0) {}
  explicit RngStream(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n) {
    if (n == 0) throw Error("uniform_index: n must be positive");
    // Rejection sampling over the top multiple of n keeps the draw unbiased.
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  /// Exponential variate with the given rate (mean 1/rate).
  double exponential(double rate) {
    if (!(rate > 0.0)) throw Error("exponential: rate must be positive");
    // uniform01() < 1, so the log argument stays positive.
    return -std::log(1.0 - uniform01()) / rate;
  }

  bool bernoulli(double p) { return uniform01() < p; }

private:
  std::mt19937_64 engine_;
};

/// Named substreams derived from one scenario seed. Each substream seed mixes
/// the base seed with a hash of the stream name, so streams are independent
/// and adding a stream never shifts the others.
struct StreamSet {
  RngStream mobility;
  RngStream mining;
  RngStream trading;
  RngStream measurement_noise;
};

inline uint64_t derive_stream_seed(uint64_t base_seed, std::string_view name) {
  return detail::splitmix64(detail::splitmix64(base_seed) ^ detail::fnv1a64(name));
}

inline StreamSet derive_streams_from_seed(uint64_t base_seed) {
  return StreamSet{
      RngStream(derive_stream_seed(base_seed, "mobility")),
      RngStream(derive_stream_seed(base_seed, "mining")),
      RngStream(derive_stream_seed(base_seed, "trading")),
      RngStream(derive_stream_seed(base_seed, "measurement-noise")),
  };
}

} // namespace bets
