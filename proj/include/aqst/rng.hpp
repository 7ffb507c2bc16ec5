#pragma once

#include <cstdint>
#include <random>

namespace aqst {

/// Seeded 64-bit Mersenne Twister with platform-independent derived
/// distributions. The standard library's distribution objects are
/// implementation-defined, so normal and bounded-integer draws are done here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal via Box-Muller; the spare variate is cached.
  double normal();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t mix64(std::uint64_t x);

/// Order-sensitive combination of two 64-bit values.
std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value);

}  // namespace aqst
