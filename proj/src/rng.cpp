#include "aqst/rng.hpp"

#include <cmath>
#include <numbers>

#include "aqst/error.hpp"

namespace aqst {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_rank: return "invalid-rank";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::shape: return "shape";
    case ErrorCode::invalid_pattern_parameters: return "invalid-pattern-parameters";
    case ErrorCode::insufficient_block_size: return "insufficient-block-size";
    case ErrorCode::invalid_basis: return "invalid-basis";
    case ErrorCode::bound_inapplicable: return "bound-inapplicable";
    case ErrorCode::non_converged: return "non-converged";
    case ErrorCode::underdetermined_column: return "under-determined-column";
    case ErrorCode::ill_conditioned_column: return "ill-conditioned-column";
    case ErrorCode::degenerate_eigvalue_system: return "degenerate-eigvalue-system";
    case ErrorCode::step_size: return "step-size";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
  }
  return "unknown";
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
  return mix64(mix64(seed) ^ (value + 0x632BE59BD9B4E019ULL));
}

}  // namespace aqst
