#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace distloc {

// std::mt19937_64 is fully specified by the standard, so these helpers give
// the same streams on every conforming implementation. The distribution
// adaptors in <random> are not, hence the hand-rolled ones.

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Engine keyed by a tuple of integers. The keys are folded into one 64-bit
/// seed; std::seed_seq would be several times slower per trial.
inline std::mt19937_64 make_engine(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = 0x6a09e667f3bcc908ULL;
  for (std::uint64_t key : keys) state = mix64(state ^ mix64(key));
  return std::mt19937_64(state);
}

/// Uniform double in [0, 1).
inline double unit_uniform(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

inline double uniform_real(std::mt19937_64& engine, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(engine);
}

/// Uniform integer in [0, bound). bound must be positive.
inline std::uint64_t uniform_index(std::mt19937_64& engine,
                                   std::uint64_t bound) {
  // Rejection sampling keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = engine();
  while (draw >= limit) draw = engine();
  return draw % bound;
}

}  // namespace distloc
