#pragma once

#include <cstdint>
#include <limits>

namespace otoc {

/// Counter-based generator: the n-th output of stream `s` under key `seed`
/// is a pure function of (seed, s, n), so shards of a Monte Carlo run can be
/// regenerated independently of how work is split between threads.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Independent generator for a sub-stream, e.g. one per disorder
  /// realization or per initial condition.
  CounterRng split(std::uint64_t stream) const;

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace otoc
