#pragma once

#include <cstdint>
#include <random>

namespace beamspin {

/// Deterministic sampler built on mt19937_64 with hand-rolled transforms,
/// so streams are reproducible independent of the standard library's
/// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// uniform in [0, 1)
  double uniform();

  /// standard normal (Box-Muller, pairs cached)
  double normal();

  /// Poisson with the given mean (inversion for small means, PTRS otherwise)
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

} // namespace beamspin
