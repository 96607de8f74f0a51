#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beamspin/bloch.hpp"

namespace beamspin {

enum class EnsembleMethod { gauss_hermite, monte_carlo };

/// How the quasi-static detuning distribution is sampled.
/// gauss-hermite is deterministic and spectrally accurate (default);
/// monte-carlo is retained for validation.
struct EnsembleConfig {
  EnsembleMethod method = EnsembleMethod::gauss_hermite;
  int n_nodes = 64;        // >= 1; gauss-hermite capped at 512
  std::uint64_t seed = 0;  // monte-carlo only
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for weight exp(-x^2): sum_i w_i f(x_i) ~ integral.
/// n in [1, 512].
QuadratureRule gauss_hermite_rule(int n);

/// Pointwise average of evolve() over detunings
///   delta ~ Normal(drive.delta, sigma = sqrt(2)*gamma2_star).
/// Deterministic given (method, n_nodes, seed); the reduction is performed
/// in fixed node order so results are independent of worker count.
Trajectory ensemble_average(const SpinParams& spin, const DriveParams& drive,
                            const BlochState& initial, std::span<const double> times,
                            const EnsembleConfig& cfg, int workers = 1);

} // namespace beamspin
