#include "beamspin/ensemble.hpp"

#include <cmath>
#include <stdexcept>

#include "beamspin/constants.hpp"
#include "beamspin/parallel.hpp"
#include "beamspin/random.hpp"

namespace beamspin {

QuadratureRule gauss_hermite_rule(int n) {
  if (n < 1 || n > 512)
    throw std::invalid_argument("gauss_hermite_rule: n must be in [1, 512]");
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  if (n == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = constants::sqrt_pi;
    return rule;
  }

  // Newton iteration on the orthonormal Hermite recurrence, largest root first.
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    else if (i == 1)
      z -= 1.14 * std::pow(n, 0.426) / z;
    else if (i == 2)
      z = 1.86 * z - 0.86 * rule.nodes[n - 1];
    else if (i == 3)
      z = 1.91 * z - 0.91 * rule.nodes[n - 2];
    else
      z = 2.0 * z - rule.nodes[n - i + 1];

    double pp = 0.0;
    for (int it = 0; it < 200; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(j / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double dz = p1 / pp;
      z -= dz;
      if (std::fabs(dz) <= 1e-15 * std::max(1.0, std::fabs(z))) break;
    }
    rule.nodes[n - 1 - i] = z;
    rule.nodes[i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Trajectory ensemble_average(const SpinParams& spin, const DriveParams& drive,
                            const BlochState& initial, std::span<const double> times,
                            const EnsembleConfig& cfg, int workers) {
  if (cfg.n_nodes < 1) throw std::invalid_argument("ensemble_average: n_nodes must be >= 1");

  std::vector<double> deltas, weights;
  const double sigma = constants::sqrt2 * spin.gamma2_star;
  if (sigma == 0.0) return evolve(spin, drive, initial, times);

  if (cfg.method == EnsembleMethod::gauss_hermite) {
    const QuadratureRule rule = gauss_hermite_rule(cfg.n_nodes);
    double wsum = 0.0;
    for (const double w : rule.weights) wsum += w;
    deltas.reserve(rule.nodes.size());
    weights.reserve(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      deltas.push_back(drive.delta + constants::sqrt2 * sigma * rule.nodes[i]);
      weights.push_back(rule.weights[i] / wsum);
    }
  } else {
    Rng rng(cfg.seed);
    deltas.reserve(cfg.n_nodes);
    weights.assign(cfg.n_nodes, 1.0 / cfg.n_nodes);
    for (int i = 0; i < cfg.n_nodes; ++i) deltas.push_back(drive.delta + sigma * rng.normal());
  }

  const int n = static_cast<int>(deltas.size());
  std::vector<Trajectory> slots(n);
  parallel_for(n, workers, [&](int i) {
    DriveParams d = drive;
    d.delta = deltas[i];
    slots[i] = evolve(spin, d, initial, times);
  });

  // fixed-order reduction: independent of the worker schedule
  Trajectory out;
  out.times.assign(times.begin(), times.end());
  out.states.assign(times.size(), BlochState{});
  for (int i = 0; i < n; ++i) {
    const double w = weights[i];
    for (std::size_t k = 0; k < out.states.size(); ++k) {
      out.states[k].x += w * slots[i].states[k].x;
      out.states[k].y += w * slots[i].states[k].y;
      out.states[k].z += w * slots[i].states[k].z;
    }
  }
  return out;
}

} // namespace beamspin
