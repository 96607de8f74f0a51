#include "beamspin/sequences.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "beamspin/constants.hpp"
#include "beamspin/parallel.hpp"
#include "beamspin/random.hpp"

namespace beamspin {

namespace {

void require_increasing(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

// Detuning nodes and weights of the quasi-static ensemble, centered on zero.
void detuning_nodes(const SpinParams& spin, const EnsembleConfig& cfg,
                    std::vector<double>& deltas, std::vector<double>& weights) {
  deltas.clear();
  weights.clear();
  if (spin.gamma2_star == 0.0) {
    deltas.push_back(0.0);
    weights.push_back(1.0);
    return;
  }
  if (cfg.method == EnsembleMethod::gauss_hermite) {
    const QuadratureRule rule = gauss_hermite_rule(cfg.n_nodes);
    double wsum = 0.0;
    for (const double w : rule.weights) wsum += w;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      deltas.push_back(2.0 * spin.gamma2_star * rule.nodes[k]);
      weights.push_back(rule.weights[k] / wsum);
    }
  } else {
    Rng rng(cfg.seed);
    weights.assign(cfg.n_nodes, 1.0 / cfg.n_nodes);
    for (int k = 0; k < cfg.n_nodes; ++k)
      deltas.push_back(constants::sqrt2 * spin.gamma2_star * rng.normal());
  }
}

} // namespace

Trajectory simulate_rabi(const SpinParams& spin, const DriveParams& drive,
                         std::span<const double> times, const EnsembleConfig& cfg,
                         int workers) {
  if (!(drive.omega_rabi > 0.0))
    throw std::invalid_argument("simulate_rabi: drive amplitude must be > 0");
  require_increasing(times, "simulate_rabi");
  return ensemble_average(spin, drive, BlochState{0.0, 0.0, 1.0}, times, cfg, workers);
}

std::vector<CountsRecord> simulate_relaxometry(const SpinParams& spin,
                                               const DriveParams& beam_drive,
                                               std::span<const double> taus,
                                               const EnsembleConfig& cfg,
                                               std::optional<ReadoutMap> readout,
                                               int workers) {
  require_increasing(taus, "simulate_relaxometry");
  // The generator is time independent, so one pass over the tau grid yields
  // z(tau) for every wait time.
  const Trajectory traj =
      ensemble_average(spin, beam_drive, BlochState{0.0, 0.0, 1.0}, taus, cfg, workers);
  std::vector<CountsRecord> records(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double z = traj.states[i].z;
    records[i].setting = taus[i];
    records[i].mean_signal = readout ? (*readout)(z) : z;
  }
  return records;
}

std::vector<CountsRecord> simulate_odmr(const SpinParams& spin, double mw_rabi,
                                        double pulse_length,
                                        std::span<const double> frequencies,
                                        const EnsembleConfig& cfg,
                                        std::span<const double> zeeman_split, int workers) {
  if (!(pulse_length > 0.0))
    throw std::invalid_argument("simulate_odmr: pulse length must be > 0");
  if (!(mw_rabi >= 0.0)) throw std::invalid_argument("simulate_odmr: negative drive");
  require_increasing(frequencies, "simulate_odmr");

  std::vector<double> offsets(zeeman_split.begin(), zeeman_split.end());
  if (offsets.empty()) offsets.push_back(0.0);

  const std::array<double, 1> t{pulse_length};
  std::vector<CountsRecord> records(frequencies.size());
  parallel_for(static_cast<int>(frequencies.size()), workers, [&](int i) {
    double z_sum = 0.0;
    for (const double off : offsets) {
      DriveParams d;
      d.omega_rabi = mw_rabi;
      d.delta = frequencies[i] - (spin.omega0 + off);
      const Trajectory traj = ensemble_average(spin, d, BlochState{0.0, 0.0, 1.0}, t, cfg, 1);
      z_sum += traj.states[0].z;
    }
    records[i].setting = frequencies[i];
    records[i].mean_signal = z_sum / static_cast<double>(offsets.size());
  });
  return records;
}

std::vector<CountsRecord> simulate_hahn_echo(const SpinParams& spin,
                                             std::span<const double> taus,
                                             const EnsembleConfig& cfg, int workers) {
  require_increasing(taus, "simulate_hahn_echo");
  if (!(taus[0] > 0.0))
    throw std::invalid_argument("simulate_hahn_echo: wait times must be > 0");

  std::vector<double> deltas, weights;
  detuning_nodes(spin, cfg, deltas, weights);

  // Per node: free evolution tau, ideal pi pulse about x ((x,y,z)->(x,-y,-z)),
  // free evolution tau; each detuning realization refocuses individually.
  std::vector<CountsRecord> records(taus.size());
  parallel_for(static_cast<int>(taus.size()), workers, [&](int i) {
    const std::array<double, 1> t{taus[i]};
    double echo = 0.0;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
      DriveParams d;
      d.delta = deltas[k];
      BlochState s = evolve(spin, d, BlochState{1.0, 0.0, 0.0}, t).states[0];
      s.y = -s.y;
      s.z = -s.z;
      echo += weights[k] * evolve(spin, d, s, t).states[0].x;
    }
    records[i].setting = 2.0 * taus[i];
    records[i].mean_signal = echo;
  });
  return records;
}

std::vector<CountsRecord> apply_shot_noise(std::span<const CountsRecord> records,
                                           std::int64_t shots, std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("apply_shot_noise: shots must be >= 1");
  Rng rng(seed);
  std::vector<CountsRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    const double mean = std::max(r.mean_signal, 0.0) * static_cast<double>(shots);
    r.counts = rng.poisson(mean);
    r.shots = shots;
  }
  return out;
}

std::vector<CountsRecord> run_sequence(const SpinParams& spin, const SequenceSpec& spec,
                                       const EnsembleConfig& cfg,
                                       std::optional<ReadoutMap> readout, int workers) {
  switch (spec.kind) {
    case SequenceKind::rabi: {
      DriveParams d;
      d.omega_rabi = spec.beam_rabi > 0.0 ? spec.beam_rabi : spec.mw_rabi;
      d.delta = spec.beam_rabi > 0.0 ? spec.beam_detuning : 0.0;
      const Trajectory traj = simulate_rabi(spin, d, spec.grid, cfg, workers);
      std::vector<CountsRecord> records(traj.times.size());
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        records[i].setting = traj.times[i];
        const double z = traj.states[i].z;
        records[i].mean_signal = readout ? (*readout)(z) : z;
      }
      return records;
    }
    case SequenceKind::relaxometry: {
      DriveParams d;
      d.omega_rabi = spec.beam_rabi;
      d.delta = spec.beam_detuning;
      return simulate_relaxometry(spin, d, spec.grid, cfg, readout, workers);
    }
    case SequenceKind::odmr:
      return simulate_odmr(spin, spec.mw_rabi, spec.odmr_pulse_length, spec.grid, cfg,
                           spec.zeeman_split, workers);
    case SequenceKind::hahn_echo:
      return simulate_hahn_echo(spin, spec.grid, cfg, workers);
  }
  throw std::logic_error("run_sequence: unknown sequence kind");
}

} // namespace beamspin
