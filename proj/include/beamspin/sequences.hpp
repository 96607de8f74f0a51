#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beamspin/ensemble.hpp"

namespace beamspin {

/// One synthetic data point: a sequence setting (wait time, total evolution
/// time, or drive frequency) with the noiseless mean signal and, once shot
/// noise has been applied, integer counts.  shots == 0 marks a noiseless record.
struct CountsRecord {
  double setting = 0.0;
  double mean_signal = 0.0;
  std::int64_t counts = 0;
  std::int64_t shots = 0;
};

/// Affine map from <sz> to mean photon counts per shot.
struct ReadoutMap {
  double baseline = 1.0;  // photons per shot, >= 0
  double contrast = 0.3;  // dimensionless, in [0,1]
  double operator()(double z) const {
    return baseline * (1.0 + contrast * (z + 1.0) / 2.0);
  }
};

enum class SequenceKind { rabi, relaxometry, odmr, hahn_echo };

/// Declarative description of one experiment, used by the CLI front end.
/// `grid` holds drive durations (rabi), wait times (relaxometry), total
/// evolution times are reported as 2*tau (hahn-echo, grid holds tau), or
/// absolute drive frequencies in rad/s (odmr).
struct SequenceSpec {
  SequenceKind kind = SequenceKind::relaxometry;
  double mw_rabi = 0.0;          // MW drive amplitude [rad/s] (rabi/odmr)
  double beam_rabi = 0.0;        // beam drive amplitude [rad/s]
  double beam_detuning = 0.0;    // beam modulation detuning [rad/s]
  std::vector<double> grid;      // strictly increasing
  double odmr_pulse_length = 0.0;          // [s]
  std::vector<double> zeeman_split;        // transition offsets [rad/s]
};

/// Ensemble-averaged <sz>(t) from z = 1 under constant drive.
Trajectory simulate_rabi(const SpinParams& spin, const DriveParams& drive,
                         std::span<const double> times, const EnsembleConfig& cfg,
                         int workers = 1);

/// Relaxometry: for each wait time tau, z(0) = 1 evolves under the beam
/// drive alone; records z(tau), optionally mapped to mean counts.
std::vector<CountsRecord> simulate_relaxometry(const SpinParams& spin,
                                               const DriveParams& beam_drive,
                                               std::span<const double> taus,
                                               const EnsembleConfig& cfg,
                                               std::optional<ReadoutMap> readout = {},
                                               int workers = 1);

/// Pulsed ODMR: constant MW drive of the given amplitude applied for
/// pulse_length at each frequency of `frequencies` (absolute, rad/s);
/// records the final z averaged over the detuning ensemble.  A non-empty
/// zeeman_split averages the spectra of the shifted transitions.
std::vector<CountsRecord> simulate_odmr(const SpinParams& spin, double mw_rabi,
                                        double pulse_length,
                                        std::span<const double> frequencies,
                                        const EnsembleConfig& cfg,
                                        std::span<const double> zeeman_split = {},
                                        int workers = 1);

/// Hahn echo with ideal instantaneous pi pulse about x ((x,y,z) -> (x,-y,-z)):
/// free evolution tau, pulse, free evolution tau.  Records the echo amplitude
/// x(2*tau) against setting = 2*tau; decays as exp(-2*tau*Gamma2) for any
/// inhomogeneous broadening.
std::vector<CountsRecord> simulate_hahn_echo(const SpinParams& spin,
                                             std::span<const double> taus,
                                             const EnsembleConfig& cfg,
                                             int workers = 1);

/// Draws counts ~ Poisson(max(mean_signal,0) * shots), deterministic per seed.
std::vector<CountsRecord> apply_shot_noise(std::span<const CountsRecord> records,
                                           std::int64_t shots, std::uint64_t seed);

/// Dispatch helper for SequenceSpec (CLI entry point).
std::vector<CountsRecord> run_sequence(const SpinParams& spin, const SequenceSpec& spec,
                                       const EnsembleConfig& cfg,
                                       std::optional<ReadoutMap> readout = {},
                                       int workers = 1);

} // namespace beamspin
