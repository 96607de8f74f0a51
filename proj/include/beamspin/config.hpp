#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "beamspin/sequences.hpp"
#include "beamspin/sweeps.hpp"

namespace beamspin {

inline constexpr const char* kVersion = "0.1.0";

/// Configuration problems carry the offending key path in the message.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridRange {
  double min = 0.0;
  double max = 1.0;
  int n = 2;
  AxisScale scale = AxisScale::linear;

  std::vector<double> points() const;
};

enum class SweepKind { contrast_map, reduction_curves };

struct SweepSpec {
  SweepKind kind = SweepKind::contrast_map;
  GridRange gamma2star_grid;  // [rad/s] after ingestion
  GridRange gamma2_grid;      // [1/s]
  GridRange currents;         // [A]
  std::vector<CurveConfig> configs;
};

/// Parsed run configuration.  Config files are JSON documents whose keys
/// carry explicit unit suffixes (t1_ms, current_uA, gamma2star_MHz, ...);
/// values are converted to internal units (rad/s, s, A, m) on load and
/// cyclic frequencies are multiplied by 2*pi.  Unknown keys are rejected.
struct RunConfig {
  SpinParams spin;
  BeamParams beam;
  EnsembleConfig ensemble;
  Engine engine = Engine::closed_form;
  std::int64_t shots = 0;       // 0 = noiseless output
  bool apply_readout = false;   // map <sz> through the affine readout
  std::optional<SequenceSpec> sequence;
  std::optional<SweepSpec> sweep;
  std::string output_prefix = "run";
  std::string canonical;        // canonical text used for the config hash
};

RunConfig parse_config_text(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

} // namespace beamspin
