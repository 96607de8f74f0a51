#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamspin/ensemble.hpp"
#include "beamspin/params.hpp"

namespace beamspin {

enum class AxisScale { linear, log };

struct Axis {
  std::string name;
  double min = 0.0;
  double max = 1.0;
  int n = 2;                            // >= 2
  AxisScale scale = AxisScale::linear;  // log requires min > 0

  std::vector<double> points() const;   // throws std::invalid_argument if invalid
};

/// Two-axis grid for the contrast map (axis1 = gamma2_star, axis2 = gamma2).
struct GridSpec {
  Axis axis1;
  Axis axis2;
};

enum class Engine { closed_form, dynamics };

struct SweepResult {
  std::vector<double> axis1;
  std::vector<double> axis2;   // empty for 1-D sweeps
  std::vector<double> values;  // row-major [i1 * n2 + i2]; NaN marks a failed node
  Engine engine = Engine::closed_form;
  std::string label;           // configuration label for curve sweeps
  std::string config_hash;     // 16-hex-digit FNV-1a of the canonical inputs
  std::vector<std::string> log;  // one entry per failed node
};

/// Integrated relaxometry contrast over a (gamma2_star, gamma2) grid at
/// fixed beam parameters.  The closed-form engine evaluates the analytic
/// contrast; the dynamics engine simulates beam-on relaxometry per node,
/// fits the decay, and forms 1 - T_beam/T_ref (much slower; for validation).
/// Per-node failures become NaN with a log entry.
SweepResult contrast_map(const GridSpec& grid, const SpinParams& spin_base,
                         const BeamParams& beam, Engine engine = Engine::closed_form,
                         const EnsembleConfig& cfg = {}, int workers = 1);

/// One curve configuration of the T1-reduction roadmap.
struct CurveConfig {
  std::string label;
  double rho0 = 10e-6;        // [m]
  double gamma2_star = 0.0;   // [rad/s]
};

/// T1_beam/T1 versus average current for each configuration (closed form).
std::vector<SweepResult> reduction_curves(std::span<const double> currents,
                                          std::span<const CurveConfig> configs,
                                          const SpinParams& spin_base,
                                          const BeamParams& beam_base);

/// Smallest average current reaching the target reduction ratio, by bisection
/// on the monotone closed form to relative 1e-8.  The initial bracket
/// [1 nA, 1 A] is expanded geometrically; an unreachable target throws
/// std::range_error.
double find_current_for_ratio(double target_ratio, const SpinParams& spin,
                              const BeamParams& beam_base);

/// FNV-1a hash of a canonical text rendering, used to stamp outputs.
std::uint64_t fnv1a64(std::string_view text);
std::string config_hash_hex(std::string_view canonical_text);

} // namespace beamspin
