#pragma once

#include <span>
#include <vector>

#include "beamspin/params.hpp"

namespace beamspin {

/// Rotating-frame drive: amplitude Omega and detuning delta = omega_I - omega0,
/// both in rad/s.
struct DriveParams {
  double omega_rabi = 0.0;
  double delta = 0.0;
};

/// Bloch vector (<sx>, <sy>, <sz>).  Physical states satisfy norm() <= 1.
struct BlochState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double norm2() const { return x * x + y * y + z * z; }
};

struct Trajectory {
  std::vector<double> times;       // strictly increasing, times[0] >= 0 [s]
  std::vector<BlochState> states;  // same length as times
};

// Rotating-frame Bloch equations for the dissipative two-level system
// (equal emission/absorption at gamma1, pure dephasing folded into gamma2):
//
//   dx/dt = -delta*y - Gamma2*x
//   dy/dt =  delta*x - Omega*z - Gamma2*y
//   dz/dt =  Omega*y - Gamma1*z
//
// with Gamma1 = 2*gamma1 (so z ~ exp(-t/T1), T1 = 1/(2*gamma1)) and
// Gamma2 = gamma1 + gamma2 (so transverse coherence ~ exp(-t/T2), T2 ~ 1/gamma2).
// The infinite-temperature bath relaxes z to 0, not +1.

/// z (longitudinal) decay rate Gamma1 = 2*gamma1 [1/s].
double longitudinal_rate(const SpinParams& spin);

/// Transverse coherence decay rate Gamma2 = gamma1 + gamma2 [1/s].
double transverse_rate(const SpinParams& spin);

/// Propagates `initial` (taken at t = 0) through the constant-coefficient
/// Bloch equations and samples the solution at `times`.  Uses exact
/// matrix-exponential stepping, accurate to ~1e-13 relative.
/// Throws std::invalid_argument for a non-increasing grid and
/// std::domain_error for non-finite parameters.
Trajectory evolve(const SpinParams& spin, const DriveParams& drive,
                  const BlochState& initial, std::span<const double> times);

} // namespace beamspin
