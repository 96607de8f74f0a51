#pragma once

#include <string>
#include <vector>

#include "beamspin/constants.hpp"

namespace beamspin {

/// Spin qubit parameters. Rate conventions:
///   gamma1      longitudinal jump rate [1/s], T1 = 1/(2*gamma1)
///   gamma2      homogeneous coherence decay rate [1/s], T2 ~ 1/gamma2
///   gamma2_star inhomogeneous dephasing rate [rad/s]; the quasi-static
///               detuning spread is Gaussian with sigma = sqrt(2)*gamma2_star
struct SpinParams {
  double gamma1 = 87.7;
  double gamma2 = 9.43e4;
  double gamma2_star = constants::two_pi * 12.0e6;
  double omega0 = constants::two_pi * 2.87e9; // transition frequency [rad/s]
  double readout_contrast = 0.3;              // dimensionless, in [0,1]
  double baseline_counts = 0.0;               // photons per shot

  double t1() const { return 1.0 / (2.0 * gamma1); }
  double t2() const { return 1.0 / gamma2; }

  static SpinParams from_times(double t1_s, double t2_s, double gamma2_star_rad);
};

/// Modulated electron beam parameters.
struct BeamParams {
  double i0 = 16e-6;                 // average current [A]
  double bunching = 1.0;             // b in [0,1], 1 = perfect bunching
  double delivery_efficiency = 1.0;  // eta in [0,1]
  double rho0 = 10e-6;               // impact parameter [m]
  double omega_i = constants::two_pi * 2.87e9; // modulation frequency [rad/s]
};

/// Throws std::domain_error on hard violations; returns soft warnings
/// (e.g. gamma2 < gamma1, which is unphysical for an NV but not rejected).
std::vector<std::string> validate(const SpinParams& spin);

/// Throws std::domain_error on violation of the beam invariants.
void validate(const BeamParams& beam);

} // namespace beamspin
