#pragma once

#include "beamspin/params.hpp"

namespace beamspin {

/// Dimensionless beam-spin coupling phi0 = alpha*lambda_C/(2*pi*rho0).
/// Throws std::domain_error for rho0 <= 0 or non-finite.
double coupling_phi0(double rho0_m);

/// First-harmonic amplitude of the delivered modulated current,
/// I_res = 2 * bunching * delivery_efficiency * i0.  A perfectly bunched
/// periodic beam of average current I0 has first Fourier harmonic 2*I0.
double effective_resonant_current(const BeamParams& beam);

/// Rabi frequency of the beam drive, Omega_R = I_res*phi0/e [rad/s].
double rabi_frequency(const BeamParams& beam);

/// Resonant current that would produce a given Rabi frequency at rho0,
/// I_res = e*Omega/phi0.  Inverse helper for bound reporting.
double current_for_rabi(double omega_rabi, double rho0_m);

} // namespace beamspin
