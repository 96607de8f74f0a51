#include "beamspin/coupling.hpp"

#include <cmath>
#include <stdexcept>

#include "beamspin/constants.hpp"

namespace beamspin {

double coupling_phi0(double rho0_m) {
  if (!(rho0_m > 0.0) || !std::isfinite(rho0_m))
    throw std::domain_error("coupling_phi0: rho0 must be positive and finite");
  return constants::fine_structure * constants::compton_wavelength_m /
         (constants::two_pi * rho0_m);
}

double effective_resonant_current(const BeamParams& beam) {
  validate(beam);
  return 2.0 * beam.bunching * beam.delivery_efficiency * beam.i0;
}

double rabi_frequency(const BeamParams& beam) {
  return effective_resonant_current(beam) * coupling_phi0(beam.rho0) /
         constants::elementary_charge_C;
}

double current_for_rabi(double omega_rabi, double rho0_m) {
  if (!(omega_rabi >= 0.0))
    throw std::domain_error("current_for_rabi: omega_rabi must be >= 0");
  return constants::elementary_charge_C * omega_rabi / coupling_phi0(rho0_m);
}

} // namespace beamspin
