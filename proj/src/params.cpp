#include "beamspin/params.hpp"

#include <cmath>
#include <stdexcept>

namespace beamspin {

SpinParams SpinParams::from_times(double t1_s, double t2_s, double gamma2_star_rad) {
  if (!(t1_s > 0.0) || !(t2_s > 0.0))
    throw std::domain_error("SpinParams::from_times: T1 and T2 must be positive");
  SpinParams p;
  p.gamma1 = 1.0 / (2.0 * t1_s);
  p.gamma2 = 1.0 / t2_s;
  p.gamma2_star = gamma2_star_rad;
  return p;
}

std::vector<std::string> validate(const SpinParams& spin) {
  auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(spin.gamma1) || bad(spin.gamma2) || bad(spin.gamma2_star) || bad(spin.omega0) ||
      bad(spin.readout_contrast) || bad(spin.baseline_counts))
    throw std::domain_error("SpinParams: non-finite field");
  if (spin.gamma1 < 0.0 || spin.gamma2 < 0.0 || spin.gamma2_star < 0.0)
    throw std::domain_error("SpinParams: rates must be >= 0");
  if (!(spin.omega0 > 0.0)) throw std::domain_error("SpinParams: omega0 must be > 0");
  if (spin.readout_contrast < 0.0 || spin.readout_contrast > 1.0)
    throw std::domain_error("SpinParams: readout_contrast must be in [0,1]");
  if (spin.baseline_counts < 0.0)
    throw std::domain_error("SpinParams: baseline_counts must be >= 0");

  std::vector<std::string> warnings;
  if (spin.gamma2 < spin.gamma1)
    warnings.push_back("gamma2 < gamma1: unusual for an NV ensemble, check rate units");
  return warnings;
}

void validate(const BeamParams& beam) {
  auto bad = [](double v) { return !std::isfinite(v); };
  if (bad(beam.i0) || bad(beam.bunching) || bad(beam.delivery_efficiency) || bad(beam.rho0) ||
      bad(beam.omega_i))
    throw std::domain_error("BeamParams: non-finite field");
  if (beam.i0 < 0.0) throw std::domain_error("BeamParams: i0 must be >= 0");
  if (beam.bunching < 0.0 || beam.bunching > 1.0)
    throw std::domain_error("BeamParams: bunching must be in [0,1]");
  if (beam.delivery_efficiency < 0.0 || beam.delivery_efficiency > 1.0)
    throw std::domain_error("BeamParams: delivery_efficiency must be in [0,1]");
  if (!(beam.rho0 > 0.0)) throw std::domain_error("BeamParams: rho0 must be > 0");
}

} // namespace beamspin
