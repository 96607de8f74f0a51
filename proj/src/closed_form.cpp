#include "beamspin/closed_form.hpp"

#include <cmath>
#include <stdexcept>

#include "beamspin/constants.hpp"
#include "beamspin/coupling.hpp"
#include "beamspin/faddeeva.hpp"

namespace beamspin {

double beam_relaxation_rate(const SpinParams& spin, double omega_rabi, double delta) {
  validate(spin);
  if (!(omega_rabi >= 0.0) || !std::isfinite(delta))
    throw std::domain_error("beam_relaxation_rate: bad drive parameters");
  if (omega_rabi == 0.0) return spin.gamma1;
  const double v = voigt(delta, constants::sqrt2 * spin.gamma2_star, spin.gamma2);
  return spin.gamma1 + constants::pi * omega_rabi * omega_rabi * v;
}

double t1_reduction_ratio(const SpinParams& spin, const BeamParams& beam) {
  const double omega = rabi_frequency(beam);
  return spin.gamma1 / beam_relaxation_rate(spin, omega, 0.0);
}

double integrated_contrast(const SpinParams& spin, const BeamParams& beam) {
  return 1.0 - t1_reduction_ratio(spin, beam);
}

double integrated_contrast_finite_horizon(const SpinParams& spin, const BeamParams& beam,
                                          double horizon_t1_multiples) {
  if (!(horizon_t1_multiples > 0.0))
    throw std::domain_error("integrated_contrast_finite_horizon: horizon must be > 0");
  const double g1 = spin.gamma1;
  const double gb = beam_relaxation_rate(spin, rabi_frequency(beam), 0.0);
  // z decays at 2*gamma1 (ref) and 2*gamma1_beam (driven); integrate both to
  // t_h = horizon * T1_ref.
  const double th = horizon_t1_multiples / (2.0 * g1);
  const double int_ref = (1.0 - std::exp(-2.0 * g1 * th)) / (2.0 * g1);
  const double int_beam = (1.0 - std::exp(-2.0 * gb * th)) / (2.0 * gb);
  return 1.0 - int_beam / int_ref;
}

double invert_coupling_bound(double ratio_lower_bound, const SpinParams& spin) {
  validate(spin);
  if (!(ratio_lower_bound > 0.0) || !(ratio_lower_bound <= 1.0))
    throw std::domain_error("invert_coupling_bound: ratio must be in (0, 1]");
  if (ratio_lower_bound == 1.0) return 0.0;
  const double v = voigt(0.0, constants::sqrt2 * spin.gamma2_star, spin.gamma2);
  const double enhancement = spin.gamma1 * (1.0 / ratio_lower_bound - 1.0);
  return std::sqrt(enhancement / (constants::pi * v));
}

} // namespace beamspin
