#pragma once

#include "beamspin/params.hpp"

namespace beamspin {

/// Beam-enhanced longitudinal relaxation rate [1/s]:
///   gamma1_beam = gamma1 + pi * Omega_R^2 * V(delta, sqrt(2)*gamma2_star, gamma2)
/// with V the Voigt density.  delta = 0 corresponds to resonant modulation;
/// nonzero delta covers detuned operation.
double beam_relaxation_rate(const SpinParams& spin, double omega_rabi, double delta = 0.0);

/// T1_beam / T1 = gamma1 / gamma1_beam at resonance; in (0, 1].
double t1_reduction_ratio(const SpinParams& spin, const BeamParams& beam);

/// Integrated relaxometry contrast between driven and undriven decays,
/// 1 - integral(z_beam)/integral(z_ref) over [0, inf) of the closed-form
/// exponentials, which reduces to 1 - T1_beam/T1.  In [0, 1).
double integrated_contrast(const SpinParams& spin, const BeamParams& beam);

/// Finite-horizon variant: integrals taken over [0, horizon_t1_multiples*T1].
/// Provided for sensitivity checks; the default metric is the infinite-horizon one.
double integrated_contrast_finite_horizon(const SpinParams& spin, const BeamParams& beam,
                                          double horizon_t1_multiples = 3.0);

/// Inverts the enhanced-rate formula: given a lower bound r on T1/T1_ref,
/// returns the largest Rabi frequency consistent with it,
///   Omega_max = sqrt( gamma1*(1/r - 1) / (pi * V(0, sqrt(2)*gamma2_star, gamma2)) ).
/// r = 1 gives 0.  Throws std::domain_error unless 0 < r <= 1.
double invert_coupling_bound(double ratio_lower_bound, const SpinParams& spin);

} // namespace beamspin
