#pragma once

// Physical constants (CODATA 2018) and a few math constants used throughout.
// All frequencies and rates in this library are angular (rad/s); quantities
// quoted in cyclic units (Hz, MHz, GHz) are converted by 2*pi at ingestion.

namespace beamspin::constants {

inline constexpr double fine_structure = 7.2973525693e-3;        // alpha
inline constexpr double compton_wavelength_m = 2.42631023867e-12; // lambda_C
inline constexpr double elementary_charge_C = 1.602176634e-19;    // e (exact)

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 6.28318530717958647692;
inline constexpr double sqrt_pi = 1.77245385090551602730;
inline constexpr double sqrt2 = 1.41421356237309504880;
inline constexpr double sqrt_2pi = 2.50662827463100050242;

// two-sided 95% normal quantile
inline constexpr double z95 = 1.959963984540054;

} // namespace beamspin::constants
