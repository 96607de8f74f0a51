#pragma once

namespace beamspin {

/// Scaled complementary error function exp(x^2)*erfc(x).
double erfcx(double x);

/// Real part of the Faddeeva function w(z) = exp(-z^2)*erfc(-i*z) for
/// z = x + i*y with y >= 0.  Relative accuracy ~1e-13 over the region
/// exercised by voigt() (validated against an adaptive convolution oracle
/// for width ratios sigma/gamma in [1e-6, 1e6]).
double faddeeva_re(double x, double y);

struct VoigtArgs {
  double x = 0.0;     // abscissa
  double sigma = 1.0; // Gaussian standard deviation, >= 0
  double gamma = 1.0; // Lorentzian (Cauchy) half width, >= 0
};

/// Voigt profile: convolution of a Gaussian (std dev sigma) and a
/// Lorentzian (HWHM gamma) density, normalized to unit integral.
/// Pure-Gaussian and pure-Lorentzian limits are taken exactly when one
/// width is zero; both widths zero is a domain error.
double voigt(double x, double sigma, double gamma);
double voigt(const VoigtArgs& args);

} // namespace beamspin
