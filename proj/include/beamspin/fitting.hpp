#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beamspin/params.hpp"
#include "beamspin/sequences.hpp"

namespace beamspin {

/// Result of a damped least-squares fit.  covariance is the scaled inverse
/// Gauss-Newton Hessian, (J^T W J)^-1 * chi2/(n-p); std_errors are the
/// square roots of its diagonal.
struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> std_errors;
  std::vector<double> covariance;  // row-major p x p
  double residual_rms = 0.0;
  double gradient_inf = 0.0;       // max |grad chi2/2| at the returned point
  bool converged = false;
  int n_iter = 0;

  double param(std::string_view name) const;
  double std_error(std::string_view name) const;
};

/// Weighted fit of A*exp(-t/T) to (setting, signal) records.
/// Signal is `counts` when shot noise was applied (Poisson weights
/// 1/max(counts,1) by default), `mean_signal` otherwise (unit weights).
/// Explicit per-point weights override the defaults.
/// Initialization from log-linear regression; convergence when the relative
/// parameter change drops below 1e-10 (at most 200 iterations).
/// Non-convergence is flagged on the result, not thrown; degenerate
/// (all-equal) data throws std::invalid_argument.
FitResult fit_exponential(std::span<const CountsRecord> data,
                          std::span<const double> weights = {});

enum class LineModel { gaussian, lorentzian, voigt };

/// Fits an inverted lineshape on a constant background:
///   y = offset - depth * S(x - center) / S(0).
/// Native width parameters (sigma and/or gamma) are reported together with
/// the derived "fwhm" entry (delta-method standard error).
FitResult fit_lineshape(std::span<const CountsRecord> data, LineModel model);

enum class CiMethod { delta_method, parametric_bootstrap };

struct RatioEstimate {
  double ratio = 1.0;
  double ci_lower = 1.0;
  double ci_upper = 1.0;
  CiMethod method = CiMethod::delta_method;
};

/// 95% confidence interval for T_beam/T_ref from two converged exponential
/// fits.  delta-method: var r = r^2 [(s_b/T_b)^2 + (s_r/T_r)^2]; bootstrap:
/// 1e4 seeded parameter resamples, empirical 2.5/97.5 percentiles.
RatioEstimate estimate_ratio(const FitResult& fit_beam, const FitResult& fit_ref,
                             CiMethod method, std::uint64_t seed = 20260810);

struct CouplingBound {
  bool constraining = false;  // false when ci_lower >= 1
  double omega_max = 0.0;     // [rad/s]
  double i_res_max = 0.0;     // [A]
};

/// Converts the CI lower bound of T1/T1_ref into an upper bound on the
/// drive coupling; ci_lower >= 1 is reported as not constraining (the
/// measurement does not limit the coupling) rather than a negative value.
CouplingBound coupling_bound_pipeline(const RatioEstimate& ratio, const SpinParams& spin,
                                      double rho0);

/// "value(uncertainty) unit" rendering, e.g. (5.7e-3, 3e-4, "ms") -> "5.7(3) ms"
/// with value/sigma given in the displayed unit.
std::string format_value_uncertainty(double value, double sigma, std::string_view unit);

} // namespace beamspin
