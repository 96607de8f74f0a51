#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace beamspin {

enum class SpectrumKind { cl, pl_cl, reference_nv_minus, reference_nv_zero };

/// Wavelength-sampled emission spectrum, wavelengths strictly increasing
/// within [400, 1000] nm, intensities >= 0 (arbitrary units).
struct Spectrum {
  std::vector<double> wavelengths_nm;
  std::vector<double> intensities;
  SpectrumKind kind = SpectrumKind::cl;
};

void validate(const Spectrum& s);

/// Non-negative decomposition target = w_minus*ref_minus + w_zero*ref_zero
/// + baseline*1.  kkt_min is the smallest gradient component over the
/// active (zero) weights at the solution (>= 0 up to roundoff at the optimum;
/// +inf when no weight is active).
struct ChargeWeights {
  double w_minus = 0.0;
  double w_zero = 0.0;
  double baseline = 0.0;
  double residual_rms = 0.0;
  double kkt_min = 0.0;

  /// w_minus/(w_minus + w_zero); NaN when both weights are zero.
  double fraction_minus() const;
};

/// Least-squares decomposition of `target` into the two reference spectra
/// plus a flat background, with all three coefficients constrained >= 0
/// (exact active-set enumeration; deterministic).  References are resampled
/// onto the target grid by linear interpolation; a target grid extending
/// beyond a reference's support throws std::out_of_range, near-parallel
/// references (angle < 1 degree) throw std::domain_error.
ChargeWeights decompose_spectrum(const Spectrum& target, const Spectrum& ref_minus,
                                 const Spectrum& ref_zero);

/// Shape parameters for the synthetic reference generator: a sharp
/// zero-phonon line plus a broad phonon-sideband hump carrying
/// psb_area_ratio times the ZPL area.
struct ReferenceShape {
  double zpl_sigma_nm = 2.0;
  double psb_offset_nm = 60.0;
  double psb_sigma_nm = 30.0;
  double psb_area_ratio = 3.0;
};

/// Synthetic model reference spectrum on `grid_nm`, L2-normalized.
/// kind must be reference_nv_minus (ZPL 637 nm) or reference_nv_zero (575 nm).
Spectrum synthesize_reference(SpectrumKind kind, std::span<const double> grid_nm,
                              const ReferenceShape& shape = {});

struct WeightsRow {
  double current = 0.0;
  ChargeWeights weights;
  bool ok = false;
  std::string error;  // per-item failure, recorded rather than thrown
};

/// Maps decompose_spectrum over a (current, spectrum) series in order.
std::vector<WeightsRow> weights_vs_current(
    std::span<const std::pair<double, Spectrum>> series, const Spectrum& ref_minus,
    const Spectrum& ref_zero);

} // namespace beamspin
