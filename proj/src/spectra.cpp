#include "beamspin/spectra.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "beamspin/constants.hpp"

namespace beamspin {

namespace {

std::vector<double> resample(const Spectrum& ref, const std::vector<double>& grid) {
  const auto& wl = ref.wavelengths_nm;
  if (grid.front() < wl.front() - 1e-9 || grid.back() > wl.back() + 1e-9)
    throw std::out_of_range(
        "decompose_spectrum: target grid extends beyond the reference support");
  std::vector<double> out(grid.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = std::clamp(grid[i], wl.front(), wl.back());
    while (j + 2 < wl.size() && wl[j + 1] < x) ++j;
    const double f = (x - wl[j]) / (wl[j + 1] - wl[j]);
    out[i] = ref.intensities[j] * (1.0 - f) + ref.intensities[j + 1] * f;
  }
  return out;
}

constexpr int kNnlsVars = 3;

// Exact non-negative least squares for the 3-column design (ref-, ref0, flat
// baseline): enumerate all active sets, keep the feasible KKT-optimal one.
struct NnlsSolution {
  std::array<double, kNnlsVars> x{};
  double rss = std::numeric_limits<double>::infinity();
  double kkt_min = std::numeric_limits<double>::infinity();
};

NnlsSolution nnls3(const std::vector<std::array<double, kNnlsVars>>& rows,
                   const std::vector<double>& b) {
  const std::size_t n = b.size();
  double ata[kNnlsVars][kNnlsVars] = {};
  double atb[kNnlsVars] = {};
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < kNnlsVars; ++a) {
      atb[a] += rows[i][a] * b[i];
      for (int c = 0; c <= a; ++c) ata[a][c] += rows[i][a] * rows[i][c];
    }
  }
  for (int a = 0; a < kNnlsVars; ++a)
    for (int c = a + 1; c < kNnlsVars; ++c) ata[a][c] = ata[c][a];

  const double scale = std::max({ata[0][0], ata[1][1], ata[2][2], 1e-300});
  NnlsSolution best;

  for (int mask = 0; mask < (1 << kNnlsVars); ++mask) {
    int free_idx[kNnlsVars], nf = 0;
    for (int a = 0; a < kNnlsVars; ++a)
      if (mask & (1 << a)) free_idx[nf++] = a;

    // solve the normal equations restricted to the free variables
    double m[kNnlsVars][kNnlsVars + 1] = {};
    for (int r = 0; r < nf; ++r) {
      for (int c = 0; c < nf; ++c) m[r][c] = ata[free_idx[r]][free_idx[c]];
      m[r][nf] = atb[free_idx[r]];
    }
    bool singular = false;
    for (int col = 0; col < nf && !singular; ++col) {
      int piv = col;
      for (int r = col + 1; r < nf; ++r)
        if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
      if (std::fabs(m[piv][col]) < 1e-12 * scale) {
        singular = true;
        break;
      }
      std::swap(m[col], m[piv]);
      for (int r = 0; r < nf; ++r) {
        if (r == col) continue;
        const double f = m[r][col] / m[col][col];
        for (int c = col; c <= nf; ++c) m[r][c] -= f * m[col][c];
      }
    }
    if (singular) continue;

    std::array<double, kNnlsVars> x{};
    bool feasible = true;
    for (int r = 0; r < nf; ++r) {
      const double v = m[r][nf] / m[r][r];
      if (v < 0.0) feasible = false;
      x[free_idx[r]] = v;
    }
    if (!feasible) continue;

    // gradient of 1/2 ||Ax-b||^2 and KKT check on the active (zero) variables
    double grad[kNnlsVars];
    double kkt = std::numeric_limits<double>::infinity();
    for (int a = 0; a < kNnlsVars; ++a) {
      grad[a] = -atb[a];
      for (int c = 0; c < kNnlsVars; ++c) grad[a] += ata[a][c] * x[c];
      if (!(mask & (1 << a))) kkt = std::min(kkt, grad[a]);
    }
    if (kkt < -1e-9 * scale) continue;

    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double fit = 0.0;
      for (int a = 0; a < kNnlsVars; ++a) fit += rows[i][a] * x[a];
      const double r = b[i] - fit;
      rss += r * r;
    }
    if (rss < best.rss) {
      best.x = x;
      best.rss = rss;
      best.kkt_min = kkt;
    }
  }
  if (!std::isfinite(best.rss))
    throw std::runtime_error("decompose_spectrum: no feasible NNLS solution found");
  return best;
}

} // namespace

void validate(const Spectrum& s) {
  if (s.wavelengths_nm.size() != s.intensities.size())
    throw std::domain_error("Spectrum: wavelength/intensity length mismatch");
  if (s.wavelengths_nm.size() < 2) throw std::domain_error("Spectrum: need >= 2 samples");
  for (std::size_t i = 0; i < s.wavelengths_nm.size(); ++i) {
    const double wl = s.wavelengths_nm[i];
    if (!(wl >= 400.0 && wl <= 1000.0))
      throw std::domain_error("Spectrum: wavelengths must lie in [400, 1000] nm");
    if (i > 0 && !(wl > s.wavelengths_nm[i - 1]))
      throw std::domain_error("Spectrum: wavelengths must be strictly increasing");
    if (!(s.intensities[i] >= 0.0) || !std::isfinite(s.intensities[i]))
      throw std::domain_error("Spectrum: intensities must be finite and >= 0");
  }
}

double ChargeWeights::fraction_minus() const {
  const double sum = w_minus + w_zero;
  if (sum <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return w_minus / sum;
}

ChargeWeights decompose_spectrum(const Spectrum& target, const Spectrum& ref_minus,
                                 const Spectrum& ref_zero) {
  validate(target);
  validate(ref_minus);
  validate(ref_zero);

  const std::vector<double> rm = resample(ref_minus, target.wavelengths_nm);
  const std::vector<double> rz = resample(ref_zero, target.wavelengths_nm);

  // reject near-parallel references (angle < 1 degree)
  double mm = 0, zz = 0, mz = 0;
  for (std::size_t i = 0; i < rm.size(); ++i) {
    mm += rm[i] * rm[i];
    zz += rz[i] * rz[i];
    mz += rm[i] * rz[i];
  }
  if (!(mm > 0.0) || !(zz > 0.0))
    throw std::domain_error("decompose_spectrum: empty reference spectrum");
  const double cos_angle = mz / std::sqrt(mm * zz);
  if (cos_angle > std::cos(constants::pi / 180.0))
    throw std::domain_error("decompose_spectrum: reference spectra are nearly parallel");

  std::vector<std::array<double, kNnlsVars>> rows(rm.size());
  for (std::size_t i = 0; i < rm.size(); ++i) rows[i] = {rm[i], rz[i], 1.0};
  const NnlsSolution sol = nnls3(rows, target.intensities);

  ChargeWeights w;
  w.w_minus = sol.x[0];
  w.w_zero = sol.x[1];
  w.baseline = sol.x[2];
  w.residual_rms = std::sqrt(sol.rss / static_cast<double>(rm.size()));
  w.kkt_min = sol.kkt_min;
  return w;
}

Spectrum synthesize_reference(SpectrumKind kind, std::span<const double> grid_nm,
                              const ReferenceShape& shape) {
  double zpl_nm = 0.0;
  if (kind == SpectrumKind::reference_nv_minus)
    zpl_nm = 637.0;
  else if (kind == SpectrumKind::reference_nv_zero)
    zpl_nm = 575.0;
  else
    throw std::invalid_argument("synthesize_reference: kind must be a reference kind");
  if (grid_nm.size() < 2)
    throw std::invalid_argument("synthesize_reference: need >= 2 grid points");

  // ZPL Gaussian plus a broad phonon-sideband hump carrying
  // psb_area_ratio times the ZPL area.
  const double amp_psb = shape.psb_area_ratio * shape.zpl_sigma_nm / shape.psb_sigma_nm;
  Spectrum s;
  s.kind = kind;
  s.wavelengths_nm.assign(grid_nm.begin(), grid_nm.end());
  s.intensities.resize(grid_nm.size());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < grid_nm.size(); ++i) {
    const double u = (grid_nm[i] - zpl_nm) / shape.zpl_sigma_nm;
    const double v = (grid_nm[i] - zpl_nm - shape.psb_offset_nm) / shape.psb_sigma_nm;
    const double val = std::exp(-0.5 * u * u) + amp_psb * std::exp(-0.5 * v * v);
    s.intensities[i] = val;
    norm2 += val * val;
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : s.intensities) v *= inv;
  validate(s);
  return s;
}

std::vector<WeightsRow> weights_vs_current(
    std::span<const std::pair<double, Spectrum>> series, const Spectrum& ref_minus,
    const Spectrum& ref_zero) {
  if (series.empty()) throw std::invalid_argument("weights_vs_current: empty series");
  std::vector<WeightsRow> rows;
  rows.reserve(series.size());
  for (const auto& [current, spectrum] : series) {
    WeightsRow row;
    row.current = current;
    try {
      row.weights = decompose_spectrum(spectrum, ref_minus, ref_zero);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace beamspin
