#include "beamspin/sweeps.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "beamspin/closed_form.hpp"
#include "beamspin/coupling.hpp"
#include "beamspin/fitting.hpp"
#include "beamspin/parallel.hpp"
#include "beamspin/sequences.hpp"

namespace beamspin {

namespace {

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out(n);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (int i = 0; i < n; ++i)
    out[i] = std::exp(llo + (lhi - llo) * i / static_cast<double>(n - 1));
  return out;
}

// Dynamics-engine contrast for one (gamma2_star, gamma2) node: simulate
// beam-on and beam-off relaxometry, fit both decays, 1 - T_beam/T_ref.
double dynamics_contrast(SpinParams spin, const BeamParams& beam, const EnsembleConfig& cfg) {
  const double omega = rabi_frequency(beam);
  const double t1_cf = 1.0 / (2.0 * beam_relaxation_rate(spin, omega, 0.0));
  const std::vector<double> taus = log_spaced(0.1 * t1_cf, 3.0 * t1_cf, 20);

  DriveParams on{omega, 0.0};
  const auto rec_on = simulate_relaxometry(spin, on, taus, cfg);
  const double t_on = fit_exponential(rec_on).param("T");

  DriveParams off{0.0, 0.0};
  const auto rec_off = simulate_relaxometry(spin, off, taus, cfg);
  const double t_off = fit_exponential(rec_off).param("T");
  return 1.0 - t_on / t_off;
}

std::string axis_text(const Axis& a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%d,%s", a.name.c_str(), a.min, a.max, a.n,
                a.scale == AxisScale::log ? "log" : "linear");
  return buf;
}

std::string spin_text(const SpinParams& s) {
  char buf[240];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", s.gamma1, s.gamma2, s.gamma2_star,
                s.omega0);
  return buf;
}

std::string beam_text(const BeamParams& b) {
  char buf[240];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g", b.i0, b.bunching,
                b.delivery_efficiency, b.rho0, b.omega_i);
  return buf;
}

} // namespace

std::vector<double> Axis::points() const {
  if (n < 2) throw std::invalid_argument("Axis: n_points must be >= 2");
  if (!(min < max)) throw std::invalid_argument("Axis: min must be < max");
  if (scale == AxisScale::log && !(min > 0.0))
    throw std::invalid_argument("Axis: log scale requires min > 0");
  std::vector<double> out(n);
  if (scale == AxisScale::log) {
    const double llo = std::log(min), lhi = std::log(max);
    for (int i = 0; i < n; ++i)
      out[i] = std::exp(llo + (lhi - llo) * i / static_cast<double>(n - 1));
  } else {
    for (int i = 0; i < n; ++i)
      out[i] = min + (max - min) * i / static_cast<double>(n - 1);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(std::string_view canonical_text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(canonical_text)));
  return buf;
}

SweepResult contrast_map(const GridSpec& grid, const SpinParams& spin_base,
                         const BeamParams& beam, Engine engine, const EnsembleConfig& cfg,
                         int workers) {
  SweepResult result;
  result.axis1 = grid.axis1.points();
  result.axis2 = grid.axis2.points();
  result.engine = engine;
  result.config_hash = config_hash_hex(
      "contrast_map|" + axis_text(grid.axis1) + "|" + axis_text(grid.axis2) + "|" +
      spin_text(spin_base) + "|" + beam_text(beam) +
      (engine == Engine::dynamics ? "|dynamics" : "|closed-form") + "|seed=" +
      std::to_string(cfg.seed));

  const int n1 = static_cast<int>(result.axis1.size());
  const int n2 = static_cast<int>(result.axis2.size());
  result.values.assign(static_cast<std::size_t>(n1) * n2,
                       std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(result.values.size());

  parallel_for(n1 * n2, workers, [&](int idx) {
    const int i = idx / n2, j = idx % n2;
    SpinParams spin = spin_base;
    spin.gamma2_star = result.axis1[i];
    spin.gamma2 = result.axis2[j];
    try {
      result.values[idx] = engine == Engine::closed_form
                               ? integrated_contrast(spin, beam)
                               : dynamics_contrast(spin, beam, cfg);
    } catch (const std::exception& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "node (%d,%d): ", i, j);
      errors[idx] = std::string(buf) + e.what();
    }
  });
  for (auto& e : errors)
    if (!e.empty()) result.log.push_back(std::move(e));
  return result;
}

std::vector<SweepResult> reduction_curves(std::span<const double> currents,
                                          std::span<const CurveConfig> configs,
                                          const SpinParams& spin_base,
                                          const BeamParams& beam_base) {
  if (currents.empty()) throw std::invalid_argument("reduction_curves: empty current grid");
  for (std::size_t i = 1; i < currents.size(); ++i)
    if (!(currents[i] > currents[i - 1]))
      throw std::invalid_argument("reduction_curves: currents must be increasing");
  if (configs.empty()) throw std::invalid_argument("reduction_curves: no configurations");

  std::vector<SweepResult> results;
  results.reserve(configs.size());
  for (const CurveConfig& cc : configs) {
    SpinParams spin = spin_base;
    spin.gamma2_star = cc.gamma2_star;
    BeamParams beam = beam_base;
    beam.rho0 = cc.rho0;

    SweepResult r;
    r.axis1.assign(currents.begin(), currents.end());
    r.engine = Engine::closed_form;
    r.label = cc.label;
    char extra[120];
    std::snprintf(extra, sizeof extra, "|rho0=%.17g|g2s=%.17g", cc.rho0, cc.gamma2_star);
    r.config_hash = config_hash_hex("reduction_curve|" + cc.label + extra + "|" +
                                    spin_text(spin_base) + "|" + beam_text(beam_base));
    r.values.resize(currents.size());
    for (std::size_t i = 0; i < currents.size(); ++i) {
      beam.i0 = currents[i];
      r.values[i] = t1_reduction_ratio(spin, beam);
    }
    results.push_back(std::move(r));
  }
  return results;
}

double find_current_for_ratio(double target_ratio, const SpinParams& spin,
                              const BeamParams& beam_base) {
  if (!(target_ratio > 0.0) || !(target_ratio < 1.0))
    throw std::invalid_argument("find_current_for_ratio: target must be in (0, 1)");

  BeamParams beam = beam_base;
  auto ratio_at = [&](double i0) {
    beam.i0 = i0;
    return t1_reduction_ratio(spin, beam);
  };

  // ratio is monotone decreasing in current; expand the bracket geometrically
  double lo = 1e-9, hi = 1.0;
  constexpr double kLoFloor = 1e-15, kHiCap = 1e3;
  while (ratio_at(lo) < target_ratio) {
    lo /= 10.0;
    if (lo < kLoFloor)
      throw std::range_error("find_current_for_ratio: target ratio unreachable (too high)");
  }
  while (ratio_at(hi) > target_ratio) {
    hi *= 10.0;
    if (hi > kHiCap)
      throw std::range_error("find_current_for_ratio: target ratio unreachable (too low)");
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = std::sqrt(lo * hi);  // geometric bisection over decades
    (ratio_at(mid) > target_ratio ? lo : hi) = mid;
    if ((hi - lo) <= 1e-8 * hi) break;
  }
  return 0.5 * (lo + hi);
}

} // namespace beamspin
