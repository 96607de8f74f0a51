#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamspin/random.hpp"
#include "beamspin/spectra.hpp"

using namespace beamspin;

namespace {

std::vector<double> grid_nm(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1.0);
  return g;
}

Spectrum mix(const Spectrum& rm, const Spectrum& rz, double wm, double wz, double base) {
  Spectrum s;
  s.kind = SpectrumKind::pl_cl;
  s.wavelengths_nm = rm.wavelengths_nm;
  s.intensities.resize(rm.intensities.size());
  for (std::size_t i = 0; i < s.intensities.size(); ++i)
    s.intensities[i] = wm * rm.intensities[i] + wz * rz.intensities[i] + base;
  return s;
}

} // namespace

TEST_CASE("synthetic references peak at their zero-phonon lines") {
  const auto g = grid_nm(500, 850, 701);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  const auto peak = [](const Spectrum& s) {
    return s.wavelengths_nm[std::max_element(s.intensities.begin(), s.intensities.end()) -
                            s.intensities.begin()];
  };
  CHECK(peak(rm) == doctest::Approx(637.0).epsilon(2e-3));
  CHECK(peak(rz) == doctest::Approx(575.0).epsilon(2e-3));

  double norm2 = 0.0;
  for (const double v : rm.intensities) norm2 += v * v;
  CHECK(std::sqrt(norm2) == doctest::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(synthesize_reference(SpectrumKind::cl, g), std::invalid_argument);
}

TEST_CASE("pure reference decomposes to itself") {
  const auto g = grid_nm(500, 850, 400);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  Spectrum target = rm;
  target.kind = SpectrumKind::cl;
  const ChargeWeights w = decompose_spectrum(target, rm, rz);
  CHECK(w.w_minus == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(w.w_zero == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
  CHECK(w.residual_rms < 1e-8);
  CHECK(w.fraction_minus() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(w.kkt_min >= -1e-9);
}

TEST_CASE("noisy mixture recovery within 0.02") {
  const auto g = grid_nm(500, 850, 400);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  double peak = 0.0;
  const Spectrum clean = mix(rm, rz, 0.7, 0.3, 0.0);
  for (const double v : clean.intensities) peak = std::max(peak, v);

  Rng rng(2718);
  for (int trial = 0; trial < 10; ++trial) {
    Spectrum noisy = clean;
    for (double& v : noisy.intensities) v = std::max(0.0, v + 0.05 * peak * rng.normal());
    const ChargeWeights w = decompose_spectrum(noisy, rm, rz);
    CHECK(w.fraction_minus() == doctest::Approx(0.7).epsilon(0.03));
    CHECK(std::fabs(w.fraction_minus() - 0.7) <= 0.02);
    CHECK(w.kkt_min >= -1e-9);
  }
}

TEST_CASE("decreasing mixture series is recovered in order") {
  const auto g = grid_nm(500, 850, 400);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  std::vector<std::pair<double, Spectrum>> series;
  Rng rng(99);
  for (int k = 0; k < 6; ++k) {
    const double fm = 0.9 - 0.12 * k;
    Spectrum s = mix(rm, rz, fm, 1.0 - fm, 0.01);
    for (double& v : s.intensities) v = std::max(0.0, v + 5e-4 * rng.normal());
    series.emplace_back(0.5 * (k + 1), std::move(s));
  }
  const auto rows = weights_vs_current(series, rm, rz);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].ok);
    CHECK(rows[i].weights.fraction_minus() < rows[i - 1].weights.fraction_minus());
  }
}

TEST_CASE("scale invariance of the recovered fraction") {
  const auto g = grid_nm(500, 850, 300);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);
  const Spectrum target = mix(rm, rz, 0.4, 0.6, 0.02);
  const ChargeWeights base = decompose_spectrum(target, rm, rz);

  for (const double c : {0.1, 10.0}) {
    Spectrum scaled = target;
    for (double& v : scaled.intensities) v *= c;
    const ChargeWeights w = decompose_spectrum(scaled, rm, rz);
    CHECK(w.w_minus == doctest::Approx(c * base.w_minus).epsilon(1e-12));
    CHECK(w.w_zero == doctest::Approx(c * base.w_zero).epsilon(1e-12));
    CHECK(w.fraction_minus() == doctest::Approx(base.fraction_minus()).epsilon(1e-12));
  }
}

TEST_CASE("nnls clips negative components at zero") {
  const auto g = grid_nm(500, 850, 300);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  // target = ref_minus minus a chunk of ref_zero: unconstrained LS would want
  // w_zero < 0, NNLS must return w_zero = 0 with a KKT-consistent gradient
  Spectrum target = rm;
  target.kind = SpectrumKind::cl;
  for (std::size_t i = 0; i < target.intensities.size(); ++i)
    target.intensities[i] =
        std::max(0.0, target.intensities[i] - 0.3 * rz.intensities[i]);
  const ChargeWeights w = decompose_spectrum(target, rm, rz);
  CHECK(w.w_zero == 0.0);
  CHECK(w.kkt_min >= -1e-9);
}

TEST_CASE("validation and error isolation") {
  const auto g = grid_nm(500, 850, 300);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);

  // nearly parallel references
  Spectrum almost = rm;
  for (std::size_t i = 0; i < almost.intensities.size(); ++i)
    almost.intensities[i] = rm.intensities[i] * 1.0001 + 1e-9;
  CHECK_THROWS_AS(decompose_spectrum(mix(rm, rz, 1, 0, 0), rm, almost), std::domain_error);

  // target grid beyond the reference support
  Spectrum wide = mix(rm, rz, 0.5, 0.5, 0.0);
  wide.wavelengths_nm.push_back(990.0);
  wide.intensities.push_back(0.0);
  CHECK_THROWS_AS(decompose_spectrum(wide, rm, rz), std::out_of_range);

  // malformed spectrum
  Spectrum bad = rm;
  bad.intensities[5] = -1.0;
  CHECK_THROWS_AS(validate(bad), std::domain_error);

  // per-row isolation in a series
  std::vector<std::pair<double, Spectrum>> series;
  series.emplace_back(1.0, mix(rm, rz, 0.6, 0.4, 0.0));
  Spectrum empty;
  empty.kind = SpectrumKind::cl;
  series.emplace_back(2.0, empty);
  series.emplace_back(3.0, mix(rm, rz, 0.3, 0.7, 0.0));
  const auto rows = weights_vs_current(series, rm, rz);
  CHECK(rows[0].ok);
  CHECK_FALSE(rows[1].ok);
  CHECK(!rows[1].error.empty());
  CHECK(rows[2].ok);
  CHECK(rows[0].weights.fraction_minus() == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(rows[2].weights.fraction_minus() == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("fraction is undefined for an all-baseline target") {
  const auto g = grid_nm(500, 850, 300);
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, g);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, g);
  Spectrum flat;
  flat.kind = SpectrumKind::cl;
  flat.wavelengths_nm = g;
  flat.intensities.assign(g.size(), 2.5);
  const ChargeWeights w = decompose_spectrum(flat, rm, rz);
  CHECK(w.baseline == doctest::Approx(2.5).epsilon(1e-9));
  CHECK(std::isnan(w.fraction_minus()));
}
