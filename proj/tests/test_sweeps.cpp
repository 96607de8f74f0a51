#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "beamspin/closed_form.hpp"
#include "beamspin/constants.hpp"
#include "beamspin/sweeps.hpp"

using namespace beamspin;

namespace {

SpinParams roadmap_spin() {
  // T1 = 5 ms, T2 = 10 us baseline of the current-vs-ratio roadmap
  SpinParams spin = SpinParams::from_times(5e-3, 10e-6, constants::two_pi * 12e6);
  return spin;
}

BeamParams map_beam() {
  BeamParams beam;
  beam.i0 = 10e-6;
  beam.rho0 = 10e-6;
  return beam;
}

} // namespace

TEST_CASE("axis points") {
  Axis lin{"a", 0.0, 1.0, 5, AxisScale::linear};
  const auto p = lin.points();
  CHECK(p.front() == 0.0);
  CHECK(p.back() == 1.0);
  CHECK(p[2] == doctest::Approx(0.5));

  Axis lg{"b", 1.0, 100.0, 3, AxisScale::log};
  const auto q = lg.points();
  CHECK(q[1] == doctest::Approx(10.0).epsilon(1e-12));

  Axis bad{"c", -1.0, 10.0, 4, AxisScale::log};
  CHECK_THROWS_AS(bad.points(), std::invalid_argument);
  Axis bad2{"d", 1.0, 10.0, 1, AxisScale::linear};
  CHECK_THROWS_AS(bad2.points(), std::invalid_argument);
}

TEST_CASE("contrast map basics") {
  GridSpec grid;
  grid.axis1 = {"gamma2_star", constants::two_pi * 1e5, constants::two_pi * 1e8, 12,
                AxisScale::log};
  grid.axis2 = {"gamma2", 1e3, 1e6, 10, AxisScale::log};
  const SpinParams spin = SpinParams::from_times(5e-3, 10.6e-6, constants::two_pi * 12e6);

  const SweepResult map = contrast_map(grid, spin, map_beam());
  REQUIRE(map.values.size() == 120);
  CHECK(map.log.empty());

  for (const double v : map.values) {
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  // monotone non-increasing along the gamma2_star axis at fixed gamma2
  for (std::size_t j = 0; j < map.axis2.size(); ++j)
    for (std::size_t i = 1; i < map.axis1.size(); ++i)
      CHECK(map.values[i * map.axis2.size() + j] <=
            map.values[(i - 1) * map.axis2.size() + j] + 1e-15);

  // zero current gives a zero map
  BeamParams off = map_beam();
  off.i0 = 0.0;
  const SweepResult zero = contrast_map(grid, spin, off);
  for (const double v : zero.values) CHECK(v == 0.0);
}

TEST_CASE("contrast map marks failed nodes as NaN with a log entry") {
  GridSpec grid;
  grid.axis1 = {"gamma2_star", 1e5, 1e6, 3, AxisScale::log};
  grid.axis2 = {"gamma2", 1e3, 1e4, 3, AxisScale::log};
  BeamParams bad = map_beam();
  bad.i0 = std::nan("");
  const SweepResult map = contrast_map(grid, SpinParams{}, bad);
  CHECK(map.log.size() == 9);
  for (const double v : map.values) CHECK(std::isnan(v));
}

TEST_CASE("config hash changes iff inputs change") {
  GridSpec grid;
  grid.axis1 = {"gamma2_star", 1e6, 1e8, 4, AxisScale::log};
  grid.axis2 = {"gamma2", 1e3, 1e5, 4, AxisScale::log};
  const SpinParams spin = roadmap_spin();

  const SweepResult a = contrast_map(grid, spin, map_beam());
  const SweepResult b = contrast_map(grid, spin, map_beam());
  CHECK(a.config_hash == b.config_hash);

  BeamParams beam2 = map_beam();
  beam2.i0 *= 2.0;
  const SweepResult c = contrast_map(grid, spin, beam2);
  CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("reduction curves start at one and respond to rho0") {
  const SpinParams spin = roadmap_spin();
  std::vector<double> currents(30);
  for (std::size_t i = 0; i < currents.size(); ++i) currents[i] = 1e-6 * i;

  const std::vector<CurveConfig> configs{
      {"current system", 10e-6, constants::two_pi * 12e6},
      {"tighter focus", 5e-6, constants::two_pi * 12e6},
      {"narrower line", 10e-6, constants::two_pi * 1.2e6},
  };
  const auto curves = reduction_curves(currents, configs, spin, BeamParams{});
  REQUIRE(curves.size() == 3);
  for (const auto& c : curves) {
    CHECK(c.values.front() == 1.0);
    for (std::size_t i = 1; i < c.values.size(); ++i) CHECK(c.values[i] < c.values[i - 1]);
  }
  // halving rho0 strengthens the coupling at fixed current
  for (std::size_t i = 1; i < currents.size(); ++i)
    CHECK(curves[1].values[i] < curves[0].values[i]);
  // so does a narrower inhomogeneous line
  for (std::size_t i = 1; i < currents.size(); ++i)
    CHECK(curves[2].values[i] < curves[0].values[i]);
}

TEST_CASE("find_current_for_ratio inverts the reduction curve") {
  const SpinParams spin = roadmap_spin();
  BeamParams beam;
  beam.rho0 = 10e-6;

  for (const double target : {0.9, 0.5, 0.2}) {
    const double i0 = find_current_for_ratio(target, spin, beam);
    BeamParams at = beam;
    at.i0 = i0;
    CHECK(t1_reduction_ratio(spin, at) == doctest::Approx(target).epsilon(1e-6));
  }

  // monotone in the target
  CHECK(find_current_for_ratio(0.999999, spin, beam) <
        find_current_for_ratio(0.99, spin, beam));

  CHECK_THROWS_AS(find_current_for_ratio(1e-18, spin, beam), std::range_error);
  CHECK_THROWS_AS(find_current_for_ratio(1.0, spin, beam), std::invalid_argument);
}

TEST_CASE("ratio 0.30 with the 16 uA example parameters lands near 16 uA") {
  const SpinParams spin = SpinParams::from_times(5e-3, 100e-6, constants::two_pi * 1.9e6);
  BeamParams beam;
  beam.rho0 = 10e-6;
  const double i0 = find_current_for_ratio(0.30, spin, beam);
  CHECK(i0 == doctest::Approx(16e-6).epsilon(0.05));
}

TEST_CASE("closed-form and dynamics engines agree on a small grid") {
  // overdamped, strongly inhomogeneous regime: Omega << gamma2 << gamma2_star
  GridSpec grid;
  grid.axis1 = {"gamma2_star", 1e6, 1e7, 3, AxisScale::log};
  grid.axis2 = {"gamma2", 1e4, 1e5, 3, AxisScale::log};
  SpinParams spin;
  spin.gamma1 = 100.0;
  BeamParams beam;
  beam.rho0 = 10e-6;
  beam.i0 = 0.5e-6;  // Omega_R ~ 1.8e3 rad/s

  const SweepResult cf = contrast_map(grid, spin, beam, Engine::closed_form);
  EnsembleConfig cfg;
  const SweepResult dyn = contrast_map(grid, spin, beam, Engine::dynamics, cfg);
  REQUIRE(cf.values.size() == dyn.values.size());
  for (std::size_t k = 0; k < cf.values.size(); ++k) {
    // compare the implied rate enhancements (contrast ~ enhancement/total)
    const double r_cf = 1.0 - cf.values[k];
    const double r_dy = 1.0 - dyn.values[k];
    const double enh_cf = 1.0 / r_cf - 1.0;
    const double enh_dy = 1.0 / r_dy - 1.0;
    CHECK(enh_dy / enh_cf >= 0.5);
    CHECK(enh_dy / enh_cf <= 2.0);
  }
}
