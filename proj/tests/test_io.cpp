#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "beamspin/config.hpp"
#include "beamspin/constants.hpp"
#include "beamspin/csv.hpp"
#include "beamspin/svg.hpp"

using namespace beamspin;

TEST_CASE("csv round trip preserves cells and comments") {
  CsvTable table;
  table.comments = {"beamspin 0.1.0", "config_hash deadbeef"};
  table.names = {"t", "z"};
  table.units = {"s", "-"};
  table.rows = {{format_cell(1.25e-3), format_cell(0.9999999999999999)},
                {format_cell(2.5e-3), format_cell(-1.0 / 3.0)}};

  std::stringstream ss;
  write_csv(ss, table);
  const CsvTable back = read_csv(ss);
  CHECK(back.comments == table.comments);
  CHECK(back.names == table.names);
  CHECK(back.units == table.units);
  CHECK(back.rows == table.rows);

  const auto z = back.numeric_column("z");
  CHECK(z[1] == -1.0 / 3.0);  // %.17g exact round trip
}

TEST_CASE("csv errors carry context") {
  std::stringstream bad("setting,mean\ns,-\n1.0\n");
  CHECK_THROWS_WITH_AS(read_csv(bad), doctest::Contains("row 3"), std::runtime_error);

  std::stringstream empty("# only a comment\n");
  CHECK_THROWS_AS(read_csv(empty), std::runtime_error);

  CsvTable table;
  table.names = {"a"};
  table.units = {"-"};
  table.rows = {{"xyz"}};
  std::stringstream ss;
  write_csv(ss, table);
  const CsvTable back = read_csv(ss);
  CHECK_THROWS_AS(back.numeric_column("a"), std::runtime_error);
  CHECK_THROWS_AS(back.numeric_column("missing"), std::runtime_error);
}

TEST_CASE("config parsing converts units and rejects unknown keys") {
  const std::string text = R"({
    "spin": {"t1_ms": 5.0, "t2_us": 100.0, "gamma2star_MHz": 1.9},
    "beam": {"current_uA": 16.0, "rho0_um": 10.0},
    "ensemble": {"method": "gauss-hermite", "n_nodes": 64, "seed": 7},
    "engine": "closed-form",
    "sequence": {"kind": "relaxometry",
                 "tau_grid_ms": {"min": 0.1, "max": 15.0, "n": 20, "scale": "log"}},
    "output_prefix": "demo"
  })";
  const RunConfig rc = parse_config_text(text, "inline");
  CHECK(rc.spin.gamma1 == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(rc.spin.gamma2 == doctest::Approx(1e4).epsilon(1e-12));
  CHECK(rc.spin.gamma2_star ==
        doctest::Approx(constants::two_pi * 1.9e6).epsilon(1e-12));
  CHECK(rc.beam.i0 == doctest::Approx(16e-6).epsilon(1e-12));
  CHECK(rc.beam.rho0 == doctest::Approx(10e-6).epsilon(1e-12));
  CHECK(rc.ensemble.seed == 7);
  REQUIRE(rc.sequence.has_value());
  CHECK(rc.sequence->kind == SequenceKind::relaxometry);
  CHECK(rc.sequence->grid.size() == 20);
  CHECK(rc.sequence->grid.front() == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(rc.sequence->beam_rabi == doctest::Approx(5.63e4).epsilon(2e-3));
  CHECK(rc.output_prefix == "demo");

  // unknown key
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"spin": {"t1_ms": 5, "t2_us": 1, "gamma2star_MHz": 1,
                                     "t1_msx": 2}})",
                        "inline"),
      doctest::Contains("t1_msx"), ConfigError);

  // both time and rate forms
  CHECK_THROWS_AS(
      parse_config_text(R"({"spin": {"t1_ms": 5, "gamma1_Hz": 100, "t2_us": 1,
                                     "gamma2star_MHz": 1}})",
                        "inline"),
      ConfigError);

  // rate forms are direct rates (no 2*pi)
  const RunConfig rates = parse_config_text(
      R"({"spin": {"gamma1_Hz": 87.7, "gamma2_kHz": 94.3, "gamma2star_MHz": 12.0}})",
      "inline");
  CHECK(rates.spin.gamma1 == doctest::Approx(87.7).epsilon(1e-12));
  CHECK(rates.spin.gamma2 == doctest::Approx(9.43e4).epsilon(1e-12));

  // malformed JSON
  CHECK_THROWS_AS(parse_config_text("{", "inline"), ConfigError);
  // missing spin section
  CHECK_THROWS_AS(parse_config_text("{}", "inline"), ConfigError);
}

TEST_CASE("svg emitters produce minimal documents") {
  LineSeries s;
  s.label = "decay";
  for (int i = 0; i < 20; ++i) {
    s.x.push_back(1e-3 * (i + 1));
    s.y.push_back(std::exp(-0.2 * i));
  }
  PlotOptions opt;
  opt.title = "test";
  opt.x_label = "time [s]";
  opt.y_label = "signal";
  opt.timestamp = false;

  std::stringstream ss;
  write_svg_lines(ss, std::span(&s, 1), opt);
  const std::string svg = ss.str();
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("generated") == std::string::npos);

  PlotOptions stamped = opt;
  stamped.timestamp = true;
  std::stringstream ss2;
  write_svg_lines(ss2, std::span(&s, 1), stamped);
  CHECK(ss2.str().find("generated") != std::string::npos);

  SweepResult sweep;
  sweep.axis1 = {1.0, 10.0, 100.0};
  sweep.axis2 = {1.0, 10.0};
  sweep.values = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::stringstream ss3;
  write_svg_heatmap(ss3, sweep, opt);
  CHECK(ss3.str().find("<rect") != std::string::npos);
}

TEST_CASE("fnv1a hash is stable") {
  CHECK(config_hash_hex("abc") == config_hash_hex("abc"));
  CHECK(config_hash_hex("abc") != config_hash_hex("abd"));
  CHECK(config_hash_hex("abc").size() == 16);
}
