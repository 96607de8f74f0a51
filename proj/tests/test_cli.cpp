#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "beamspin/csv.hpp"
#include "beamspin/spectra.hpp"

using namespace beamspin;
namespace fs = std::filesystem;

namespace {

const std::string cli = BEAMSPIN_CLI_PATH;
const std::string config_dir = BEAMSPIN_CONFIG_DIR;

int run(const std::string& args) {
  const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("beamspin_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

} // namespace

TEST_CASE("simulate + fit round trip reproduces the configured T1") {
  const fs::path dir = fresh_dir("roundtrip");
  const std::string cfg = R"({
    "spin": {"t1_ms": 5.0, "t2_us": 100.0, "gamma2star_MHz": 1.9},
    "beam": {"current_uA": 0.0, "rho0_um": 10.0},
    "sequence": {"kind": "relaxometry",
                 "tau_grid_ms": {"min": 0.5, "max": 15.0, "n": 25, "scale": "log"}},
    "output_prefix": "off"
  })";
  write_file(dir / "off.json", cfg);

  REQUIRE(run("--config " + (dir / "off.json").string() + " --out " + dir.string() +
              " simulate") == 0);
  REQUIRE(run("--input " + (dir / "off_data.csv").string() + " --out " + dir.string() +
              " fit --model exponential") == 0);

  const CsvTable fit = read_csv_file((dir / "off_data_fit.csv").string());
  const auto values = fit.numeric_column("value");
  REQUIRE(fit.rows.size() >= 2);
  CHECK(fit.rows[1][0] == "T");
  CHECK(values[1] == doctest::Approx(5e-3).epsilon(1e-6));
}

TEST_CASE("the shipped 16 uA example reproduces the ~1.5 ms prediction") {
  const fs::path dir = fresh_dir("fig1c");
  REQUIRE(run("--config " + config_dir + "/beam_16uA_closed_form.json --out " +
              dir.string() + " simulate") == 0);
  REQUIRE(run("--input " + (dir / "beam16_data.csv").string() + " --out " + dir.string() +
              " fit --model exponential") == 0);
  const CsvTable fit = read_csv_file((dir / "beam16_data_fit.csv").string());
  const auto values = fit.numeric_column("value");
  CHECK(fit.rows[1][0] == "T");
  CHECK(values[1] == doctest::Approx(1.49e-3).epsilon(0.05));
}

TEST_CASE("outputs are byte-identical across reruns") {
  const fs::path dir1 = fresh_dir("det1");
  const fs::path dir2 = fresh_dir("det2");
  const std::string cfg = R"({
    "spin": {"t1_ms": 5.0, "t2_us": 100.0, "gamma2star_MHz": 1.9},
    "beam": {"current_uA": 16.0, "rho0_um": 10.0},
    "ensemble": {"method": "monte-carlo", "n_nodes": 400, "seed": 11},
    "engine": "dynamics",
    "shots": 5000,
    "sequence": {"kind": "relaxometry",
                 "tau_grid_ms": {"min": 0.1, "max": 10.0, "n": 15, "scale": "log"}},
    "output_prefix": "det"
  })";
  write_file(dir1 / "det.json", cfg);

  for (const fs::path& d : {dir1, dir2}) {
    REQUIRE(run("--config " + (dir1 / "det.json").string() + " --out " + d.string() +
                " --svg --no-timestamp simulate") == 0);
  }
  CHECK(slurp(dir1 / "det_data.csv") == slurp(dir2 / "det_data.csv"));
  CHECK(slurp(dir1 / "det_data.svg") == slurp(dir2 / "det_data.svg"));
  CHECK(slurp(dir1 / "det_data.csv").find("# config_hash ") != std::string::npos);
}

TEST_CASE("bad config exits with the input-error code and a key diagnostic") {
  const fs::path dir = fresh_dir("badcfg");
  write_file(dir / "bad.json", R"({"spin": {"t1_ms": 5, "t2_us": 1,
    "gamma2star_MHz": 1, "mystery_knob": 3}})");
  const std::string cmd = cli + " --config " + (dir / "bad.json").string() +
                          " simulate 2> " + (dir / "err.txt").string();
  const int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(slurp(dir / "err.txt").find("mystery_knob") != std::string::npos);

  write_file(dir / "nonjson.json", "not json at all");
  CHECK(run("--config " + (dir / "nonjson.json").string() + " simulate") == 2);
}

TEST_CASE("bound command reports the coupling limit and exit code") {
  const fs::path dir = fresh_dir("bound");
  const std::string spin_cfg = R"({
    "spin": {"gamma1_Hz": 87.7, "gamma2_kHz": 94.3, "gamma2star_MHz": 12.0},
    "beam": {"current_uA": 3.0, "rho0_um": 10.0},
    "output_prefix": "bound"
  })";
  write_file(dir / "spin.json", spin_cfg);

  auto fit_csv = [](double t, double err) {
    CsvTable tab;
    tab.comments = {"beamspin 0.1.0", "model exponential", "converged true"};
    tab.names = {"param", "value", "std_error"};
    tab.units = {"-", "si", "si"};
    tab.rows = {{"A", "1.0", "0.001"},
                {"T", format_cell(t), format_cell(err)}};
    return tab;
  };
  write_csv_file((dir / "beam_fit.csv").string(), fit_csv(4.0e-3, 0.4e-3));
  write_csv_file((dir / "ref_fit.csv").string(), fit_csv(5.0e-3, 0.25e-3));

  REQUIRE(run("--config " + (dir / "spin.json").string() + " --out " + dir.string() +
              " bound --fit-beam " + (dir / "beam_fit.csv").string() + " --fit-ref " +
              (dir / "ref_fit.csv").string()) == 0);
  const CsvTable out = read_csv_file((dir / "bound_bound.csv").string());
  CHECK(out.numeric_column("ratio")[0] == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(out.numeric_column("omega_max")[0] > 0.0);

  // beam fit slower than reference: CI lower bound >= 1, not constraining
  write_csv_file((dir / "beam_hi.csv").string(), fit_csv(6.0e-3, 0.01e-3));
  CHECK(run("--config " + (dir / "spin.json").string() + " --out " + dir.string() +
            " bound --fit-beam " + (dir / "beam_hi.csv").string() + " --fit-ref " +
            (dir / "ref_fit.csv").string()) == 4);
}

TEST_CASE("decompose command unmixes synthetic spectra") {
  const fs::path dir = fresh_dir("decompose");

  std::vector<double> grid(351);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 500.0 + i;
  const Spectrum rm = synthesize_reference(SpectrumKind::reference_nv_minus, grid);
  const Spectrum rz = synthesize_reference(SpectrumKind::reference_nv_zero, grid);

  auto spectrum_csv = [&](const Spectrum& s, double current) {
    CsvTable tab;
    tab.comments = {"current_uA " + format_cell(current)};
    tab.names = {"wavelength_nm", "intensity"};
    tab.units = {"nm", "au"};
    for (std::size_t i = 0; i < s.wavelengths_nm.size(); ++i)
      tab.rows.push_back({format_cell(s.wavelengths_nm[i]), format_cell(s.intensities[i])});
    return tab;
  };

  for (int k = 0; k < 3; ++k) {
    const double fm = 0.8 - 0.25 * k;
    Spectrum mixture = rm;
    mixture.kind = SpectrumKind::pl_cl;
    for (std::size_t i = 0; i < grid.size(); ++i)
      mixture.intensities[i] =
          fm * rm.intensities[i] + (1.0 - fm) * rz.intensities[i] + 0.005;
    write_csv_file((dir / ("t" + std::to_string(k) + ".csv")).string(),
                   spectrum_csv(mixture, 0.5 * (k + 1)));
  }

  REQUIRE(run("--out " + dir.string() + " decompose --synthetic-refs --target " +
              (dir / "t0.csv").string() + " --target " + (dir / "t1.csv").string() +
              " --target " + (dir / "t2.csv").string()) == 0);
  const CsvTable out = read_csv_file((dir / "weights.csv").string());
  const auto fractions = out.numeric_column("fraction_minus");
  REQUIRE(fractions.size() == 3);
  CHECK(fractions[0] == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(fractions[1] == doctest::Approx(0.55).epsilon(1e-6));
  CHECK(fractions[2] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(fractions[0] > fractions[1]);
  CHECK(fractions[1] > fractions[2]);
}

TEST_CASE("sweep command emits map, curves, meta, and svg") {
  const fs::path dir = fresh_dir("sweep");
  const std::string map_cfg = R"({
    "spin": {"t1_ms": 5.0, "t2_us": 10.6, "gamma2star_MHz": 12.0},
    "beam": {"current_uA": 10.0, "rho0_um": 10.0},
    "sweep": {"kind": "contrast_map",
              "gamma2star_grid_MHz": {"min": 0.1, "max": 100.0, "n": 20, "scale": "log"},
              "gamma2_grid_kHz": {"min": 1.0, "max": 1000.0, "n": 15, "scale": "log"}},
    "output_prefix": "map"
  })";
  write_file(dir / "map.json", map_cfg);
  REQUIRE(run("--config " + (dir / "map.json").string() + " --out " + dir.string() +
              " --svg --no-timestamp sweep") == 0);
  CHECK(fs::exists(dir / "map_map.csv"));
  CHECK(fs::exists(dir / "map_map.meta.txt"));
  CHECK(fs::exists(dir / "map_map.svg"));
  const CsvTable map = read_csv_file((dir / "map_map.csv").string());
  CHECK(map.rows.size() == 300);

  const std::string curves_cfg = R"({
    "spin": {"t1_ms": 5.0, "t2_us": 10.0, "gamma2star_MHz": 12.0},
    "beam": {"current_uA": 10.0, "rho0_um": 10.0},
    "sweep": {"kind": "reduction_curves",
              "currents_grid_uA": {"min": 0.01, "max": 1000.0, "n": 40, "scale": "log"},
              "configs": [
                {"label": "current system", "rho0_um": 10.0, "gamma2star_MHz": 12.0},
                {"label": "improved", "rho0_um": 1.0, "gamma2star_MHz": 1.2}
              ]},
    "output_prefix": "curves"
  })";
  write_file(dir / "curves.json", curves_cfg);
  REQUIRE(run("--config " + (dir / "curves.json").string() + " --out " + dir.string() +
              " --svg --no-timestamp sweep") == 0);
  const CsvTable curves = read_csv_file((dir / "curves_curves.csv").string());
  CHECK(curves.rows.size() == 80);

  // determinism of the sweep outputs
  const fs::path dir2 = fresh_dir("sweep2");
  REQUIRE(run("--config " + (dir / "map.json").string() + " --out " + dir2.string() +
              " --svg --no-timestamp sweep") == 0);
  CHECK(slurp(dir / "map_map.csv") == slurp(dir2 / "map_map.csv"));
  CHECK(slurp(dir / "map_map.meta.txt") == slurp(dir2 / "map_map.meta.txt"));
}
