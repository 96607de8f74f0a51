#include "beamspin/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "beamspin/constants.hpp"
#include "beamspin/coupling.hpp"

namespace beamspin {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

void require_keys(const json& j, const std::string& path, const std::set<std::string>& known) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known.count(key)) fail(path + "." + key, "unknown key");
  }
}

double get_number(const json& j, const std::string& path, const std::string& key,
                  double fallback, bool required = false) {
  if (!j.contains(key)) {
    if (required) fail(path + "." + key, "missing required key");
    return fallback;
  }
  if (!j[key].is_number()) fail(path + "." + key, "expected a number");
  return j[key].get<double>();
}

GridRange parse_grid(const json& j, const std::string& path, double unit_scale) {
  require_keys(j, path, {"min", "max", "n", "scale"});
  GridRange g;
  g.min = get_number(j, path, "min", 0.0, true) * unit_scale;
  g.max = get_number(j, path, "max", 0.0, true) * unit_scale;
  const double n = get_number(j, path, "n", 0.0, true);
  if (n < 1 || n != std::floor(n)) fail(path + ".n", "expected a positive integer");
  g.n = static_cast<int>(n);
  g.scale = AxisScale::linear;
  if (j.contains("scale")) {
    const std::string s = j["scale"].get<std::string>();
    if (s == "log")
      g.scale = AxisScale::log;
    else if (s != "linear")
      fail(path + ".scale", "expected 'linear' or 'log'");
  }
  if (!(g.min < g.max)) fail(path, "min must be < max");
  if (g.scale == AxisScale::log && !(g.min > 0.0)) fail(path, "log scale requires min > 0");
  return g;
}

SpinParams parse_spin(const json& j, const std::string& path) {
  require_keys(j, path,
               {"t1_ms", "gamma1_Hz", "t2_us", "gamma2_kHz", "gamma2star_MHz", "omega0_GHz",
                "readout_contrast", "baseline_counts"});
  SpinParams spin;

  const bool has_t1 = j.contains("t1_ms"), has_g1 = j.contains("gamma1_Hz");
  if (has_t1 == has_g1) fail(path, "provide exactly one of t1_ms / gamma1_Hz");
  if (has_t1) {
    const double t1 = get_number(j, path, "t1_ms", 0.0, true) * 1e-3;
    if (!(t1 > 0.0)) fail(path + ".t1_ms", "must be > 0");
    spin.gamma1 = 1.0 / (2.0 * t1);
  } else {
    spin.gamma1 = get_number(j, path, "gamma1_Hz", 0.0, true);  // direct rate, no 2*pi
  }

  const bool has_t2 = j.contains("t2_us"), has_g2 = j.contains("gamma2_kHz");
  if (has_t2 == has_g2) fail(path, "provide exactly one of t2_us / gamma2_kHz");
  if (has_t2) {
    const double t2 = get_number(j, path, "t2_us", 0.0, true) * 1e-6;
    if (!(t2 > 0.0)) fail(path + ".t2_us", "must be > 0");
    spin.gamma2 = 1.0 / t2;
  } else {
    spin.gamma2 = get_number(j, path, "gamma2_kHz", 0.0, true) * 1e3;  // direct rate
  }

  // linewidth-type quantity quoted cyclic: convert by 2*pi
  spin.gamma2_star =
      get_number(j, path, "gamma2star_MHz", 0.0, true) * 1e6 * constants::two_pi;
  spin.omega0 = get_number(j, path, "omega0_GHz", 2.87, false) * 1e9 * constants::two_pi;
  spin.readout_contrast = get_number(j, path, "readout_contrast", 0.3, false);
  spin.baseline_counts = get_number(j, path, "baseline_counts", 0.0, false);
  validate(spin);
  return spin;
}

BeamParams parse_beam(const json& j, const std::string& path, double omega0) {
  require_keys(j, path,
               {"current_uA", "bunching", "delivery_efficiency", "rho0_um",
                "modulation_offset_MHz"});
  BeamParams beam;
  beam.i0 = get_number(j, path, "current_uA", 0.0, true) * 1e-6;
  beam.bunching = get_number(j, path, "bunching", 1.0, false);
  beam.delivery_efficiency = get_number(j, path, "delivery_efficiency", 1.0, false);
  beam.rho0 = get_number(j, path, "rho0_um", 10.0, false) * 1e-6;
  beam.omega_i =
      omega0 + get_number(j, path, "modulation_offset_MHz", 0.0, false) * 1e6 * constants::two_pi;
  validate(beam);
  return beam;
}

EnsembleConfig parse_ensemble(const json& j, const std::string& path) {
  require_keys(j, path, {"method", "n_nodes", "seed"});
  EnsembleConfig cfg;
  if (j.contains("method")) {
    const std::string m = j["method"].get<std::string>();
    if (m == "gauss-hermite")
      cfg.method = EnsembleMethod::gauss_hermite;
    else if (m == "monte-carlo")
      cfg.method = EnsembleMethod::monte_carlo;
    else
      fail(path + ".method", "expected 'gauss-hermite' or 'monte-carlo'");
  }
  const double n = get_number(j, path, "n_nodes", 64.0, false);
  if (n < 1 || n != std::floor(n)) fail(path + ".n_nodes", "expected a positive integer");
  cfg.n_nodes = static_cast<int>(n);
  if (cfg.method == EnsembleMethod::gauss_hermite && cfg.n_nodes > 512)
    fail(path + ".n_nodes", "gauss-hermite supports at most 512 nodes");
  const double seed = get_number(j, path, "seed", 0.0, false);
  if (seed < 0 || seed != std::floor(seed)) fail(path + ".seed", "expected a non-negative integer");
  cfg.seed = static_cast<std::uint64_t>(seed);
  return cfg;
}

SequenceSpec parse_sequence(const json& j, const std::string& path, const RunConfig& rc) {
  require_keys(j, path,
               {"kind", "tau_grid_ms", "time_grid_us", "drive", "mw_rabi_MHz",
                "frequency_offset_grid_MHz", "pulse_length_us", "zeeman_split_MHz"});
  SequenceSpec spec;
  if (!j.contains("kind")) fail(path + ".kind", "missing required key");
  const std::string kind = j["kind"].get<std::string>();

  const double beam_omega = rabi_frequency(rc.beam);
  const double beam_delta = rc.beam.omega_i - rc.spin.omega0;

  if (kind == "relaxometry") {
    spec.kind = SequenceKind::relaxometry;
    if (!j.contains("tau_grid_ms")) fail(path + ".tau_grid_ms", "missing required key");
    spec.grid = parse_grid(j["tau_grid_ms"], path + ".tau_grid_ms", 1e-3).points();
    spec.beam_rabi = beam_omega;
    spec.beam_detuning = beam_delta;
  } else if (kind == "rabi") {
    spec.kind = SequenceKind::rabi;
    if (!j.contains("time_grid_us")) fail(path + ".time_grid_us", "missing required key");
    spec.grid = parse_grid(j["time_grid_us"], path + ".time_grid_us", 1e-6).points();
    std::string drive = "beam";
    if (j.contains("drive")) drive = j["drive"].get<std::string>();
    if (drive == "beam") {
      spec.beam_rabi = beam_omega;
      spec.beam_detuning = beam_delta;
    } else if (drive == "mw") {
      spec.mw_rabi =
          get_number(j, path, "mw_rabi_MHz", 0.0, true) * 1e6 * constants::two_pi;
    } else {
      fail(path + ".drive", "expected 'beam' or 'mw'");
    }
  } else if (kind == "odmr") {
    spec.kind = SequenceKind::odmr;
    if (!j.contains("frequency_offset_grid_MHz"))
      fail(path + ".frequency_offset_grid_MHz", "missing required key");
    const GridRange g = parse_grid(j["frequency_offset_grid_MHz"],
                                   path + ".frequency_offset_grid_MHz",
                                   1e6 * constants::two_pi);
    for (const double off : g.points()) spec.grid.push_back(rc.spin.omega0 + off);
    spec.mw_rabi = get_number(j, path, "mw_rabi_MHz", 0.0, true) * 1e6 * constants::two_pi;
    spec.odmr_pulse_length = get_number(j, path, "pulse_length_us", 0.0, true) * 1e-6;
    const double zs = get_number(j, path, "zeeman_split_MHz", 0.0, false);
    if (zs < 0.0) fail(path + ".zeeman_split_MHz", "must be >= 0");
    if (zs > 0.0) {
      const double off = zs * 1e6 * constants::two_pi;
      spec.zeeman_split = {+off, -off};
    }
  } else if (kind == "hahn-echo") {
    spec.kind = SequenceKind::hahn_echo;
    if (!j.contains("tau_grid_ms")) fail(path + ".tau_grid_ms", "missing required key");
    spec.grid = parse_grid(j["tau_grid_ms"], path + ".tau_grid_ms", 1e-3).points();
  } else {
    fail(path + ".kind", "expected rabi | relaxometry | odmr | hahn-echo");
  }
  return spec;
}

SweepSpec parse_sweep(const json& j, const std::string& path) {
  require_keys(j, path,
               {"kind", "gamma2star_grid_MHz", "gamma2_grid_kHz", "currents_grid_uA",
                "configs"});
  SweepSpec spec;
  if (!j.contains("kind")) fail(path + ".kind", "missing required key");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "contrast_map") {
    spec.kind = SweepKind::contrast_map;
    if (!j.contains("gamma2star_grid_MHz") || !j.contains("gamma2_grid_kHz"))
      fail(path, "contrast_map needs gamma2star_grid_MHz and gamma2_grid_kHz");
    spec.gamma2star_grid = parse_grid(j["gamma2star_grid_MHz"], path + ".gamma2star_grid_MHz",
                                      1e6 * constants::two_pi);
    spec.gamma2_grid = parse_grid(j["gamma2_grid_kHz"], path + ".gamma2_grid_kHz", 1e3);
  } else if (kind == "reduction_curves") {
    spec.kind = SweepKind::reduction_curves;
    if (!j.contains("currents_grid_uA") || !j.contains("configs"))
      fail(path, "reduction_curves needs currents_grid_uA and configs");
    spec.currents = parse_grid(j["currents_grid_uA"], path + ".currents_grid_uA", 1e-6);
    if (!j["configs"].is_array() || j["configs"].empty())
      fail(path + ".configs", "expected a non-empty array");
    int idx = 0;
    for (const auto& cj : j["configs"]) {
      const std::string cpath = path + ".configs[" + std::to_string(idx++) + "]";
      require_keys(cj, cpath, {"label", "rho0_um", "gamma2star_MHz"});
      CurveConfig cc;
      if (!cj.contains("label")) fail(cpath + ".label", "missing required key");
      cc.label = cj["label"].get<std::string>();
      cc.rho0 = get_number(cj, cpath, "rho0_um", 10.0, true) * 1e-6;
      cc.gamma2_star =
          get_number(cj, cpath, "gamma2star_MHz", 0.0, true) * 1e6 * constants::two_pi;
      spec.configs.push_back(std::move(cc));
    }
  } else {
    fail(path + ".kind", "expected contrast_map | reduction_curves");
  }
  return spec;
}

} // namespace

std::vector<double> GridRange::points() const {
  Axis a;
  a.min = min;
  a.max = max;
  a.n = n;
  a.scale = scale;
  if (n == 1) return {min};
  return a.points();
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": JSON parse error: " + e.what());
  }

  require_keys(j, "$",
               {"spin", "beam", "ensemble", "engine", "shots", "apply_readout", "sequence",
                "sweep", "output_prefix"});

  RunConfig rc;
  if (!j.contains("spin")) fail("$.spin", "missing required section");
  try {
    rc.spin = parse_spin(j["spin"], "$.spin");
    if (j.contains("beam")) rc.beam = parse_beam(j["beam"], "$.beam", rc.spin.omega0);
    if (j.contains("ensemble")) rc.ensemble = parse_ensemble(j["ensemble"], "$.ensemble");
  } catch (const std::domain_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }

  if (j.contains("engine")) {
    const std::string e = j["engine"].get<std::string>();
    if (e == "closed-form")
      rc.engine = Engine::closed_form;
    else if (e == "dynamics")
      rc.engine = Engine::dynamics;
    else
      fail("$.engine", "expected 'closed-form' or 'dynamics'");
  }
  const double shots = get_number(j, "$", "shots", 0.0, false);
  if (shots < 0 || shots != std::floor(shots)) fail("$.shots", "expected a non-negative integer");
  rc.shots = static_cast<std::int64_t>(shots);
  if (j.contains("apply_readout")) {
    if (!j["apply_readout"].is_boolean()) fail("$.apply_readout", "expected a boolean");
    rc.apply_readout = j["apply_readout"].get<bool>();
  }
  if (j.contains("output_prefix")) rc.output_prefix = j["output_prefix"].get<std::string>();

  if (j.contains("sequence")) rc.sequence = parse_sequence(j["sequence"], "$.sequence", rc);
  if (j.contains("sweep")) rc.sweep = parse_sweep(j["sweep"], "$.sweep");

  // canonical text: sorted-key dump plus the derived seed/engine knobs
  rc.canonical = j.dump();
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str(), path);
}

} // namespace beamspin
