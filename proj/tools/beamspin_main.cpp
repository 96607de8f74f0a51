// beamspin: simulate, fit, decompose, bound, and sweep for spin-qubit
// relaxometry under a modulated electron beam.

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beamspin/closed_form.hpp"
#include "beamspin/config.hpp"
#include "beamspin/coupling.hpp"
#include "beamspin/csv.hpp"
#include "beamspin/fitting.hpp"
#include "beamspin/parallel.hpp"
#include "beamspin/spectra.hpp"
#include "beamspin/svg.hpp"
#include "beamspin/sweeps.hpp"

namespace fs = std::filesystem;
using namespace beamspin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNotConstraining = 4;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  bool svg = false;
  bool no_timestamp = false;
};

RunConfig load_run_config(const GlobalOptions& g) {
  if (g.config_path.empty()) throw ConfigError("missing --config");
  RunConfig rc = load_config(g.config_path);
  if (g.seed) rc.ensemble.seed = *g.seed;
  if (g.engine) {
    if (*g.engine == "closed-form")
      rc.engine = Engine::closed_form;
    else if (*g.engine == "dynamics")
      rc.engine = Engine::dynamics;
    else
      throw ConfigError("--engine must be 'closed-form' or 'dynamics'");
  }
  rc.canonical += "|seed=" + std::to_string(rc.ensemble.seed);
  rc.canonical += rc.engine == Engine::dynamics ? "|dynamics" : "|closed-form";
  return rc;
}

std::vector<std::string> header_comments(const RunConfig& rc, const std::string& kind) {
  return {std::string("beamspin ") + kVersion, "config_hash " + config_hash_hex(rc.canonical),
          "seed " + std::to_string(rc.ensemble.seed),
          std::string("engine ") + (rc.engine == Engine::dynamics ? "dynamics" : "closed-form"),
          "kind " + kind};
}

std::string out_path(const GlobalOptions& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

const char* sequence_kind_name(SequenceKind k) {
  switch (k) {
    case SequenceKind::rabi: return "rabi";
    case SequenceKind::relaxometry: return "relaxometry";
    case SequenceKind::odmr: return "odmr";
    case SequenceKind::hahn_echo: return "hahn-echo";
  }
  return "?";
}

// ---- simulate ----------------------------------------------------------------

int cmd_simulate(const GlobalOptions& g) {
  const RunConfig rc = load_run_config(g);
  if (!rc.sequence) throw ConfigError("simulate: config has no 'sequence' section");
  const SequenceSpec& spec = *rc.sequence;
  for (const std::string& w : validate(rc.spin)) std::cerr << "warning: " << w << "\n";

  std::optional<ReadoutMap> readout;
  if (rc.apply_readout)
    readout = ReadoutMap{rc.spin.baseline_counts, rc.spin.readout_contrast};

  std::vector<CountsRecord> records;
  std::string engine_note;
  if (rc.engine == Engine::closed_form && spec.kind == SequenceKind::relaxometry) {
    // analytic exponential at the enhanced relaxation rate
    const double rate = beam_relaxation_rate(rc.spin, spec.beam_rabi, spec.beam_detuning);
    records.resize(spec.grid.size());
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
      records[i].setting = spec.grid[i];
      const double z = std::exp(-2.0 * rate * spec.grid[i]);
      records[i].mean_signal = readout ? (*readout)(z) : z;
    }
    char note[96];
    std::snprintf(note, sizeof note, "t1_beam_ms %.17g", 1e3 / (2.0 * rate));
    engine_note = note;
  } else {
    records = run_sequence(rc.spin, spec, rc.ensemble, readout, default_workers());
  }
  if (rc.shots > 0) records = apply_shot_noise(records, rc.shots, rc.ensemble.seed);

  CsvTable table;
  table.comments = header_comments(rc, sequence_kind_name(spec.kind));
  if (!engine_note.empty()) table.comments.push_back(engine_note);
  const bool freq = spec.kind == SequenceKind::odmr;
  table.names = {"setting", "mean_signal", "counts", "shots"};
  table.units = {freq ? "rad_s" : "s", "dimensionless", "photons", "count"};
  for (const auto& r : records)
    table.rows.push_back({format_cell(r.setting), format_cell(r.mean_signal),
                          std::to_string(r.counts), std::to_string(r.shots)});
  const std::string csv_path = out_path(g, rc.output_prefix + "_data.csv");
  write_csv_file(csv_path, table);
  std::cout << "wrote " << csv_path << "\n";

  if (g.svg) {
    LineSeries s;
    s.label = sequence_kind_name(spec.kind);
    for (const auto& r : records) {
      s.x.push_back(r.setting);
      s.y.push_back(rc.shots > 0 ? static_cast<double>(r.counts) / rc.shots : r.mean_signal);
    }
    PlotOptions opt;
    opt.title = rc.output_prefix;
    opt.x_label = freq ? "frequency [rad/s]" : "time [s]";
    opt.y_label = rc.shots > 0 ? "counts/shot" : "signal";
    opt.timestamp = !g.no_timestamp;
    std::ofstream f(out_path(g, rc.output_prefix + "_data.svg"), std::ios::binary);
    write_svg_lines(f, std::span(&s, 1), opt);
  }
  return kExitOk;
}

// ---- fit ---------------------------------------------------------------------

std::vector<CountsRecord> records_from_table(const CsvTable& table) {
  std::vector<CountsRecord> records;
  const std::vector<double> setting = table.numeric_column("setting");
  std::vector<double> mean(setting.size(), 0.0), counts(setting.size(), 0.0),
      shots(setting.size(), 0.0);
  if (table.column("mean_signal") >= 0) mean = table.numeric_column("mean_signal");
  if (table.column("counts") >= 0) counts = table.numeric_column("counts");
  if (table.column("shots") >= 0) shots = table.numeric_column("shots");
  records.resize(setting.size());
  for (std::size_t i = 0; i < setting.size(); ++i) {
    records[i].setting = setting[i];
    records[i].mean_signal = mean[i];
    records[i].counts = static_cast<std::int64_t>(counts[i]);
    records[i].shots = static_cast<std::int64_t>(shots[i]);
  }
  return records;
}

void print_fit_report(const FitResult& fit, const std::string& time_like) {
  std::cout << (fit.converged ? "converged" : "NOT CONVERGED") << " after " << fit.n_iter
            << " iterations, residual rms " << fit.residual_rms << "\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const std::string& name = fit.names[i];
    std::string rendered;
    if (name == time_like) {
      // display decay times in a readable unit
      const double v = fit.params[i];
      if (v < 1e-3)
        rendered = format_value_uncertainty(v * 1e6, fit.std_errors[i] * 1e6, "us");
      else if (v < 1.0)
        rendered = format_value_uncertainty(v * 1e3, fit.std_errors[i] * 1e3, "ms");
      else
        rendered = format_value_uncertainty(v, fit.std_errors[i], "s");
    } else {
      rendered = format_value_uncertainty(fit.params[i], fit.std_errors[i], "");
    }
    std::printf("  %-8s = %s\n", name.c_str(), rendered.c_str());
  }
}

int cmd_fit(const GlobalOptions& g, const std::string& input, const std::string& model) {
  const CsvTable table = read_csv_file(input);
  const std::vector<CountsRecord> records = records_from_table(table);

  FitResult fit;
  if (model == "exponential") {
    fit = fit_exponential(records);
  } else if (model == "gaussian") {
    fit = fit_lineshape(records, LineModel::gaussian);
  } else if (model == "lorentzian") {
    fit = fit_lineshape(records, LineModel::lorentzian);
  } else if (model == "voigt") {
    fit = fit_lineshape(records, LineModel::voigt);
  } else {
    throw ConfigError("--model must be exponential | gaussian | lorentzian | voigt");
  }

  print_fit_report(fit, model == "exponential" ? "T" : "");

  CsvTable out;
  out.comments = {std::string("beamspin ") + kVersion, "model " + model,
                  std::string("converged ") + (fit.converged ? "true" : "false"),
                  "residual_rms " + format_cell(fit.residual_rms),
                  "n_iter " + std::to_string(fit.n_iter)};
  out.names = {"param", "value", "std_error"};
  out.units = {"-", "si", "si"};
  for (std::size_t i = 0; i < fit.names.size(); ++i)
    out.rows.push_back(
        {fit.names[i], format_cell(fit.params[i]), format_cell(fit.std_errors[i])});
  const std::string stem = fs::path(input).stem().string();
  const std::string path = out_path(g, stem + "_fit.csv");
  write_csv_file(path, out);
  std::cout << "wrote " << path << "\n";
  return fit.converged ? kExitOk : kExitNumerical;
}

// ---- bound -------------------------------------------------------------------

FitResult fit_from_csv(const std::string& path) {
  const CsvTable table = read_csv_file(path);
  FitResult fit;
  const int pc = table.column("param");
  if (pc < 0) throw std::runtime_error(path + ": not a fit table (no 'param' column)");
  const std::vector<double> values = table.numeric_column("value");
  const std::vector<double> errors = table.numeric_column("std_error");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    fit.names.push_back(table.rows[i][pc]);
    fit.params.push_back(values[i]);
    fit.std_errors.push_back(errors[i]);
  }
  fit.converged = false;
  for (const std::string& c : table.comments)
    if (c == "converged true") fit.converged = true;
  return fit;
}

int cmd_bound(const GlobalOptions& g, const std::string& beam_fit_path,
              const std::string& ref_fit_path, const std::string& method_name) {
  const RunConfig rc = load_run_config(g);
  const FitResult fit_beam = fit_from_csv(beam_fit_path);
  const FitResult fit_ref = fit_from_csv(ref_fit_path);
  const CiMethod method = method_name == "bootstrap" ? CiMethod::parametric_bootstrap
                                                     : CiMethod::delta_method;
  const RatioEstimate ratio = estimate_ratio(fit_beam, fit_ref, method, rc.ensemble.seed);
  const CouplingBound bound = coupling_bound_pipeline(ratio, rc.spin, rc.beam.rho0);

  std::printf("T_beam/T_ref = %.6g  (95%% CI [%.6g, %.6g], %s)\n", ratio.ratio, ratio.ci_lower,
              ratio.ci_upper, method_name.c_str());
  if (bound.constraining) {
    std::printf("omega_max = %.6g rad/s\n", bound.omega_max);
    std::printf("i_res_max = %.6g uA at rho0 = %.6g um\n", bound.i_res_max * 1e6,
                rc.beam.rho0 * 1e6);
  } else {
    std::printf("bound: not constraining (CI lower bound >= 1)\n");
  }

  CsvTable out;
  out.comments = header_comments(rc, "bound");
  out.comments.push_back("method " + method_name);
  out.names = {"ratio", "ci_lower", "ci_upper", "constraining", "omega_max", "i_res_max"};
  out.units = {"-", "-", "-", "-", "rad_s", "A"};
  out.rows.push_back({format_cell(ratio.ratio), format_cell(ratio.ci_lower),
                      format_cell(ratio.ci_upper), bound.constraining ? "1" : "0",
                      format_cell(bound.omega_max), format_cell(bound.i_res_max)});
  const std::string path = out_path(g, rc.output_prefix + "_bound.csv");
  write_csv_file(path, out);
  std::cout << "wrote " << path << "\n";
  return bound.constraining ? kExitOk : kExitNotConstraining;
}

// ---- decompose -----------------------------------------------------------------

Spectrum spectrum_from_csv(const std::string& path, SpectrumKind kind) {
  const CsvTable table = read_csv_file(path);
  Spectrum s;
  s.kind = kind;
  s.wavelengths_nm = table.numeric_column("wavelength_nm");
  s.intensities = table.numeric_column("intensity");
  validate(s);
  return s;
}

double current_from_comments(const CsvTable& table, double fallback) {
  for (const std::string& c : table.comments) {
    if (c.rfind("current_uA ", 0) == 0) return std::strtod(c.c_str() + 11, nullptr);
  }
  return fallback;
}

int cmd_decompose(const GlobalOptions& g, const std::vector<std::string>& targets,
                  const std::string& ref_minus_path, const std::string& ref_zero_path,
                  bool synthetic_refs) {
  if (targets.empty()) throw ConfigError("decompose: provide at least one --target");

  std::vector<std::pair<double, Spectrum>> series;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const CsvTable table = read_csv_file(targets[i]);
    Spectrum s;
    s.kind = SpectrumKind::cl;
    s.wavelengths_nm = table.numeric_column("wavelength_nm");
    s.intensities = table.numeric_column("intensity");
    validate(s);
    series.emplace_back(current_from_comments(table, static_cast<double>(i)), std::move(s));
  }

  Spectrum ref_minus, ref_zero;
  if (synthetic_refs) {
    ref_minus = synthesize_reference(SpectrumKind::reference_nv_minus,
                                     series.front().second.wavelengths_nm);
    ref_zero = synthesize_reference(SpectrumKind::reference_nv_zero,
                                    series.front().second.wavelengths_nm);
  } else {
    if (ref_minus_path.empty() || ref_zero_path.empty())
      throw ConfigError("decompose: provide --ref-minus and --ref-zero, or --synthetic-refs");
    ref_minus = spectrum_from_csv(ref_minus_path, SpectrumKind::reference_nv_minus);
    ref_zero = spectrum_from_csv(ref_zero_path, SpectrumKind::reference_nv_zero);
  }

  const std::vector<WeightsRow> rows = weights_vs_current(series, ref_minus, ref_zero);

  CsvTable out;
  out.comments = {std::string("beamspin ") + kVersion, "kind decompose"};
  out.names = {"current_uA", "fraction_minus", "w_minus", "w_zero", "baseline", "residual_rms"};
  out.units = {"uA", "-", "-", "-", "-", "-"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const WeightsRow& r = rows[i];
    if (!r.ok) {
      out.comments.push_back("row " + std::to_string(i + 1) + " error: " + r.error);
      out.rows.push_back({format_cell(r.current), "nan", "nan", "nan", "nan", "nan"});
      continue;
    }
    out.rows.push_back({format_cell(r.current), format_cell(r.weights.fraction_minus()),
                        format_cell(r.weights.w_minus), format_cell(r.weights.w_zero),
                        format_cell(r.weights.baseline), format_cell(r.weights.residual_rms)});
  }
  const std::string path = out_path(g, "weights.csv");
  write_csv_file(path, out);
  std::cout << "wrote " << path << "\n";
  return kExitOk;
}

// ---- sweep ---------------------------------------------------------------------

void write_meta(const std::string& path, const SweepResult& sweep, const RunConfig& rc,
                bool timestamp) {
  std::ofstream f(path, std::ios::binary);
  f << "tool beamspin " << kVersion << "\n";
  f << "config_hash " << sweep.config_hash << "\n";
  f << "engine " << (sweep.engine == Engine::dynamics ? "dynamics" : "closed-form") << "\n";
  f << "seed " << rc.ensemble.seed << "\n";
  if (!sweep.label.empty()) f << "label " << sweep.label << "\n";
  if (timestamp) {
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    f << "generated " << buf << "\n";
  }
  for (const std::string& entry : sweep.log) f << "log " << entry << "\n";
}

int cmd_sweep(const GlobalOptions& g) {
  const RunConfig rc = load_run_config(g);
  if (!rc.sweep) throw ConfigError("sweep: config has no 'sweep' section");
  const SweepSpec& spec = *rc.sweep;

  if (spec.kind == SweepKind::contrast_map) {
    GridSpec grid;
    grid.axis1 = {"gamma2_star", spec.gamma2star_grid.min, spec.gamma2star_grid.max,
                  spec.gamma2star_grid.n, spec.gamma2star_grid.scale};
    grid.axis2 = {"gamma2", spec.gamma2_grid.min, spec.gamma2_grid.max, spec.gamma2_grid.n,
                  spec.gamma2_grid.scale};
    const SweepResult sweep =
        contrast_map(grid, rc.spin, rc.beam, rc.engine, rc.ensemble, default_workers());

    CsvTable out;
    out.comments = header_comments(rc, "contrast_map");
    out.comments[1] = "config_hash " + sweep.config_hash;
    out.names = {"gamma2_star", "gamma2", "contrast"};
    out.units = {"rad_s", "rad_s", "-"};
    for (std::size_t i = 0; i < sweep.axis1.size(); ++i)
      for (std::size_t j = 0; j < sweep.axis2.size(); ++j)
        out.rows.push_back({format_cell(sweep.axis1[i]), format_cell(sweep.axis2[j]),
                            format_cell(sweep.values[i * sweep.axis2.size() + j])});
    const std::string path = out_path(g, rc.output_prefix + "_map.csv");
    write_csv_file(path, out);
    write_meta(out_path(g, rc.output_prefix + "_map.meta.txt"), sweep, rc, !g.no_timestamp);
    std::cout << "wrote " << path << "\n";

    if (g.svg) {
      PlotOptions opt;
      opt.title = "integrated relaxometry contrast";
      opt.x_label = "gamma2 [rad/s]";
      opt.y_label = "gamma2* [rad/s]";
      opt.x_log = spec.gamma2_grid.scale == AxisScale::log;
      opt.y_log = spec.gamma2star_grid.scale == AxisScale::log;
      opt.timestamp = !g.no_timestamp;
      std::ofstream f(out_path(g, rc.output_prefix + "_map.svg"), std::ios::binary);
      write_svg_heatmap(f, sweep, opt);
    }
  } else {
    const std::vector<double> currents = spec.currents.points();
    const std::vector<SweepResult> sweeps =
        reduction_curves(currents, spec.configs, rc.spin, rc.beam);

    CsvTable out;
    out.comments = header_comments(rc, "reduction_curves");
    out.names = {"current_A", "ratio", "label"};
    out.units = {"A", "-", "-"};
    for (const auto& sweep : sweeps) {
      out.comments.push_back("curve " + sweep.label + " config_hash " + sweep.config_hash);
      for (std::size_t i = 0; i < sweep.axis1.size(); ++i)
        out.rows.push_back(
            {format_cell(sweep.axis1[i]), format_cell(sweep.values[i]), sweep.label});
    }
    const std::string path = out_path(g, rc.output_prefix + "_curves.csv");
    write_csv_file(path, out);
    write_meta(out_path(g, rc.output_prefix + "_curves.meta.txt"), sweeps.front(), rc,
               !g.no_timestamp);
    std::cout << "wrote " << path << "\n";

    if (g.svg) {
      std::vector<LineSeries> series;
      for (const auto& sweep : sweeps) {
        LineSeries s;
        s.label = sweep.label;
        s.x = sweep.axis1;
        s.y = sweep.values;
        series.push_back(std::move(s));
      }
      PlotOptions opt;
      opt.title = "predicted T1 reduction";
      opt.x_label = "average current [A]";
      opt.y_label = "T1_beam / T1";
      opt.x_log = spec.currents.scale == AxisScale::log;
      opt.timestamp = !g.no_timestamp;
      std::ofstream f(out_path(g, rc.output_prefix + "_curves.svg"), std::ios::binary);
      write_svg_lines(f, series, opt);
    }
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spin-qubit sensing of modulated electron beams"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON run configuration");
  app.add_option("--seed", g.seed, "override the configured RNG seed");
  app.add_option("--out", g.out_dir, "output directory (default .)");
  app.add_option("--engine", g.engine, "closed-form | dynamics");
  app.add_flag("--svg", g.svg, "also emit SVG plots");
  app.add_flag("--no-timestamp", g.no_timestamp, "omit timestamps for byte-stable output");

  auto* simulate = app.add_subcommand("simulate", "run a pulse sequence from the config");

  auto* fit = app.add_subcommand("fit", "fit a decay or lineshape to a data CSV");
  std::string fit_input, fit_model = "exponential";
  fit->add_option("--input", fit_input, "input data CSV")->required();
  fit->add_option("--model", fit_model, "exponential | gaussian | lorentzian | voigt");

  auto* decompose = app.add_subcommand("decompose", "NNLS charge-state spectral unmixing");
  std::vector<std::string> targets;
  std::string ref_minus_path, ref_zero_path;
  bool synthetic_refs = false;
  decompose->add_option("--target", targets, "target spectrum CSV (repeatable)");
  decompose->add_option("--ref-minus", ref_minus_path, "NV- reference spectrum CSV");
  decompose->add_option("--ref-zero", ref_zero_path, "NV0 reference spectrum CSV");
  decompose->add_flag("--synthetic-refs", synthetic_refs, "use synthetic model references");

  auto* bound = app.add_subcommand("bound", "coupling bound from beam/reference fits");
  std::string beam_fit_path, ref_fit_path, method = "delta";
  bound->add_option("--fit-beam", beam_fit_path, "beam-on fit CSV")->required();
  bound->add_option("--fit-ref", ref_fit_path, "reference fit CSV")->required();
  bound->add_option("--method", method, "delta | bootstrap");

  auto* sweep = app.add_subcommand("sweep", "contrast map or reduction curves from the config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g);
    if (fit->parsed()) return cmd_fit(g, fit_input, fit_model);
    if (decompose->parsed())
      return cmd_decompose(g, targets, ref_minus_path, ref_zero_path, synthetic_refs);
    if (bound->parsed()) return cmd_bound(g, beam_fit_path, ref_fit_path, method);
    if (sweep->parsed()) return cmd_sweep(g);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
