#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "swingup/bessel.hpp"
#include "swingup/dynamics.hpp"
#include "swingup/errors.hpp"
#include "swingup/integrate.hpp"
#include "swingup/protocols.hpp"
#include "swingup/spectrum.hpp"
#include "swingup/units.hpp"
#include "swingup/version.hpp"

namespace swingup::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  return out;
}

nlohmann::json pulse_json(const Pulse& pulse) {
  using nlohmann::json;
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ConstantDrive>) {
          return {{"kind", "constant"},
                  {"omega0_inv_ps", p.omega0},
                  {"detuning_inv_ps", p.detuning},
                  {"t_on_ps", p.t_on},
                  {"t_off_ps", p.t_off}};
        } else if constexpr (std::is_same_v<T, RectangularSwitched>) {
          json segments = json::array();
          for (const auto& s : p.segments)
            segments.push_back({{"delta_inv_ps", s.delta}, {"dwell_ps", s.dwell}});
          return {{"kind", "rectangular"},
                  {"omega0_inv_ps", p.omega0},
                  {"t_start_ps", p.t_start},
                  {"segments", segments}};
        } else if constexpr (std::is_same_v<T, FmGaussian>) {
          return {{"kind", "fm_gaussian"},
                  {"alpha_rad", p.alpha},
                  {"sigma_ps", p.sigma},
                  {"delta_c_inv_ps", p.delta_c},
                  {"delta_m_inv_ps", p.delta_m},
                  {"omega_m_inv_ps", p.omega_m}};
        } else {
          static_assert(std::is_same_v<T, TwoColor>);
          return {{"kind", "two_color"},
                  {"alpha1_rad", p.alpha1},
                  {"sigma1_ps", p.sigma1},
                  {"delta1_inv_ps", p.delta1},
                  {"alpha2_rad", p.alpha2},
                  {"sigma2_ps", p.sigma2},
                  {"delta2_inv_ps", p.delta2},
                  {"tau_ps", p.tau},
                  {"phi_rad", p.phi}};
        }
      },
      pulse);
}

nlohmann::json metrics_json(const EmissionMetrics& m) {
  return {{"photon_output", m.photon_output},
          {"purity", m.purity},
          {"indistinguishability", m.indistinguishability},
          {"pair_integrals",
           {{"central_g2", m.central_g2},
            {"side_g2", m.side_g2},
            {"central_hom", m.central_hom},
            {"side_hom", m.side_hom}}}};
}

struct StepPlan {
  double t0 = 0.0;
  double h = 0.0;
  std::int64_t n = 0;
};

StepPlan plan_steps(const Pulse& pulse, const IntegrationSettings& st) {
  const auto [t0, t1] = drive_window(pulse);
  const double span = t1 - t0;
  StepPlan plan;
  plan.t0 = t0;
  if (!(span > 0.0)) return plan;
  const double cap =
      std::min(st.max_step, drift_limited_step(max_angular_rate(pulse), span, st.drift_budget));
  plan.n = std::max<std::int64_t>(1, (std::int64_t)std::ceil(span / cap - 1e-12));
  plan.h = span / (double)plan.n;
  return plan;
}

}  // namespace

std::vector<fs::path> cmd_trajectory(const ConfigFile& cfg, const fs::path& out_dir) {
  const Pulse pulse = load_pulse(cfg);
  const IntegrationSettings st = load_integration(cfg);
  const TrajectoryJob job = load_trajectory(cfg);

  const StepPlan plan = plan_steps(pulse, st);
  struct Row {
    double t;
    double f;
    complexd p;
  };
  std::vector<Row> rows;
  const std::int64_t stride =
      plan.n > 0 ? std::max<std::int64_t>(1, (plan.n + job.samples - 2) / (job.samples - 1)) : 1;
  std::int64_t index = 0;
  const auto record = [&](double t, double f, complexd p) {
    if (index % stride == 0 || index == plan.n) rows.push_back({t, f, p});
    ++index;
  };

  const double drift_cap = std::max(1e-6, 1e3 * st.drift_budget);
  const double t1 = plan.t0 + plan.h * (double)plan.n;
  if (st.gamma == 0.0) {
    const auto rhs = [&](double t, const BlochState& s) {
      return bloch_rhs(s, drive_at(pulse, t).omega);
    };
    const BlochState end =
        integrate_fixed(rhs, ground_state(), plan.t0, t1, FixedStep{plan.h},
                        [&](double t, const BlochState& s) { record(t, s.f, s.p); });
    if (std::abs(bloch_norm(end) - 1.0) > drift_cap)
      throw NumericsError("trajectory: Bloch norm drifted beyond tolerance");
  } else {
    const auto rhs = [&](double t, const DensityMatrix& r) {
      return lindblad_rhs_unchecked(r, drive_at(pulse, t).omega, st.gamma);
    };
    const DensityMatrix end =
        integrate_fixed(rhs, DensityMatrix{}, plan.t0, t1, FixedStep{plan.h},
                        [&](double t, const DensityMatrix& r) { record(t, r.rho_xx, r.rho_gx); });
    if (std::abs(trace(end) - 1.0) > drift_cap)
      throw NumericsError("trajectory: density-matrix trace drifted beyond tolerance");
  }

  const fs::path path = out_dir / "trajectory.csv";
  std::ofstream out = open_output(path);
  out << "t_ps,f,re_p,im_p,r_x,r_y,r_z,hbar_delta_mev,omega_abs_inv_ps\n"
      << std::setprecision(17);
  for (const Row& row : rows) {
    const auto r = bloch_vector(BlochState{row.p, row.f});
    const DriveSample drive = drive_at(pulse, row.t);
    out << row.t << ',' << row.f << ',' << row.p.real() << ',' << row.p.imag() << ',' << r[0]
        << ',' << r[1] << ',' << r[2] << ',' << units::rate_to_mev(drive.delta) << ','
        << std::abs(drive.omega) << '\n';
  }
  return {path};
}

std::vector<fs::path> cmd_sweep(const ConfigFile& cfg, const fs::path& out_dir, int threads,
                                std::ostream& err) {
  const SweepGrid grid = load_sweep(cfg);
  const SweepResult result = run_sweep(grid, threads);
  if (result.failed_cells > 0)
    err << "note: " << result.failed_cells << " of " << result.values.size()
        << " cells failed and carry NaN\n";

  const fs::path csv_path = out_dir / "sweep.csv";
  {
    std::ofstream out = open_output(csv_path);
    write_csv(result, out);
  }
  const fs::path json_path = out_dir / "sweep.json";
  {
    std::ofstream out = open_output(json_path);
    write_json(result, out);
  }
  return {csv_path, json_path};
}

std::vector<fs::path> cmd_spectrum(const ConfigFile& cfg, const fs::path& out_dir,
                                   std::ostream& err) {
  const Pulse pulse = load_pulse(cfg);
  const SpectrumJob job = load_spectrum(cfg);
  const Spectrum spectrum = compute_spectrum(pulse, job.resolution_mev);
  if (spectrum.resolution_warning) err << "warning: " << spectrum.warning << '\n';

  double peak = 0.0;
  for (double m : spectrum.magnitude) peak = std::max(peak, m);
  const double scale = peak > 0.0 ? 1.0 / peak : 0.0;

  const fs::path path = out_dir / "spectrum.csv";
  std::ofstream out = open_output(path);
  out << "detuning_mev,amplitude_abs,magnitude_norm\n" << std::setprecision(17);
  for (std::size_t i = 0; i < spectrum.energy_mev.size(); ++i)
    out << spectrum.energy_mev[i] << ',' << spectrum.magnitude[i] << ','
        << spectrum.magnitude[i] * scale << '\n';
  return {path};
}

std::vector<fs::path> cmd_photonics(const ConfigFile& cfg, const fs::path& out_dir) {
  const PhotonicsJob job = load_photonics(cfg);
  const EmissionMetrics metrics = emission_metrics(job.train);

  nlohmann::json doc = metrics_json(metrics);
  doc["settings"] = {{"gamma_inv_ps", job.train.gamma},
                     {"period_ps", job.train.period},
                     {"warmup_periods", job.train.warmup_periods},
                     {"drift_budget", job.train.drift_budget},
                     {"max_step_ps", job.train.max_step},
                     {"max_nodes", job.train.max_nodes},
                     {"pulse", job.train.pulse ? pulse_json(*job.train.pulse)
                                               : nlohmann::json("ideal")}};
  if (job.reference_pi_sigma) {
    PulseTrainSpec reference = job.train;
    reference.pulse = FmGaussian{units::pi, *job.reference_pi_sigma, 0.0, 0.0, 0.0};
    nlohmann::json block = metrics_json(emission_metrics(reference));
    block["sigma_ps"] = *job.reference_pi_sigma;
    doc["references"]["resonant_pi"] = std::move(block);
  }
  if (job.reference_ideal) {
    doc["references"]["ideal"] =
        metrics_json(emission_metrics(ideal_train(job.train.gamma, job.train.period)));
  }
  doc["version"] = std::string(kVersion);

  std::vector<fs::path> written;
  const fs::path json_path = out_dir / "photonics.json";
  {
    std::ofstream out = open_output(json_path);
    out << doc.dump(2) << '\n';
  }
  written.push_back(json_path);

  if (job.emit_table) {
    const CorrelationTable table = correlation_table(job.train);
    const fs::path csv_path = out_dir / "correlation.csv";
    std::ofstream out = open_output(csv_path);
    write_csv(table, out);
    written.push_back(csv_path);
  }
  return written;
}

namespace {

struct DesignRow {
  std::string name;
  double value;
  std::string unit;  // "-" for dimensionless
};

struct DesignReport {
  std::string heading;
  std::string mode;
  std::vector<DesignRow> rows;
  std::vector<std::string> notes;
};

DesignReport design_report(const DesignJob& job) {
  using units::rate_to_mev;
  DesignReport report;
  if (const auto* d = std::get_if<RabiDesign>(&job)) {
    const RabiParams rabi = rabi_params(d->omega0, d->detuning);
    report.heading = "constant-drive oscillation";
    report.mode = "rabi";
    report.rows = {{"omega_r", rabi.omega_r, "1/ps"},
                   {"hbar_omega_r", rate_to_mev(rabi.omega_r), "meV"},
                   {"amplitude", rabi.amplitude_a, "-"},
                   {"period", 2.0 * units::pi / rabi.omega_r, "ps"}};
  } else if (const auto* d = std::get_if<CompanionDesign>(&job)) {
    const SecondDetuning second = second_detuning(d->delta1, d->omega1_peak);
    report.heading = "companion detuning for a pulse pair";
    report.mode = "companion";
    report.rows = {{"omega1_peak", d->omega1_peak, "1/ps"},
                   {"delta2", second.delta2, "1/ps"},
                   {"hbar_delta2", rate_to_mev(second.delta2), "meV"}};
    if (second.red_warning)
      report.notes.push_back(
          "delta1 is not red-detuned (>= 0); the pairing rule is built for drives below the "
          "transition");
  } else if (const auto* d = std::get_if<SidebandDesign>(&job)) {
    const double ratio = d->delta_m / d->omega_m;
    const double alpha_eff = effective_sideband_area(d->alpha, d->delta_m, d->omega_m);
    report.heading = "first-sideband effective area";
    report.mode = "sideband";
    report.rows = {{"modulation_ratio", ratio, "-"},
                   {"bessel_j1", bessel_j1(ratio), "-"},
                   {"alpha_eff", alpha_eff, "rad"},
                   {"alpha_eff", alpha_eff / units::pi, "pi"}};
  } else {
    const auto& hint_design = std::get<ModulationHintDesign>(job);
    const double hint = fm_modulation_frequency_hint(hint_design.omega0_peak, hint_design.delta_c);
    report.heading = "modulation frequency hint";
    report.mode = "modulation_hint";
    report.rows = {{"omega0_peak", hint_design.omega0_peak, "1/ps"},
                   {"omega_m_hint", hint, "1/ps"},
                   {"hbar_omega_m_hint", rate_to_mev(hint), "meV"}};
  }
  return report;
}

}  // namespace

void cmd_design(const DesignJob& job, bool as_json, std::ostream& out) {
  const DesignReport report = design_report(job);
  if (as_json) {
    nlohmann::json doc;
    doc["mode"] = report.mode;
    for (const DesignRow& row : report.rows) {
      std::string suffix = row.unit == "1/ps" ? "inv_ps" : row.unit;
      std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      doc[row.unit == "-" ? row.name : row.name + "_" + suffix] = row.value;
    }
    doc["notes"] = report.notes;
    doc["version"] = std::string(kVersion);
    out << doc.dump(2) << '\n';
    return;
  }
  out << report.heading << '\n' << std::setprecision(12);
  for (const DesignRow& row : report.rows) {
    std::ostringstream value;
    value << std::setprecision(12) << row.value;
    out << "  " << std::left << std::setw(20) << row.name << std::setw(22) << value.str()
        << row.unit << '\n';
  }
  for (const std::string& note : report.notes) out << "  note: " << note << '\n';
}

namespace {

// Exit codes; scripts rely on the classes being distinct.
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr int kExitConvergence = 4;

// Quantity-valued command line option: parsed with the same unit rules as
// config values.
struct QuantityOption {
  CLI::Option* option = nullptr;
  std::string text;
  Dimension dim = Dimension::kPlain;
  std::string flag;

  bool given() const { return option && option->count() > 0; }
  double value() const { return convert_quantity(text, dim, "option " + flag); }
};

QuantityOption* add_quantity(CLI::App* cmd, std::vector<std::unique_ptr<QuantityOption>>& pool,
                             const std::string& flag, Dimension dim,
                             const std::string& description) {
  pool.push_back(std::make_unique<QuantityOption>());
  QuantityOption* q = pool.back().get();
  q->dim = dim;
  q->flag = flag;
  q->option = cmd->add_option(flag, q->text, description);
  return q;
}

DesignJob design_job_from_flags(const std::string& mode_raw,
                                const std::map<std::string, QuantityOption*>& opts) {
  std::string mode = mode_raw;
  std::replace(mode.begin(), mode.end(), '-', '_');
  const auto need = [&](const char* name) -> double {
    const QuantityOption* q = opts.at(name);
    if (!q->given())
      throw ConfigError("design mode '" + mode + "' needs " + q->flag);
    return q->value();
  };
  const auto peak_or_envelope = [&](const char* peak, const char* alpha,
                                    const char* sigma) -> double {
    const QuantityOption* q = opts.at(peak);
    if (q->given()) return q->value();
    return gaussian_envelope(need(alpha), need(sigma), 0.0);
  };
  if (mode == "rabi") return RabiDesign{need("omega0"), need("detuning")};
  if (mode == "companion")
    return CompanionDesign{need("delta1"), peak_or_envelope("omega1_peak", "alpha1", "sigma1")};
  if (mode == "sideband") return SidebandDesign{need("alpha"), need("delta_m"), need("omega_m")};
  if (mode == "modulation_hint")
    return ModulationHintDesign{need("delta_c"), peak_or_envelope("omega0_peak", "alpha", "sigma")};
  throw ConfigError("unknown design mode '" + mode_raw +
                    "' (expected rabi, companion, sideband, or modulation_hint)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"driven two-level emitter: trajectories, parameter maps, spectra, and photon "
               "statistics"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir_flag;
  int threads = 0;
  bool as_json = false;

  const auto add_config = [&](CLI::App* cmd, bool required) {
    CLI::Option* opt = cmd->add_option("--config", config_path, "run configuration file");
    if (required) opt->required();
    return opt;
  };
  const auto add_out = [&](CLI::App* cmd) {
    return cmd->add_option("--out", out_dir_flag,
                           "output directory (default: [output] dir of the config, else .)");
  };

  CLI::App* trajectory =
      app.add_subcommand("trajectory", "integrate one pulse and write the time series");
  add_config(trajectory, true);
  CLI::Option* trajectory_out = add_out(trajectory);

  CLI::App* sweep = app.add_subcommand("sweep", "map the final occupation over a parameter grid");
  add_config(sweep, true);
  CLI::Option* sweep_out = add_out(sweep);
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  CLI::App* spectrum = app.add_subcommand("spectrum", "write the drive spectrum");
  add_config(spectrum, true);
  CLI::Option* spectrum_out = add_out(spectrum);

  CLI::App* photonics =
      app.add_subcommand("photonics", "photon statistics of a periodically driven emitter");
  add_config(photonics, true);
  CLI::Option* photonics_out = add_out(photonics);

  CLI::App* design = app.add_subcommand("design", "closed-form working-point helpers");
  std::string design_mode;
  design->add_option("mode", design_mode,
                     "one of: rabi, companion, sideband, modulation_hint");
  CLI::Option* design_config = add_config(design, false);
  design->add_flag("--json", as_json, "machine-readable output");
  std::vector<std::unique_ptr<QuantityOption>> pool;
  const std::map<std::string, QuantityOption*> design_opts = {
      {"omega0", add_quantity(design, pool, "--omega0", Dimension::kAngularRate,
                              "drive amplitude [meV or 1/ps]")},
      {"detuning", add_quantity(design, pool, "--detuning", Dimension::kAngularRate,
                                "drive detuning [meV or 1/ps]")},
      {"delta1", add_quantity(design, pool, "--delta1", Dimension::kAngularRate,
                              "first-pulse detuning [meV or 1/ps]")},
      {"omega1_peak", add_quantity(design, pool, "--omega1-peak", Dimension::kAngularRate,
                                   "first-pulse peak amplitude [meV or 1/ps]")},
      {"alpha1", add_quantity(design, pool, "--alpha1", Dimension::kAngle,
                              "first-pulse area [pi or rad]")},
      {"sigma1", add_quantity(design, pool, "--sigma1", Dimension::kTime,
                              "first-pulse width [ps]")},
      {"alpha", add_quantity(design, pool, "--alpha", Dimension::kAngle, "pulse area [pi or rad]")},
      {"sigma", add_quantity(design, pool, "--sigma", Dimension::kTime, "pulse width [ps]")},
      {"delta_m", add_quantity(design, pool, "--delta-m", Dimension::kAngularRate,
                               "modulation amplitude [meV or 1/ps]")},
      {"omega_m", add_quantity(design, pool, "--omega-m", Dimension::kAngularRate,
                               "modulation frequency [meV or 1/ps]")},
      {"delta_c", add_quantity(design, pool, "--delta-c", Dimension::kAngularRate,
                               "constant detuning [meV or 1/ps]")},
      {"omega0_peak", add_quantity(design, pool, "--omega0-peak", Dimension::kAngularRate,
                                   "peak amplitude [meV or 1/ps]")},
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const auto resolve_out = [&](const ConfigFile& cfg, const CLI::Option* flag) -> fs::path {
      if (flag->count() > 0) return out_dir_flag;
      if (const auto dir = load_output_dir(cfg)) return *dir;
      return ".";
    };
    const auto report = [&](const std::vector<fs::path>& written) {
      for (const fs::path& p : written) out << "wrote " << p.generic_string() << '\n';
    };

    if (trajectory->parsed()) {
      const ConfigFile cfg = ConfigFile::load(config_path);
      report(cmd_trajectory(cfg, resolve_out(cfg, trajectory_out)));
    } else if (sweep->parsed()) {
      const ConfigFile cfg = ConfigFile::load(config_path);
      report(cmd_sweep(cfg, resolve_out(cfg, sweep_out), threads, err));
    } else if (spectrum->parsed()) {
      const ConfigFile cfg = ConfigFile::load(config_path);
      report(cmd_spectrum(cfg, resolve_out(cfg, spectrum_out), err));
    } else if (photonics->parsed()) {
      const ConfigFile cfg = ConfigFile::load(config_path);
      report(cmd_photonics(cfg, resolve_out(cfg, photonics_out)));
    } else if (design->parsed()) {
      DesignJob job;
      if (design_config->count() > 0) {
        if (!design_mode.empty())
          throw ConfigError("design: give either a mode with options or --config, not both");
        job = load_design(ConfigFile::load(config_path));
      } else {
        if (design_mode.empty())
          throw ConfigError("design: a mode is required (rabi, companion, sideband, or "
                            "modulation_hint)");
        job = design_job_from_flags(design_mode, design_opts);
      }
      cmd_design(job, as_json, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const NumericsError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerics;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace swingup::cli
