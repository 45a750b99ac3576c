#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swingup/errors.hpp"
#include "swingup/photonics.hpp"
#include "swingup/pulses.hpp"
#include "swingup/sweeps.hpp"

namespace swingup::cli {

// Run configurations are INI-style text: [section] headers over key = value
// lines, full-line or trailing comments starting with '#'. Every physical
// value carries an explicit unit in the file ("-8 meV", "22.65 pi", "10 ns");
// a bare number is accepted only for dimensionless fields and counts, and a
// missing or foreign unit is a parse error, never a guess.
//
// Recognized sections (a file may carry several; each subcommand reads the
// ones it needs):
//   [pulse]       drive shape, required by trajectory/spectrum/sweep and by
//                 photonics unless ideal = true
//   [integrator]  step control and decay rate for trajectory/sweep runs
//   [trajectory]  time-series export settings
//   [spectrum]    spectral export settings
//   [sweep]       parameter grid and per-cell hooks
//   [photonics]   pulse-train settings and reference columns
//   [design]      closed-form helper inputs
//   [output]      default output directory (the --out flag overrides it)

// Unit family of a config value. It decides which unit suffixes are accepted
// and the internal target: times end up in ps, angular rates in 1/ps (energies
// divided by hbar on the way in), energies in meV, angles in radians.
enum class Dimension { kPlain, kTime, kAngularRate, kEnergy, kAngle };

// Converts "value unit" text to the target of `dim`. `what` names the value
// in errors (e.g. "key 'delta1'" or "option --delta1"); file/line, when
// given, prefix the error in file:line: form.
double convert_quantity(const std::string& text, Dimension dim, const std::string& what,
                        const std::string& file = {}, int line = 0);

class ConfigFile {
 public:
  static ConfigFile load(const std::filesystem::path& path);
  static ConfigFile from_string(std::string text, std::string name = "<config>");

  const std::string& name() const { return name_; }
  bool has_section(const std::string& section) const;

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  struct Section {
    int line = 0;
    std::map<std::string, Entry> entries;
  };

  void parse(const std::string& text);

  std::string name_;
  std::map<std::string, Section> sections_;

  friend class SectionReader;
};

// Typed access to one section. Every key must be consumed by the time
// finish() runs; leftovers are reported as unknown keys with their line.
class SectionReader {
 public:
  SectionReader(const ConfigFile& cfg, const std::string& section);

  double quantity(const std::string& key, Dimension dim);
  double quantity_or(const std::string& key, Dimension dim, double fallback);
  std::optional<double> maybe_quantity(const std::string& key, Dimension dim);
  int integer(const std::string& key);
  int integer_or(const std::string& key, int fallback);
  bool flag_or(const std::string& key, bool fallback);
  std::string word(const std::string& key);
  std::optional<std::string> maybe_word(const std::string& key);
  void finish();

  const std::string& file() const;
  // Line of the [section] header, for errors about the section as a whole.
  int line() const;

 private:
  const ConfigFile::Entry& take(const std::string& key);
  const ConfigFile::Entry* take_if_present(const std::string& key);

  const ConfigFile& cfg_;
  std::string section_;
  std::vector<std::string> consumed_;
};

// [pulse] -> validated drive. The rectangular kind is specified as omega0,
// delta_low/delta_high and a cycle count; the dwell schedule is built from
// the generalized Rabi half-periods at the two detunings.
Pulse load_pulse(const ConfigFile& cfg);

// [integrator] -> step control and decay rate; the section is optional.
IntegrationSettings load_integration(const ConfigFile& cfg);

struct TrajectoryJob {
  int samples = 2000;  // rows in the exported series (>= 2)
};
TrajectoryJob load_trajectory(const ConfigFile& cfg);

struct SpectrumJob {
  double resolution_mev = 0.01;
};
SpectrumJob load_spectrum(const ConfigFile& cfg);

// [sweep] + [pulse] + [integrator] -> grid for run_sweep. Axis bounds take
// the unit family of the swept parameter (areas in pi/rad, times in ps/...,
// detunings in meV or 1/ps).
SweepGrid load_sweep(const ConfigFile& cfg);

struct PhotonicsJob {
  PulseTrainSpec train;
  // Optional comparison columns computed alongside the main train: a resonant
  // Gaussian pi-pulse of the given width, and the instantaneous-inversion
  // limit.
  std::optional<double> reference_pi_sigma;
  bool reference_ideal = false;
  bool emit_table = false;  // also export the delay-resolved correlations
};
PhotonicsJob load_photonics(const ConfigFile& cfg);

// Closed-form helper requests. Peak amplitudes may be given directly or as
// area + width of a Gaussian envelope.
struct RabiDesign {
  double omega0 = 0.0;
  double detuning = 0.0;
};
struct CompanionDesign {
  double delta1 = 0.0;
  double omega1_peak = 0.0;
};
struct SidebandDesign {
  double alpha = 0.0;
  double delta_m = 0.0;
  double omega_m = 0.0;
};
struct ModulationHintDesign {
  double delta_c = 0.0;
  double omega0_peak = 0.0;
};
using DesignJob = std::variant<RabiDesign, CompanionDesign, SidebandDesign, ModulationHintDesign>;

DesignJob load_design(const ConfigFile& cfg);

// [output] dir, when present.
std::optional<std::string> load_output_dir(const ConfigFile& cfg);

}  // namespace swingup::cli
