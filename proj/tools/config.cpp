#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "swingup/protocols.hpp"
#include "swingup/units.hpp"

namespace swingup::cli {

namespace {

const char* const kSections[] = {"pulse",  "integrator", "trajectory", "spectrum",
                                 "sweep",  "photonics",  "design",     "output"};

bool known_section(const std::string& name) {
  return std::find(std::begin(kSections), std::end(kSections), name) != std::end(kSections);
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return s.substr(b, e - b);
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum((unsigned char)c) && c != '_') return false;
  return true;
}

// Cuts an unquoted trailing '#' comment; quotes toggle on '"'.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

struct UnitDef {
  const char* suffix;
  double factor;
};

// Accepted unit suffixes per family and the factor to the internal target.
const std::vector<UnitDef>& unit_table(Dimension dim) {
  using units::hbar_mev_ps;
  static const std::vector<UnitDef> kTime = {{"fs", 1e-3}, {"ps", 1.0}, {"ns", 1e3}};
  static const std::vector<UnitDef> kRate = {
      {"meV", 1.0 / hbar_mev_ps}, {"ueV", 1e-3 / hbar_mev_ps}, {"1/ps", 1.0}, {"1/ns", 1e-3}};
  static const std::vector<UnitDef> kEnergy = {
      {"meV", 1.0}, {"ueV", 1e-3}, {"1/ps", hbar_mev_ps}, {"1/ns", 1e-3 * hbar_mev_ps}};
  static const std::vector<UnitDef> kAngle = {{"pi", units::pi}, {"rad", 1.0}};
  static const std::vector<UnitDef> kNone = {};
  switch (dim) {
    case Dimension::kTime: return kTime;
    case Dimension::kAngularRate: return kRate;
    case Dimension::kEnergy: return kEnergy;
    case Dimension::kAngle: return kAngle;
    case Dimension::kPlain: return kNone;
  }
  return kNone;
}

std::string unit_list(Dimension dim) {
  std::string out;
  for (const UnitDef& u : unit_table(dim)) {
    if (!out.empty()) out += ", ";
    out += u.suffix;
  }
  return out;
}

bool parse_number(const std::string& token, double& value) {
  char* end = nullptr;
  value = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && !token.empty();
}

[[noreturn]] void fail(const std::string& what, const std::string& file, int line) {
  throw ConfigError(what, file, line);
}

}  // namespace

double convert_quantity(const std::string& text, Dimension dim, const std::string& what,
                        const std::string& file, int line) {
  std::istringstream in(strip_quotes(trim(text)));
  std::string value_token, unit_token, extra;
  in >> value_token >> unit_token >> extra;
  double value = 0.0;
  if (!extra.empty() || !parse_number(value_token, value))
    fail(what + ": expected a number with a unit, got '" + text + "'", file, line);
  if (dim == Dimension::kPlain) {
    if (!unit_token.empty())
      fail(what + ": takes a bare number, got unit '" + unit_token + "'", file, line);
    return value;
  }
  if (unit_token.empty())
    fail(what + ": missing unit on '" + text + "' (expected " + unit_list(dim) + ")", file, line);
  for (const UnitDef& u : unit_table(dim))
    if (unit_token == u.suffix) return value * u.factor;
  fail(what + ": unknown unit '" + unit_token + "' (expected " + unit_list(dim) + ")", file, line);
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_string(text.str(), path.string());
}

ConfigFile ConfigFile::from_string(std::string text, std::string name) {
  ConfigFile cfg;
  cfg.name_ = std::move(name);
  cfg.parse(text);
  return cfg;
}

void ConfigFile::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = trim(strip_comment(line));
    if (s.empty() || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail("malformed section header '" + s + "'", name_, lineno);
      section = trim(s.substr(1, s.size() - 2));
      if (!is_identifier(section)) fail("malformed section name '" + section + "'", name_, lineno);
      if (!known_section(section))
        fail("unknown section [" + section + "]; expected one of: pulse, integrator, trajectory, "
             "spectrum, sweep, photonics, design, output",
             name_, lineno);
      if (sections_.count(section)) fail("duplicate section [" + section + "]", name_, lineno);
      sections_[section].line = lineno;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) fail("expected 'key = value', got '" + s + "'", name_, lineno);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = strip_quotes(trim(s.substr(eq + 1)));
    if (!is_identifier(key)) fail("malformed key '" + key + "'", name_, lineno);
    if (section.empty()) fail("key '" + key + "' appears before any [section]", name_, lineno);
    if (value.empty()) fail("key '" + key + "' has an empty value", name_, lineno);
    if (!sections_[section].entries.emplace(key, Entry{value, lineno}).second)
      fail("duplicate key '" + key + "' in [" + section + "]", name_, lineno);
  }
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

SectionReader::SectionReader(const ConfigFile& cfg, const std::string& section)
    : cfg_(cfg), section_(section) {
  if (!cfg.has_section(section))
    throw ConfigError("missing required section [" + section + "]", cfg.name(), 0);
}

const std::string& SectionReader::file() const { return cfg_.name(); }

int SectionReader::line() const { return cfg_.sections_.at(section_).line; }

const ConfigFile::Entry* SectionReader::take_if_present(const std::string& key) {
  const auto& entries = cfg_.sections_.at(section_).entries;
  const auto it = entries.find(key);
  if (it == entries.end()) return nullptr;
  consumed_.push_back(key);
  return &it->second;
}

const ConfigFile::Entry& SectionReader::take(const std::string& key) {
  const ConfigFile::Entry* e = take_if_present(key);
  if (!e)
    throw ConfigError("missing key '" + key + "' in [" + section_ + "]", cfg_.name(), line());
  return *e;
}

double SectionReader::quantity(const std::string& key, Dimension dim) {
  const ConfigFile::Entry& e = take(key);
  return convert_quantity(e.value, dim, "key '" + key + "'", cfg_.name(), e.line);
}

double SectionReader::quantity_or(const std::string& key, Dimension dim, double fallback) {
  const ConfigFile::Entry* e = take_if_present(key);
  if (!e) return fallback;
  return convert_quantity(e->value, dim, "key '" + key + "'", cfg_.name(), e->line);
}

std::optional<double> SectionReader::maybe_quantity(const std::string& key, Dimension dim) {
  const ConfigFile::Entry* e = take_if_present(key);
  if (!e) return std::nullopt;
  return convert_quantity(e->value, dim, "key '" + key + "'", cfg_.name(), e->line);
}

int SectionReader::integer(const std::string& key) {
  const ConfigFile::Entry& e = take(key);
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (end != e.value.c_str() + e.value.size() || e.value.empty())
    fail("key '" + key + "': expected an integer, got '" + e.value + "'", cfg_.name(), e.line);
  return (int)v;
}

int SectionReader::integer_or(const std::string& key, int fallback) {
  if (!cfg_.sections_.at(section_).entries.count(key)) return fallback;
  return integer(key);
}

bool SectionReader::flag_or(const std::string& key, bool fallback) {
  const ConfigFile::Entry* e = take_if_present(key);
  if (!e) return fallback;
  if (e->value == "true") return true;
  if (e->value == "false") return false;
  fail("key '" + key + "': expected true or false, got '" + e->value + "'", cfg_.name(), e->line);
}

std::string SectionReader::word(const std::string& key) { return take(key).value; }

std::optional<std::string> SectionReader::maybe_word(const std::string& key) {
  const ConfigFile::Entry* e = take_if_present(key);
  if (!e) return std::nullopt;
  return e->value;
}

void SectionReader::finish() {
  const ConfigFile::Entry* stray = nullptr;
  std::string stray_key;
  for (const auto& [key, entry] : cfg_.sections_.at(section_).entries) {
    if (std::find(consumed_.begin(), consumed_.end(), key) != consumed_.end()) continue;
    if (!stray || entry.line < stray->line) {
      stray = &entry;
      stray_key = key;
    }
  }
  if (stray)
    fail("unknown key '" + stray_key + "' in [" + section_ + "]", cfg_.name(), stray->line);
}

Pulse load_pulse(const ConfigFile& cfg) {
  SectionReader r(cfg, "pulse");
  const std::string kind = r.word("kind");
  try {
    Pulse pulse;
    if (kind == "constant") {
      ConstantDrive p;
      p.omega0 = r.quantity("omega0", Dimension::kAngularRate);
      p.detuning = r.quantity_or("detuning", Dimension::kAngularRate, 0.0);
      p.t_on = r.quantity_or("t_on", Dimension::kTime, 0.0);
      p.t_off = r.quantity("t_off", Dimension::kTime);
      pulse = p;
    } else if (kind == "rectangular") {
      const double omega0 = r.quantity("omega0", Dimension::kAngularRate);
      const double delta_low = r.quantity("delta_low", Dimension::kAngularRate);
      const double delta_high = r.quantity("delta_high", Dimension::kAngularRate);
      const int cycles = r.integer("cycles");
      const double dwell_scale = r.quantity_or("dwell_scale", Dimension::kPlain, 1.0);
      const double t_start = r.quantity_or("t_start", Dimension::kTime, 0.0);
      pulse = rectangular_schedule(omega0, delta_low, delta_high, cycles, dwell_scale, t_start);
    } else if (kind == "fm_gaussian") {
      FmGaussian p;
      p.alpha = r.quantity("alpha", Dimension::kAngle);
      p.sigma = r.quantity("sigma", Dimension::kTime);
      p.delta_c = r.quantity_or("delta_c", Dimension::kAngularRate, 0.0);
      p.delta_m = r.quantity_or("delta_m", Dimension::kAngularRate, 0.0);
      p.omega_m = r.quantity_or("omega_m", Dimension::kAngularRate, 0.0);
      pulse = p;
    } else if (kind == "two_color") {
      TwoColor p;
      p.alpha1 = r.quantity("alpha1", Dimension::kAngle);
      p.sigma1 = r.quantity("sigma1", Dimension::kTime);
      p.delta1 = r.quantity("delta1", Dimension::kAngularRate);
      p.alpha2 = r.quantity("alpha2", Dimension::kAngle);
      p.sigma2 = r.quantity("sigma2", Dimension::kTime);
      p.delta2 = r.quantity("delta2", Dimension::kAngularRate);
      p.tau = r.quantity_or("tau", Dimension::kTime, 0.0);
      p.phi = r.quantity_or("phi", Dimension::kAngle, 0.0);
      pulse = p;
    } else {
      fail("unknown pulse kind '" + kind +
               "' (expected constant, rectangular, fm_gaussian, or two_color)",
           r.file(), r.line());
    }
    r.finish();
    validate(pulse);
    return pulse;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.file(), r.line());
  }
}

IntegrationSettings load_integration(const ConfigFile& cfg) {
  IntegrationSettings settings;
  if (!cfg.has_section("integrator")) return settings;
  SectionReader r(cfg, "integrator");
  settings.drift_budget = r.quantity_or("drift_budget", Dimension::kPlain, settings.drift_budget);
  settings.max_step = r.quantity_or("max_step", Dimension::kTime, settings.max_step);
  settings.gamma = r.quantity_or("gamma", Dimension::kAngularRate, settings.gamma);
  r.finish();
  if (!(settings.drift_budget > 0.0))
    throw ConfigError("key 'drift_budget': must be > 0", r.file(), r.line());
  if (!(settings.max_step > 0.0))
    throw ConfigError("key 'max_step': must be > 0", r.file(), r.line());
  if (settings.gamma < 0.0)
    throw ConfigError("key 'gamma': must be >= 0", r.file(), r.line());
  return settings;
}

TrajectoryJob load_trajectory(const ConfigFile& cfg) {
  TrajectoryJob job;
  if (!cfg.has_section("trajectory")) return job;
  SectionReader r(cfg, "trajectory");
  job.samples = r.integer_or("samples", job.samples);
  r.finish();
  if (job.samples < 2) throw ConfigError("key 'samples': must be >= 2", r.file(), r.line());
  return job;
}

SpectrumJob load_spectrum(const ConfigFile& cfg) {
  SpectrumJob job;
  if (!cfg.has_section("spectrum")) return job;
  SectionReader r(cfg, "spectrum");
  job.resolution_mev = r.quantity_or("resolution", Dimension::kEnergy, job.resolution_mev);
  r.finish();
  if (!(job.resolution_mev > 0.0))
    throw ConfigError("key 'resolution': must be > 0", r.file(), r.line());
  return job;
}

namespace {

// Unit family of each sweepable parameter; run_sweep rejects names that do
// not belong to the base pulse kind.
Dimension axis_dimension(const std::string& param, const std::string& file, int line) {
  static const std::map<std::string, Dimension> kDims = {
      {"alpha", Dimension::kAngle},      {"alpha1", Dimension::kAngle},
      {"alpha2", Dimension::kAngle},     {"alpha12", Dimension::kAngle},
      {"phi", Dimension::kAngle},        {"sigma", Dimension::kTime},
      {"sigma1", Dimension::kTime},      {"sigma2", Dimension::kTime},
      {"tau", Dimension::kTime},         {"delta_c", Dimension::kAngularRate},
      {"delta_m", Dimension::kAngularRate}, {"omega_m", Dimension::kAngularRate},
      {"delta1", Dimension::kAngularRate},  {"delta2", Dimension::kAngularRate},
      {"detuning", Dimension::kAngularRate}, {"omega0", Dimension::kAngularRate}};
  const auto it = kDims.find(param);
  if (it == kDims.end())
    throw ConfigError("unknown sweep parameter '" + param + "'", file, line);
  return it->second;
}

SweepAxis read_axis(SectionReader& r, const std::string& suffix) {
  SweepAxis axis;
  axis.param = r.word("param" + suffix);
  const Dimension dim = axis_dimension(axis.param, r.file(), r.line());
  axis.min = r.quantity("min" + suffix, dim);
  axis.max = r.quantity("max" + suffix, dim);
  axis.count = r.integer("count" + suffix);
  if (axis.count < 1)
    throw ConfigError("key 'count" + suffix + "': must be >= 1", r.file(), r.line());
  return axis;
}

}  // namespace

SweepGrid load_sweep(const ConfigFile& cfg) {
  SweepGrid grid;
  grid.base = load_pulse(cfg);
  grid.settings = load_integration(cfg);
  SectionReader r(cfg, "sweep");
  grid.axis1 = read_axis(r, "1");
  if (const auto param2 = r.maybe_word("param2")) {
    SweepAxis axis;
    axis.param = *param2;
    const Dimension dim = axis_dimension(axis.param, r.file(), r.line());
    axis.min = r.quantity("min2", dim);
    axis.max = r.quantity("max2", dim);
    axis.count = r.integer("count2");
    if (axis.count < 1) throw ConfigError("key 'count2': must be >= 1", r.file(), r.line());
    grid.axis2 = axis;
  }
  grid.derive_delta2 = r.flag_or("derive_delta2", false);
  grid.sigma2_over_sigma1 = r.quantity_or("sigma2_over_sigma1", Dimension::kPlain, 0.0);
  r.finish();
  return grid;
}

PhotonicsJob load_photonics(const ConfigFile& cfg) {
  PhotonicsJob job;
  SectionReader r(cfg, "photonics");
  const bool ideal = r.flag_or("ideal", false);
  const double gamma = r.quantity("gamma", Dimension::kAngularRate);
  const double period = r.quantity("period", Dimension::kTime);
  job.train = ideal ? ideal_train(gamma, period) : pulsed_train(load_pulse(cfg), gamma, period);
  job.train.warmup_periods = r.integer_or("warmup_periods", job.train.warmup_periods);
  job.train.drift_budget =
      r.quantity_or("drift_budget", Dimension::kPlain, job.train.drift_budget);
  job.train.max_step = r.quantity_or("max_step", Dimension::kTime, job.train.max_step);
  job.train.max_nodes = r.integer_or("max_nodes", job.train.max_nodes);
  job.reference_pi_sigma = r.maybe_quantity("reference_pi_sigma", Dimension::kTime);
  job.reference_ideal = r.flag_or("reference_ideal", false);
  job.emit_table = r.flag_or("table", false);
  r.finish();
  try {
    validate(job.train);
    if (job.reference_pi_sigma) {
      PulseTrainSpec reference = job.train;
      reference.pulse = FmGaussian{units::pi, *job.reference_pi_sigma, 0.0, 0.0, 0.0};
      validate(reference);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.file(), r.line());
  }
  return job;
}

DesignJob load_design(const ConfigFile& cfg) {
  SectionReader r(cfg, "design");
  std::string mode = r.word("mode");
  std::replace(mode.begin(), mode.end(), '-', '_');
  try {
    if (mode == "rabi") {
      RabiDesign d;
      d.omega0 = r.quantity("omega0", Dimension::kAngularRate);
      d.detuning = r.quantity("detuning", Dimension::kAngularRate);
      r.finish();
      return d;
    }
    if (mode == "companion") {
      CompanionDesign d;
      d.delta1 = r.quantity("delta1", Dimension::kAngularRate);
      if (const auto peak = r.maybe_quantity("omega1_peak", Dimension::kAngularRate)) {
        d.omega1_peak = *peak;
      } else {
        const double alpha1 = r.quantity("alpha1", Dimension::kAngle);
        const double sigma1 = r.quantity("sigma1", Dimension::kTime);
        d.omega1_peak = gaussian_envelope(alpha1, sigma1, 0.0);
      }
      r.finish();
      return d;
    }
    if (mode == "sideband") {
      SidebandDesign d;
      d.alpha = r.quantity("alpha", Dimension::kAngle);
      d.delta_m = r.quantity("delta_m", Dimension::kAngularRate);
      d.omega_m = r.quantity("omega_m", Dimension::kAngularRate);
      r.finish();
      return d;
    }
    if (mode == "modulation_hint") {
      ModulationHintDesign d;
      d.delta_c = r.quantity("delta_c", Dimension::kAngularRate);
      if (const auto peak = r.maybe_quantity("omega0_peak", Dimension::kAngularRate)) {
        d.omega0_peak = *peak;
      } else {
        const double alpha = r.quantity("alpha", Dimension::kAngle);
        const double sigma = r.quantity("sigma", Dimension::kTime);
        d.omega0_peak = gaussian_envelope(alpha, sigma, 0.0);
      }
      r.finish();
      return d;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), r.file(), r.line());
  }
  throw ConfigError("unknown design mode '" + mode +
                        "' (expected rabi, companion, sideband, or modulation_hint)",
                    r.file(), r.line());
}

std::optional<std::string> load_output_dir(const ConfigFile& cfg) {
  if (!cfg.has_section("output")) return std::nullopt;
  SectionReader r(cfg, "output");
  const std::optional<std::string> dir = r.maybe_word("dir");
  r.finish();
  return dir;
}

}  // namespace swingup::cli
