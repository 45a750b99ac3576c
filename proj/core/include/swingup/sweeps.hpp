#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "swingup/pulses.hpp"

namespace swingup {

// Step control and dissipation for occupation runs. The step is chosen so
// the accumulated integrator norm drift over the window stays below
// drift_budget (see drift_limited_step), capped by max_step.
struct IntegrationSettings {
  double drift_budget = 1e-9;
  double max_step = 5e-4; // ps
  double gamma = 0.0;     // radiative decay rate, 1/ps; 0 = closed dynamics
};

// Excited-state occupation after the pulse, starting from the ground state
// and integrating across the drive window. Norm (or trace) drift far beyond
// the budget raises NumericsError rather than being renormalized away.
double final_occupation(const Pulse& pulse, const IntegrationSettings& settings = {});

// One swept parameter. Valid names depend on the base pulse:
//   FmGaussian:  alpha, sigma, delta_c, delta_m, omega_m
//   TwoColor:    alpha1, alpha2, alpha12 (both areas), sigma1, sigma2,
//                delta1, delta2, tau, phi
//   ConstantDrive: omega0, detuning
//   RectangularSwitched: omega0
// Angles/areas in radians, times in ps, rates in 1/ps; count >= 1.
struct SweepAxis {
  std::string param;
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

// Parameter grid over a base pulse. Optional per-cell hooks, applied after
// the axis values, cover the published map conventions: sigma2_over_sigma1
// ties the second width to the first, and derive_delta2 recomputes the
// second detuning from the first pulse's peak via the companion rule. Both
// hooks require a TwoColor base.
struct SweepGrid {
  Pulse base;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  bool derive_delta2 = false;
  double sigma2_over_sigma1 = 0.0; // 0 = off
  IntegrationSettings settings;
};

struct SweepResult {
  SweepGrid grid;
  std::vector<double> axis1_values;
  std::vector<double> axis2_values;       // empty for 1-D sweeps
  std::vector<double> values;             // row-major [i1 * n2 + i2]; NaN = failed cell
  int failed_cells = 0;
  std::string version;
  std::string timestamp;                  // UTC, ISO 8601
};

// Evaluates every grid cell. Cells are independent; failures are recorded as
// NaN sentinels without aborting. Results are bit-identical for any worker
// count (threads = 0 uses the hardware concurrency).
SweepResult run_sweep(const SweepGrid& grid, int threads = 0);

// axis1,axis2,value triplets (axis2 omitted for 1-D sweeps), with header.
void write_csv(const SweepResult& result, std::ostream& out);

// JSON envelope: axes, values matrix, integrator settings, failure count,
// version, timestamp.
void write_json(const SweepResult& result, std::ostream& out);

// Resolves a cell's pulse: axis values applied to the base, then the hooks.
// Exposed for tests and the CLI design helpers.
Pulse resolve_cell(const SweepGrid& grid, double axis1_value,
                   std::optional<double> axis2_value);

}  // namespace swingup
