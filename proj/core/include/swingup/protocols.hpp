#pragma once

#include "swingup/pulses.hpp"

namespace swingup {

// Generalized Rabi frequency and oscillation amplitude of a constant drive
// omega0 at detuning delta: omega_r = sqrt(omega0^2 + delta^2), and the
// occupation oscillates as a * sin^2(omega_r t / 2) with a = (omega0/omega_r)^2.
struct RabiParams {
  double omega_r = 0.0;
  double amplitude_a = 0.0;
};

RabiParams rabi_params(double omega0, double delta);

// Companion detuning for a two-color drive whose first component has peak
// amplitude omega1_peak at detuning delta1:
//   delta2 = delta1 - sqrt(omega1_peak^2 + delta1^2).
// The scheme is designed for delta1 < 0; red_warning flags a call with
// delta1 >= 0, which is still computed.
struct SecondDetuning {
  double delta2 = 0.0;
  bool red_warning = false;
};

SecondDetuning second_detuning(double delta1, double omega1_peak);

// First-sideband pulse area of a sinusoidally frequency-modulated drive:
// alpha_eff = alpha * J1(delta_m / omega_m). Throws on omega_m = 0.
double effective_sideband_area(double alpha, double delta_m, double omega_m);

// Suggested modulation frequency: the generalized Rabi frequency at peak
// drive, sqrt(omega0_peak^2 + delta_c^2). A starting point, not an optimum —
// good working points sit at and somewhat above it.
double fm_modulation_frequency_hint(double omega0_peak, double delta_c);

// Alternating-detuning schedule: n_cycles pairs of segments at delta_low then
// delta_high, each lasting half a generalized Rabi period scaled by
// dwell_scale. Requires |delta_low| <= |delta_high| and n_cycles >= 1.
RectangularSwitched rectangular_schedule(double omega0, double delta_low, double delta_high,
                                         int n_cycles, double dwell_scale = 1.0,
                                         double t_start = 0.0);

// Brute-force scan over cycle count and dwell scale for schedules whose total
// duration stays within duration_tolerance (relative) of target_duration,
// keeping the one with the highest final ground-to-excited transfer.
struct ScheduleScanResult {
  RectangularSwitched schedule;
  int n_cycles = 0;
  double dwell_scale = 1.0;
  double duration = 0.0;
  double final_occupation = 0.0;
};

ScheduleScanResult best_rectangular_schedule(double omega0, double delta_low, double delta_high,
                                             double target_duration,
                                             double duration_tolerance = 0.05,
                                             double scale_span = 0.2, int scale_points = 41);

}  // namespace swingup
