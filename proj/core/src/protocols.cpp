#include "swingup/protocols.hpp"

#include <cmath>
#include <stdexcept>

#include "swingup/bessel.hpp"
#include "swingup/integrate.hpp"
#include "swingup/sampler.hpp"
#include "swingup/units.hpp"

namespace swingup {

RabiParams rabi_params(double omega0, double delta) {
  if (omega0 == 0.0 && delta == 0.0)
    throw std::invalid_argument("rabi_params: amplitude and detuning both zero");
  const double omega_r = std::hypot(omega0, delta);
  return {omega_r, (omega0 * omega0) / (omega_r * omega_r)};
}

SecondDetuning second_detuning(double delta1, double omega1_peak) {
  SecondDetuning out;
  out.red_warning = (delta1 >= 0.0);
  out.delta2 = delta1 - std::hypot(omega1_peak, delta1);
  return out;
}

double effective_sideband_area(double alpha, double delta_m, double omega_m) {
  if (omega_m == 0.0)
    throw std::invalid_argument("effective_sideband_area: omega_m must be nonzero");
  return alpha * bessel_j1(delta_m / omega_m);
}

double fm_modulation_frequency_hint(double omega0_peak, double delta_c) {
  return std::hypot(omega0_peak, delta_c);
}

RectangularSwitched rectangular_schedule(double omega0, double delta_low, double delta_high,
                                         int n_cycles, double dwell_scale, double t_start) {
  if (std::abs(delta_low) > std::abs(delta_high))
    throw std::invalid_argument("rectangular_schedule: |delta_low| must not exceed |delta_high|");
  if (n_cycles < 1) throw std::invalid_argument("rectangular_schedule: n_cycles must be >= 1");
  if (!(dwell_scale > 0.0)) throw std::invalid_argument("rectangular_schedule: dwell_scale must be > 0");
  const double d_low = dwell_scale * units::pi / rabi_params(omega0, delta_low).omega_r;
  const double d_high = dwell_scale * units::pi / rabi_params(omega0, delta_high).omega_r;
  RectangularSwitched p;
  p.omega0 = omega0;
  p.t_start = t_start;
  p.segments.reserve(2 * (std::size_t)n_cycles);
  for (int i = 0; i < n_cycles; ++i) {
    p.segments.push_back({delta_low, d_low});
    p.segments.push_back({delta_high, d_high});
  }
  return p;
}

namespace {
double schedule_final_occupation(const RectangularSwitched& p) {
  const auto [t0, t1] = drive_window(Pulse{p});
  const double span = t1 - t0;
  const double rate = max_angular_rate(Pulse{p});
  const double h_cap = drift_limited_step(rate, span, 1e-10);
  const std::int64_t n = (std::int64_t)std::ceil(span / h_cap);
  const double h = span / (double)n;
  RectangularSampler smp(p, t0, 0.5 * h);
  return propagate_bloch(ground_state(), h, n, smp).f;
}
}  // namespace

ScheduleScanResult best_rectangular_schedule(double omega0, double delta_low, double delta_high,
                                             double target_duration, double duration_tolerance,
                                             double scale_span, int scale_points) {
  if (!(target_duration > 0.0))
    throw std::invalid_argument("best_rectangular_schedule: target duration must be > 0");
  if (scale_points < 1)
    throw std::invalid_argument("best_rectangular_schedule: need at least one scale point");
  const double pair_duration = units::pi / rabi_params(omega0, delta_low).omega_r +
                               units::pi / rabi_params(omega0, delta_high).omega_r;
  const int n_max = std::max(1, (int)std::ceil((1.0 + duration_tolerance) * target_duration /
                                               ((1.0 - scale_span) * pair_duration)));
  ScheduleScanResult best;
  best.final_occupation = -1.0;
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k < scale_points; ++k) {
      const double scale =
          (scale_points == 1)
              ? 1.0
              : 1.0 - scale_span + 2.0 * scale_span * (double)k / (double)(scale_points - 1);
      const double duration = (double)n * scale * pair_duration;
      if (std::abs(duration - target_duration) > duration_tolerance * target_duration) continue;
      RectangularSwitched p = rectangular_schedule(omega0, delta_low, delta_high, n, scale);
      const double f = schedule_final_occupation(p);
      if (f > best.final_occupation) {
        best = {std::move(p), n, scale, duration, f};
      }
    }
  }
  if (best.final_occupation < 0.0)
    throw std::invalid_argument(
        "best_rectangular_schedule: no schedule fits the duration window; widen the tolerance");
  return best;
}

}  // namespace swingup
