#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

#include "swingup/errors.hpp"

namespace swingup {

// Fixed-step propagation: the requested span is divided into an integral
// number of steps no longer than `h`, so the endpoint is hit exactly and the
// step sequence is fully deterministic.
struct FixedStep {
  double h = 5e-4;  // ps
};

// Embedded Dormand-Prince 5(4) pair, used to cross-check the fixed-step
// results and for stiff-ish exploratory runs. Failure to respect h_min is an
// error, never a silent clamp.
struct AdaptiveStep {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 1e-3;    // ps
  double h_min = 1e-9; // ps
};

template <class State, class Rhs>
inline State rk4_step(Rhs&& rhs, double t, const State& y, double h) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace detail {
struct NullObserver {
  template <class State>
  void operator()(double, const State&) const {}
};
}  // namespace detail

// Integrates dy/dt = rhs(t, y) from t0 to t1 with classical RK4. The observer
// is invoked at t0 and after every step.
template <class State, class Rhs, class Observer = detail::NullObserver>
State integrate_fixed(Rhs&& rhs, State y, double t0, double t1, FixedStep settings,
                      Observer&& observe = {}) {
  if (!(settings.h > 0.0)) throw std::invalid_argument("integrate_fixed: step must be > 0");
  const double span = t1 - t0;
  if (span < 0.0) throw std::invalid_argument("integrate_fixed: t1 < t0");
  observe(t0, y);
  if (span == 0.0) return y;
  const std::int64_t n = std::max<std::int64_t>(1, (std::int64_t)std::ceil(span / settings.h - 1e-12));
  const double h = span / (double)n;
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = t0 + (double)i * h;
    y = rk4_step(rhs, t, y, h);
    observe(t + h, y);
  }
  return y;
}

// Largest RK4 step that keeps the accumulated norm drift of an oscillation at
// angular frequency `omega_max` below `drift_budget` over a span of length
// `span`. RK4 damps a pure rotation by ~ (omega*h)^6 / 144 per step.
inline double drift_limited_step(double omega_max, double span, double drift_budget = 1e-9) {
  if (!(omega_max > 0.0) || !(span > 0.0)) return 5e-4;
  const double h = std::pow(144.0 * drift_budget / (span * std::pow(omega_max, 6.0)), 0.2);
  return std::min(5e-4, h);
}

// Dormand-Prince 5(4) with a standard step controller. States need a
// max-norm via `state_max_norm`.
inline double state_max_norm(double v) { return std::abs(v); }

template <class State, class Rhs>
State integrate_adaptive(Rhs&& rhs, State y, double t0, double t1, AdaptiveStep settings) {
  // Butcher tableau of DOPRI5.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // error weights: 5th order minus embedded 4th order solution
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 < t0) throw std::invalid_argument("integrate_adaptive: t1 < t0");
  double t = t0;
  double h = settings.h0;
  State k1 = rhs(t, y);
  while (t < t1) {
    if (h < settings.h_min)
      throw NumericsError("integrate_adaptive: step size underflow at t = " + std::to_string(t));
    if (t + h > t1) h = t1 - t;
    const State k2 = rhs(t + c2 * h, y + (a21 * h) * k1);
    const State k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const State k7 = rhs(t + h, y5);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double scale = settings.atol + settings.rtol * std::max(state_max_norm(y), state_max_norm(y5));
    const double enorm = state_max_norm(err) / scale;
    if (enorm <= 1.0) {
      t += h;
      y = y5;
      k1 = k7;  // FSAL
    }
    const double factor = (enorm > 0.0) ? 0.9 * std::pow(enorm, -0.2) : 5.0;
    h *= std::min(5.0, std::max(0.2, factor));
  }
  return y;
}

}  // namespace swingup
