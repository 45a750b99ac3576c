// Acceptance gate: one self-contained check per shipped claim, each printing
// its sub-checks with computed-versus-required values and ending in a single
// PASS/FAIL line. Run with no arguments for the full gate or with one
// criterion name (see kCriteria) to run that criterion alone, which is how
// the ctest entries invoke it. Exit code 0 only if everything that ran
// passed. Checks that the implementation cannot honestly meet are left in
// place to fail loudly rather than being weakened to pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "swingup/bessel.hpp"
#include "swingup/dynamics.hpp"
#include "swingup/integrate.hpp"
#include "swingup/photonics.hpp"
#include "swingup/protocols.hpp"
#include "swingup/pulses.hpp"
#include "swingup/states.hpp"
#include "swingup/sweeps.hpp"
#include "swingup/units.hpp"

using namespace swingup;
using units::mev_to_rate;
using units::pi;
using units::rate_to_mev;

namespace {

// Collects sub-check lines and the overall verdict for one criterion.
class Checker {
 public:
  bool require(bool ok, const std::string& label, const std::string& detail) {
    std::printf("  [%s] %s: %s\n", ok ? " ok " : "FAIL", label.c_str(), detail.c_str());
    all_ok_ = all_ok_ && ok;
    return ok;
  }

  bool require_le(double value, double limit, const std::string& label) {
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%.6g (limit %.6g)", value, limit);
    return require(value <= limit, label, detail);
  }

  bool require_ge(double value, double floor, const std::string& label) {
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%.6g (floor %.6g)", value, floor);
    return require(value >= floor, label, detail);
  }

  bool require_near(double value, double target, double tolerance, const std::string& label) {
    char detail[160];
    std::snprintf(detail, sizeof(detail), "computed %.10g, required %.10g +- %.2g", value, target,
                  tolerance);
    return require(std::abs(value - target) <= tolerance, label, detail);
  }

  bool ok() const { return all_ok_; }

 private:
  bool all_ok_ = true;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void check_runtime(Checker& c, const Stopwatch& watch, double budget_s) {
  char detail[160];
  const double elapsed = watch.seconds();
  std::snprintf(detail, sizeof(detail), "%.2f s (budget %.0f s)", elapsed, budget_s);
  c.require(elapsed <= budget_s, "runtime", detail);
}

// Step size used by the direct integrations here: the same drift-budget rule
// the sweep engine applies.
double planned_step(const Pulse& pulse, double budget, double max_step) {
  const auto [t0, t1] = drive_window(pulse);
  const double span = t1 - t0;
  const double cap = std::min(max_step, drift_limited_step(max_angular_rate(pulse), span, budget));
  const auto n = std::max<std::int64_t>(1, (std::int64_t)std::ceil(span / cap - 1e-12));
  return span / (double)n;
}

// Tabulated pulse-pair working points: first-pulse detuning (meV), companion
// detuning (meV), widths (ps), areas (units of pi), delay (ps). The published
// listing of the last row prints a first width of 2.50 ps, but its companion
// detuning is reproducible from the pairing rule only with 2.40 ps (0.26 meV
// off otherwise), so 2.40 is taken as the value actually used.
struct PairRow {
  double d1_mev, d2_mev, sigma1, sigma2, alpha1_pi, alpha2_pi, tau;
};
constexpr PairRow kPairRows[5] = {
    {-5.0, -11.7826, 4.50, 7.10, 25.00, 25.00, 0.00},
    {-5.0, -13.5624, 1.55, 1.55, 13.06, 10.45, 0.00},
    {-5.0, -12.5522, 2.23, 5.00, 15.30, 28.31, 2.40},
    {-8.0, -19.1630, 2.40, 3.04, 22.65, 19.29, -0.73},
    {-11.0, -25.7450, 2.40, 3.60, 28.57, 27.35, 1.50},
};

TwoColor pair_pulse(const PairRow& row) {
  TwoColor p;
  p.alpha1 = row.alpha1_pi * pi;
  p.sigma1 = row.sigma1;
  p.delta1 = mev_to_rate(row.d1_mev);
  p.alpha2 = row.alpha2_pi * pi;
  p.sigma2 = row.sigma2;
  p.delta2 = mev_to_rate(row.d2_mev);
  p.tau = row.tau;
  p.phi = 0.0;
  return p;
}

TwoColor reference_pair() { return pair_pulse(kPairRows[3]); }

FmGaussian fm_point_a() {
  return {6.2 * pi, 4.0, mev_to_rate(-6.0), mev_to_rate(2.0), mev_to_rate(6.08)};
}
FmGaussian fm_point_b() {
  return {30.3 * pi, 4.0, mev_to_rate(-6.0), mev_to_rate(1.0), mev_to_rate(8.32)};
}

// ---------------------------------------------------------------------------

// Constant drive must follow the closed-form oscillation
// f(t) = a sin^2(Omega_R t / 2) to 1e-6 over 20 periods.
bool constant_drive_oracle() {
  Checker c;
  const Stopwatch watch;
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> amp(0.5, 3.0);
  std::uniform_real_distribution<double> det(-3.0, 3.0);

  for (int k = 0; k < 10; ++k) {
    const double omega0 = amp(rng);
    const double delta = det(rng);
    const RabiParams rabi = rabi_params(omega0, delta);
    const double t_end = 20.0 * 2.0 * pi / rabi.omega_r;
    const ConstantDrive pulse{omega0, delta, 0.0, t_end};

    const double h = planned_step(pulse, 1e-9, 1e-3);
    double worst = 0.0;
    const auto rhs = [&](double t, const BlochState& s) {
      return bloch_rhs(s, drive_at(pulse, t).omega);
    };
    integrate_fixed(rhs, ground_state(), 0.0, t_end, FixedStep{h},
                    [&](double t, const BlochState& s) {
                      const double half = std::sin(0.5 * rabi.omega_r * t);
                      worst = std::max(worst, std::abs(s.f - rabi.amplitude_a * half * half));
                    });
    char label[96];
    std::snprintf(label, sizeof(label), "pair %d (omega0=%.3f, delta=%+.3f): max |f - oracle|",
                  k + 1, omega0, delta);
    c.require_le(worst, 1e-6, label);
  }
  check_runtime(c, watch, 1.0);
  return c.ok();
}

// Alternating-detuning swing-up: the scanned schedule near the documented
// duration must invert past 0.99 with a per-cycle envelope that climbs
// monotonically to its maximum.
bool rectangular_swingup() {
  Checker c;
  const Stopwatch watch;
  const double omega0 = 1.0;
  const double target = 4.95 * pi / omega0;
  const ScheduleScanResult scan =
      best_rectangular_schedule(omega0, -2.74 * omega0, -5.47 * omega0, target);

  char detail[160];
  std::snprintf(detail, sizeof(detail), "%.4f ps = %.3f pi/omega0 (target 4.95, tolerance 5%%)",
                scan.duration, scan.duration * omega0 / pi);
  c.require(std::abs(scan.duration - target) <= 0.05 * target + 1e-9, "total duration", detail);
  c.require_ge(scan.final_occupation, 0.99, "final occupation");

  // Occupation at the end of each low/high cycle.
  std::vector<double> boundaries;
  double t_edge = scan.schedule.t_start;
  for (std::size_t i = 0; i < scan.schedule.segments.size(); ++i) {
    t_edge += scan.schedule.segments[i].dwell;
    if (i % 2 == 1) boundaries.push_back(t_edge);
  }
  const Pulse pulse = scan.schedule;
  const double h = planned_step(pulse, 1e-9, 5e-4);
  std::vector<double> envelope;
  std::size_t next = 0;
  const auto rhs = [&](double t, const BlochState& s) {
    return bloch_rhs(s, drive_at(pulse, t).omega);
  };
  integrate_fixed(rhs, ground_state(), scan.schedule.t_start, t_edge, FixedStep{h},
                  [&](double t, const BlochState& s) {
                    while (next < boundaries.size() && t >= boundaries[next] - 1e-12) {
                      envelope.push_back(s.f);
                      ++next;
                    }
                  });
  bool monotone = envelope.size() == boundaries.size();
  for (std::size_t i = 1; i < envelope.size(); ++i) monotone = monotone && envelope[i] > envelope[i - 1];
  std::snprintf(detail, sizeof(detail), "%zu cycle-end samples, first %.4f, last %.4f",
                envelope.size(), envelope.empty() ? 0.0 : envelope.front(),
                envelope.empty() ? 0.0 : envelope.back());
  c.require(monotone, "per-cycle envelope monotone increasing", detail);
  check_runtime(c, watch, 1.0);
  return c.ok();
}

// Both frequency-modulated working points must invert past 0.95 inside a
// second each.
bool fm_swingup_working_points() {
  Checker c;
  const IntegrationSettings settings;
  {
    const Stopwatch watch;
    c.require_ge(final_occupation(fm_point_a(), settings), 0.95,
                 "modulated point a (area 6.2 pi) final occupation");
    check_runtime(c, watch, 1.0);
  }
  {
    const Stopwatch watch;
    c.require_ge(final_occupation(fm_point_b(), settings), 0.95,
                 "modulated point b (area 30.3 pi) final occupation");
    check_runtime(c, watch, 1.0);
  }
  return c.ok();
}

// Every tabulated pulse pair must invert past 0.99; the -8 meV row is pinned
// at 0.9999 +- 0.0005; and the companion detunings must be reproducible from
// the pairing rule to 0.002 meV.
bool pulse_pair_working_points() {
  Checker c;
  const Stopwatch watch;
  const IntegrationSettings settings;
  for (const PairRow& row : kPairRows) {
    const TwoColor p = pair_pulse(row);
    const double f = final_occupation(p, settings);
    char label[96];
    std::snprintf(label, sizeof(label), "row at %.1f meV: final occupation", row.d1_mev);
    c.require_ge(f, 0.99, label);
    if (row.d1_mev == -8.0) c.require_near(f, 0.9999, 0.0005, "row at -8.0 meV: pinned value");

    const double peak = gaussian_envelope(p.alpha1, p.sigma1, 0.0);
    const double d2 = rate_to_mev(second_detuning(p.delta1, peak).delta2);
    std::snprintf(label, sizeof(label), "row at %.1f meV: recomputed companion detuning (meV)",
                  row.d1_mev);
    c.require_near(d2, row.d2_mev, 0.002, label);
  }
  check_runtime(c, watch, 5.0);
  return c.ok();
}

// The modulation-frequency x area map must show the high-occupation stripe
// structure with its onset near 6.0 meV, and the first stripe must sit where
// the sideband effective area crosses pi.
bool modulation_frequency_stripe() {
  Checker c;
  const Stopwatch watch;
  SweepGrid grid;
  grid.base = fm_point_a();
  grid.axis1 = {"omega_m", mev_to_rate(5.0), mev_to_rate(9.0), 100};
  grid.axis2 = SweepAxis{"alpha", 0.0, 40.0 * pi, 100};
  const SweepResult map = run_sweep(grid, 0);
  const std::size_t n2 = map.axis2_values.size();
  c.require(map.failed_cells == 0, "all map cells evaluated",
            std::to_string(map.failed_cells) + " failures");

  // Row closest to area 6.2 pi: the occupation maximum along it marks the
  // stripe position.
  std::size_t row = 0;
  for (std::size_t j = 0; j < n2; ++j)
    if (std::abs(map.axis2_values[j] - 6.2 * pi) < std::abs(map.axis2_values[row] - 6.2 * pi))
      row = j;
  std::size_t peak_col = 0;
  for (std::size_t i = 0; i < map.axis1_values.size(); ++i)
    if (map.values[i * n2 + row] > map.values[peak_col * n2 + row]) peak_col = i;
  const double peak_mev = rate_to_mev(map.axis1_values[peak_col]);
  const double peak_f = map.values[peak_col * n2 + row];
  c.require_near(peak_mev, 6.0, 0.1, "stripe position along the 6.2 pi row (meV)");
  c.require_ge(peak_f, 0.95, "stripe occupation at that position");

  // The column through the stripe must carry several distinct high-occupation
  // bands (the stripe structure repeats along the area axis).
  int bands = 0;
  std::size_t last_hit = 0;
  bool any = false;
  for (std::size_t j = 0; j < n2; ++j) {
    if (map.values[peak_col * n2 + j] >= 0.9) {
      if (!any || j - last_hit > 3) ++bands;
      last_hit = j;
      any = true;
    }
  }
  c.require_ge(bands, 3, "distinct high-occupation bands along the area axis");

  const double predicted =
      effective_sideband_area(6.2 * pi, mev_to_rate(2.0), mev_to_rate(6.08)) / pi;
  c.require_near(predicted, 1.0, 0.05, "sideband effective area at the working point (pi)");
  check_runtime(c, watch, 120.0);
  return c.ok();
}

// The relative phase of the two pulses must not matter.
bool phase_invariance() {
  Checker c;
  const Stopwatch watch;
  const IntegrationSettings settings;
  TwoColor p = reference_pair();
  const double f0 = final_occupation(p, settings);
  double worst = 0.0;
  for (int k = 1; k < 32; ++k) {
    p.phi = 2.0 * pi * (double)k / 32.0;
    worst = std::max(worst, std::abs(final_occupation(p, settings) - f0));
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "max |f(phi) - f(0)| = %.3g over 32 phases (limit 1e-3)",
                worst);
  c.require(worst < 1e-3, "occupation is phase independent", detail);
  check_runtime(c, watch, 10.0);
  return c.ok();
}

// Companion-detuning x delay maps: the high-occupation ridge must be mirror
// symmetric in the delay; pulses of identical shape must stay capped at 0.93
// when fully overlapped yet exceed 0.99 once separated by >= 2.5 ps.
bool delay_symmetry() {
  Checker c;
  char detail[160];

  SweepGrid grid;
  grid.base = reference_pair();
  grid.axis1 = {"delta2", mev_to_rate(-30.0), mev_to_rate(-8.0), 60};
  grid.axis2 = SweepAxis{"tau", -6.0, 6.0, 60};

  {
    const Stopwatch watch;
    const SweepResult map = run_sweep(grid, 0);
    const std::size_t n2 = map.axis2_values.size();
    double best = 0.0;
    double worst_mirror = 0.0;
    for (std::size_t i = 0; i < map.axis1_values.size(); ++i) {
      std::size_t ridge = 0;
      for (std::size_t j = 0; j < n2; ++j) {
        best = std::max(best, map.values[i * n2 + j]);
        if (map.values[i * n2 + j] > map.values[i * n2 + ridge]) ridge = j;
      }
      const double mirrored = map.values[i * n2 + (n2 - 1 - ridge)];
      worst_mirror = std::max(worst_mirror, std::abs(map.values[i * n2 + ridge] - mirrored));
    }
    c.require_ge(best, 0.99, "high-occupation ridge present");
    std::snprintf(detail, sizeof(detail),
                  "max |f(ridge) - f(mirrored delay)| = %.3g (limit 0.02)", worst_mirror);
    c.require(worst_mirror <= 0.02, "ridge agrees under delay reversal", detail);
    check_runtime(c, watch, 120.0);
  }

  // Identical pulse shapes: same width and area for both colors.
  TwoColor identical = reference_pair();
  identical.alpha2 = identical.alpha1;
  identical.sigma2 = identical.sigma1;
  {
    const Stopwatch watch;
    SweepGrid same = grid;
    same.base = identical;
    const SweepResult map = run_sweep(same, 0);
    const std::size_t n2 = map.axis2_values.size();
    double best_late = 0.0;
    for (std::size_t i = 0; i < map.axis1_values.size(); ++i)
      for (std::size_t j = 0; j < n2; ++j)
        if (map.axis2_values[j] >= 2.5) best_late = std::max(best_late, map.values[i * n2 + j]);
    c.require_ge(best_late, 0.99, "identical shapes separated by >= 2.5 ps reach");

    // Fully overlapped case: scan the companion detuning at zero delay.
    SweepGrid line = same;
    TwoColor overlapped = identical;
    overlapped.tau = 0.0;
    line.base = overlapped;
    line.axis2.reset();
    const SweepResult overlap = run_sweep(line, 0);
    const double ceiling = *std::max_element(overlap.values.begin(), overlap.values.end());
    c.require_le(ceiling, 0.93, "identical fully-overlapped shapes stay below");
    check_runtime(c, watch, 120.0);
  }
  return c.ok();
}

// Photon statistics of the periodically driven emitter against the published
// figures: purity and indistinguishability must land inside +-0.10 pp, the
// zero-delay intensity correlation must vanish exactly, and the
// instantaneous-inversion control must be exact. The two photon-output checks
// fail: the windowed-integral definition implemented here yields slightly
// more than one photon per period for both drives (re-excitation while the
// pulse overlaps the decay), and no self-consistent reading of the published
// output numbers reproduces them. They are kept at the published targets so
// the gap stays visible.
bool photon_statistics() {
  Checker c;
  const Stopwatch watch;
  const double gamma = 1e-3;   // 1/ns in 1/ps
  const double period = 1e4;   // 10 ns in ps

  const PulseTrainSpec pair_train = pulsed_train(reference_pair(), gamma, period);
  const EmissionMetrics pair = emission_metrics(pair_train);
  c.require_near(pair.purity, 0.9985, 0.0010, "pulse pair: purity");
  c.require_near(pair.indistinguishability, 0.9985, 0.0010, "pulse pair: indistinguishability");
  c.require_near(pair.photon_output, 0.9964, 0.0010, "pulse pair: photon output");

  const PulseTrainSpec pi_train =
      pulsed_train(FmGaussian{pi, 2.40, 0.0, 0.0, 0.0}, gamma, period);
  const EmissionMetrics res = emission_metrics(pi_train);
  c.require_near(res.purity, 0.9975, 0.0010, "resonant pi pulse: purity");
  c.require_near(res.indistinguishability, 0.9975, 0.0010,
                 "resonant pi pulse: indistinguishability");
  c.require_near(res.photon_output, 0.9985, 0.0010, "resonant pi pulse: photon output");

  const CorrelationTable table = correlation_table(pair_train);
  double g2_zero = 1.0;
  bool found = false;
  for (std::size_t i = 0; i < table.tau.size(); ++i)
    if (table.tau[i] == 0.0) {
      g2_zero = table.g2[i];
      found = true;
    }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "value %.3g at zero delay (%s)", g2_zero,
                found ? "node present" : "node missing");
  c.require(found && g2_zero == 0.0, "zero-delay intensity correlation vanishes exactly", detail);

  const EmissionMetrics ideal = emission_metrics(ideal_train(gamma, period));
  std::snprintf(detail, sizeof(detail), "(%.17g, %.17g, %.17g)", ideal.purity,
                ideal.indistinguishability, ideal.photon_output);
  c.require(ideal.purity == 1.0 && ideal.indistinguishability == 1.0 &&
                ideal.photon_output == 1.0,
            "instantaneous-inversion control is exactly (1, 1, 1)", detail);
  check_runtime(c, watch, 600.0);
  return c.ok();
}

// Conservation and determinism: norms and traces must hold to 1e-8 across
// representative drives of every other criterion, the density matrix must
// stay positive, and sweeps must be bit-identical for 1, 4, and
// hardware-many workers.
bool conservation_and_determinism() {
  Checker c;
  const Stopwatch watch;

  std::vector<std::pair<std::string, Pulse>> drives;
  drives.emplace_back("constant drive", ConstantDrive{1.5, -0.8, 0.0, 40.0});
  drives.emplace_back(
      "alternating-detuning schedule",
      best_rectangular_schedule(1.0, -2.74, -5.47, 4.95 * pi).schedule);
  drives.emplace_back("modulated point a", fm_point_a());
  drives.emplace_back("modulated point b", fm_point_b());
  for (const PairRow& row : kPairRows) {
    char name[64];
    std::snprintf(name, sizeof(name), "pulse pair at %.1f meV", row.d1_mev);
    drives.emplace_back(name, pair_pulse(row));
  }

  for (const auto& [name, pulse] : drives) {
    const double h = planned_step(pulse, 1e-9, 5e-4);
    const auto [t0, t1] = drive_window(pulse);
    double drift = 0.0;
    const auto rhs = [&p = pulse](double t, const BlochState& s) {
      return bloch_rhs(s, drive_at(p, t).omega);
    };
    integrate_fixed(rhs, ground_state(), t0, t1, FixedStep{h},
                    [&](double, const BlochState& s) {
                      drift = std::max(drift, std::abs(bloch_norm(s) - 1.0));
                    });
    c.require_le(drift, 1e-8, name + ": closed-system norm drift");
  }

  // Open system: trace and positivity along the decaying pair trajectory.
  {
    const Pulse pulse = reference_pair();
    const double gamma = 1e-3;
    const double h = planned_step(pulse, 1e-9, 5e-4);
    const auto [t0, t1] = drive_window(pulse);
    double trace_drift = 0.0;
    double most_negative = 0.0;
    const auto rhs = [&](double t, const DensityMatrix& r) {
      return lindblad_rhs_unchecked(r, drive_at(pulse, t).omega, gamma);
    };
    integrate_fixed(rhs, DensityMatrix{}, t0, t1, FixedStep{h},
                    [&](double, const DensityMatrix& r) {
                      trace_drift = std::max(trace_drift, std::abs(trace(r) - 1.0));
                      most_negative = std::min(most_negative, min_eigenvalue(r));
                    });
    c.require_le(trace_drift, 1e-8, "open-system trace drift");
    c.require_ge(most_negative, -1e-9, "density-matrix positivity (smallest eigenvalue)");
  }

  // Sweep determinism across worker counts.
  {
    SweepGrid grid;
    grid.base = reference_pair();
    grid.axis1 = {"delta2", mev_to_rate(-30.0), mev_to_rate(-8.0), 12};
    grid.axis2 = SweepAxis{"tau", -6.0, 6.0, 12};
    const SweepResult one = run_sweep(grid, 1);
    const SweepResult four = run_sweep(grid, 4);
    const SweepResult hardware = run_sweep(grid, 0);
    const auto csv = [](const SweepResult& r) {
      std::ostringstream out;
      write_csv(r, out);
      return out.str();
    };
    const bool values_equal =
        one.values.size() == four.values.size() &&
        one.values.size() == hardware.values.size() &&
        std::memcmp(one.values.data(), four.values.data(),
                    one.values.size() * sizeof(double)) == 0 &&
        std::memcmp(one.values.data(), hardware.values.data(),
                    one.values.size() * sizeof(double)) == 0;
    c.require(values_equal, "sweep values bit-identical for 1/4/hardware workers",
              values_equal ? "all cells match" : "cell mismatch");
    c.require(csv(one) == csv(four) && csv(one) == csv(hardware),
              "serialized sweep tables identical", "byte comparison");
  }
  check_runtime(c, watch, 120.0);
  return c.ok();
}

// Weakly detuned area x width map: at small widths the high-occupation
// stripes are width-independent (plain oscillation bands); at large widths
// the ridge position bends with the width. Classified two ways: stripe
// position drift and mean gradient direction.
bool small_detuning_crossover() {
  Checker c;
  const Stopwatch watch;

  TwoColor base;
  base.alpha1 = base.alpha2 = 5.0 * pi;
  base.sigma1 = 2.0;
  base.sigma2 = 3.0;
  base.delta1 = mev_to_rate(-0.5);
  base.delta2 = mev_to_rate(-1.0);
  base.tau = 0.0;
  base.phi = 0.0;

  SweepGrid grid;
  grid.base = base;
  grid.axis1 = {"alpha12", 0.5 * pi, 15.0 * pi, 60};
  grid.axis2 = SweepAxis{"sigma1", 0.1, 6.0, 60};
  grid.derive_delta2 = true;
  grid.sigma2_over_sigma1 = 1.5;
  const SweepResult map = run_sweep(grid, 0);
  const std::size_t n1 = map.axis1_values.size();
  const std::size_t n2 = map.axis2_values.size();
  const auto f = [&](std::size_t i, std::size_t j) { return map.values[i * n2 + j]; };

  // Position of the first high band along the area axis, per width column.
  const auto first_band = [&](std::size_t j) -> std::optional<double> {
    for (std::size_t i = 1; i + 1 < n1; ++i)
      if (f(i, j) >= 0.5 && f(i, j) >= f(i - 1, j) && f(i, j) >= f(i + 1, j))
        return map.axis1_values[i];
    return std::nullopt;
  };
  double small_lo = 1e300, small_hi = -1e300, large_lo = 1e300, large_hi = -1e300;
  for (std::size_t j = 0; j < n2; ++j) {
    const double sigma = map.axis2_values[j];
    const auto band = first_band(j);
    if (!band) continue;
    if (sigma <= 1.0) {
      small_lo = std::min(small_lo, *band);
      small_hi = std::max(small_hi, *band);
    } else if (sigma >= 3.0) {
      large_lo = std::min(large_lo, *band);
      large_hi = std::max(large_hi, *band);
    }
  }
  c.require_le((small_hi - small_lo) / pi, 0.5,
               "band position drift across widths <= 1 ps (pi units)");
  c.require_ge((large_hi - large_lo) / pi, 1.5,
               "band position drift across widths >= 3 ps (pi units)");

  // Gradient direction: along-width variation relative to along-area
  // variation, per region.
  const auto direction_ratio = [&](double sigma_lo, double sigma_hi) {
    double along_width = 0.0, along_area = 0.0;
    for (std::size_t i = 0; i + 1 < n1; ++i)
      for (std::size_t j = 0; j + 1 < n2; ++j) {
        const double sigma = map.axis2_values[j];
        if (sigma < sigma_lo || sigma > sigma_hi) continue;
        along_area += std::abs(f(i + 1, j) - f(i, j));
        along_width += std::abs(f(i, j + 1) - f(i, j));
      }
    return along_width / along_area;
  };
  const double ratio_small = direction_ratio(0.0, 1.0);
  const double ratio_large = direction_ratio(3.0, 6.0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "small-width ratio %.3f < large-width ratio %.3f", ratio_small, ratio_large);
  c.require(ratio_small < ratio_large, "gradient direction separates the regions", detail);
  check_runtime(c, watch, 120.0);
  return c.ok();
}

struct Criterion {
  const char* name;
  bool (*check)();
};

constexpr Criterion kCriteria[] = {
    {"constant_drive_oracle", constant_drive_oracle},
    {"rectangular_swingup", rectangular_swingup},
    {"fm_swingup_working_points", fm_swingup_working_points},
    {"pulse_pair_working_points", pulse_pair_working_points},
    {"modulation_frequency_stripe", modulation_frequency_stripe},
    {"phase_invariance", phase_invariance},
    {"delay_symmetry", delay_symmetry},
    {"photon_statistics", photon_statistics},
    {"conservation_and_determinism", conservation_and_determinism},
    {"small_detuning_crossover", small_detuning_crossover},
};

}  // namespace

int main(int argc, char** argv) {
  std::optional<std::string> selected;
  if (argc > 1) selected = argv[1];
  if (argc > 2 || (selected && *selected == "--help")) {
    std::puts("usage: acceptance [criterion]");
    for (const Criterion& criterion : kCriteria) std::printf("  %s\n", criterion.name);
    return 2;
  }

  int ran = 0;
  int passed = 0;
  for (const Criterion& criterion : kCriteria) {
    if (selected && *selected != criterion.name) continue;
    std::printf("== %s ==\n", criterion.name);
    const bool ok = criterion.check();
    std::printf("%s %s\n", ok ? "PASS" : "FAIL", criterion.name);
    ++ran;
    passed += ok ? 1 : 0;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'; run with --help for the list\n",
                 selected->c_str());
    return 2;
  }
  if (ran > 1) std::printf("%d of %d criteria passed\n", passed, ran);
  return passed == ran ? 0 : 1;
}
