#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "swingup/bessel.hpp"
#include "swingup/dynamics.hpp"
#include "swingup/integrate.hpp"
#include "swingup/protocols.hpp"
#include "swingup/pulses.hpp"
#include "swingup/units.hpp"

using namespace swingup;

namespace {

// Independent long-double power series for J1, summed far past convergence.
// Deliberately exercises none of the library's branch logic, so it can vouch
// for the asymptotic branch as well.
long double j1_series(long double x) {
  const long double half = 0.5L * x;
  long double term = half;
  long double sum = term;
  for (int m = 1; m < 120; ++m) {
    term *= -(half * half) / ((long double)m * (long double)(m + 1));
    sum += term;
  }
  return sum;
}

double final_occupation_of(const Pulse& pulse, double h = 2e-4) {
  const auto [t0, t1] = drive_window(pulse);
  auto sys = [&](double t, const BlochState& s) { return bloch_rhs(s, drive_at(pulse, t).omega); };
  return integrate_fixed(sys, ground_state(), t0, t1, FixedStep{h}).f;
}

}  // namespace

TEST_CASE("rabi_params on the reference detunings") {
  const RabiParams res = rabi_params(1.0, 0.0);
  CHECK(res.omega_r == doctest::Approx(1.0));
  CHECK(res.amplitude_a == doctest::Approx(1.0));
  const RabiParams low = rabi_params(1.0, -2.74);
  CHECK(low.omega_r == doctest::Approx(2.916779045454078).epsilon(1e-12));
  CHECK(low.amplitude_a == doctest::Approx(0.11754196248060556).epsilon(1e-12));
  const RabiParams high = rabi_params(1.0, -5.47);
  CHECK(high.omega_r == doctest::Approx(5.560656436069396).epsilon(1e-12));
  CHECK(high.amplitude_a == doctest::Approx(0.032340585170548074).epsilon(1e-12));
  CHECK_THROWS_AS(rabi_params(0.0, 0.0), std::invalid_argument);
}

TEST_CASE("rabi_params invariants hold on random inputs") {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int i = 0; i < 200; ++i) {
    const double om = std::abs(u(rng)), d = u(rng);
    if (om == 0.0 && d == 0.0) continue;
    const RabiParams r = rabi_params(om, d);
    CHECK(r.omega_r >= std::abs(d));
    CHECK(r.amplitude_a >= 0.0);
    CHECK(r.amplitude_a <= 1.0);
    if (d != 0.0) CHECK(r.amplitude_a < 1.0);
  }
}

TEST_CASE("second detuning reproduces the reference parameter sets") {
  struct Row {
    double hbar_delta1, hbar_delta2, sigma1, alpha1_pi;
  };
  // (detuning1, detuning2, width, area/pi) for the five published sets.
  const std::vector<Row> rows = {
      {-5.0, -11.7826, 4.50, 25.00}, {-5.0, -13.5624, 1.55, 13.06},
      {-5.0, -12.5522, 2.23, 15.30}, {-8.0, -19.1630, 2.40, 22.65},
      {-11.0, -25.7450, 2.40, 28.57},
  };
  for (const auto& row : rows) {
    const double omega1 = gaussian_envelope(row.alpha1_pi * units::pi, row.sigma1, 0.0);
    const SecondDetuning out = second_detuning(row.hbar_delta1 / units::hbar_mev_ps, omega1);
    CHECK(!out.red_warning);
    CHECK(std::abs(out.delta2 * units::hbar_mev_ps - row.hbar_delta2) < 0.002);
  }
}

TEST_CASE("second detuning limits and warnings") {
  const SecondDetuning zero_drive = second_detuning(-3.0, 0.0);
  CHECK(zero_drive.delta2 == doctest::Approx(-6.0));
  CHECK(!zero_drive.red_warning);
  CHECK(second_detuning(0.5, 1.0).red_warning);
  CHECK(second_detuning(0.0, 1.0).red_warning);
  // The companion detuning always lies beyond twice the first.
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.1, 30.0);
  for (int i = 0; i < 100; ++i) {
    const double d1 = -u(rng), om = u(rng);
    CHECK(std::abs(second_detuning(d1, om).delta2) > 2.0 * std::abs(d1));
  }
}

TEST_CASE("bessel_j1 against an independent series and fixed references") {
  for (double x = 0.0; x <= 10.0; x += 0.0625)
    CHECK(std::abs(bessel_j1(x) - (double)j1_series((long double)x)) < 1e-12);
  const std::vector<std::pair<double, double>> refs = {
      {0.1, 0.049937526036242},    {0.5, 0.24226845767487387},  {1.0, 0.44005058574493355},
      {2.0, 0.5767248077568734},   {3.0, 0.33905895852593654},  {5.0, -0.3275791375914653},
      {7.5, 0.13524842757970554},  {8.0, 0.2346363468539146},   {8.5, 0.27312196367405384},
      {9.5, 0.1612644307575298},   {10.0, 0.04347274616886141}, {13.0, -0.07031805212177818},
      {15.0, 0.20510403861352278}, {17.5, -0.163419969425755},  {20.0, 0.0668331241758502},
  };
  for (const auto& [x, v] : refs) CHECK(std::abs(bessel_j1(x) - v) < 1e-12);
  const std::vector<std::pair<double, double>> refs0 = {
      {0.5, 0.938469807240813},   {3.0, -0.2600519549019335}, {8.0, 0.1716508071375539},
      {9.5, -0.19392874768742227}, {13.0, 0.2069261023770678}, {20.0, 0.16702466434058322},
  };
  for (const auto& [x, v] : refs0) CHECK(std::abs(bessel_j0(x) - v) < 1e-12);
  CHECK(bessel_j1(-2.0) == doctest::Approx(-bessel_j1(2.0)));
  CHECK(bessel_j0(-3.0) == doctest::Approx(bessel_j0(3.0)));
}

TEST_CASE("effective sideband area") {
  CHECK(effective_sideband_area(5.0, 0.0, 1.0) == 0.0);
  const double alpha_eff = effective_sideband_area(
      6.2 * units::pi, 2.0 / units::hbar_mev_ps, 6.08 / units::hbar_mev_ps);
  CHECK(alpha_eff / units::pi == doctest::Approx(1.006006135191301).epsilon(1e-9));
  // Odd in the modulation amplitude.
  CHECK(effective_sideband_area(2.0, -1.5, 2.0) ==
        doctest::Approx(-effective_sideband_area(2.0, 1.5, 2.0)));
  CHECK_THROWS_AS(effective_sideband_area(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-9));
}

TEST_CASE("modulation frequency hint") {
  CHECK(fm_modulation_frequency_hint(0.0, -6.0 / units::hbar_mev_ps) * units::hbar_mev_ps ==
        doctest::Approx(6.0));
  const double peak = gaussian_envelope(6.2 * units::pi, 4.0, 0.0);
  CHECK(fm_modulation_frequency_hint(peak, -6.0 / units::hbar_mev_ps) * units::hbar_mev_ps ==
        doctest::Approx(6.134736253320651).epsilon(1e-12));
  CHECK(fm_modulation_frequency_hint(3.0, -4.0) ==
        doctest::Approx(rabi_params(3.0, -4.0).omega_r));
}

TEST_CASE("rectangular schedule construction") {
  const RectangularSwitched p = rectangular_schedule(1.0, -2.74, -5.47, 3);
  REQUIRE(p.segments.size() == 6);
  CHECK(p.segments[0].delta == doctest::Approx(-2.74));
  CHECK(p.segments[0].dwell == doctest::Approx(1.0770759816332665).epsilon(1e-12));
  CHECK(p.segments[1].delta == doctest::Approx(-5.47));
  CHECK(p.segments[1].dwell == doctest::Approx(0.5649679475271553).epsilon(1e-12));
  double total = 0.0;
  for (const auto& s : p.segments) total += s.dwell;
  CHECK(total == doctest::Approx(3.0 * (1.0770759816332665 + 0.5649679475271553)));
  CHECK_THROWS_AS(rectangular_schedule(1.0, -5.47, -2.74, 3), std::invalid_argument);
  CHECK_THROWS_AS(rectangular_schedule(1.0, -2.74, -5.47, 0), std::invalid_argument);
}

TEST_CASE("equal detunings cap the transfer at the Rabi amplitude") {
  const double delta = -3.0;
  const RectangularSwitched p = rectangular_schedule(1.0, delta, delta, 4);
  const double f_end = final_occupation_of(Pulse{p});
  const double bound = rabi_params(1.0, delta).amplitude_a;
  CHECK(f_end <= bound + 1e-6);
}

TEST_CASE("swing-up climbs cycle by cycle") {
  const RectangularSwitched p = rectangular_schedule(1.0, -2.74, -5.47, 5);
  auto sys = [&](double t, const BlochState& s) {
    return bloch_rhs(s, rectangular_drive(p, t).omega);
  };
  const double pair_len = p.segments[0].dwell + p.segments[1].dwell;
  std::vector<double> cycle_end_f;
  BlochState y = ground_state();
  for (int k = 0; k < 5; ++k) {
    y = integrate_fixed(sys, y, k * pair_len, (k + 1) * pair_len, FixedStep{1e-4});
    cycle_end_f.push_back(y.f);
  }
  std::size_t arg_max = 0;
  for (std::size_t i = 1; i < cycle_end_f.size(); ++i)
    if (cycle_end_f[i] > cycle_end_f[arg_max]) arg_max = i;
  for (std::size_t i = 1; i <= arg_max; ++i) CHECK(cycle_end_f[i] >= cycle_end_f[i - 1] - 1e-9);
  CHECK(cycle_end_f[arg_max] > cycle_end_f[0]);
}

TEST_CASE("schedule scan reaches a high transfer at the target duration") {
  const double target = 4.95 * units::pi;  // omega0 = 1
  const ScheduleScanResult best = best_rectangular_schedule(1.0, -2.74, -5.47, target);
  CHECK(std::abs(best.duration - target) <= 0.05 * target);
  CHECK(best.final_occupation > 0.99);
  CHECK(best.n_cycles >= 1);
  // The scan result must be reproducible from its reported parameters.
  const RectangularSwitched rebuilt =
      rectangular_schedule(1.0, -2.74, -5.47, best.n_cycles, best.dwell_scale);
  CHECK(final_occupation_of(Pulse{rebuilt}, 1e-4) ==
        doctest::Approx(best.final_occupation).epsilon(1e-5));
}
