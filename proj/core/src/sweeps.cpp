#include "swingup/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "swingup/errors.hpp"
#include "swingup/integrate.hpp"
#include "swingup/protocols.hpp"
#include "swingup/sampler.hpp"
#include "swingup/version.hpp"

namespace swingup {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void apply_axis(Pulse& pulse, const std::string& name, double v) {
  const bool ok = std::visit(
      Overloaded{
          [&](ConstantDrive& p) {
            if (name == "omega0") return p.omega0 = v, true;
            if (name == "detuning") return p.detuning = v, true;
            return false;
          },
          [&](RectangularSwitched& p) {
            if (name == "omega0") return p.omega0 = v, true;
            return false;
          },
          [&](FmGaussian& p) {
            if (name == "alpha") return p.alpha = v, true;
            if (name == "sigma") return p.sigma = v, true;
            if (name == "delta_c") return p.delta_c = v, true;
            if (name == "delta_m") return p.delta_m = v, true;
            if (name == "omega_m") return p.omega_m = v, true;
            return false;
          },
          [&](TwoColor& p) {
            if (name == "alpha1") return p.alpha1 = v, true;
            if (name == "alpha2") return p.alpha2 = v, true;
            if (name == "alpha12") return p.alpha1 = p.alpha2 = v, true;
            if (name == "sigma1") return p.sigma1 = v, true;
            if (name == "sigma2") return p.sigma2 = v, true;
            if (name == "delta1") return p.delta1 = v, true;
            if (name == "delta2") return p.delta2 = v, true;
            if (name == "tau") return p.tau = v, true;
            if (name == "phi") return p.phi = v, true;
            return false;
          },
      },
      pulse);
  if (!ok)
    throw std::invalid_argument("sweep axis '" + name +
                                "' is not a parameter of this pulse type");
}

void apply_hooks(const SweepGrid& grid, Pulse& pulse) {
  if (!grid.derive_delta2 && grid.sigma2_over_sigma1 == 0.0) return;
  auto* tc = std::get_if<TwoColor>(&pulse);
  if (!tc)
    throw std::invalid_argument("sweep hooks require a two-color base pulse");
  if (grid.sigma2_over_sigma1 != 0.0) tc->sigma2 = grid.sigma2_over_sigma1 * tc->sigma1;
  if (grid.derive_delta2)
    tc->delta2 = second_detuning(tc->delta1, gaussian_envelope(tc->alpha1, tc->sigma1, 0.0)).delta2;
}

std::vector<double> axis_values(const SweepAxis& axis) {
  std::vector<double> v(axis.count);
  for (int i = 0; i < axis.count; ++i)
    v[i] = (axis.count == 1)
               ? axis.min
               : axis.min + (axis.max - axis.min) * (double)i / (double)(axis.count - 1);
  return v;
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

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

double final_occupation(const Pulse& pulse, const IntegrationSettings& st) {
  validate(pulse);
  if (st.gamma < 0.0) throw std::invalid_argument("final_occupation: negative decay rate");
  const StepPlan plan = plan_steps(pulse, st);
  if (plan.n == 0) return 0.0;
  const double drift_cap = std::max(1e-6, 1e3 * st.drift_budget);
  if (st.gamma == 0.0) {
    return with_sampler(pulse, plan.t0, 0.5 * plan.h, [&](auto& smp) {
      const BlochState end = propagate_bloch(ground_state(), plan.h, plan.n, smp);
      if (std::abs(bloch_norm(end) - 1.0) > drift_cap)
        throw NumericsError("final_occupation: Bloch norm drifted beyond tolerance");
      return end.f;
    });
  }
  return with_sampler(pulse, plan.t0, 0.5 * plan.h, [&](auto& smp) {
    const DensityMatrix end = propagate_lindblad(DensityMatrix{}, st.gamma, plan.h, plan.n, smp);
    if (std::abs(trace(end) - 1.0) > drift_cap)
      throw NumericsError("final_occupation: density-matrix trace drifted beyond tolerance");
    return end.rho_xx;
  });
}

Pulse resolve_cell(const SweepGrid& grid, double axis1_value,
                   std::optional<double> axis2_value) {
  Pulse pulse = grid.base;
  apply_axis(pulse, grid.axis1.param, axis1_value);
  if (axis2_value) apply_axis(pulse, grid.axis2->param, *axis2_value);
  apply_hooks(grid, pulse);
  return pulse;
}

namespace {

// Amplitude sweeps of the modulated Gaussian share the drive shape up to the
// overall area, so each non-amplitude column is sampled once at unit area and
// replayed scaled. The step plan uses the column's largest area.
bool fm_alpha_fast_path(const SweepGrid& grid, int& alpha_axis) {
  if (!std::holds_alternative<FmGaussian>(grid.base)) return false;
  const bool a1 = grid.axis1.param == "alpha";
  const bool a2 = grid.axis2 && grid.axis2->param == "alpha";
  if (a1 == a2) return false;
  alpha_axis = a1 ? 1 : 2;
  return true;
}

}  // namespace

SweepResult run_sweep(const SweepGrid& grid, int threads) {
  if (grid.axis1.count < 1 || (grid.axis2 && grid.axis2->count < 1))
    throw std::invalid_argument("run_sweep: axis count must be >= 1");
  {
    // Eagerly reject unknown parameter names and hook/base mismatches.
    Pulse probe = grid.base;
    apply_axis(probe, grid.axis1.param, grid.axis1.min);
    if (grid.axis2) apply_axis(probe, grid.axis2->param, grid.axis2->min);
    apply_hooks(grid, probe);
  }

  SweepResult result;
  result.grid = grid;
  result.axis1_values = axis_values(grid.axis1);
  if (grid.axis2) result.axis2_values = axis_values(*grid.axis2);
  const std::size_t n1 = result.axis1_values.size();
  const std::size_t n2 = grid.axis2 ? result.axis2_values.size() : 1;
  result.values.assign(n1 * n2, kNaN);
  result.version = kVersion;
  result.timestamp = utc_timestamp();

  std::atomic<int> failed{0};
  unsigned worker_count =
      (threads > 0) ? (unsigned)threads : std::max(1u, std::thread::hardware_concurrency());

  int alpha_axis = 0;
  if (fm_alpha_fast_path(grid, alpha_axis)) {
    // Work unit: one column of constant non-amplitude parameters.
    const std::vector<double>& alphas =
        (alpha_axis == 1) ? result.axis1_values : result.axis2_values;
    const std::size_t n_cols = (alpha_axis == 1) ? n2 : n1;
    std::atomic<std::size_t> next{0};
    auto column_worker = [&]() {
      for (std::size_t col = next.fetch_add(1); col < n_cols; col = next.fetch_add(1)) {
        const std::optional<double> other =
            grid.axis2 ? std::optional<double>((alpha_axis == 1) ? result.axis2_values[col]
                                                                 : result.axis1_values[col])
                       : std::nullopt;
        auto cell_index = [&](std::size_t ia) {
          return (alpha_axis == 1) ? ia * n2 + col : col * n2 + ia;
        };
        try {
          double alpha_max = 0.0;
          for (double a : alphas) alpha_max = std::max(alpha_max, a);
          Pulse shape = (alpha_axis == 1)
                            ? resolve_cell(grid, alpha_max, other)
                            : resolve_cell(grid, other.value(), alpha_max);
          validate(shape);
          const StepPlan plan = plan_steps(shape, grid.settings);
          FmGaussian unit = std::get<FmGaussian>(shape);
          unit.alpha = 1.0;
          std::vector<complexd> samples(2 * (std::size_t)plan.n + 1);
          {
            FmSampler smp(unit, plan.t0, 0.5 * plan.h);
            for (auto& s : samples) s = smp.next();
          }
          const double drift_cap = std::max(1e-6, 1e3 * grid.settings.drift_budget);
          for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
            if (alphas[ia] < 0.0) {
              ++failed;
              continue;
            }
            ScaledVectorSampler replay(samples, alphas[ia]);
            if (grid.settings.gamma == 0.0) {
              const BlochState end = propagate_bloch(ground_state(), plan.h, plan.n, replay);
              if (std::abs(bloch_norm(end) - 1.0) > drift_cap) {
                ++failed;
                continue;
              }
              result.values[cell_index(ia)] = end.f;
            } else {
              const DensityMatrix end = propagate_lindblad(DensityMatrix{}, grid.settings.gamma,
                                                           plan.h, plan.n, replay);
              if (std::abs(trace(end) - 1.0) > drift_cap) {
                ++failed;
                continue;
              }
              result.values[cell_index(ia)] = end.rho_xx;
            }
          }
        } catch (...) {
          failed += (int)alphas.size();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < worker_count; ++w) pool.emplace_back(column_worker);
    column_worker();
    for (auto& th : pool) th.join();
  } else {
    std::atomic<std::size_t> next{0};
    auto cell_worker = [&]() {
      const std::size_t total = n1 * n2;
      for (std::size_t idx = next.fetch_add(1); idx < total; idx = next.fetch_add(1)) {
        const std::size_t i1 = idx / n2, i2 = idx % n2;
        try {
          const Pulse pulse = resolve_cell(
              grid, result.axis1_values[i1],
              grid.axis2 ? std::optional<double>(result.axis2_values[i2]) : std::nullopt);
          result.values[idx] = final_occupation(pulse, grid.settings);
        } catch (...) {
          ++failed;
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < worker_count; ++w) pool.emplace_back(cell_worker);
    cell_worker();
    for (auto& th : pool) th.join();
  }

  result.failed_cells = failed.load();
  return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
  const bool two_d = result.grid.axis2.has_value();
  out << result.grid.axis1.param;
  if (two_d) out << ',' << result.grid.axis2->param;
  out << ",final_occupation\n";
  out << std::setprecision(17);
  const std::size_t n2 = two_d ? result.axis2_values.size() : 1;
  for (std::size_t i1 = 0; i1 < result.axis1_values.size(); ++i1) {
    for (std::size_t i2 = 0; i2 < n2; ++i2) {
      out << result.axis1_values[i1];
      if (two_d) out << ',' << result.axis2_values[i2];
      out << ',' << result.values[i1 * n2 + i2] << '\n';
    }
  }
}

void write_json(const SweepResult& result, std::ostream& out) {
  nlohmann::json j;
  auto axis_json = [](const SweepAxis& a) {
    return nlohmann::json{{"param", a.param}, {"min", a.min}, {"max", a.max}, {"count", a.count}};
  };
  j["axis1"] = axis_json(result.grid.axis1);
  j["axis2"] = result.grid.axis2 ? axis_json(*result.grid.axis2) : nlohmann::json(nullptr);
  j["axis1_values"] = result.axis1_values;
  if (result.grid.axis2) j["axis2_values"] = result.axis2_values;
  j["settings"] = {{"gamma", result.grid.settings.gamma},
                   {"drift_budget", result.grid.settings.drift_budget},
                   {"max_step", result.grid.settings.max_step}};
  j["derive_delta2"] = result.grid.derive_delta2;
  j["sigma2_over_sigma1"] = result.grid.sigma2_over_sigma1;
  if (result.grid.axis2) {
    nlohmann::json rows = nlohmann::json::array();
    const std::size_t n2 = result.axis2_values.size();
    for (std::size_t i1 = 0; i1 < result.axis1_values.size(); ++i1) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t i2 = 0; i2 < n2; ++i2) row.push_back(result.values[i1 * n2 + i2]);
      rows.push_back(std::move(row));
    }
    j["values"] = std::move(rows);
  } else {
    j["values"] = result.values;
  }
  j["failed_cells"] = result.failed_cells;
  j["version"] = result.version;
  j["timestamp"] = result.timestamp;
  out << j.dump(2) << '\n';
}

}  // namespace swingup
