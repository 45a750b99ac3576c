#include "swingup/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "swingup/errors.hpp"
#include "swingup/integrate.hpp"
#include "swingup/sampler.hpp"
#include "swingup/version.hpp"

namespace swingup {

namespace {

constexpr double kSteadyTol = 1e-10;

OpVec ground_vec() { return {complexd{1.0}, {}, {}, {}}; }

complexd dot(const OpVec& row, const OpVec& x) {
  return row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
}

// Drive + decay generator acting on an operator vector; w is the complex
// drive sample.
OpVec liouville(const OpVec& x, complexd w, double gamma) {
  const complexd pump = complexd(0.0, 0.5) * (w * x[2] - std::conj(w) * x[1]);
  return {-pump + gamma * x[3],
          complexd(0.0, 0.5) * w * (x[0] - x[3]) - 0.5 * gamma * x[1],
          complexd(0.0, -0.5) * std::conj(w) * (x[0] - x[3]) - 0.5 * gamma * x[2],
          pump - gamma * x[3]};
}

OpVec axpy(const OpVec& x, double a, const OpVec& y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2], x[3] + a * y[3]};
}

// RK4 advance of a single operator vector with the shared half-step sample
// contract of the state propagators.
template <class Sampler>
OpVec propagate_opvec(OpVec y, double gamma, double h, std::int64_t n_steps, Sampler& smp) {
  complexd w0 = smp.next();
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const complexd w1 = smp.next();
    const complexd w2 = smp.next();
    const OpVec k1 = liouville(y, w0, gamma);
    const OpVec k2 = liouville(axpy(y, 0.5 * h, k1), w1, gamma);
    const OpVec k3 = liouville(axpy(y, 0.5 * h, k2), w1, gamma);
    const OpVec k4 = liouville(axpy(y, h, k3), w2, gamma);
    for (int r = 0; r < 4; ++r) {
      y[r] += (h / 6.0) * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r]);
    }
    w0 = w2;
  }
  return y;
}

// Columns of a 4x4 map, evolved together so one drive-sample stream serves
// the whole propagator.
struct Mat4 {
  std::array<OpVec, 4> col{};
};

Mat4 identity_mat4() {
  Mat4 y;
  for (int j = 0; j < 4; ++j) y.col[j][j] = complexd{1.0};
  return y;
}

SuperOp to_superop(const Mat4& y) {
  SuperOp s;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) s.at(r, c) = y.col[c][r];
  return s;
}

Mat4 lmat(const Mat4& x, complexd w, double gamma) {
  Mat4 out;
  for (int j = 0; j < 4; ++j) out.col[j] = liouville(x.col[j], w, gamma);
  return out;
}

Mat4 madd(const Mat4& x, double a, const Mat4& y) {
  Mat4 out;
  for (int j = 0; j < 4; ++j) out.col[j] = axpy(x.col[j], a, y.col[j]);
  return out;
}

// RK4 advance of the window propagator, recording every stride-th step
// (including the initial identity) into nodes.
template <class Sampler>
void propagate_window(Mat4& y, double gamma, double h, std::int64_t n_steps, std::int64_t stride,
                      Sampler& smp, std::vector<SuperOp>& nodes) {
  nodes.push_back(to_superop(y));
  complexd w0 = smp.next();
  for (std::int64_t k = 0; k < n_steps; ++k) {
    const complexd w1 = smp.next();
    const complexd w2 = smp.next();
    const Mat4 k1 = lmat(y, w0, gamma);
    const Mat4 k2 = lmat(madd(y, 0.5 * h, k1), w1, gamma);
    const Mat4 k3 = lmat(madd(y, 0.5 * h, k2), w1, gamma);
    const Mat4 k4 = lmat(madd(y, h, k3), w2, gamma);
    for (int j = 0; j < 4; ++j)
      for (int r = 0; r < 4; ++r)
        y.col[j][r] += (h / 6.0) * (k1.col[j][r] + 2.0 * k2.col[j][r] + 2.0 * k3.col[j][r] + k4.col[j][r]);
    w0 = w2;
    if ((k + 1) % stride == 0) nodes.push_back(to_superop(y));
  }
}

// LU factorization with partial pivoting for the 4x4 node propagators.
struct Lu4 {
  std::array<complexd, 16> a;
  std::array<int, 4> piv{};

  explicit Lu4(const SuperOp& s) : a(s.m) {
    for (int k = 0; k < 4; ++k) {
      int p = k;
      for (int r = k + 1; r < 4; ++r)
        if (std::abs(a[4 * r + k]) > std::abs(a[4 * p + k])) p = r;
      piv[k] = p;
      if (p != k)
        for (int c = 0; c < 4; ++c) std::swap(a[4 * k + c], a[4 * p + c]);
      const complexd d = a[4 * k + k];
      if (std::abs(d) == 0.0) {
        throw NumericsError("photonics: window propagator is singular");
      }
      for (int r = k + 1; r < 4; ++r) {
        const complexd f = a[4 * r + k] / d;
        a[4 * r + k] = f;
        for (int c = k + 1; c < 4; ++c) a[4 * r + c] -= f * a[4 * k + c];
      }
    }
  }

  OpVec solve(OpVec x) const {
    for (int k = 0; k < 4; ++k)
      if (piv[k] != k) std::swap(x[k], x[piv[k]]);
    for (int r = 1; r < 4; ++r)
      for (int c = 0; c < r; ++c) x[r] -= a[4 * r + c] * x[c];
    for (int r = 3; r >= 0; --r) {
      for (int c = r + 1; c < 4; ++c) x[r] -= a[4 * r + c] * x[c];
      x[r] /= a[4 * r + r];
    }
    return x;
  }
};

// Window quadrature nodes: uniform subsample of the fine RK4 grid, with the
// propagator from the window start retained at each node.
struct Nodes {
  double t0 = 0.0;  // pulse-frame time of the window start
  double span = 0.0;
  double h = 0.0;
  std::int64_t n = 0;
  std::int64_t stride = 1;
  double dt = 0.0;  // node spacing
  std::vector<SuperOp> phi;
};

struct TrainContext {
  PulseTrainSpec spec;
  double gamma = 0.0;
  double period = 0.0;
  bool ideal = false;
  double span = 0.0;
  Nodes nd;
  SuperOp decay;       // free evolution across the drive-free stretch
  SuperOp period_map;  // one full period, window first
  OpVec steady{};      // period-start state
};

Nodes build_nodes(const PulseTrainSpec& spec) {
  Nodes nd;
  const auto window = drive_window(*spec.pulse);
  nd.t0 = window.first;
  nd.span = window.second - window.first;
  const double cap =
      std::min(spec.max_step, drift_limited_step(max_angular_rate(*spec.pulse), nd.span, spec.drift_budget));
  std::int64_t n = static_cast<std::int64_t>(std::ceil(nd.span / cap - 1e-12));
  n = std::max<std::int64_t>(n, 1);
  nd.stride = (n + spec.max_nodes - 1) / spec.max_nodes;
  n = ((n + nd.stride - 1) / nd.stride) * nd.stride;
  nd.n = n;
  nd.h = nd.span / static_cast<double>(n);
  nd.dt = static_cast<double>(nd.stride) * nd.h;
  nd.phi.reserve(static_cast<std::size_t>(n / nd.stride) + 1);
  Mat4 y = identity_mat4();
  with_sampler(*spec.pulse, nd.t0, 0.5 * nd.h, [&](auto& smp) {
    propagate_window(y, spec.gamma, nd.h, nd.n, nd.stride, smp, nd.phi);
    return 0;
  });
  return nd;
}

TrainContext build_context(const PulseTrainSpec& spec) {
  validate(spec);
  TrainContext ctx;
  ctx.spec = spec;
  ctx.gamma = spec.gamma;
  ctx.period = spec.period;
  ctx.ideal = !spec.pulse.has_value();
  if (ctx.ideal) {
    ctx.decay = free_decay_map(ctx.gamma, ctx.period);
    ctx.period_map = multiply(ctx.decay, inversion_map());
  } else {
    ctx.nd = build_nodes(spec);
    ctx.span = ctx.nd.span;
    ctx.decay = free_decay_map(ctx.gamma, ctx.period - ctx.span);
    ctx.period_map = multiply(ctx.decay, ctx.nd.phi.back());
  }

  OpVec x = ground_vec();
  bool settled = false;
  for (int k = 0; k < spec.warmup_periods; ++k) {
    const OpVec next = apply_map(ctx.period_map, x);
    double diff = 0.0;
    for (int r = 0; r < 4; ++r) diff = std::max(diff, std::abs(next[r] - x[r]));
    x = next;
    if (diff <= kSteadyTol) {
      settled = true;
      break;
    }
  }
  if (!settled) {
    throw ConvergenceError("periodic_steady_state: train not settled after " +
                           std::to_string(spec.warmup_periods) + " periods");
  }
  const double tr = (x[0] + x[3]).real();
  if (std::abs(tr - 1.0) > 1e-8) {
    throw NumericsError("periodic_steady_state: trace drifted beyond tolerance");
  }
  const complexd coh = 0.5 * (x[1] + std::conj(x[2]));
  ctx.steady = {complexd{x[0].real() / tr}, coh / tr, std::conj(coh) / tr, complexd{x[3].real() / tr}};
  return ctx;
}

// Steady trajectory and the per-node solves shared by the pair metrics and
// the correlation table.
struct NodeData {
  std::size_t count = 0;  // last node index
  double dt = 0.0;
  std::vector<double> w;           // trapezoid weights
  std::vector<double> rho;         // excited population along the window
  std::vector<OpVec> r;            // population readout rows
  std::vector<OpVec> m;            // coherence readout rows
  std::vector<OpVec> u;            // ground state pulled back to each node
  std::vector<OpVec> q;            // emission operator pulled back to each node
  std::vector<OpVec> sig;          // ground conditional, next period start
  std::vector<OpVec> c;            // emission conditional, next period start
  complexd rho_xg_end{};           // coherence at the window end
  double q_window = 0.0;           // population integral across the window
};

NodeData build_node_data(const TrainContext& ctx) {
  NodeData nds;
  const auto& phi = ctx.nd.phi;
  const std::size_t count = phi.size() - 1;
  nds.count = count;
  nds.dt = ctx.nd.dt;
  nds.w.assign(count + 1, nds.dt);
  nds.w.front() = 0.5 * nds.dt;
  nds.w.back() = 0.5 * nds.dt;
  if (count == 0) nds.w.front() = 0.0;

  nds.rho.resize(count + 1);
  nds.r.resize(count + 1);
  nds.m.resize(count + 1);
  nds.u.resize(count + 1);
  nds.q.resize(count + 1);
  nds.sig.resize(count + 1);
  nds.c.resize(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    const OpVec rv = apply_map(phi[i], ctx.steady);
    nds.rho[i] = rv[3].real();
    if (i == count) nds.rho_xg_end = rv[2];
    for (int k = 0; k < 4; ++k) {
      nds.r[i][k] = phi[i].at(3, k);
      nds.m[i][k] = phi[i].at(1, k);
    }
    const Lu4 lu(phi[i]);
    nds.u[i] = lu.solve(ground_vec());
    nds.q[i] = lu.solve({rv[2], rv[3], {}, {}});
    nds.sig[i] = apply_map(ctx.period_map, nds.u[i]);
    nds.c[i] = apply_map(ctx.period_map, nds.q[i]);
    nds.q_window += nds.w[i] * nds.rho[i];
  }
  return nds;
}

double trapz_range(const std::vector<double>& f, std::size_t lo, std::size_t hi, double dt) {
  if (hi <= lo) return 0.0;
  double s = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) s += f[i];
  s -= 0.5 * (f[lo] + f[hi]);
  return s * dt;
}

// Cumulative full-weight sums; definite integrals over aligned node ranges
// come out by differencing and halving the end contributions.
struct PrefixTrapz {
  std::vector<double> g;
  std::vector<double> cum;
  double dt = 0.0;

  PrefixTrapz() = default;
  PrefixTrapz(std::vector<double> vals, double spacing) : g(std::move(vals)), dt(spacing) {
    cum.resize(g.size());
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      s += g[i];
      cum[i] = s * dt;
    }
  }

  double eval(std::size_t lo, std::size_t hi) const {
    if (hi <= lo) return 0.0;
    return cum[hi] - cum[lo] + 0.5 * dt * (g[lo] - g[hi]);
  }
};

struct WalkContext {
  const TrainContext& ctx;

  OpVec partial_window(OpVec x, double a, double b) const {
    const double span = b - a;
    const auto steps = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(span / ctx.nd.h - 1e-9)));
    const double h = span / static_cast<double>(steps);
    return with_sampler(*ctx.spec.pulse, ctx.nd.t0 + a, 0.5 * h, [&](auto& smp) {
      return propagate_opvec(x, ctx.gamma, h, steps, smp);
    });
  }

  // Advances an operator vector between absolute times; each period starts
  // with its drive window (the ideal kick counts as a zero-length window).
  OpVec advance(OpVec x, double from, double to) const {
    constexpr double eps = 1e-8;
    const double T = ctx.period;
    double t = from;
    while (t < to - eps) {
      const auto k = static_cast<std::int64_t>(std::floor(t / T + 1e-12));
      const double local = t - static_cast<double>(k) * T;
      if (ctx.ideal) {
        if (local <= eps) x = apply_map(inversion_map(), x);
        const double seg = std::min(T, local + (to - t));
        x = apply_map(free_decay_map(ctx.gamma, seg - local), x);
        t = (seg >= T - eps) ? static_cast<double>(k + 1) * T : t + (seg - local);
      } else if (local < ctx.span - eps) {
        const double seg = std::min(ctx.span, local + (to - t));
        x = partial_window(x, local, seg);
        t += seg - local;
      } else {
        const double seg = std::min(T, local + (to - t));
        x = apply_map(free_decay_map(ctx.gamma, seg - local), x);
        t = (seg >= T - eps) ? static_cast<double>(k + 1) * T : t + (seg - local);
      }
    }
    return x;
  }
};

void flush_roundoff_negatives(std::vector<double>& v) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  const double floor = -1e-12 * peak;
  for (double& x : v)
    if (x < 0.0 && x >= floor) x = 0.0;
}

nlohmann::json version_field() { return std::string(kVersion); }

}  // namespace

PulseTrainSpec ideal_train(double gamma, double period) {
  PulseTrainSpec train;
  train.gamma = gamma;
  train.period = period;
  return train;
}

PulseTrainSpec pulsed_train(Pulse pulse, double gamma, double period) {
  PulseTrainSpec train;
  train.pulse = std::move(pulse);
  train.gamma = gamma;
  train.period = period;
  return train;
}

void validate(const PulseTrainSpec& train) {
  if (!std::isfinite(train.gamma) || train.gamma <= 0.0) {
    throw std::invalid_argument("PulseTrainSpec: gamma must be positive");
  }
  if (!std::isfinite(train.period) || train.period <= 0.0) {
    throw std::invalid_argument("PulseTrainSpec: period must be positive");
  }
  if (train.gamma * train.period < 8.0) {
    throw std::invalid_argument("PulseTrainSpec: period must cover at least eight emitter lifetimes");
  }
  if (train.warmup_periods < 1) {
    throw std::invalid_argument("PulseTrainSpec: warmup_periods must be at least 1");
  }
  if (!std::isfinite(train.drift_budget) || train.drift_budget <= 0.0) {
    throw std::invalid_argument("PulseTrainSpec: drift_budget must be positive");
  }
  if (!std::isfinite(train.max_step) || train.max_step <= 0.0) {
    throw std::invalid_argument("PulseTrainSpec: max_step must be positive");
  }
  if (train.max_nodes < 16) {
    throw std::invalid_argument("PulseTrainSpec: max_nodes must be at least 16");
  }
  if (train.pulse) {
    validate(*train.pulse);
    const auto window = drive_window(*train.pulse);
    if (window.second - window.first > 0.5 * train.period) {
      throw std::invalid_argument("PulseTrainSpec: drive window longer than half the period");
    }
  }
}

double window_span(const PulseTrainSpec& train) {
  if (!train.pulse) return 0.0;
  const auto window = drive_window(*train.pulse);
  return window.second - window.first;
}

OpVec apply_map(const SuperOp& s, const OpVec& x) {
  OpVec y{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) y[r] += s.at(r, c) * x[c];
  return y;
}

SuperOp multiply(const SuperOp& a, const SuperOp& b) {
  SuperOp out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      complexd s{};
      for (int k = 0; k < 4; ++k) s += a.at(r, k) * b.at(k, c);
      out.at(r, c) = s;
    }
  return out;
}

SuperOp identity_map() {
  SuperOp s;
  for (int r = 0; r < 4; ++r) s.at(r, r) = complexd{1.0};
  return s;
}

SuperOp free_decay_map(double gamma, double span) {
  const double ep = std::exp(-gamma * span);
  const double eh = std::exp(-0.5 * gamma * span);
  SuperOp s;
  s.at(0, 0) = complexd{1.0};
  s.at(0, 3) = complexd{1.0 - ep};
  s.at(1, 1) = complexd{eh};
  s.at(2, 2) = complexd{eh};
  s.at(3, 3) = complexd{ep};
  return s;
}

SuperOp inversion_map() {
  SuperOp s;
  s.at(3, 0) = complexd{1.0};
  s.at(3, 3) = complexd{1.0};
  return s;
}

OpVec to_opvec(const DensityMatrix& rho) {
  return {complexd{rho.rho_gg}, rho.rho_gx, std::conj(rho.rho_gx), complexd{rho.rho_xx}};
}

DensityMatrix to_density(const OpVec& x) {
  DensityMatrix rho;
  rho.rho_gg = x[0].real();
  rho.rho_xx = x[3].real();
  rho.rho_gx = 0.5 * (x[1] + std::conj(x[2]));
  return rho;
}

DensityMatrix periodic_steady_state(const PulseTrainSpec& train) {
  return to_density(build_context(train).steady);
}

double photon_output(const PulseTrainSpec& train) {
  const TrainContext ctx = build_context(train);
  const double mu = 1.0 - std::exp(-ctx.gamma * ctx.period);
  if (ctx.ideal) return 1.0;
  const NodeData nds = build_node_data(ctx);
  const double tail = nds.rho.back() * (1.0 - std::exp(-ctx.gamma * (ctx.period - ctx.span))) / ctx.gamma;
  return ctx.gamma * (nds.q_window + tail) / mu;
}

EmissionMetrics emission_metrics(const PulseTrainSpec& train) {
  const TrainContext ctx = build_context(train);
  const double gamma = ctx.gamma;
  const double mu = 1.0 - std::exp(-gamma * ctx.period);

  EmissionMetrics out{};
  if (ctx.ideal) {
    out.photon_output = 1.0;
    out.purity = 1.0;
    out.indistinguishability = 1.0;
    out.central_g2 = 0.0;
    out.side_g2 = mu * mu;
    out.central_hom = 0.0;
    out.side_hom = mu * mu;
    return out;
  }

  const NodeData nds = build_node_data(ctx);
  const std::size_t count = nds.count;
  const double ft = 1.0 - std::exp(-gamma * (ctx.period - ctx.span));
  const double rho_end = nds.rho.back();
  const double q_tail = rho_end * ft / gamma;
  const double q_total = nds.q_window + q_tail;
  out.photon_output = gamma * q_total / mu;

  // Per-node scalars against the window-end readouts and the suffix
  // structures for the second emission of the same cycle.
  const OpVec& r_end = nds.r[count];
  const OpVec& m_end = nds.m[count];
  std::vector<double> vu(count + 1), ru(count + 1), pop_suffix(count + 1), q_gram_q(count + 1);
  std::vector<complexd> mq(count + 1);
  OpVec v_suffix{};
  std::array<complexd, 16> gram{};
  double p_run = 0.0;
  for (std::size_t ii = count + 1; ii-- > 0;) {
    for (int k = 0; k < 4; ++k) v_suffix[k] += nds.w[ii] * nds.r[ii][k];
    p_run += nds.w[ii] * nds.rho[ii];
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) gram[4 * a + b] += nds.w[ii] * std::conj(nds.m[ii][a]) * nds.m[ii][b];
    vu[ii] = dot(v_suffix, nds.u[ii]).real();
    ru[ii] = dot(r_end, nds.u[ii]).real();
    mq[ii] = dot(m_end, nds.q[ii]);
    pop_suffix[ii] = p_run;
    complexd form{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) form += std::conj(nds.q[ii][a]) * gram[4 * a + b] * nds.q[ii][b];
    q_gram_q[ii] = form.real();
  }

  // Next-period photon yield as a covector, cut at the period end.
  OpVec yield_row{};
  for (int k = 0; k < 4; ++k) yield_row[k] = gamma * v_suffix[k] + ft * r_end[k];
  OpVec yield_next{};  // composed with the map to the next period start
  for (int k = 0; k < 4; ++k)
    for (int j = 0; j < 4; ++j) yield_next[k] += yield_row[j] * ctx.period_map.at(j, k);

  std::array<complexd, 16> gram_full = gram;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) gram_full[4 * a + b] += (ft / gamma) * std::conj(m_end[a]) * m_end[b];
  const auto gram_form = [&](const OpVec& x, const OpVec& y) {
    complexd form{};
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) form += std::conj(x[a]) * gram_full[4 * a + b] * y[b];
    return form;
  };

  double central_g2 = 0.0, central_hom = 0.0, side_g2 = 0.0, side_g1 = 0.0;
  for (std::size_t i = 0; i <= count; ++i) {
    const double wi = nds.w[i];
    const double rho_i = nds.rho[i];
    central_g2 += 2.0 * wi * gamma * rho_i * (gamma * vu[i] + ft * ru[i]);
    central_hom += wi * (gamma * gamma * (rho_i * pop_suffix[i] - q_gram_q[i] + rho_i * vu[i]) +
                         gamma * ft * (rho_i * rho_end - std::norm(mq[i]) + rho_i * ru[i]));
    side_g2 += wi * gamma * rho_i * dot(yield_next, nds.u[i]).real();
    side_g1 += wi * gram_form(nds.c[i], nds.c[i]).real();
  }
  side_g2 += rho_end * ft * dot(yield_row, ground_vec()).real();

  // Coherence launched from the drive-free stretch, split by its decay law.
  const double free_span = ctx.period - ctx.span;
  const double e_half = std::exp(-0.5 * gamma * free_span);
  const double e_full = e_half * e_half;
  const OpVec va = {nds.rho_xg_end, complexd{rho_end * e_half}, {}, {}};
  const OpVec vb = {complexd{rho_end}, {}, {}, {}};
  const OpVec vd = {complexd{-rho_end * e_full}, {}, {}, complexd{rho_end * e_full}};
  const auto decay_integral = [&](int twice_rate) {
    if (twice_rate == 0) return free_span;
    const double k = 0.5 * gamma * static_cast<double>(twice_rate);
    return (1.0 - std::exp(-k * free_span)) / k;
  };
  side_g1 += decay_integral(2) * (gram_form(va, va).real() + 2.0 * gram_form(vb, vd).real());
  side_g1 += decay_integral(4) * gram_form(vb, vb).real();
  side_g1 += decay_integral(0) * gram_form(vd, vd).real();
  side_g1 += decay_integral(3) * 2.0 * gram_form(va, vb).real();
  side_g1 += decay_integral(1) * 2.0 * gram_form(va, vd).real();

  const double side_hom = 0.5 * (gamma * gamma * (q_total * q_total - side_g1) + side_g2);

  out.central_g2 = central_g2;
  out.side_g2 = side_g2;
  out.central_hom = central_hom;
  out.side_hom = side_hom;
  if (!(side_g2 > 0.0) || !(side_hom > 0.0)) {
    throw NumericsError("emission_metrics: emission too weak to normalize pair correlations");
  }
  out.purity = 1.0 - central_g2 / side_g2;
  out.indistinguishability = 1.0 - central_hom / side_hom;
  return out;
}

double g2_two_time(const PulseTrainSpec& train, double t, double tau) {
  if (!std::isfinite(t) || !std::isfinite(tau) || tau < 0.0) {
    throw std::invalid_argument("g2_two_time: t must be finite and tau non-negative");
  }
  const TrainContext ctx = build_context(train);
  t = std::fmod(t, ctx.period);
  if (t < 0.0) t += ctx.period;
  const WalkContext walk{ctx};
  const OpVec at_t = walk.advance(ctx.steady, 0.0, t);
  const OpVec cond = walk.advance(ground_vec(), t, t + tau);
  return at_t[3].real() * cond[3].real();
}

complexd g1_two_time(const PulseTrainSpec& train, double t, double tau) {
  if (!std::isfinite(t) || !std::isfinite(tau) || tau < 0.0) {
    throw std::invalid_argument("g1_two_time: t must be finite and tau non-negative");
  }
  const TrainContext ctx = build_context(train);
  t = std::fmod(t, ctx.period);
  if (t < 0.0) t += ctx.period;
  const WalkContext walk{ctx};
  const OpVec at_t = walk.advance(ctx.steady, 0.0, t);
  const OpVec lowered = walk.advance({at_t[2], at_t[3], {}, {}}, t, t + tau);
  return lowered[1];
}

namespace {

CorrelationTable ideal_table(const TrainContext& ctx) {
  const double gamma = ctx.gamma;
  const double T = ctx.period;
  CorrelationTable table;
  const std::size_t points = 1536;
  table.tau.reserve(points + 1);
  table.g2.reserve(points + 1);
  table.g2_hom.reserve(points + 1);
  for (std::size_t j = 0; j <= points; ++j) {
    const double tau = 1.5 * T * static_cast<double>(j) / static_cast<double>(points);
    double g2;
    if (tau < T) {
      g2 = (gamma / (2.0 * T)) * (std::exp(-gamma * (T - tau)) - std::exp(-gamma * (T + tau)));
    } else {
      const double cut = 2.0 * T - tau;
      g2 = (gamma / (2.0 * T)) * (std::exp(-gamma * (tau - T)) * (1.0 - std::exp(-2.0 * gamma * cut)) +
                                  std::exp(-gamma * cut) - std::exp(-gamma * tau));
    }
    table.tau.push_back(tau);
    table.g2.push_back(g2);
    table.g2_hom.push_back(g2);
  }
  table.g2.front() = 0.0;
  table.g2_hom.front() = 0.0;
  return table;
}

// Time-averaged correlations of the pulsed train, assembled region by region
// in (t, t+tau) space: drive-window pairs by node index arithmetic, pairs
// with one leg on a drive-free stretch from closed-form decay laws folded
// into prefix sums. Pairs reaching past the end of the next period are
// dropped; their weight is exp(-gamma*period/2)-scale.
struct TableBuilder {
  const TrainContext& ctx;
  const NodeData& nds;
  double gamma, T, W, dt;
  std::size_t count;

  std::vector<double> ru, rs, mq2, mc2;
  std::vector<complexd> mq, mc;
  PrefixTrapz cum_ground, cum_rho;
  std::array<PrefixTrapz, 6> cum_cls;
  std::array<double, 6> cls_end{};
  std::array<int, 6> cls_rate{};  // decay exponent in half-lifetimes
  double kb_g2 = 0.0, kb_rho = 0.0, kb_g1 = 0.0;
  double kb2_g2 = 0.0, kb2_rho = 0.0, kb2_g1 = 0.0;
  double rho_end = 0.0;

  explicit TableBuilder(const TrainContext& context, const NodeData& data)
      : ctx(context), nds(data), gamma(ctx.gamma), T(ctx.period), W(ctx.span), dt(nds.dt), count(nds.count) {
    rho_end = nds.rho.back();
    const OpVec& r_end = nds.r[count];
    const OpVec& m_end = nds.m[count];

    ru.resize(count + 1);
    rs.resize(count + 1);
    mq.resize(count + 1);
    mc.resize(count + 1);
    mq2.resize(count + 1);
    mc2.resize(count + 1);
    std::vector<double> g_ground(count + 1), g_rho(count + 1);
    std::array<std::vector<double>, 6> g_cls;
    for (auto& g : g_cls) g.resize(count + 1);

    const double free_span = T - W;
    const double e_half = std::exp(-0.5 * gamma * free_span);
    const double e_full = e_half * e_half;
    const OpVec va = {nds.rho_xg_end, complexd{rho_end * e_half}, {}, {}};
    const OpVec vb = {complexd{rho_end}, {}, {}, {}};
    const OpVec vd = {complexd{-rho_end * e_full}, {}, {}, complexd{rho_end * e_full}};
    cls_rate = {2, 4, 0, 3, 1, 2};

    for (std::size_t v = 0; v <= count; ++v) {
      const double tv = static_cast<double>(v) * dt;
      ru[v] = dot(r_end, nds.u[v]).real();
      rs[v] = dot(r_end, nds.sig[v]).real();
      mq[v] = dot(m_end, nds.q[v]);
      mc[v] = dot(m_end, nds.c[v]);
      mq2[v] = std::norm(mq[v]);
      mc2[v] = std::norm(mc[v]);
      g_ground[v] = std::exp(-gamma * tv) * nds.r[v][0].real();
      g_rho[v] = std::exp(-gamma * tv) * nds.rho[v];
      const complexd ma = dot(nds.m[v], va);
      const complexd mb = dot(nds.m[v], vb);
      const complexd md = dot(nds.m[v], vd);
      const std::array<double, 6> cls = {std::norm(ma),          std::norm(mb),
                                         std::norm(md),          2.0 * (ma * std::conj(mb)).real(),
                                         2.0 * (ma * std::conj(md)).real(), 2.0 * (mb * std::conj(md)).real()};
      for (int c = 0; c < 6; ++c) {
        g_cls[c][v] = std::exp(-0.5 * gamma * static_cast<double>(cls_rate[c]) * tv) * cls[c];
        if (v == count) cls_end[c] = cls[c];
      }
      const double backw = nds.w[v] * std::exp(-gamma * (tv - W));
      kb_g2 += backw * nds.rho[v] * ru[v];
      kb_rho += backw * nds.rho[v] * rho_end;
      kb_g1 += backw * mq2[v];
      kb2_g2 += backw * nds.rho[v] * rs[v];
      kb2_rho += backw * nds.rho[v] * rho_end;
      kb2_g1 += backw * mc2[v];
    }
    cum_ground = PrefixTrapz(std::move(g_ground), dt);
    cum_rho = PrefixTrapz(std::move(g_rho), dt);
    for (int c = 0; c < 6; ++c) cum_cls[c] = PrefixTrapz(std::move(g_cls[c]), dt);
  }

  // Window x window pairs one node offset apart; offset < 0 reaches back
  // into the previous window through the period map.
  double window_pairs(std::int64_t offset, bool next_period, int kind) const {
    const auto off = static_cast<std::ptrdiff_t>(offset);
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(count);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
    const std::ptrdiff_t hi = std::min(last, last - off);
    if (hi <= lo) return 0.0;
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const auto sj = static_cast<std::size_t>(i + off);
      double f;
      if (kind == 0) {
        f = nds.rho[si] * dot(nds.r[sj], next_period ? nds.sig[si] : nds.u[si]).real();
      } else if (kind == 1) {
        f = nds.rho[si] * nds.rho[sj];
      } else {
        f = std::norm(dot(nds.m[sj], next_period ? nds.c[si] : nds.q[si]));
      }
      if (i == lo || i == hi) f *= 0.5;
      s += f;
    }
    return s * dt;
  }

  // Window t, drive-free s in the same period: nodes i with i + offset
  // beyond the window end.
  double window_tail_pairs(std::int64_t offset, bool next_period, int kind) const {
    const std::ptrdiff_t last = static_cast<std::ptrdiff_t>(count);
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, last - static_cast<std::ptrdiff_t>(offset));
    if (lo >= last) return 0.0;
    double s = 0.0;
    for (std::ptrdiff_t i = lo; i <= last; ++i) {
      const auto si = static_cast<std::size_t>(i);
      const double lag = static_cast<double>(i + static_cast<std::ptrdiff_t>(offset) - last) * dt;
      const double decay = std::exp(-gamma * lag);
      double f;
      if (kind == 0) {
        f = nds.rho[si] * (next_period ? rs[si] : ru[si]) * decay;
      } else if (kind == 1) {
        f = nds.rho[si] * rho_end * decay;
      } else {
        f = (next_period ? mc2[si] : mq2[si]) * decay;
      }
      if (i == lo || i == last) f *= 0.5;
      s += f;
    }
    return s * dt;
  }

  // Drive-free t, s inside the next window, over an aligned node range of
  // the next window coordinate v = t + tau - T.
  double tail_window_pairs(double tau, std::size_t v_lo, std::size_t v_hi, int kind) const {
    if (v_hi <= v_lo) return 0.0;
    const double shift = std::exp(-gamma * (T - W - tau));
    if (kind == 0) return rho_end * shift * cum_ground.eval(v_lo, v_hi);
    if (kind == 1) return rho_end * shift * cum_rho.eval(v_lo, v_hi);
    double s = 0.0;
    for (int c = 0; c < 6; ++c) {
      const double rate = 0.5 * static_cast<double>(cls_rate[c]);
      s += std::exp(-rate * gamma * (T - tau - W)) * cum_cls[c].eval(v_lo, v_hi);
    }
    return s;
  }

  // Both legs on drive-free stretches, t in this period and s one period
  // map crossing later; exact exponential integrals.
  double tail_tail_pairs(double tau, int kind) const {
    const double a = std::max(W, T + W - tau);
    const double b = std::min(T, 2.0 * T - tau);
    if (b <= a) return 0.0;
    if (kind == 2) {
      double s = 0.0;
      for (int c = 0; c < 6; ++c) {
        const double p = 0.5 * static_cast<double>(cls_rate[c]);
        const double x1 = -gamma * (tau - T) - (p + 1.0) * gamma * (a - W);
        const double x2 = -gamma * (tau - T) - (p + 1.0) * gamma * (b - W);
        s += cls_end[c] * (std::exp(x1) - std::exp(x2)) / ((p + 1.0) * gamma);
      }
      return s;
    }
    const double head = (kind == 0) ? nds.r[count][0].real() : rho_end;
    return rho_end * head * std::exp(gamma * (T + 2.0 * W - 2.0 * a - tau)) *
           (1.0 - std::exp(-2.0 * gamma * (b - a))) / (2.0 * gamma);
  }

  // Both legs on the same drive-free stretch; populations and coherence
  // cancel exactly in the interference correlation.
  double same_tail_pairs(double tau) const {
    if (tau >= T - W) return 0.0;
    return rho_end * rho_end * std::exp(-gamma * tau) *
           (1.0 - std::exp(-2.0 * gamma * (T - W - tau))) / (2.0 * gamma);
  }

  void emit(double tau, double g2_sum, double rho_sum, double g1_sum, CorrelationTable& table) const {
    const double scale = gamma * gamma / T;
    table.tau.push_back(tau);
    table.g2.push_back(scale * g2_sum);
    table.g2_hom.push_back(scale * 0.5 * (rho_sum - g1_sum + g2_sum));
  }

  // tau inside the drive window, aligned to node k.
  void short_delay(std::size_t k, CorrelationTable& table) const {
    const double tau = static_cast<double>(k) * dt;
    const auto off = static_cast<std::int64_t>(k);
    double g2 = 0.0, rho_sum = 0.0, g1 = 0.0;
    if (k > 0) {
      g2 = window_pairs(off, false, 0) + window_tail_pairs(off, false, 0) +
           tail_window_pairs(tau, 0, k, 0);
      rho_sum = window_pairs(off, false, 1) + window_tail_pairs(off, false, 1) +
                tail_window_pairs(tau, 0, k, 1) + same_tail_pairs(tau);
      g1 = window_pairs(off, false, 2) + window_tail_pairs(off, false, 2) +
           tail_window_pairs(tau, 0, k, 2) + same_tail_pairs(tau);
    }
    emit(tau, g2, rho_sum, g1, table);
  }

  // tau between the window end and the next window, sparse sampling.
  void gap_delay(double tau, CorrelationTable& table) const {
    const double back = std::exp(-gamma * tau);
    const double g2 = back * kb_g2 + tail_window_pairs(tau, 0, count, 0) + tail_tail_pairs(tau, 0);
    const double rho_sum = back * kb_rho + tail_window_pairs(tau, 0, count, 1) + same_tail_pairs(tau) +
                           tail_tail_pairs(tau, 1);
    const double g1 = back * kb_g1 + tail_window_pairs(tau, 0, count, 2) + same_tail_pairs(tau) +
                      tail_tail_pairs(tau, 2);
    emit(tau, g2, rho_sum, g1, table);
  }

  // tau within one window span of the full period, aligned to node offset m.
  void side_delay(std::ptrdiff_t m, CorrelationTable& table) const {
    const double tau = T + static_cast<double>(m) * dt;
    const auto off = static_cast<std::int64_t>(m);
    double g2 = window_pairs(off, true, 0) + tail_tail_pairs(tau, 0);
    double rho_sum = window_pairs(off, true, 1) + tail_tail_pairs(tau, 1);
    double g1 = window_pairs(off, true, 2) + tail_tail_pairs(tau, 2);
    if (m > 0) {
      g2 += window_tail_pairs(off, true, 0);
      rho_sum += window_tail_pairs(off, true, 1);
      g1 += window_tail_pairs(off, true, 2);
    } else if (m < 0) {
      const auto back_hi = static_cast<std::size_t>(-m);
      double bg2 = 0.0, brho = 0.0, bg1 = 0.0;
      for (std::size_t i = 0; i <= back_hi; ++i) {
        const double lag = T - W + static_cast<double>(static_cast<std::ptrdiff_t>(i) + m) * dt;
        const double decay = std::exp(-gamma * lag);
        const double w = (i == 0 || i == back_hi) ? 0.5 * dt : dt;
        bg2 += w * nds.rho[i] * ru[i] * decay;
        brho += w * nds.rho[i] * rho_end * decay;
        bg1 += w * mq2[i] * decay;
      }
      g2 += bg2;
      rho_sum += brho;
      g1 += bg1;
      const auto v_lo = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(count) + m);
      g2 += tail_window_pairs(tau, v_lo, count, 0);
      rho_sum += tail_window_pairs(tau, v_lo, count, 1);
      g1 += tail_window_pairs(tau, v_lo, count, 2);
    }
    emit(tau, g2, rho_sum, g1, table);
  }

  // tau beyond the far edge of the next window, sparse sampling.
  void far_delay(double tau, CorrelationTable& table) const {
    const double back = std::exp(-gamma * (tau - T));
    const double g2 = back * kb2_g2 + tail_tail_pairs(tau, 0);
    const double rho_sum = back * kb2_rho + tail_tail_pairs(tau, 1);
    const double g1 = back * kb2_g1 + tail_tail_pairs(tau, 2);
    emit(tau, g2, rho_sum, g1, table);
  }
};

}  // namespace

CorrelationTable correlation_table(const PulseTrainSpec& train) {
  const TrainContext ctx = build_context(train);
  if (ctx.ideal) return ideal_table(ctx);

  const NodeData nds = build_node_data(ctx);
  const TableBuilder builder(ctx, nds);
  const std::size_t count = nds.count;
  const std::size_t step = std::max<std::size_t>(1, count / 512);
  const double T = ctx.period;
  const double W = ctx.span;

  CorrelationTable table;
  for (std::size_t k = 0;; k += step) {
    if (k >= count) {
      builder.short_delay(count, table);
      break;
    }
    builder.short_delay(k, table);
  }
  const std::size_t gap_points = 48;
  for (std::size_t j = 1; j <= gap_points; ++j) {
    const double tau = W + (T - 2.0 * W) * static_cast<double>(j) / static_cast<double>(gap_points + 1);
    builder.gap_delay(tau, table);
  }
  for (std::ptrdiff_t m = -static_cast<std::ptrdiff_t>(count);; m += static_cast<std::ptrdiff_t>(step)) {
    if (m >= static_cast<std::ptrdiff_t>(count)) {
      builder.side_delay(static_cast<std::ptrdiff_t>(count), table);
      break;
    }
    builder.side_delay(m, table);
  }
  const std::size_t far_points = 48;
  for (std::size_t j = 1; j <= far_points; ++j) {
    const double tau = (T + W) + (0.5 * T - W) * static_cast<double>(j) / static_cast<double>(far_points);
    builder.far_delay(tau, table);
  }

  flush_roundoff_negatives(table.g2);
  flush_roundoff_negatives(table.g2_hom);
  return table;
}

void write_csv(const CorrelationTable& table, std::ostream& out) {
  out << "tau,g2,g2_hom\n" << std::setprecision(17);
  for (std::size_t i = 0; i < table.tau.size(); ++i) {
    out << table.tau[i] << ',' << table.g2[i] << ',' << table.g2_hom[i] << '\n';
  }
}

void write_json(const CorrelationTable& table, std::ostream& out) {
  nlohmann::json doc;
  doc["tau"] = table.tau;
  doc["g2"] = table.g2;
  doc["g2_hom"] = table.g2_hom;
  doc["version"] = version_field();
  out << doc.dump(2) << '\n';
}

void write_csv(const EmissionMetrics& metrics, std::ostream& out) {
  out << "photon_output,purity,indistinguishability,central_g2,side_g2,central_hom,side_hom\n"
      << std::setprecision(17) << metrics.photon_output << ',' << metrics.purity << ','
      << metrics.indistinguishability << ',' << metrics.central_g2 << ',' << metrics.side_g2 << ','
      << metrics.central_hom << ',' << metrics.side_hom << '\n';
}

void write_json(const EmissionMetrics& metrics, std::ostream& out) {
  nlohmann::json doc;
  doc["photon_output"] = metrics.photon_output;
  doc["purity"] = metrics.purity;
  doc["indistinguishability"] = metrics.indistinguishability;
  doc["central_g2"] = metrics.central_g2;
  doc["side_g2"] = metrics.side_g2;
  doc["central_hom"] = metrics.central_hom;
  doc["side_hom"] = metrics.side_hom;
  doc["version"] = version_field();
  out << doc.dump(2) << '\n';
}

}  // namespace swingup
