#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "swingup/dynamics.hpp"
#include "swingup/pulses.hpp"
#include "swingup/units.hpp"

namespace swingup {

// Streaming drive samplers. Each emits Omega(t0 + n*dt) for n = 0, 1, 2, ...
// using multiplicative recurrences (geometric envelope updates, unit-complex
// phase rotations) instead of per-sample transcendentals, and resynchronizes
// against the closed form every kResyncInterval samples. The interval keeps
// the compounded envelope-recurrence roundoff (which grows quadratically in
// the block length) near 1e-11 relative.

inline constexpr std::int64_t kResyncInterval = 512;

namespace detail {
inline complexd unit_phase(double theta) { return {std::cos(theta), -std::sin(theta)}; }
}  // namespace detail

class ConstantSampler {
 public:
  ConstantSampler(const ConstantDrive& p, double t0, double dt) : p_(p), t0_(t0), dt_(dt) {
    u_ = detail::unit_phase(p_.detuning * dt_);
    sync();
  }
  complexd next() {
    if (n_ == next_sync_) sync();
    const double t = t0_ + (double)n_ * dt_;
    const complexd v = (t < p_.t_on || t > p_.t_off) ? complexd{} : p_.omega0 * rot_;
    rot_ *= u_;
    ++n_;
    return v;
  }

 private:
  void sync() {
    const double t = t0_ + (double)n_ * dt_;
    rot_ = detail::unit_phase(p_.detuning * (t - p_.t_on));
    next_sync_ = n_ + kResyncInterval;
  }
  ConstantDrive p_;
  double t0_, dt_;
  std::int64_t n_ = 0, next_sync_ = 0;
  complexd rot_, u_;
};

class RectangularSampler {
 public:
  RectangularSampler(const RectangularSwitched& p, double t0, double dt)
      : p_(p), t0_(t0), dt_(dt) {
    double start = p_.t_start, theta = 0.0;
    for (const auto& s : p_.segments) {
      starts_.push_back(start);
      thetas_.push_back(theta);
      start += s.dwell;
      theta += s.delta * s.dwell;
    }
    t_end_ = start;
  }
  complexd next() {
    const double t = t0_ + (double)n_ * dt_;
    ++n_;
    if (t < p_.t_start || t > t_end_) return {};
    while (seg_ + 1 < p_.segments.size() && t > starts_[seg_] + p_.segments[seg_].dwell) ++seg_;
    const double theta = thetas_[seg_] + p_.segments[seg_].delta * (t - starts_[seg_]);
    return p_.omega0 * detail::unit_phase(theta);
  }

 private:
  RectangularSwitched p_;
  double t0_, dt_, t_end_;
  std::int64_t n_ = 0;
  std::size_t seg_ = 0;
  std::vector<double> starts_, thetas_;
};

class FmSampler {
 public:
  FmSampler(const FmGaussian& p, double t0, double dt) : p_(p), t0_(t0), dt_(dt) {
    k_ = (p_.omega_m == 0.0) ? 0.0 : p_.delta_m / p_.omega_m;
    r_ = std::exp(-(dt_ * dt_) / (p_.sigma * p_.sigma));
    w_ = {std::cos(p_.omega_m * dt_), std::sin(p_.omega_m * dt_)};
    sync();
  }
  complexd next() {
    if (n_ == next_sync_) sync();
    const double t = t0_ + (double)n_ * dt_;
    const double theta = p_.delta_c * t - k_ * (cosw_.real() - 1.0);
    const complexd v = env_ * detail::unit_phase(theta);
    env_ *= q_;
    q_ *= r_;
    cosw_ *= w_;
    ++n_;
    return v;
  }

 private:
  void sync() {
    const double t = t0_ + (double)n_ * dt_;
    env_ = gaussian_envelope(p_.alpha, p_.sigma, t);
    q_ = std::exp(-(t * dt_ + 0.5 * dt_ * dt_) / (p_.sigma * p_.sigma));
    cosw_ = {std::cos(p_.omega_m * t), std::sin(p_.omega_m * t)};
    next_sync_ = n_ + kResyncInterval;
  }
  FmGaussian p_;
  double t0_, dt_, k_, r_;
  std::int64_t n_ = 0, next_sync_ = 0;
  double env_ = 0.0, q_ = 1.0;
  complexd cosw_, w_;
};

class TwoColorSampler {
 public:
  TwoColorSampler(const TwoColor& p, double t0, double dt) : p_(p), t0_(t0), dt_(dt) {
    r1_ = std::exp(-(dt_ * dt_) / (p_.sigma1 * p_.sigma1));
    r2_ = std::exp(-(dt_ * dt_) / (p_.sigma2 * p_.sigma2));
    u1_ = detail::unit_phase(p_.delta1 * dt_);
    u2_ = detail::unit_phase(p_.delta2 * dt_);
    sync();
  }
  complexd next() {
    if (n_ == next_sync_) sync();
    const complexd v = e1_ * rot1_ + e2_ * rot2_;
    e1_ *= q1_;
    q1_ *= r1_;
    e2_ *= q2_;
    q2_ *= r2_;
    rot1_ *= u1_;
    rot2_ *= u2_;
    ++n_;
    return v;
  }

 private:
  void sync() {
    const double t = t0_ + (double)n_ * dt_;
    e1_ = gaussian_envelope(p_.alpha1, p_.sigma1, t);
    q1_ = std::exp(-(t * dt_ + 0.5 * dt_ * dt_) / (p_.sigma1 * p_.sigma1));
    e2_ = gaussian_envelope(p_.alpha2, p_.sigma2, t - p_.tau);
    q2_ = std::exp(-((t - p_.tau) * dt_ + 0.5 * dt_ * dt_) / (p_.sigma2 * p_.sigma2));
    rot1_ = detail::unit_phase(p_.delta1 * t);
    rot2_ = detail::unit_phase(p_.delta2 * t - p_.phi);
    next_sync_ = n_ + kResyncInterval;
  }
  TwoColor p_;
  double t0_, dt_;
  std::int64_t n_ = 0, next_sync_ = 0;
  double e1_ = 0.0, q1_ = 1.0, r1_ = 1.0;
  double e2_ = 0.0, q2_ = 1.0, r2_ = 1.0;
  complexd rot1_, u1_, rot2_, u2_;
};

// Replays precomputed samples with a scalar gain; used when many parameter
// points share one drive shape up to an overall amplitude.
class ScaledVectorSampler {
 public:
  ScaledVectorSampler(const std::vector<complexd>& samples, double scale)
      : samples_(&samples), scale_(scale) {}
  complexd next() { return scale_ * (*samples_)[i_++]; }

 private:
  const std::vector<complexd>* samples_;
  double scale_;
  std::size_t i_ = 0;
};

inline ConstantSampler make_sampler(const ConstantDrive& p, double t0, double dt) {
  return {p, t0, dt};
}
inline RectangularSampler make_sampler(const RectangularSwitched& p, double t0, double dt) {
  return {p, t0, dt};
}
inline FmSampler make_sampler(const FmGaussian& p, double t0, double dt) { return {p, t0, dt}; }
inline TwoColorSampler make_sampler(const TwoColor& p, double t0, double dt) {
  return {p, t0, dt};
}

// Dispatches once on the pulse type and hands the matching sampler to f.
template <class F>
decltype(auto) with_sampler(const Pulse& pulse, double t0, double dt, F&& f) {
  return std::visit(
      [&](const auto& p) {
        auto s = make_sampler(p, t0, dt);
        return f(s);
      },
      pulse);
}

// RK4 advance of the closed two-level state by n_steps steps of size h. The
// sampler must emit samples at spacing h/2 starting at the initial time; the
// trailing sample of each step is reused as the leading sample of the next.
template <class Sampler>
BlochState propagate_bloch(BlochState y, double h, std::int64_t n_steps, Sampler& smp) {
  complexd w0 = smp.next();
  for (std::int64_t i = 0; i < n_steps; ++i) {
    const complexd w1 = smp.next();
    const complexd w2 = smp.next();
    const BlochState k1 = bloch_rhs(y, w0);
    const BlochState k2 = bloch_rhs(y + (0.5 * h) * k1, w1);
    const BlochState k3 = bloch_rhs(y + (0.5 * h) * k2, w1);
    const BlochState k4 = bloch_rhs(y + h * k3, w2);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    w0 = w2;
  }
  return y;
}

// RK4 advance of the dissipative two-level state, same sampling contract as
// propagate_bloch. gamma must be validated by the caller.
template <class Sampler>
DensityMatrix propagate_lindblad(DensityMatrix y, double gamma, double h, std::int64_t n_steps,
                                 Sampler& smp) {
  complexd w0 = smp.next();
  for (std::int64_t i = 0; i < n_steps; ++i) {
    const complexd w1 = smp.next();
    const complexd w2 = smp.next();
    const DensityMatrix k1 = lindblad_rhs_unchecked(y, w0, gamma);
    const DensityMatrix k2 = lindblad_rhs_unchecked(y + (0.5 * h) * k1, w1, gamma);
    const DensityMatrix k3 = lindblad_rhs_unchecked(y + (0.5 * h) * k2, w1, gamma);
    const DensityMatrix k4 = lindblad_rhs_unchecked(y + h * k3, w2, gamma);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    w0 = w2;
  }
  return y;
}

}  // namespace swingup
