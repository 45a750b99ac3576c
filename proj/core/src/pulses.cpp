#include "swingup/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swingup/units.hpp"

namespace swingup {

namespace {
constexpr double kEnvelopeWindowSigmas = 8.0;

complexd phase_factor(double theta) { return {std::cos(theta), -std::sin(theta)}; }

double fm_phase(const FmGaussian& p, double t) {
  if (p.omega_m == 0.0) return p.delta_c * t;
  return p.delta_c * t - (p.delta_m / p.omega_m) * (std::cos(p.omega_m * t) - 1.0);
}
}  // namespace

double gaussian_envelope(double alpha, double sigma, double t) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_envelope: sigma must be > 0");
  const double x = t / sigma;
  return alpha / (std::sqrt(2.0 * units::pi) * sigma) * std::exp(-0.5 * x * x);
}

void validate(const ConstantDrive& p) {
  if (!(p.t_off >= p.t_on)) throw std::invalid_argument("ConstantDrive: t_off < t_on");
  if (!std::isfinite(p.omega0) || !std::isfinite(p.detuning))
    throw std::invalid_argument("ConstantDrive: non-finite parameter");
}

void validate(const RectangularSwitched& p) {
  if (p.segments.empty()) throw std::invalid_argument("RectangularSwitched: no segments");
  for (const auto& s : p.segments) {
    if (!(s.dwell > 0.0)) throw std::invalid_argument("RectangularSwitched: dwell must be > 0");
    if (!std::isfinite(s.delta)) throw std::invalid_argument("RectangularSwitched: non-finite detuning");
  }
  if (!std::isfinite(p.omega0)) throw std::invalid_argument("RectangularSwitched: non-finite amplitude");
}

void validate(const FmGaussian& p) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("FmGaussian: sigma must be > 0");
  if (!(p.alpha >= 0.0)) throw std::invalid_argument("FmGaussian: alpha must be >= 0");
  if (!std::isfinite(p.delta_c) || !std::isfinite(p.delta_m) || !std::isfinite(p.omega_m))
    throw std::invalid_argument("FmGaussian: non-finite parameter");
}

void validate(const TwoColor& p) {
  if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0))
    throw std::invalid_argument("TwoColor: sigma must be > 0");
  if (!(p.alpha1 >= 0.0) || !(p.alpha2 >= 0.0))
    throw std::invalid_argument("TwoColor: alpha must be >= 0");
  if (!std::isfinite(p.delta1) || !std::isfinite(p.delta2) || !std::isfinite(p.tau) ||
      !std::isfinite(p.phi))
    throw std::invalid_argument("TwoColor: non-finite parameter");
}

void validate(const Pulse& p) {
  std::visit([](const auto& s) { validate(s); }, p);
}

DriveSample constant_drive(const ConstantDrive& p, double t) {
  if (t < p.t_on || t > p.t_off) return {};
  return {p.omega0 * phase_factor(p.detuning * (t - p.t_on)), p.detuning};
}

DriveSample rectangular_drive(const RectangularSwitched& p, double t) {
  double start = p.t_start;
  double theta = 0.0;
  if (t < start) return {};
  for (const auto& s : p.segments) {
    if (t <= start + s.dwell) return {p.omega0 * phase_factor(theta + s.delta * (t - start)), s.delta};
    theta += s.delta * s.dwell;
    start += s.dwell;
  }
  return {};
}

DriveSample fm_drive(const FmGaussian& p, double t) {
  const double env = gaussian_envelope(p.alpha, p.sigma, t);
  const double delta = p.delta_c + ((p.omega_m == 0.0) ? 0.0 : p.delta_m * std::sin(p.omega_m * t));
  return {env * phase_factor(fm_phase(p, t)), delta};
}

DriveSample two_color_drive(const TwoColor& p, double t) {
  const double e1 = gaussian_envelope(p.alpha1, p.sigma1, t);
  const double e2 = gaussian_envelope(p.alpha2, p.sigma2, t - p.tau);
  const complexd omega =
      e1 * phase_factor(p.delta1 * t) + e2 * phase_factor(p.delta2 * t - p.phi);
  const double w1 = e1 * e1, w2 = e2 * e2;
  const double delta = (w1 + w2 > 0.0) ? (w1 * p.delta1 + w2 * p.delta2) / (w1 + w2) : 0.0;
  return {omega, delta};
}

DriveSample drive_at(const Pulse& p, double t) {
  struct Visitor {
    double t;
    DriveSample operator()(const ConstantDrive& s) const { return constant_drive(s, t); }
    DriveSample operator()(const RectangularSwitched& s) const { return rectangular_drive(s, t); }
    DriveSample operator()(const FmGaussian& s) const { return fm_drive(s, t); }
    DriveSample operator()(const TwoColor& s) const { return two_color_drive(s, t); }
  };
  return std::visit(Visitor{t}, p);
}

std::pair<double, double> drive_window(const Pulse& p) {
  struct Visitor {
    std::pair<double, double> operator()(const ConstantDrive& p) const {
      return {p.t_on, p.t_off};
    }
    std::pair<double, double> operator()(const RectangularSwitched& p) const {
      double total = 0.0;
      for (const auto& s : p.segments) total += s.dwell;
      return {p.t_start, p.t_start + total};
    }
    std::pair<double, double> operator()(const FmGaussian& p) const {
      return {-kEnvelopeWindowSigmas * p.sigma, kEnvelopeWindowSigmas * p.sigma};
    }
    std::pair<double, double> operator()(const TwoColor& p) const {
      const double lo = std::min(-kEnvelopeWindowSigmas * p.sigma1,
                                 p.tau - kEnvelopeWindowSigmas * p.sigma2);
      const double hi = std::max(kEnvelopeWindowSigmas * p.sigma1,
                                 p.tau + kEnvelopeWindowSigmas * p.sigma2);
      return {lo, hi};
    }
  };
  return std::visit(Visitor{}, p);
}

double peak_amplitude(const Pulse& p) {
  struct Visitor {
    double operator()(const ConstantDrive& p) const { return std::abs(p.omega0); }
    double operator()(const RectangularSwitched& p) const { return std::abs(p.omega0); }
    double operator()(const FmGaussian& p) const { return gaussian_envelope(p.alpha, p.sigma, 0.0); }
    double operator()(const TwoColor& p) const {
      return gaussian_envelope(p.alpha1, p.sigma1, 0.0) +
             gaussian_envelope(p.alpha2, p.sigma2, 0.0);
    }
  };
  return std::visit(Visitor{}, p);
}

double max_angular_rate(const Pulse& p) {
  struct Visitor {
    double operator()(const ConstantDrive& p) const { return std::abs(p.detuning); }
    double operator()(const RectangularSwitched& p) const {
      double m = 0.0;
      for (const auto& s : p.segments) m = std::max(m, std::abs(s.delta));
      return m;
    }
    double operator()(const FmGaussian& p) const { return std::abs(p.delta_c) + std::abs(p.delta_m); }
    double operator()(const TwoColor& p) const {
      return std::max(std::abs(p.delta1), std::abs(p.delta2));
    }
  };
  return std::visit(Visitor{}, p) + peak_amplitude(p);
}

}  // namespace swingup
