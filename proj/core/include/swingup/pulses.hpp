#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "swingup/states.hpp"

namespace swingup {

// All drive shapes are expressed in the frame rotating at the transition
// frequency: a complex Rabi coupling Omega(t) [1/ps] whose phase accumulates
// the instantaneous detuning, theta(t) = integral of Delta(t').

// Flat-top drive at a fixed detuning, on between t_on and t_off. The phase
// is referenced to t_on so a single-segment switched pulse is identical.
struct ConstantDrive {
  double omega0 = 0.0;   // 1/ps
  double detuning = 0.0; // 1/ps
  double t_on = 0.0;     // ps
  double t_off = 0.0;    // ps
};

// Constant amplitude with the detuning switched in a step-like schedule.
// The accumulated phase is continuous across switches.
struct RectangularSwitched {
  struct Segment {
    double delta = 0.0; // 1/ps
    double dwell = 0.0; // ps
  };
  double omega0 = 0.0;
  std::vector<Segment> segments;
  double t_start = 0.0;
};

// Gaussian envelope with a sinusoidally modulated detuning:
//   Omega(t) = env(t) * exp(-i theta(t)),
//   theta(t) = delta_c*t - (delta_m/omega_m)*(cos(omega_m*t) - 1),
// i.e. instantaneous detuning delta_c + delta_m*sin(omega_m*t). omega_m = 0
// degrades gracefully to the constant-detuning limit theta = delta_c*t.
struct FmGaussian {
  double alpha = 0.0;   // pulse area, radians
  double sigma = 1.0;   // ps
  double delta_c = 0.0; // 1/ps
  double delta_m = 0.0; // 1/ps
  double omega_m = 0.0; // 1/ps
};

// Sum of two detuned Gaussians; the second is delayed by tau (tau < 0 means
// it arrives earlier) and carries a static phase offset phi.
struct TwoColor {
  double alpha1 = 0.0, sigma1 = 1.0, delta1 = 0.0;
  double alpha2 = 0.0, sigma2 = 1.0, delta2 = 0.0;
  double tau = 0.0; // ps
  double phi = 0.0; // rad
};

using Pulse = std::variant<ConstantDrive, RectangularSwitched, FmGaussian, TwoColor>;

// Normalized Gaussian envelope alpha/sqrt(2 pi sigma^2) * exp(-t^2/(2 sigma^2));
// its time integral is the pulse area alpha. Throws on sigma <= 0.
double gaussian_envelope(double alpha, double sigma, double t);

// Checks the structural invariants of a pulse (positive widths, non-negative
// areas, positive dwell times, ordered windows). Throws std::invalid_argument.
void validate(const ConstantDrive& p);
void validate(const RectangularSwitched& p);
void validate(const FmGaussian& p);
void validate(const TwoColor& p);
void validate(const Pulse& p);

// Drive evaluation at time t. The `delta` member of the result is a
// diagnostic instantaneous detuning: the exact phase derivative for the
// single-carrier shapes, and the intensity-weighted mean of the two carriers
// for TwoColor (zero where both envelopes vanish).
DriveSample constant_drive(const ConstantDrive& p, double t);
DriveSample rectangular_drive(const RectangularSwitched& p, double t);
DriveSample fm_drive(const FmGaussian& p, double t);
DriveSample two_color_drive(const TwoColor& p, double t);
DriveSample drive_at(const Pulse& p, double t);

// Time window outside of which the drive is negligible (exactly zero for the
// switched shapes, below 1e-14 relative envelope energy for Gaussians: 8 sigma).
std::pair<double, double> drive_window(const Pulse& p);

// Upper bound on the fastest angular rate present in the drive (detuning
// magnitude plus peak Rabi amplitude), used for step-size control.
double max_angular_rate(const Pulse& p);

// Peak envelope amplitude (sum of sub-pulse peaks for TwoColor).
double peak_amplitude(const Pulse& p);

}  // namespace swingup
