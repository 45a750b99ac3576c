#pragma once

#include <string>
#include <utility>
#include <vector>

#include "swingup/pulses.hpp"

namespace swingup {

// Fourier transform of the complex rotating-frame drive, reported against a
// detuning axis in meV (transition energy at 0). The amplitude approximates
// A(w) = integral Omega(t) exp(+i w t) dt, so a carrier exp(-i Delta t)
// produces a peak at energy hbar*Delta.
struct Spectrum {
  std::vector<double> energy_mev;   // ascending
  std::vector<complexd> amplitude;  // same length
  std::vector<double> magnitude;    // |amplitude|
  double d_omega = 0.0;             // bin spacing (1/ps)
  bool resolution_warning = false;
  std::string warning;
};

// Samples the drive over `window`, zero-pads to reach the requested energy
// resolution, and transforms. The sampling rate is chosen from the pulse's
// fastest angular rate; `resolution_mev` coarser than the narrowest spectral
// feature of the pulse (or finer than the padding cap allows) sets
// resolution_warning and an explanatory message instead of failing.
Spectrum compute_spectrum(const Pulse& pulse, std::pair<double, double> window,
                          double resolution_mev);
Spectrum compute_spectrum(const Pulse& pulse, double resolution_mev = 0.01);

struct SpectralPeak {
  double energy_mev = 0.0;
  double magnitude = 0.0;
};

// Local maxima of the magnitude above rel_threshold * global max, strongest
// first.
std::vector<SpectralPeak> spectrum_peaks(const Spectrum& s, double rel_threshold = 0.05);

}  // namespace swingup
