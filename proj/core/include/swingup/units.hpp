#pragma once

// Unit conventions used throughout the library:
//
//   time      picoseconds [ps]
//   energy    millielectronvolt [meV]
//   rates     1/ps (angular frequencies; an energy E maps to E/hbar)
//   areas     radians (a pulse of area "n pi" carries alpha = n*pi)
//
// Detunings and Rabi couplings are handled as rates internally; user-facing
// interfaces (configs, CLI) take energies in meV and convert on the way in.

namespace swingup::units {

inline constexpr double hbar_mev_ps = 0.6582119569;  // meV ps

constexpr double mev_to_rate(double mev) { return mev / hbar_mev_ps; }
constexpr double rate_to_mev(double rate) { return rate * hbar_mev_ps; }

inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace swingup::units
