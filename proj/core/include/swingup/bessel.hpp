#pragma once

namespace swingup {

// Bessel functions of the first kind, accurate to ~1e-14 absolute on the
// range used by the modulation helpers (|x| <~ 20).
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace swingup
