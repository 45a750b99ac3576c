#include "swingup/bessel.hpp"

#include <cmath>
#include <limits>

#include "swingup/units.hpp"

namespace swingup {
namespace {

// Ascending series around 0, used for |x| <= 8. Accumulated in long double:
// near the crossover the individual terms reach ~1e2 and cancel down to O(1),
// so double accumulation alone would cost a couple of digits.
long double series_j(int nu, long double x) {
  const long double half = 0.5L * x;
  long double term = (nu == 0) ? 1.0L : half;
  long double sum = term;
  const long double h2 = half * half;
  for (int m = 1; m < 80; ++m) {
    term *= -h2 / ((long double)m * (long double)(m + nu));
    sum += term;
    if (fabsl(term) < 1e-20L * (1.0L + fabsl(sum))) break;
  }
  return sum;
}

// Hankel asymptotic expansion for x > 8, truncated at the smallest term:
//   J_nu(x) ~ sqrt(2/(pi x)) [cos(w) P - sin(w) Q],  w = x - nu pi/2 - pi/4,
// with P/Q built from b_k = prod_{j<=k}(mu - (2j-1)^2) / (k! (8x)^k), mu = 4 nu^2.
double hankel_j(int nu, double x) {
  const double mu = 4.0 * (double)(nu * nu);
  const double w = 8.0 * x;
  double b = 1.0;
  double p = 1.0;
  double q = 0.0;
  double prev_mag = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 60; ++k) {
    b *= (mu - (double)((2 * k - 1) * (2 * k - 1))) / ((double)k * w);
    const double mag = std::abs(b);
    if (mag >= prev_mag) break;
    prev_mag = mag;
    const double s = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 1)
      q += s * b;
    else
      p += s * b;
    if (mag < 1e-18) break;
  }
  const double omega = x - (0.5 * nu + 0.25) * units::pi;
  return std::sqrt(2.0 / (units::pi * x)) * (std::cos(omega) * p - std::sin(omega) * q);
}

}  // namespace

// Crossover chosen where both methods are comfortably below 1e-13: the
// long-double series still has ~4 guard digits left against its term-size
// cancellation at x = 14, and the asymptotic tail is deep by then.
constexpr double kSeriesLimit = 14.0;

double bessel_j0(double x) {
  const double ax = std::abs(x);
  return (ax <= kSeriesLimit) ? (double)series_j(0, ax) : hankel_j(0, ax);
}

double bessel_j1(double x) {
  const double ax = std::abs(x);
  const double v = (ax <= kSeriesLimit) ? (double)series_j(1, ax) : hankel_j(1, ax);
  return (x < 0.0) ? -v : v;
}

}  // namespace swingup
