#include "swingup/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swingup/units.hpp"

namespace swingup {

namespace {

constexpr std::size_t kMaxFftSize = std::size_t(1) << 22;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place radix-2 FFT with kernel exp(+i 2 pi k n / N).
void fft_plus(std::vector<complexd>& x) {
  const std::size_t n = x.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * units::pi / (double)len;
    const complexd wstep(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      complexd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const complexd u = x[i + k];
        const complexd v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wstep;
      }
    }
  }
}

// Smallest spectral width expected for the pulse: transform-limited width of
// the longest envelope, or the inverse duration for the switched shapes.
double narrowest_feature(const Pulse& pulse) {
  struct Visitor {
    double operator()(const ConstantDrive& p) const {
      const double d = p.t_off - p.t_on;
      return (d > 0.0) ? 2.0 * units::pi / d : 0.0;
    }
    double operator()(const RectangularSwitched& p) const {
      double total = 0.0;
      for (const auto& s : p.segments) total += s.dwell;
      return (total > 0.0) ? 2.0 * units::pi / total : 0.0;
    }
    double operator()(const FmGaussian& p) const { return 1.0 / p.sigma; }
    double operator()(const TwoColor& p) const { return 1.0 / std::max(p.sigma1, p.sigma2); }
  };
  return std::visit(Visitor{}, pulse);
}

}  // namespace

Spectrum compute_spectrum(const Pulse& pulse, std::pair<double, double> window,
                          double resolution_mev) {
  validate(pulse);
  if (!(resolution_mev > 0.0))
    throw std::invalid_argument("compute_spectrum: resolution must be > 0");
  const double t0 = window.first;
  const double span = window.second - window.first;
  if (!(span > 0.0)) throw std::invalid_argument("compute_spectrum: empty window");

  // Sample fast enough that the quickest phase rotation advances by well
  // under a radian per sample.
  const double rate = std::max(max_angular_rate(pulse), 16.0 * units::pi / span);
  const double dt_target = units::pi / (8.0 * rate);
  const std::size_t m = next_pow2((std::size_t)std::ceil(span / dt_target));
  const double dt = span / (double)m;

  const double omega_res = resolution_mev / units::hbar_mev_ps;
  std::size_t n = std::max(m, (std::size_t)std::ceil(2.0 * units::pi / (omega_res * dt)));
  n = next_pow2(n);

  Spectrum out;
  if (n > kMaxFftSize) {
    n = kMaxFftSize;
    out.resolution_warning = true;
    out.warning = "requested resolution exceeds the padding cap; bins are coarser than asked";
  }
  const double feature = narrowest_feature(pulse);
  if (omega_res > feature && !out.resolution_warning) {
    out.resolution_warning = true;
    out.warning = "requested resolution is coarser than the narrowest spectral feature";
  }

  std::vector<complexd> x(n, complexd{});
  for (std::size_t i = 0; i < m; ++i) x[i] = drive_at(pulse, t0 + (double)i * dt).omega;
  fft_plus(x);

  const double d_omega = 2.0 * units::pi / ((double)n * dt);
  out.d_omega = d_omega;
  out.energy_mev.resize(n);
  out.amplitude.resize(n);
  out.magnitude.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t k = (j + n / 2) % n;  // shift negative frequencies first
    const double omega = ((double)k - ((k >= n / 2) ? (double)n : 0.0)) * d_omega;
    const complexd a = dt * x[k] * complexd(std::cos(omega * t0), std::sin(omega * t0));
    out.energy_mev[j] = omega * units::hbar_mev_ps;
    out.amplitude[j] = a;
    out.magnitude[j] = std::abs(a);
  }
  return out;
}

Spectrum compute_spectrum(const Pulse& pulse, double resolution_mev) {
  return compute_spectrum(pulse, drive_window(pulse), resolution_mev);
}

std::vector<SpectralPeak> spectrum_peaks(const Spectrum& s, double rel_threshold) {
  std::vector<SpectralPeak> peaks;
  if (s.magnitude.size() < 3) return peaks;
  const double top = *std::max_element(s.magnitude.begin(), s.magnitude.end());
  const double floor = rel_threshold * top;
  for (std::size_t i = 1; i + 1 < s.magnitude.size(); ++i) {
    if (s.magnitude[i] >= floor && s.magnitude[i] > s.magnitude[i - 1] &&
        s.magnitude[i] >= s.magnitude[i + 1])
      peaks.push_back({s.energy_mev[i], s.magnitude[i]});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
  return peaks;
}

}  // namespace swingup
