#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace swingup {

using complexd = std::complex<double>;

// One sample of the complex rotating-frame drive. `omega` is the full complex
// Rabi coupling Omega(t) [1/ps]; `delta` carries the instantaneous detuning
// [1/ps] for diagnostics (trajectory export), not for propagation.
struct DriveSample {
  complexd omega{0.0, 0.0};
  double delta = 0.0;
};

// Closed two-level system in the frame rotating at the transition frequency:
// occupation f = <x|rho|x> and the coherence p = <|g><x|>.
struct BlochState {
  complexd p{0.0, 0.0};
  double f = 0.0;

  BlochState& operator+=(const BlochState& o) {
    p += o.p;
    f += o.f;
    return *this;
  }
  friend BlochState operator+(BlochState a, const BlochState& b) { return a += b; }
  friend BlochState operator*(double s, const BlochState& a) { return {s * a.p, s * a.f}; }
};

inline BlochState ground_state() { return {}; }

// r = (2 Re p, -2 Im p, 2f - 1); |r| = 1 for pure states.
inline std::array<double, 3> bloch_vector(const BlochState& s) {
  return {2.0 * s.p.real(), -2.0 * s.p.imag(), 2.0 * s.f - 1.0};
}

inline double bloch_norm(const BlochState& s) {
  const auto r = bloch_vector(s);
  return std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
}

// Two-level density matrix. rho_gx is the coherence that reduces to the
// Bloch p in the closed limit (rho_xg is its conjugate and is not stored).
struct DensityMatrix {
  double rho_gg = 1.0;
  double rho_xx = 0.0;
  complexd rho_gx{0.0, 0.0};

  DensityMatrix& operator+=(const DensityMatrix& o) {
    rho_gg += o.rho_gg;
    rho_xx += o.rho_xx;
    rho_gx += o.rho_gx;
    return *this;
  }
  friend DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) { return a += b; }
  friend DensityMatrix operator*(double s, const DensityMatrix& a) {
    return {s * a.rho_gg, s * a.rho_xx, s * a.rho_gx};
  }
};

inline double state_max_norm(const BlochState& s) {
  return std::max(std::abs(s.f), std::abs(s.p));
}

inline double state_max_norm(const DensityMatrix& r) {
  return std::max({std::abs(r.rho_gg), std::abs(r.rho_xx), std::abs(r.rho_gx)});
}

inline DensityMatrix density_from_bloch(const BlochState& s) {
  return {1.0 - s.f, s.f, s.p};
}

inline double trace(const DensityMatrix& r) { return r.rho_gg + r.rho_xx; }

// Smaller eigenvalue of the Hermitian 2x2 matrix; >= 0 up to roundoff for
// physical states.
inline double min_eigenvalue(const DensityMatrix& r) {
  const double half_tr = 0.5 * (r.rho_gg + r.rho_xx);
  const double half_diff = 0.5 * (r.rho_gg - r.rho_xx);
  return half_tr - std::sqrt(half_diff * half_diff + std::norm(r.rho_gx));
}

}  // namespace swingup
