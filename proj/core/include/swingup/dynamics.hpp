#pragma once

#include <stdexcept>

#include "swingup/states.hpp"

namespace swingup {

// Rotating-frame equations of motion for the driven two-level system:
//   df/dt = Im(conj(Omega) p)
//   dp/dt = (i/2) Omega (1 - 2f)
inline BlochState bloch_rhs(const BlochState& s, complexd omega) {
  BlochState d;
  d.f = std::imag(std::conj(omega) * s.p);
  d.p = complexd(0.0, 0.5) * omega * (1.0 - 2.0 * s.f);
  return d;
}

// Same coherent part plus radiative decay at rate gamma through the lowering
// operator |g><x|:
//   d rho_xx/dt -= gamma rho_xx,  d rho_gg/dt += gamma rho_xx,
//   d rho_gx/dt -= gamma/2 rho_gx.
inline DensityMatrix lindblad_rhs_unchecked(const DensityMatrix& r, complexd omega,
                                            double gamma) {
  const double pump = std::imag(std::conj(omega) * r.rho_gx);
  const double decay = gamma * r.rho_xx;
  DensityMatrix d;
  d.rho_xx = pump - decay;
  d.rho_gg = -pump + decay;
  d.rho_gx = complexd(0.0, 0.5) * omega * (r.rho_gg - r.rho_xx) - 0.5 * gamma * r.rho_gx;
  return d;
}

inline DensityMatrix lindblad_rhs(const DensityMatrix& r, complexd omega, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("lindblad_rhs: negative decay rate");
  return lindblad_rhs_unchecked(r, omega, gamma);
}

}  // namespace swingup
