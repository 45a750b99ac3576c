#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "swingup/pulses.hpp"
#include "swingup/states.hpp"

namespace swingup {

// Periodically repeated excitation of a radiatively decaying two-level
// emitter. One period starts when the drive window opens (t = 0 in period
// coordinates); the drive occupies [0, window_span) and free decay the rest.
// A train without a pulse models the ideal limit: at every period start the
// emitter is instantaneously placed in the excited state.
struct PulseTrainSpec {
  std::optional<Pulse> pulse;  // nullopt: ideal instantaneous inversion
  double gamma = 1e-3;         // radiative rate, 1/ps
  double period = 1e4;         // pulse separation, ps
  int warmup_periods = 64;     // iteration cap for the periodic steady state
  double drift_budget = 1e-9;  // RK4 window-step control, as in sweeps
  double max_step = 5e-4;      // ps
  int max_nodes = 4096;        // quadrature nodes retained across the window
};

PulseTrainSpec ideal_train(double gamma, double period);
PulseTrainSpec pulsed_train(Pulse pulse, double gamma, double period);

// Requires gamma > 0, gamma * period >= 8 (full relaxation between pulses),
// and a drive window no longer than half the period.
void validate(const PulseTrainSpec& train);

// Drive-window length in ps (0 for the ideal train).
double window_span(const PulseTrainSpec& train);

// Operators on the two-level Hilbert space as 4-vectors in the
// (gg, gx, xg, xx) basis, and the linear maps acting on them. General
// (non-Hermitian) operators are propagated when evaluating two-time
// correlations, so the full 4-dimensional representation is kept.
using OpVec = std::array<complexd, 4>;

struct SuperOp {
  std::array<complexd, 16> m{};  // row-major 4x4
  complexd& at(int r, int c) { return m[4 * r + c]; }
  complexd at(int r, int c) const { return m[4 * r + c]; }
};

OpVec apply_map(const SuperOp& s, const OpVec& x);
SuperOp multiply(const SuperOp& a, const SuperOp& b);  // acts as b, then a
SuperOp identity_map();

// Drive-free evolution over a span: populations relax at rate gamma,
// coherences at gamma/2. Exact, used for the inter-pulse stretches.
SuperOp free_decay_map(double gamma, double span);

// Instantaneous ideal inversion: every unit-trace state is replaced by the
// excited state (traceless operators are annihilated).
SuperOp inversion_map();

OpVec to_opvec(const DensityMatrix& rho);
DensityMatrix to_density(const OpVec& x);

// State at the period start after the train has settled, found by iterating
// the one-period map from the ground state until the change falls below
// 1e-10 in max norm. Throws ConvergenceError if warmup_periods is exhausted.
DensityMatrix periodic_steady_state(const PulseTrainSpec& train);

// Figures of merit for the emitted photons, from pair correlations resolved
// by excitation cycle: the central contribution pairs two emissions of the
// same cycle, the side contribution pairs emissions of consecutive cycles.
// (At finite period the literal delay-window integrals of the time-averaged
// correlation mix neighbouring cycles at order exp(-gamma*period/2); the
// cycle-resolved split is what the windows measure once all peaks are well
// separated, and keeps the ideal-train results exact.)
struct EmissionMetrics {
  double photon_output;          // photons per cycle, 1 = ideal train
  double purity;                 // 1 - central/side pair ratio
  double indistinguishability;   // same ratio for the interference correlation
  double central_g2, side_g2;    // raw pair counts per period
  double central_hom, side_hom;
};

EmissionMetrics emission_metrics(const PulseTrainSpec& train);

// Photons emitted per excitation cycle, scaled so the ideal train gives
// exactly 1 (divisor 1 - exp(-gamma*period)).
double photon_output(const PulseTrainSpec& train);

// Two-time pair correlation <p+(t) p+(t+tau) p(t+tau) p(t)> in the settled
// train; t is a period coordinate in [0, period), tau >= 0. Exactly zero at
// tau = 0.
double g2_two_time(const PulseTrainSpec& train, double t, double tau);

// Two-time coherence <p+(t+tau) p(t)>; equals the excited population at
// tau = 0 and decays at gamma/2 across drive-free stretches.
complexd g1_two_time(const PulseTrainSpec& train, double t, double tau);

// Time-averaged correlations on a composite delay grid over [0, 1.5 period]:
// dense across the drive window and around the first side peak, sparse on
// the exponential stretches between. Values are pair-detection densities
// (rate^2 units). Pairs spanning more than one full period beyond the side
// peak are truncated; they carry exp(-gamma*period/2)-scale weight.
struct CorrelationTable {
  std::vector<double> tau;
  std::vector<double> g2;
  std::vector<double> g2_hom;
};

CorrelationTable correlation_table(const PulseTrainSpec& train);

void write_csv(const CorrelationTable& table, std::ostream& out);
void write_json(const CorrelationTable& table, std::ostream& out);
void write_csv(const EmissionMetrics& metrics, std::ostream& out);
void write_json(const EmissionMetrics& metrics, std::ostream& out);

}  // namespace swingup
