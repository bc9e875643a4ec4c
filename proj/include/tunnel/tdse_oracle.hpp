#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "tunnel/potential.hpp"

namespace tunnel {

/// Split-operator evolution of a pure Gaussian packet incident from the
/// left, on the periodic grid x_j = x_min + j dx, j = 0..points-1.
///
/// The initial state is the minimum-uncertainty Gaussian
///   psi0(x) = (2 pi dq0^2)^{-1/4} exp[-(x - Q0)^2 / 4 dq0^2 + i P0 x],
/// whose Wigner transform is the Gaussian phase-space state with
/// dp0 = 1/(2 dq0).
struct EvolutionSetup {
  double x_min = 0.0;
  double dx = 0.0;
  std::size_t points = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  Barrier barrier = Barrier::rectangular(0.0, 1.0);
  double p0 = 1.0;
  double q0 = 0.0;
  double dq0 = 1.0;
  double mass = 1.0;

  double dp0() const { return 0.5 / dq0; }
  double t_final() const { return dt * static_cast<double>(steps); }
  double x_max() const { return x_min + dx * static_cast<double>(points); }
  double max_kinetic_energy() const;
};

/// Builds a setup that satisfies validate(): the grid covers the incident,
/// transmitted and reflected packets out to 8 widths, barrier edges fall
/// midway between grid points when the barrier width allows it, and
/// dt * max_kinetic_energy() <= dt_factor.
EvolutionSetup make_setup(const Barrier& barrier, double p0, double q0, double dq0, double mass, double t_final,
                          double dx_target, double dt_factor = 0.45);

/// Throws ConfigurationError naming the violated bound:
/// extent must contain Q0 - 8 dq0 and Q0 + v0 T + 8 dq(T); the grid Nyquist
/// momentum must exceed P0 + 8 dp0; dt * max_kinetic_energy() < 0.5.
void validate(const EvolutionSetup& setup);

struct WaveFunction {
  double x_min = 0.0;
  double dx = 0.0;
  double time = 0.0;
  std::vector<std::complex<double>> psi;

  double x(std::size_t j) const { return x_min + dx * static_cast<double>(j); }
  double norm() const;
  std::vector<double> density() const;
};

struct EvolutionResult {
  WaveFunction final_state;
  double max_step_norm_drift = 0.0;
  double total_norm_drift = 0.0;
};

WaveFunction initial_wave_function(const EvolutionSetup& setup);

/// Second-order Strang splitting: half potential step, exact kinetic step in
/// momentum space, half potential step.
EvolutionResult evolve(const EvolutionSetup& setup);

/// Potential as the grid sees it: one slab per grid point inside the barrier
/// support, so stationary amplitudes of this barrier are exact for the
/// discretized problem.
Barrier represented_barrier(const EvolutionSetup& setup);

struct TransmittedObservables {
  double transmission = 0.0;
  double peak_q = 0.0;
  double half_height_q = 0.0;
  double variance = 0.0;
  double mean = 0.0;
};

/// Observables of the part of psi beyond the barrier's right edge. Throws
/// NotAsymptotic when more than 1e-6 probability remains inside the barrier
/// support.
TransmittedObservables transmitted_observables(const WaveFunction& psi, const Barrier& barrier);

/// int |A(p)|^2 g(p) dp with g the Gaussian momentum marginal of the initial
/// pure state (mean P0, width dp0), over P0 +- 10 dp0.
double momentum_resolved_transmission(const Barrier& barrier, double mass, double p0, double dp0,
                                      std::size_t points = 4001);

} // namespace tunnel
