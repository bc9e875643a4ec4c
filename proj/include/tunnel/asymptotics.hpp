#pragma once

#include <span>
#include <vector>

#include "tunnel/scattering.hpp"
#include "tunnel/times.hpp"
#include "tunnel/wigner.hpp"

namespace tunnel {

// Large-time observables on the transmitted side.
//
// Throughout, the transmission propagator is
//   T(r, p) = int dsigma/(2 pi) e^{-i sigma r} A(p + sigma/2) conj(A(p - sigma/2)),
// normalized so that a free barrier gives T = delta(r) and int T dr = |A(p)|^2.
// Since A is analytic in the upper half plane and tends to 1, T vanishes for
// r < 0. On the real axis conj(A(p - sigma/2)) = A(-p + sigma/2).

enum class DistributionMethod { exact, first_order, gaussian_closed_form };

const char* to_string(DistributionMethod method);

/// Transmitted coordinate distribution P_t(q) on a grid.
struct TransmittedDistribution {
  double t = 0.0;
  std::vector<double> q;
  std::vector<double> values;
  DistributionMethod method = DistributionMethod::exact;
  double transmission_probability = 0.0; ///< |A(P0)|^2
  TunnelingTimes times;
};

/// Peak and half-height shifts of the transmitted packet relative to free
/// propagation, from the first-order Gaussian form:
///   tau0 = 2 t tau_a dp0^2 / m - tau_w
///   zeta = 2 v0 tau0 / dq(t)
///   delta_q_peak = 2 v0 tau0 / (sqrt(1 + zeta^2) + 1)
///   tau_h = t tau_a dp0^2 / m - tau_w,  half_height_shift = v0 tau_h
/// Positive shifts are advances.
struct ShiftObservables {
  double tau0 = 0.0;
  double zeta = 0.0;
  double delta_q_peak = 0.0;
  double tau_h = 0.0;
  double half_height_shift = 0.0;
};

/// One row T(., p) of the propagator, resolved on bins of width dr.
///
/// Each value is the average of T over its bin after smoothing T with a
/// Gaussian of width dr/14. The smoothing keeps the finite sigma band from
/// producing Gibbs oscillations, and the bin average maps the delta part of
/// T onto exactly 1/dr in the r = 0 bin. Bins tile a full period, so
/// integral() reproduces |A(p)|^2.
struct PropagatorRow {
  double p = 0.0;
  double dr = 0.0;        ///< bin width (may exceed the request by a fraction of the internal step)
  double sigma_max = 0.0; ///< sigma band used
  double smoothing = 0.0; ///< Gaussian smoothing width in r
  double period = 0.0;    ///< r period of the discrete transform, pi / h
  double max_imag = 0.0;  ///< largest |Im T| before taking the real part
  std::vector<double> r;
  std::vector<double> values;

  /// Value of the bin containing r.
  double at(double r_value) const;
  double integral() const;
};

/// Band needed to resolve bins of width dr: 112 / dr.
double required_sigma_max(double dr);

/// Evaluates T(., p) by FFT over sigma. p must be a point of a lattice grid
/// (see ScatteringAmplitudes::lattice_spacing); conj symmetry supplies
/// amplitudes at negative momenta.
///
/// Throws OutOfRange when p is not a grid point, ResolutionError when the
/// grid above p cannot supply required_sigma_max(dr).
PropagatorRow transmission_propagator(const ScatteringAmplitudes& amps, double p, double dr);

/// r beyond which T(., p) has decayed to roundoff for a barrier of width w:
/// 100 + 25 w + 8 w^2. Long-lived above-barrier resonances of wide barriers
/// set the w^2 growth.
double propagator_tail_length(double barrier_width);

/// Lattice grid through p that resolves T(., p) on bins of width dr without
/// wrapping the tail into r < 0: spacing min(max_spacing, pi / (2 tail)).
std::vector<double> propagator_kappa_grid(double p, double dr, double barrier_width, double max_spacing = 0.01);

/// sigma cutoff for the distribution quadrature: 16 max(dp0, 1/dq0, 1/w).
double default_sigma_max(const GaussianWignerState& s, double barrier_width);

struct ExactOptions {
  double sigma_max = 0.0;   ///< 0 selects default_sigma_max
  double p_extent = 8.0;    ///< momentum integration over P0 +- p_extent dp0
  double r_extent = 9.0;    ///< coordinate cutoff of rho0 in widths dq0
  double tail_length = -1.0; ///< decay length reserved for T in r; < 0 selects propagator_tail_length(w)
};

/// r period (pi / h) the exact quadrature needs for a q grid spanning
/// [q_lo, q_hi] at time t.
double required_period(const GaussianWignerState& s, double barrier_width, double t, double q_lo, double q_hi,
                       const ExactOptions& opts = {});

/// Lattice momentum grid with P0 on a grid point, wide enough for the sigma
/// band and fine enough for required_period. Has at least min_points points.
std::vector<double> exact_kappa_grid(const GaussianWignerState& s, double barrier_width, double t, double q_lo,
                                     double q_hi, std::size_t min_points = 2048, const ExactOptions& opts = {});

/// Transmitted distribution by direct quadrature of
///   P_t(q) = int dp int dr T(r, p) rho0(q - v t + r, p),   v = p/m.
/// T rows come from an FFT over sigma (no smoothing; the Gaussian rho0
/// band-limits the r integral), then r and p are integrated by the trapezoid
/// rule on the FFT r-grid and on the momentum grid.
///
/// Requires a lattice grid containing P0. Warns when t is below the clearing
/// time. Throws OutOfRange on grid-margin violations and GridTooCoarse when
/// the r period is too short for the requested q range.
TransmittedDistribution transmitted_exact(const ScatteringAmplitudes& amps, const GaussianWignerState& s, double t,
                                          std::span<const double> q_grid, const ExactOptions& opts = {});

/// First-order expansion in dp0/P0:
///   P_t ~ |A|^2 [P0_t + v0 tau_w dP0_t/dq + 2 v0 tau_a M_t].
/// Can go negative in the far tails; values are reported as-is.
double transmitted_first_order(const TunnelingTimes& times, double a2, const GaussianWignerState& s, double t,
                               double q);

/// Closed Gaussian form |A|^2 P0_t(q) [1 + v0 tau0 (q - Q) / dq^2].
double gaussian_first_order(const GaussianWignerState& s, const TunnelingTimes& times, double a2, double t, double q);

/// Tabulates one of the closed forms on a grid.
TransmittedDistribution tabulate_first_order(const TunnelingTimes& times, double a2, const GaussianWignerState& s,
                                             double t, std::span<const double> q_grid, DistributionMethod method);

ShiftObservables shift_observables(const TunnelingTimes& times, const GaussianWignerState& s, double t);

/// Half-height shift v0 tau_h of the step test distribution.
double half_height_shift(const StepTestDistribution& step, const TunnelingTimes& times, double t);

/// Zero of tau0(t): m tau_w / (2 tau_a dp0^2). Negative or infinite when
/// tau0 keeps its sign for all t >= 0.
double tau0_sign_change_time(const TunnelingTimes& times, const GaussianWignerState& s);

} // namespace tunnel
