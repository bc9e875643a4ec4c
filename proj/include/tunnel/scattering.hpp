#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tunnel/potential.hpp"

namespace tunnel {

using Complex = std::complex<double>;

/// Stationary scattering solution at one momentum, for a wave e^{i kappa q}
/// incident from the left: psi = e^{i kappa q} + B e^{-i kappa q} left of the
/// barrier and psi = A e^{i kappa q} right of it. With this convention A -> 1
/// as kappa -> infinity and A is independent of where the barrier sits.
struct PointAmplitude {
  Complex transmission; ///< A; may underflow to 0 for opaque barriers
  Complex reflection;   ///< B
  double log_abs_transmission = 0.0; ///< ln|A|, finite even when A underflows
  double arg_transmission = 0.0;     ///< principal arg A in (-pi, pi]
};

/// A(kappa), B(kappa) tabulated on a strictly increasing grid of positive
/// momenta, with arg A unwrapped along the grid.
struct ScatteringAmplitudes {
  double mass = 1.0;
  /// Total width 2D of the barrier the table was computed for.
  double barrier_width = 0.0;
  std::vector<double> kappa;
  std::vector<Complex> transmission;
  std::vector<Complex> reflection;
  std::vector<double> log_abs_transmission;
  std::vector<double> phase;

  std::size_t size() const { return kappa.size(); }

  /// Spacing h when the grid is kappa_j = (j + 1/2) h for j = 0..n-1, which
  /// makes the set {+-kappa_j} a uniform lattice closed under negation;
  /// zero otherwise.
  double lattice_spacing() const;

  /// A at kappa = (j + 1/2) h for any integer j, using conj A(k) = A(-k) for
  /// j < 0. Requires a lattice grid; j must be below size().
  Complex lattice_transmission(long j) const;

  /// Grid index whose momentum equals `k` to within 1e-9 of the local
  /// spacing, or size() when no point matches.
  std::size_t index_of(double k) const;
};

/// Transfer-matrix solution for one momentum.
PointAmplitude transfer_matrix_amplitude(const Barrier& barrier, double mass, double kappa);

/// Amplitudes on a grid of momenta. Points are evaluated independently (and
/// concurrently); the phase is then unwrapped from the largest momentum down.
///
/// Throws InvalidParameter for non-positive or non-increasing momenta or a
/// non-positive mass, and GridTooCoarse when adjacent principal phases
/// differ by more than pi/2 (the unwrapping would be ambiguous).
ScatteringAmplitudes transmission_amplitudes(const Barrier& barrier, double mass, std::span<const double> kappa_grid);

/// Textbook transmission amplitude of one rectangular slab. Continuous across
/// kappa^2/2m = V0.
Complex rectangular_closed_form(double v0, double width, double mass, double kappa);

/// Lattice grid kappa_j = (j + 1/2) h, j = 0..count-1.
std::vector<double> lattice_kappa_grid(double spacing, std::size_t count);

/// Lattice grid that contains `anchor` exactly, reaches at least `kappa_max`,
/// and has spacing no larger than min(kappa_max / min_points, max_spacing).
std::vector<double> anchored_kappa_grid(double anchor, double kappa_max, std::size_t min_points,
                                        double max_spacing);

/// Uniform grid kappa_j = j * kappa_max / count, j = 1..count.
std::vector<double> uniform_kappa_grid(double kappa_max, std::size_t count);

} // namespace tunnel
