#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "tunnel/scattering.hpp"

namespace tunnel {

/// Time-like parameters of the transmission amplitude at a reference
/// momentum kappa0 (hbar = 1):
///   tau_w  = d(arg A)/d eps   (phase time)
///   tau_a  = d(ln|A|)/d eps   (amplitude time)
///   tau_c  = tau_w - i tau_a  (complex time)
///   tau_bl = |tau_c|          (Buttiker-Landauer time)
/// with d eps = v d kappa and v = kappa/m.
///
/// A positive tau_w delays the transmitted packet relative to free motion; a
/// negative tau_w advances it.
struct TunnelingTimes {
  double kappa0 = 0.0;
  double epsilon0 = 0.0;
  double tau_w = 0.0;
  double tau_a = 0.0;
  std::complex<double> tau_c;
  double tau_bl = 0.0;
  double v0 = 0.0;
};

/// Assembles the derived members from the two independent parameters.
TunnelingTimes make_times(double kappa0, double mass, double tau_w, double tau_a);

/// Central-difference derivative on a uniform grid at `index`, with steps h
/// and 2h and one Richardson step combining them.
struct RichardsonDerivative {
  double fine = 0.0;        ///< (f[i+1] - f[i-1]) / 2h
  double coarse = 0.0;      ///< (f[i+2] - f[i-2]) / 4h
  double extrapolated = 0.0; ///< (4 fine - coarse) / 3
};

RichardsonDerivative richardson_derivative(std::span<const double> values, std::size_t index, double h);

/// Evaluates both times from tabulated amplitudes. kappa0 must be a grid
/// point with at least two uniformly spaced neighbours on each side.
///
/// ln|A| is taken from the log-magnitudes tracked by the solver, so the
/// result stays valid where |A| itself underflows.
///
/// Throws OutOfRange when kappa0 is not an interior grid point, and
/// UnderflowError when ln|A| is unavailable (non-finite) near kappa0.
TunnelingTimes tunneling_times(const ScatteringAmplitudes& amps, double kappa0);

/// Uniform grid kappa0 + j*h, j = -half..half, for
/// evaluating times at an arbitrary reference momentum.
std::vector<double> local_kappa_grid(double kappa0, double h, std::size_t half = 4);

} // namespace tunnel
