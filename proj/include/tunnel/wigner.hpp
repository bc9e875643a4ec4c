#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tunnel/potential.hpp"

namespace tunnel {

/// Gaussian phase-space distribution
///   rho0(q, p) = C exp[-(p - P0)^2 / 2 dp0^2 - (q - Q0)^2 / 2 dq0^2],
///   C = 1 / (2 pi dp0 dq0).
/// dq0 * dp0 = 1/2 is a pure minimum-uncertainty state.
struct GaussianWignerState {
  double p0 = 0.0;
  double q0 = 0.0;
  double dp0 = 0.0;
  double dq0 = 0.0;
  double mass = 1.0;

  /// Validated constructor: dp0, dq0, mass > 0; dq0 dp0 >= 1/2;
  /// dp0/|P0| < 0.25 (warns above 0.1).
  static GaussianWignerState make(double p0, double q0, double dp0, double dq0, double mass);

  /// Pure state with dp0 = 1/(2 dq0).
  static GaussianWignerState pure(double p0, double q0, double dq0, double mass);

  double normalization() const;
  double density(double q, double p) const;
  double v0() const { return p0 / mass; }

  /// Q(t) = Q0 + v0 t.
  double center_at(double t) const { return q0 + v0() * t; }
  /// dq(t) = sqrt(dq0^2 + (t dp0 / m)^2).
  double width_at(double t) const;

  /// Asymptotic observation threshold 2 |Q0| m / P0.
  double clearing_time() const;
};

/// Throws InvalidParameter unless |Q0 - c| - dq0 > D, i.e. the packet is
/// prepared outside the barrier.
void check_free_space(const GaussianWignerState& s, const Barrier& barrier);

/// Non-physical test distribution: indicator of q < edge times a normalized
/// Gaussian momentum profile. An optional smoothing width replaces the sharp
/// step by an erfc profile.
struct StepTestDistribution {
  double p0 = 0.0;
  double edge = 0.0;
  double dp0 = 0.0;
  double mass = 1.0;
  double smoothing = 0.0;

  static StepTestDistribution make(double p0, double edge, double dp0, double mass, double smoothing = 0.0);

  double coordinate_profile(double q) const;
  double density(double q, double p) const;
};

/// Phase-space distribution sampled on a uniform tensor grid. values is
/// row-major with q as the slow index: values[iq * p.size() + ip].
struct PhaseSpaceGrid {
  std::vector<double> q;
  std::vector<double> p;
  std::vector<double> values;

  double at(std::size_t iq, std::size_t ip) const { return values[iq * p.size() + ip]; }
};

PhaseSpaceGrid tabulate(const std::function<double(double, double)>& rho, double q_lo, double q_hi,
                        std::size_t nq, double p_lo, double p_hi, std::size_t np);

/// Samples a Gaussian state over +-extent widths in each variable.
PhaseSpaceGrid sample(const GaussianWignerState& s, std::size_t nq, std::size_t np, double extent = 8.0);

struct PhaseSpaceMoments {
  double p0 = 0.0;
  double dp0 = 0.0;
  double q0 = 0.0;
  double dq0 = 0.0;
};

/// Trapezoid-rule mean and dispersion in each variable. Throws
/// NormalizationError when the total weight differs from 1 by more than 1e-6.
PhaseSpaceMoments moments(const PhaseSpaceGrid& rho);

/// Free coordinate marginal P0_t(q) = int dp rho0(q - p t/m, p).
double free_marginal(const GaussianWignerState& s, double t, double q);

/// d P0_t / dq.
double free_marginal_slope(const GaussianWignerState& s, double t, double q);

/// First momentum moment M_t(q) = int dp (p - P0) rho0(q - p t/m, p)
///                              = t (q - Q) dp0^2 / (m dq^2) P0_t(q).
double first_moment(const GaussianWignerState& s, double t, double q);

} // namespace tunnel
