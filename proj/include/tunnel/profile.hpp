#pragma once

#include <functional>
#include <span>

namespace tunnel {

/// Sub-grid location of the maximum of a sampled profile: vertex of the
/// parabola through the largest sample and its two neighbours. Falls back to
/// the grid point when the maximum sits on the boundary.
double parabolic_peak(std::span<const double> q, std::span<const double> y);

/// Largest q where the profile crosses half of its maximum, by linear
/// interpolation between the bracketing samples.
double half_height_front(std::span<const double> q, std::span<const double> y);

struct ProfileMoments {
  double norm = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

/// Trapezoid-rule norm, mean and variance of a profile on a uniform grid.
ProfileMoments profile_moments(std::span<const double> q, std::span<const double> y);

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi, double tolerance);

} // namespace tunnel
