#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "tunnel/potential.hpp"
#include "tunnel/scattering.hpp"

namespace test {

inline constexpr std::uint64_t kSeed = 20240611;

// Fixed-seed generator for property tests.
class Gen {
public:
  explicit Gen(std::uint64_t seed = kSeed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::size_t index(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  // Contiguous piecewise barrier of 1..max_segments slabs.
  tunnel::Barrier barrier(std::size_t max_segments = 5, double max_height = 2.0) {
    const std::size_t n = index(1, max_segments);
    std::vector<tunnel::Segment> segs;
    double left = uniform(-3.0, 3.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double right = left + uniform(0.1, 1.5);
      segs.push_back({left, right, uniform(0.0, max_height)});
      left = right;
    }
    return tunnel::Barrier::piecewise(std::move(segs));
  }

private:
  std::mt19937_64 rng_;
};

// Transmission amplitude by direct RK4 integration of psi'' = 2m (V - eps) psi
// from the right, where psi = e^{i k x}, back to the left of the barrier.
inline std::complex<double> ode_transmission(const tunnel::Barrier& b, double mass, double k, std::size_t steps) {
  using C = std::complex<double>;
  const double lo = b.left_edge();
  const double hi = b.right_edge();
  const double eps = 0.5 * k * k / mass;
  const C i(0.0, 1.0);
  C psi = std::exp(i * k * hi);
  C dpsi = i * k * psi;
  const double h = (lo - hi) / static_cast<double>(steps);
  // V is frozen at the step midpoint; steps should put interfaces on step
  // boundaries.
  double x = hi;
  for (std::size_t s = 0; s < steps; ++s) {
    const double xm = x + 0.5 * h;
    const double vmid = b(xm);
    auto f = [&](C y) { return 2.0 * mass * (vmid - eps) * y; };
    const C k1y = dpsi, k1d = f(psi);
    const C k2y = dpsi + 0.5 * h * k1d, k2d = f(psi + 0.5 * h * k1y);
    const C k3y = dpsi + 0.5 * h * k2d, k3d = f(psi + 0.5 * h * k2y);
    const C k4y = dpsi + h * k3d, k4d = f(psi + h * k3y);
    psi += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    dpsi += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
    x += h;
  }
  // psi = a e^{ikx} + c e^{-ikx} at x = lo; A = 1/a.
  const C a = 0.5 * (psi + dpsi / (i * k)) * std::exp(-i * k * lo);
  return 1.0 / a;
}

// Transmitted density of a pure Gaussian state from its momentum
// representation: |int dp/sqrt(2 pi) phi(p) A(p) e^{i p q - i p^2 t / 2m}|^2.
inline std::vector<double> wave_function_density(const tunnel::Barrier& b, double mass, double p0, double q0,
                                                 double dq0, double t, const std::vector<double>& q,
                                                 std::size_t points = 6001) {
  using C = std::complex<double>;
  const double dp0 = 0.5 / dq0;
  const double lo = p0 - 10.0 * dp0;
  const double hi = p0 + 10.0 * dp0;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> p(points);
  std::vector<C> weight(points);
  const double norm = std::pow(2.0 * std::numbers::pi * dp0 * dp0, -0.25);
  for (std::size_t j = 0; j < points; ++j) {
    p[j] = lo + h * static_cast<double>(j);
    const double u = p[j] - p0;
    const C phi = norm * std::exp(-u * u / (4.0 * dp0 * dp0)) * std::polar(1.0, -p[j] * q0);
    const C a = tunnel::transfer_matrix_amplitude(b, mass, p[j]).transmission;
    const double w = (j == 0 || j + 1 == points) ? 0.5 : 1.0;
    weight[j] = w * h * phi * a * std::polar(1.0, -0.5 * p[j] * p[j] * t / mass) / std::sqrt(2.0 * std::numbers::pi);
  }
  std::vector<double> out(q.size());
  for (std::size_t iq = 0; iq < q.size(); ++iq) {
    C sum = 0.0;
    for (std::size_t j = 0; j < points; ++j) sum += weight[j] * std::polar(1.0, p[j] * q[iq]);
    out[iq] = std::norm(sum);
  }
  return out;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

} // namespace test
