#include "tunnel/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnel/errors.hpp"
#include "tunnel/parallel.hpp"

namespace tunnel {
namespace {

// Real 2x2 matrix acting on (psi, psi'), stored with a separate log scale:
// the represented matrix is exp(log_scale) * [[a, b], [c, d]].
struct ScaledMatrix {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double log_scale = 0.0;

  void renormalize() {
    const double s = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (s > 0.0 && s != 1.0) {
      a /= s;
      b /= s;
      c /= s;
      d /= s;
      log_scale += std::log(s);
    }
  }
};

// Propagates (psi, psi') across a constant slab of the given width where
// psi'' = -k2 psi.
ScaledMatrix slab_matrix(double k2, double width) {
  ScaledMatrix m;
  if (k2 > 0.0) {
    const double k = std::sqrt(k2);
    const double theta = k * width;
    const double sn = std::sin(theta);
    const double cs = std::cos(theta);
    m.a = cs;
    m.d = cs;
    m.b = theta == 0.0 ? width : width * sn / theta;
    m.c = -k * sn;
  } else if (k2 < 0.0) {
    // cosh and sinh carry a factor e^theta, kept in log_scale.
    const double q = std::sqrt(-k2);
    const double theta = q * width;
    const double em = -std::expm1(-2.0 * theta); // 1 - e^{-2 theta}
    const double ch = 0.5 * (2.0 - em);          // (1 + e^{-2 theta}) / 2
    m.a = ch;
    m.d = ch;
    m.b = theta == 0.0 ? width : width * em / (2.0 * theta);
    m.c = 0.5 * q * em;
    m.log_scale = theta;
  } else {
    // Linear solution at the degenerate energy.
    m.b = width;
  }
  return m;
}

// left * right, both scaled.
ScaledMatrix multiply(const ScaledMatrix& l, const ScaledMatrix& r) {
  ScaledMatrix out;
  out.a = l.a * r.a + l.b * r.c;
  out.b = l.a * r.b + l.b * r.d;
  out.c = l.c * r.a + l.d * r.c;
  out.d = l.c * r.b + l.d * r.d;
  out.log_scale = l.log_scale + r.log_scale;
  out.renormalize();
  return out;
}

double wrap_to_pi(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  x = std::remainder(x, two_pi);
  if (x <= -std::numbers::pi) x += two_pi;
  return x;
}

} // namespace

PointAmplitude transfer_matrix_amplitude(const Barrier& barrier, double mass, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    std::ostringstream msg;
    msg << "momentum must be positive, got " << kappa;
    throw InvalidParameter(msg.str());
  }
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");

  PointAmplitude out;
  if (barrier.is_free()) {
    out.transmission = 1.0;
    out.reflection = 0.0;
    return out;
  }

  const double energy2m = kappa * kappa; // 2 m eps
  ScaledMatrix total;
  for (const Segment& s : barrier.segments()) {
    const double k2 = energy2m - 2.0 * mass * s.height;
    total = multiply(slab_matrix(k2, s.width()), total);
  }

  const double xl = barrier.segments().front().left;
  const double xr = barrier.segments().back().right;
  const Complex i{0.0, 1.0};
  const Complex den = total.a + total.d - i * kappa * total.b + i * total.c / kappa;
  const Complex num_b = total.d - total.a - i * kappa * total.b - i * total.c / kappa;

  out.log_abs_transmission = std::log(2.0) - total.log_scale - std::log(std::abs(den));
  out.arg_transmission = wrap_to_pi(kappa * (xl - xr) - std::arg(den));
  out.transmission = std::polar(std::exp(out.log_abs_transmission), out.arg_transmission);
  out.reflection = std::exp(2.0 * i * kappa * xl) * num_b / den;
  return out;
}

ScatteringAmplitudes transmission_amplitudes(const Barrier& barrier, double mass, std::span<const double> kappa_grid) {
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (kappa_grid.empty()) throw InvalidParameter("momentum grid is empty");
  for (std::size_t i = 0; i < kappa_grid.size(); ++i) {
    if (!(kappa_grid[i] > 0.0)) {
      std::ostringstream msg;
      msg << "momentum grid point " << i << " is not positive: " << kappa_grid[i];
      throw InvalidParameter(msg.str());
    }
    if (i > 0 && !(kappa_grid[i] > kappa_grid[i - 1])) {
      throw InvalidParameter("momentum grid is not strictly increasing at index " + std::to_string(i));
    }
  }

  const std::size_t n = kappa_grid.size();
  ScatteringAmplitudes amps;
  amps.mass = mass;
  amps.barrier_width = 2.0 * barrier.support_radius();
  amps.kappa.assign(kappa_grid.begin(), kappa_grid.end());
  amps.transmission.resize(n);
  amps.reflection.resize(n);
  amps.log_abs_transmission.resize(n);
  amps.phase.resize(n);

  std::vector<double> principal(n);
  parallel_for(n, [&](std::size_t i) {
    const PointAmplitude p = transfer_matrix_amplitude(barrier, mass, kappa_grid[i]);
    amps.transmission[i] = p.transmission;
    amps.reflection[i] = p.reflection;
    amps.log_abs_transmission[i] = p.log_abs_transmission;
    principal[i] = p.arg_transmission;
  });

  // A -> 1 at large momentum fixes the branch at the top of the grid.
  amps.phase[n - 1] = principal[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const double step = wrap_to_pi(principal[i] - principal[i + 1]);
    if (std::abs(step) > 0.5 * std::numbers::pi) {
      std::ostringstream msg;
      msg << "momentum grid too coarse to unwrap arg A on [" << kappa_grid[i] << ", " << kappa_grid[i + 1]
          << "]: principal phase step " << step;
      throw GridTooCoarse(msg.str());
    }
    amps.phase[i] = amps.phase[i + 1] + step;
  }
  return amps;
}

double ScatteringAmplitudes::lattice_spacing() const {
  if (kappa.size() < 2) return 0.0;
  const double h = 2.0 * kappa.front();
  for (std::size_t j = 0; j < kappa.size(); ++j) {
    const double expected = (static_cast<double>(j) + 0.5) * h;
    if (std::abs(kappa[j] - expected) > 1e-9 * h) return 0.0;
  }
  return h;
}

Complex ScatteringAmplitudes::lattice_transmission(long j) const {
  if (j >= 0) return transmission.at(static_cast<std::size_t>(j));
  return std::conj(transmission.at(static_cast<std::size_t>(-j - 1)));
}

std::size_t ScatteringAmplitudes::index_of(double k) const {
  if (kappa.empty()) return 0;
  auto it = std::lower_bound(kappa.begin(), kappa.end(), k);
  const auto check = [&](std::size_t i) {
    const double lo = i > 0 ? kappa[i] - kappa[i - 1] : kappa[std::min<std::size_t>(1, size() - 1)] - kappa[0];
    const double spacing = lo > 0.0 ? lo : std::abs(kappa[i]);
    return std::abs(kappa[i] - k) <= 1e-9 * spacing;
  };
  const auto i = static_cast<std::size_t>(it - kappa.begin());
  if (i < size() && check(i)) return i;
  if (i > 0 && check(i - 1)) return i - 1;
  return size();
}

Complex rectangular_closed_form(double v0, double width, double mass, double kappa) {
  if (!(kappa > 0.0)) throw InvalidParameter("momentum must be positive");
  if (!(v0 >= 0.0)) throw InvalidParameter("V0 must be non-negative");
  if (!(width > 0.0)) throw InvalidParameter("width must be positive");
  if (v0 == 0.0) return 1.0;
  const Complex i{0.0, 1.0};
  const double k2 = kappa * kappa - 2.0 * mass * v0;
  const Complex k = std::sqrt(Complex(k2, 0.0));
  const Complex x = k * width;
  // sin(k w)/k is even in k, so the principal root is enough; the series
  // covers the degenerate point k = 0.
  Complex sinc_w;
  if (std::abs(x) < 1e-4) {
    const Complex x2 = x * x;
    sinc_w = width * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
  } else {
    sinc_w = width * std::sin(x) / x;
  }
  const Complex den = std::cos(x) - i * (kappa * kappa + k2) / (2.0 * kappa) * sinc_w;
  return std::exp(-i * kappa * width) / den;
}

std::vector<double> lattice_kappa_grid(double spacing, std::size_t count) {
  if (!(spacing > 0.0)) throw InvalidParameter("grid spacing must be positive");
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j) g[j] = (static_cast<double>(j) + 0.5) * spacing;
  return g;
}

std::vector<double> anchored_kappa_grid(double anchor, double kappa_max, std::size_t min_points,
                                        double max_spacing) {
  if (!(anchor > 0.0)) throw InvalidParameter("grid anchor must be positive");
  if (!(kappa_max > anchor)) throw InvalidParameter("grid must extend beyond its anchor");
  if (min_points < 2) throw InvalidParameter("grid needs at least two points");
  double target = kappa_max / static_cast<double>(min_points);
  if (max_spacing > 0.0) target = std::min(target, max_spacing);
  // anchor = (j0 + 1/2) h with h <= target.
  const double j0 = std::ceil(anchor / target - 0.5);
  const double h = anchor / (j0 + 0.5);
  const auto count = static_cast<std::size_t>(std::ceil(kappa_max / h - 0.5)) + 1;
  return lattice_kappa_grid(h, count);
}

std::vector<double> uniform_kappa_grid(double kappa_max, std::size_t count) {
  if (!(kappa_max > 0.0) || count == 0) throw InvalidParameter("uniform grid needs kappa_max > 0 and count > 0");
  std::vector<double> g(count);
  for (std::size_t j = 0; j < count; ++j) g[j] = kappa_max * static_cast<double>(j + 1) / static_cast<double>(count);
  return g;
}

} // namespace tunnel
