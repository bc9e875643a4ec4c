#include "tunnel/tdse_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnel/errors.hpp"
#include "tunnel/fft.hpp"
#include "tunnel/profile.hpp"
#include "tunnel/scattering.hpp"

namespace tunnel {
namespace {

constexpr double kPi = std::numbers::pi;

double width_at(double dq0, double dp0, double mass, double t) {
  const double spread = t * dp0 / mass;
  return std::sqrt(dq0 * dq0 + spread * spread);
}

// Smallest n >= target whose only prime factors are 2, 3 and 5.
std::size_t fft_friendly(std::size_t target) {
  for (std::size_t n = std::max<std::size_t>(target, 1);; ++n) {
    std::size_t m = n;
    for (std::size_t f : {2u, 3u, 5u}) {
      while (m % f == 0) m /= f;
    }
    if (m == 1) return n;
  }
}

// Angular wavenumber of FFT bin j.
double wavenumber(std::size_t j, std::size_t n, double dx) {
  const auto jj = static_cast<double>(j);
  const auto nn = static_cast<double>(n);
  const double k = j < (n + 1) / 2 ? jj : jj - nn;
  return 2.0 * kPi * k / (nn * dx);
}

} // namespace

double EvolutionSetup::max_kinetic_energy() const {
  const double k = kPi / dx;
  return 0.5 * k * k / mass;
}

EvolutionSetup make_setup(const Barrier& barrier, double p0, double q0, double dq0, double mass, double t_final,
                          double dx_target, double dt_factor) {
  if (!(p0 > 0.0)) throw ConfigurationError("TDSE packet must move right: P0 > 0");
  if (!(dq0 > 0.0) || !(mass > 0.0) || !(t_final > 0.0) || !(dx_target > 0.0)) {
    throw ConfigurationError("TDSE setup needs dq0, mass, t_final and dx positive");
  }
  if (!(dt_factor > 0.0 && dt_factor < 0.5)) throw ConfigurationError("dt factor must lie in (0, 0.5)");
  if (!(q0 < barrier.left_edge())) throw ConfigurationError("TDSE packet must start left of the barrier");

  EvolutionSetup s;
  s.barrier = barrier;
  s.p0 = p0;
  s.q0 = q0;
  s.dq0 = dq0;
  s.mass = mass;

  const double width = barrier.right_edge() - barrier.left_edge();
  s.dx = width / std::ceil(width / dx_target);

  const double dp0 = s.dp0();
  const double v0 = p0 / mass;
  const double dq_final = width_at(dq0, dp0, mass, t_final);
  const double c = barrier.center();
  const double ahead = q0 + v0 * t_final + 8.0 * dq_final;
  const double mirror = 2.0 * c - (q0 + v0 * t_final) - 8.0 * dq_final;
  const double margin = 8.0 * dq0;
  const double lo = std::min(q0 - 8.0 * dq0, mirror) - margin;
  const double hi = std::max(ahead, barrier.right_edge()) + margin;

  // Barrier edges sit midway between grid points.
  const double below = std::ceil((barrier.left_edge() - lo) / s.dx);
  s.x_min = barrier.left_edge() + 0.5 * s.dx - below * s.dx;
  s.points = fft_friendly(static_cast<std::size_t>(std::ceil((hi - s.x_min) / s.dx)));

  s.steps = static_cast<std::size_t>(std::ceil(t_final * s.max_kinetic_energy() / dt_factor));
  s.dt = t_final / static_cast<double>(s.steps);
  validate(s);
  return s;
}

void validate(const EvolutionSetup& s) {
  if (!(s.dx > 0.0) || s.points < 8) throw ConfigurationError("grid needs dx > 0 and at least 8 points");
  if (!(s.dq0 > 0.0) || !(s.mass > 0.0) || !(s.dt > 0.0) || s.steps == 0) {
    throw ConfigurationError("setup needs dq0, mass, dt and step count positive");
  }
  const double dp0 = s.dp0();
  const double t = s.t_final();
  const double need_lo = s.q0 - 8.0 * s.dq0;
  const double need_hi = s.q0 + s.p0 / s.mass * t + 8.0 * width_at(s.dq0, dp0, s.mass, t);
  std::ostringstream msg;
  if (s.x_min > need_lo) {
    msg << "grid extent bound violated: x_min = " << s.x_min << " must be <= Q0 - 8 dq0 = " << need_lo;
    throw ConfigurationError(msg.str());
  }
  if (s.x_max() < need_hi) {
    msg << "grid extent bound violated: x_max = " << s.x_max() << " must be >= Q0 + v0 T + 8 dq(T) = " << need_hi;
    throw ConfigurationError(msg.str());
  }
  const double nyquist = kPi / s.dx;
  if (!(nyquist > std::abs(s.p0) + 8.0 * dp0)) {
    msg << "Nyquist bound violated: pi/dx = " << nyquist << " must exceed P0 + 8 dp0 = " << std::abs(s.p0) + 8.0 * dp0;
    throw ConfigurationError(msg.str());
  }
  const double stability = s.dt * s.max_kinetic_energy();
  if (!(stability < 0.5)) {
    msg << "time-step bound violated: dt * E_max = " << stability << " must be < 0.5";
    throw ConfigurationError(msg.str());
  }
}

double WaveFunction::norm() const {
  double s = 0.0;
  for (const auto& v : psi) s += std::norm(v);
  return s * dx;
}

std::vector<double> WaveFunction::density() const {
  std::vector<double> d(psi.size());
  for (std::size_t j = 0; j < psi.size(); ++j) d[j] = std::norm(psi[j]);
  return d;
}

WaveFunction initial_wave_function(const EvolutionSetup& s) {
  WaveFunction wf;
  wf.x_min = s.x_min;
  wf.dx = s.dx;
  wf.psi.resize(s.points);
  const double amp = std::pow(2.0 * kPi * s.dq0 * s.dq0, -0.25);
  for (std::size_t j = 0; j < s.points; ++j) {
    const double x = wf.x(j);
    const double u = (x - s.q0) / s.dq0;
    wf.psi[j] = amp * std::exp(-0.25 * u * u) * std::polar(1.0, s.p0 * x);
  }
  return wf;
}

EvolutionResult evolve(const EvolutionSetup& s) {
  validate(s);
  const std::size_t n = s.points;
  EvolutionResult result;
  WaveFunction& wf = result.final_state;
  wf = initial_wave_function(s);

  std::vector<std::complex<double>> half_v(n), full_v(n), kinetic(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double v = s.barrier(wf.x(j));
    half_v[j] = std::polar(1.0, -0.5 * v * s.dt);
    full_v[j] = std::polar(1.0, -v * s.dt);
    const double k = wavenumber(j, n, s.dx);
    // The 1/n of the inverse transform is folded into the kinetic factor.
    kinetic[j] = std::polar(1.0 / static_cast<double>(n), -0.5 * k * k / s.mass * s.dt);
  }

  FftPlan forward(n, FftDirection::forward);
  FftPlan backward(n, FftDirection::backward);
  auto& psi = wf.psi;

  const double norm0 = wf.norm();
  double previous = norm0;
  for (std::size_t j = 0; j < n; ++j) psi[j] *= half_v[j];
  for (std::size_t step = 0; step < s.steps; ++step) {
    forward.execute_inplace(psi);
    for (std::size_t j = 0; j < n; ++j) psi[j] *= kinetic[j];
    backward.execute_inplace(psi);
    const auto& v = step + 1 == s.steps ? half_v : full_v;
    for (std::size_t j = 0; j < n; ++j) psi[j] *= v[j];
    const double now = wf.norm();
    result.max_step_norm_drift = std::max(result.max_step_norm_drift, std::abs(now - previous));
    previous = now;
  }
  wf.time = s.t_final();
  result.total_norm_drift = std::abs(previous - norm0);
  return result;
}

Barrier represented_barrier(const EvolutionSetup& s) {
  const double lo = s.barrier.left_edge();
  const double hi = s.barrier.right_edge();
  const auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((lo - s.x_min) / s.dx)));
  std::vector<double> heights;
  std::size_t j = first;
  for (; j < s.points && s.x_min + s.dx * static_cast<double>(j) < hi; ++j) {
    heights.push_back(s.barrier(s.x_min + s.dx * static_cast<double>(j)));
  }
  if (heights.empty()) return s.barrier;
  return Barrier::sampled(s.x_min + s.dx * static_cast<double>(first), s.dx, std::move(heights));
}

TransmittedObservables transmitted_observables(const WaveFunction& wf, const Barrier& barrier) {
  const std::vector<double> rho = wf.density();
  double inside = 0.0;
  std::vector<double> q, y;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double x = wf.x(j);
    if (x >= barrier.left_edge() && x <= barrier.right_edge()) inside += rho[j] * wf.dx;
    if (x > barrier.right_edge()) {
      q.push_back(x);
      y.push_back(rho[j]);
    }
  }
  if (inside > 1e-6) {
    std::ostringstream msg;
    msg << "packet has not cleared the barrier: probability " << inside << " remains inside its support";
    throw NotAsymptotic(msg.str());
  }
  if (q.size() < 3) throw NotAsymptotic("no grid points beyond the barrier");

  TransmittedObservables o;
  for (double v : y) o.transmission += v * wf.dx;
  o.peak_q = parabolic_peak(q, y);
  o.half_height_q = half_height_front(q, y);
  const ProfileMoments m = profile_moments(q, y);
  o.mean = m.mean;
  o.variance = m.variance;
  return o;
}

double momentum_resolved_transmission(const Barrier& barrier, double mass, double p0, double dp0,
                                      std::size_t points) {
  if (points < 3 || points % 2 == 0) throw InvalidParameter("momentum quadrature needs an odd point count >= 3");
  const double lo = p0 - 10.0 * dp0;
  const double hi = p0 + 10.0 * dp0;
  if (!(lo > 0.0)) throw InvalidParameter("momentum window reaches non-positive momenta");
  const double h = (hi - lo) / static_cast<double>(points - 1);
  // Simpson's rule.
  double sum = 0.0;
  for (std::size_t j = 0; j < points; ++j) {
    const double p = lo + h * static_cast<double>(j);
    const double u = (p - p0) / dp0;
    const double g = std::exp(-0.5 * u * u) / (std::sqrt(2.0 * kPi) * dp0);
    const double a = std::exp(2.0 * transfer_matrix_amplitude(barrier, mass, p).log_abs_transmission);
    const double w = (j == 0 || j + 1 == points) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
    sum += w * a * g;
  }
  return sum * h / 3.0;
}

} // namespace tunnel
