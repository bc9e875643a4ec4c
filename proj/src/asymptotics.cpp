#include "tunnel/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tunnel/diagnostics.hpp"
#include "tunnel/errors.hpp"
#include "tunnel/fft.hpp"
#include "tunnel/parallel.hpp"

namespace tunnel {
namespace {

constexpr double kPi = std::numbers::pi;

// Bin width over Gaussian smoothing width for resolved propagator rows. The
// smoothed delta leaks Phi(-7) ~ 1e-12 into the neighbouring bin.
constexpr double kSmoothingRatio = 14.0;
// Smoothing window exp(-(sigma s)^2 / 2) is e^-32 at the band edge.
constexpr double kWindowDecay = 8.0;

double require_lattice(const ScatteringAmplitudes& amps) {
  const double h = amps.lattice_spacing();
  if (h <= 0.0) {
    throw InvalidParameter("propagator needs a lattice momentum grid kappa_j = (j + 1/2) h");
  }
  return h;
}

std::size_t require_grid_point(const ScatteringAmplitudes& amps, double p) {
  const std::size_t i = amps.index_of(p);
  if (i >= amps.size()) {
    std::ostringstream msg;
    msg << "momentum " << p << " is not a point of the amplitude grid";
    throw OutOfRange(msg.str());
  }
  return i;
}

long mod(long a, long n) {
  const long r = a % n;
  return r < 0 ? r + n : r;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// Spectrum A(p + sigma_k/2) conj(A(p - sigma_k/2)) on sigma_k = 2 h k,
// k in [-N/2, N/2), stored at k mod N. Entries beyond the grid are zero.
// The unpaired k = -N/2 entry keeps only its real part so the transform of
// the Hermitian spectrum stays real.
std::vector<Complex> propagator_spectrum(const ScatteringAmplitudes& amps, std::size_t i, long n_fft) {
  std::vector<Complex> g(static_cast<std::size_t>(n_fft));
  const long top = static_cast<long>(amps.size()) - 1;
  const long ii = static_cast<long>(i);
  for (long k = -n_fft / 2; k < n_fft / 2; ++k) {
    if (ii + std::abs(k) > top) continue;
    Complex f = amps.lattice_transmission(ii + k) * std::conj(amps.lattice_transmission(ii - k));
    if (k == -n_fft / 2) f = f.real();
    g[static_cast<std::size_t>(mod(k, n_fft))] = f;
  }
  return g;
}

} // namespace

const char* to_string(DistributionMethod method) {
  switch (method) {
    case DistributionMethod::exact: return "exact";
    case DistributionMethod::first_order: return "first_order";
    case DistributionMethod::gaussian_closed_form: return "gaussian_closed_form";
  }
  return "unknown";
}

double PropagatorRow::at(double r_value) const {
  if (r.empty()) return 0.0;
  const double idx = std::round((r_value - r.front()) / dr);
  if (idx < 0.0 || idx >= static_cast<double>(r.size())) return 0.0;
  return values[static_cast<std::size_t>(idx)];
}

double PropagatorRow::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * dr;
}

double required_sigma_max(double dr) { return kWindowDecay * kSmoothingRatio / dr; }

PropagatorRow transmission_propagator(const ScatteringAmplitudes& amps, double p, double dr) {
  if (!(dr > 0.0)) throw InvalidParameter("propagator resolution dr must be positive");
  const double h = require_lattice(amps);
  const std::size_t i = require_grid_point(amps, p);

  const double sigma_req = required_sigma_max(dr);
  const double sigma_avail = 2.0 * h * static_cast<double>(amps.size() - 1 - i);
  if (sigma_avail < sigma_req) {
    std::ostringstream msg;
    msg << "r resolution " << dr << " needs sigma_max >= " << sigma_req << " (momentum grid up to "
        << p + 0.5 * sigma_req << "); the grid supplies sigma_max = " << sigma_avail << " at p = " << p;
    throw ResolutionError(msg.str());
  }

  const long half_band = static_cast<long>(std::ceil(sigma_req / (2.0 * h)));
  const long n0 = 2 * half_band;
  const double fine0 = kPi / (static_cast<double>(n0) * h);
  const long stride = std::max(1L, static_cast<long>(std::ceil(dr / fine0)));
  const long n_fft = stride * ((n0 + stride - 1) / stride);
  const double fine = kPi / (static_cast<double>(n_fft) * h);
  const double bin = static_cast<double>(stride) * fine;
  const double smooth = bin / kSmoothingRatio;
  const double dsigma = 2.0 * h;

  std::vector<Complex> g = propagator_spectrum(amps, i, n_fft);
  for (long k = -n_fft / 2; k < n_fft / 2; ++k) {
    const double sigma = dsigma * static_cast<double>(k);
    const double window = sinc(0.5 * sigma * bin) * std::exp(-0.5 * sigma * sigma * smooth * smooth);
    g[static_cast<std::size_t>(mod(k, n_fft))] *= window * dsigma / (2.0 * kPi);
  }
  FftPlan plan(static_cast<std::size_t>(n_fft), FftDirection::forward);
  plan.execute_inplace(g);

  PropagatorRow row;
  row.p = amps.kappa[i];
  row.dr = bin;
  row.sigma_max = dsigma * static_cast<double>(n_fft / 2);
  row.smoothing = smooth;
  row.period = kPi / h;
  const long bins = n_fft / stride;
  row.r.reserve(static_cast<std::size_t>(bins));
  row.values.reserve(static_cast<std::size_t>(bins));
  for (long m = -bins / 2; m < bins - bins / 2; ++m) {
    const Complex v = g[static_cast<std::size_t>(mod(m * stride, n_fft))];
    row.r.push_back(static_cast<double>(m) * bin);
    row.values.push_back(v.real());
    row.max_imag = std::max(row.max_imag, std::abs(v.imag()));
  }
  return row;
}

double propagator_tail_length(double barrier_width) {
  return 100.0 + 25.0 * barrier_width + 8.0 * barrier_width * barrier_width;
}

std::vector<double> propagator_kappa_grid(double p, double dr, double barrier_width, double max_spacing) {
  if (!(p > 0.0) || !(dr > 0.0) || !(max_spacing > 0.0)) {
    throw InvalidParameter("propagator grid needs p, dr and spacing positive");
  }
  const double h = std::min(max_spacing, kPi / (2.0 * propagator_tail_length(barrier_width)));
  return anchored_kappa_grid(p, p + 0.5 * required_sigma_max(dr) + 4.0 * h, 2, h);
}

double default_sigma_max(const GaussianWignerState& s, double barrier_width) {
  double scale = std::max(s.dp0, 1.0 / s.dq0);
  if (barrier_width > 0.0) scale = std::max(scale, 1.0 / barrier_width);
  return 16.0 * scale;
}

double required_period(const GaussianWignerState& s, double barrier_width, double t, double q_lo, double q_hi,
                       const ExactOptions& opts) {
  const double tail = opts.tail_length >= 0.0 ? opts.tail_length : propagator_tail_length(barrier_width);
  return (q_hi - q_lo) + 2.0 * opts.p_extent * s.dp0 * t / s.mass + 2.0 * opts.r_extent * s.dq0 + tail;
}

std::vector<double> exact_kappa_grid(const GaussianWignerState& s, double barrier_width, double t, double q_lo,
                                     double q_hi, std::size_t min_points, const ExactOptions& opts) {
  const double sigma_max = opts.sigma_max > 0.0 ? opts.sigma_max : default_sigma_max(s, barrier_width);
  const double h_period = kPi / required_period(s, barrier_width, t, q_lo, q_hi, opts);
  const double reach = s.p0 + opts.p_extent * s.dp0 + 0.5 * sigma_max;
  const double h = std::min(h_period, reach / static_cast<double>(min_points));
  return anchored_kappa_grid(s.p0, reach + 4.0 * h, min_points, h);
}

TransmittedDistribution transmitted_exact(const ScatteringAmplitudes& amps, const GaussianWignerState& s, double t,
                                          std::span<const double> q_grid, const ExactOptions& opts) {
  if (q_grid.empty()) throw InvalidParameter("q grid is empty");
  if (!(t >= 0.0)) throw InvalidParameter("time must be non-negative");
  if (t < s.clearing_time()) {
    std::ostringstream msg;
    msg << "t = " << t << " is below the clearing time " << s.clearing_time()
        << "; the transmitted packet may not be asymptotic";
    warn(msg.str());
  }
  const double h = require_lattice(amps);
  const std::size_t i0 = require_grid_point(amps, s.p0);

  const double sigma_max = opts.sigma_max > 0.0 ? opts.sigma_max : default_sigma_max(s, amps.barrier_width);
  const long half_band = static_cast<long>(std::ceil(sigma_max / (2.0 * h)));
  const long n_fft = 2 * half_band;
  const double dsigma = 2.0 * h;
  const double dr = kPi / (static_cast<double>(n_fft) * h);
  const double period = kPi / h;

  const auto [q_lo, q_hi] = std::minmax_element(q_grid.begin(), q_grid.end());
  const double needed = required_period(s, amps.barrier_width, t, *q_lo, *q_hi, opts);
  if (period < needed) {
    std::ostringstream msg;
    msg << "momentum grid too coarse: r period pi/h = " << period << " is below the required " << needed
        << "; use spacing h <= " << kPi / needed;
    throw GridTooCoarse(msg.str());
  }

  // Momentum rows: grid points within P0 +- p_extent dp0.
  const long span = static_cast<long>(std::floor(opts.p_extent * s.dp0 / h + 1e-9));
  const long lo = static_cast<long>(i0) - span;
  const long hi = static_cast<long>(i0) + span;
  if (lo < 0 || hi + half_band > static_cast<long>(amps.size()) - 1) {
    std::ostringstream msg;
    msg << "momentum grid margin violated: need kappa up to " << amps.kappa[i0] + (span + half_band) * h
        << " and down to " << amps.kappa[i0] - span * h << " for sigma_max = " << sigma_max;
    throw OutOfRange(msg.str());
  }
  const std::size_t rows = static_cast<std::size_t>(hi - lo + 1);

  // T(r_j, p) for every row, r_j = j dr on the periodic FFT grid.
  std::vector<std::vector<double>> table(rows);
  FftPlan plan(static_cast<std::size_t>(n_fft), FftDirection::forward);
  parallel_for(rows, [&](std::size_t row) {
    const auto i = static_cast<std::size_t>(lo + static_cast<long>(row));
    std::vector<Complex> g = propagator_spectrum(amps, i, n_fft);
    for (auto& v : g) v *= dsigma / (2.0 * kPi);
    plan.execute_inplace(g);
    std::vector<double>& out = table[row];
    out.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) out[j] = g[j].real();
  });

  const double c_norm = s.normalization();
  std::vector<double> p_weight(rows), velocity(rows);
  for (std::size_t row = 0; row < rows; ++row) {
    const double p = amps.kappa[static_cast<std::size_t>(lo + static_cast<long>(row))];
    const double u = (p - s.p0) / s.dp0;
    const double trap = (row == 0 || row + 1 == rows) ? 0.5 * h : h;
    p_weight[row] = trap * c_norm * std::exp(-0.5 * u * u);
    velocity[row] = p / s.mass;
  }

  const double cutoff = opts.r_extent * s.dq0;
  TransmittedDistribution out;
  out.t = t;
  out.q.assign(q_grid.begin(), q_grid.end());
  out.values.resize(q_grid.size());
  out.method = DistributionMethod::exact;
  out.transmission_probability = std::norm(amps.transmission[i0]);
  out.times = tunneling_times(amps, s.p0);

  parallel_for(q_grid.size(), [&](std::size_t iq) {
    const double q = q_grid[iq];
    double total = 0.0;
    for (std::size_t row = 0; row < rows; ++row) {
      // rho0(q - v t + r, p) is centred at r = Q0 - q + v t.
      const double rc = s.q0 - q + velocity[row] * t;
      const long j_lo = static_cast<long>(std::ceil((rc - cutoff) / dr));
      const long j_hi = static_cast<long>(std::floor((rc + cutoff) / dr));
      const std::vector<double>& tr = table[row];
      double inner = 0.0;
      for (long j = j_lo; j <= j_hi; ++j) {
        const double x = (static_cast<double>(j) * dr - rc) / s.dq0;
        inner += tr[static_cast<std::size_t>(mod(j, n_fft))] * std::exp(-0.5 * x * x);
      }
      total += p_weight[row] * inner * dr;
    }
    out.values[iq] = total;
  });
  return out;
}

double transmitted_first_order(const TunnelingTimes& times, double a2, const GaussianWignerState& s, double t,
                               double q) {
  const double v0 = s.v0();
  return a2 * (free_marginal(s, t, q) + v0 * times.tau_w * free_marginal_slope(s, t, q) +
               v0 * times.tau_a * 2.0 * first_moment(s, t, q));
}

double gaussian_first_order(const GaussianWignerState& s, const TunnelingTimes& times, double a2, double t, double q) {
  const double dq = s.width_at(t);
  const double tau0 = shift_observables(times, s, t).tau0;
  return a2 * free_marginal(s, t, q) * (1.0 + s.v0() * tau0 * (q - s.center_at(t)) / (dq * dq));
}

TransmittedDistribution tabulate_first_order(const TunnelingTimes& times, double a2, const GaussianWignerState& s,
                                             double t, std::span<const double> q_grid, DistributionMethod method) {
  if (method == DistributionMethod::exact) throw InvalidParameter("tabulate_first_order needs a closed-form method");
  TransmittedDistribution out;
  out.t = t;
  out.q.assign(q_grid.begin(), q_grid.end());
  out.values.reserve(q_grid.size());
  out.method = method;
  out.transmission_probability = a2;
  out.times = times;
  for (double q : q_grid) {
    out.values.push_back(method == DistributionMethod::first_order ? transmitted_first_order(times, a2, s, t, q)
                                                                   : gaussian_first_order(s, times, a2, t, q));
  }
  return out;
}

ShiftObservables shift_observables(const TunnelingTimes& times, const GaussianWignerState& s, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be non-negative");
  const double v0 = s.v0();
  const double speed_up = t * times.tau_a * s.dp0 * s.dp0 / s.mass;
  ShiftObservables o;
  o.tau0 = 2.0 * speed_up - times.tau_w;
  o.zeta = 2.0 * v0 * o.tau0 / s.width_at(t);
  o.delta_q_peak = 2.0 * v0 * o.tau0 / (std::sqrt(1.0 + o.zeta * o.zeta) + 1.0);
  o.tau_h = speed_up - times.tau_w;
  o.half_height_shift = v0 * o.tau_h;
  return o;
}

double half_height_shift(const StepTestDistribution& step, const TunnelingTimes& times, double t) {
  if (!(t >= 0.0)) throw InvalidParameter("time must be non-negative");
  const double tau_h = t * times.tau_a * step.dp0 * step.dp0 / step.mass - times.tau_w;
  return step.p0 / step.mass * tau_h;
}

double tau0_sign_change_time(const TunnelingTimes& times, const GaussianWignerState& s) {
  if (times.tau_a == 0.0) return std::numeric_limits<double>::infinity();
  return s.mass * times.tau_w / (2.0 * times.tau_a * s.dp0 * s.dp0);
}

} // namespace tunnel
