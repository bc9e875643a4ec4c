#include "tunnel/times.hpp"

#include <cmath>
#include <sstream>

#include "tunnel/errors.hpp"

namespace tunnel {

TunnelingTimes make_times(double kappa0, double mass, double tau_w, double tau_a) {
  TunnelingTimes t;
  t.kappa0 = kappa0;
  t.epsilon0 = kappa0 * kappa0 / (2.0 * mass);
  t.v0 = kappa0 / mass;
  t.tau_w = tau_w;
  t.tau_a = tau_a;
  t.tau_c = {tau_w, -tau_a};
  t.tau_bl = std::sqrt(tau_w * tau_w + tau_a * tau_a);
  return t;
}

RichardsonDerivative richardson_derivative(std::span<const double> f, std::size_t i, double h) {
  if (i < 2 || i + 2 >= f.size()) throw OutOfRange("Richardson stencil needs two points on each side");
  RichardsonDerivative d;
  d.fine = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d.coarse = (f[i + 2] - f[i - 2]) / (4.0 * h);
  d.extrapolated = (4.0 * d.fine - d.coarse) / 3.0;
  return d;
}

TunnelingTimes tunneling_times(const ScatteringAmplitudes& amps, double kappa0) {
  const std::size_t n = amps.size();
  const std::size_t i = amps.index_of(kappa0);
  if (i >= n) {
    std::ostringstream msg;
    msg << "reference momentum " << kappa0 << " is not a point of the momentum grid";
    throw OutOfRange(msg.str());
  }
  if (i < 2 || i + 2 >= n) {
    std::ostringstream msg;
    msg << "reference momentum " << kappa0 << " needs two grid points on each side";
    throw OutOfRange(msg.str());
  }
  const double h = amps.kappa[i + 1] - amps.kappa[i];
  for (std::size_t j = i - 2; j < i + 2; ++j) {
    if (std::abs(amps.kappa[j + 1] - amps.kappa[j] - h) > 1e-9 * h) {
      throw OutOfRange("momentum grid is not uniform around the reference momentum");
    }
  }
  for (std::size_t j = i - 2; j <= i + 2; ++j) {
    if (!std::isfinite(amps.log_abs_transmission[j])) {
      std::ostringstream msg;
      msg << "ln|A| is not finite at kappa = " << amps.kappa[j]
          << "; amplitude underflow, use log-scale amplitudes from the transfer-matrix solver";
      throw UnderflowError(msg.str());
    }
  }

  const double v0 = kappa0 / amps.mass;
  const double dphase = richardson_derivative(amps.phase, i, h).extrapolated;
  const double dlog = richardson_derivative(amps.log_abs_transmission, i, h).extrapolated;
  return make_times(amps.kappa[i], amps.mass, dphase / v0, dlog / v0);
}

std::vector<double> local_kappa_grid(double kappa0, double h, std::size_t half) {
  if (!(h > 0.0) || !(kappa0 - static_cast<double>(half) * h > 0.0)) {
    throw InvalidParameter("local grid must stay at positive momenta");
  }
  std::vector<double> g(2 * half + 1);
  for (std::size_t j = 0; j < g.size(); ++j) {
    g[j] = kappa0 + (static_cast<double>(j) - static_cast<double>(half)) * h;
  }
  g[half] = kappa0;
  return g;
}

} // namespace tunnel
