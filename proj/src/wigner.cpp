#include "tunnel/wigner.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tunnel/diagnostics.hpp"
#include "tunnel/errors.hpp"

namespace tunnel {
namespace {

constexpr double kPi = std::numbers::pi;

double gaussian(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * kPi) * sigma);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw InvalidParameter("grid needs at least two points");
  std::vector<double> x(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + step * static_cast<double>(i);
  return x;
}

double trapezoid_weight(std::size_t i, std::size_t n, double step) {
  return (i == 0 || i + 1 == n) ? 0.5 * step : step;
}

} // namespace

GaussianWignerState GaussianWignerState::make(double p0, double q0, double dp0, double dq0, double mass) {
  if (!(dp0 > 0.0) || !(dq0 > 0.0)) throw InvalidParameter("packet widths dp0 and dq0 must be positive");
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (!std::isfinite(p0) || !std::isfinite(q0) || p0 == 0.0) {
    throw InvalidParameter("packet needs finite, non-zero mean momentum and finite position");
  }
  if (dq0 * dp0 < 0.5 * (1.0 - 1e-12)) {
    std::ostringstream msg;
    msg << "uncertainty relation violated: dq0 * dp0 = " << dq0 * dp0 << " < 1/2";
    throw InvalidParameter(msg.str());
  }
  const double ratio = dp0 / std::abs(p0);
  if (ratio >= 0.25) {
    std::ostringstream msg;
    msg << "momentum dispersion too large: dp0/|P0| = " << ratio << " (must be < 0.25)";
    throw InvalidParameter(msg.str());
  }
  if (ratio > 0.1) {
    std::ostringstream msg;
    msg << "dp0/|P0| = " << ratio << " exceeds 0.1; first-order asymptotics may be inaccurate";
    warn(msg.str());
  }
  return GaussianWignerState{p0, q0, dp0, dq0, mass};
}

GaussianWignerState GaussianWignerState::pure(double p0, double q0, double dq0, double mass) {
  if (!(dq0 > 0.0)) throw InvalidParameter("packet width dq0 must be positive");
  return make(p0, q0, 0.5 / dq0, dq0, mass);
}

double GaussianWignerState::normalization() const { return 1.0 / (2.0 * kPi * dp0 * dq0); }

double GaussianWignerState::density(double q, double p) const {
  const double u = (p - p0) / dp0;
  const double x = (q - q0) / dq0;
  return normalization() * std::exp(-0.5 * (u * u + x * x));
}

double GaussianWignerState::width_at(double t) const {
  const double spread = t * dp0 / mass;
  return std::sqrt(dq0 * dq0 + spread * spread);
}

double GaussianWignerState::clearing_time() const { return 2.0 * std::abs(q0) * mass / std::abs(p0); }

void check_free_space(const GaussianWignerState& s, const Barrier& barrier) {
  const double gap = std::abs(s.q0 - barrier.center()) - s.dq0;
  if (!(gap > barrier.support_radius())) {
    std::ostringstream msg;
    msg << "packet not prepared in free space: |Q0 - c| - dq0 = " << gap << " <= D = " << barrier.support_radius();
    throw InvalidParameter(msg.str());
  }
}

StepTestDistribution StepTestDistribution::make(double p0, double edge, double dp0, double mass, double smoothing) {
  if (!(dp0 > 0.0)) throw InvalidParameter("step distribution needs dp0 > 0");
  if (!(mass > 0.0)) throw InvalidParameter("mass must be positive");
  if (!(smoothing >= 0.0)) throw InvalidParameter("smoothing width must be non-negative");
  return StepTestDistribution{p0, edge, dp0, mass, smoothing};
}

double StepTestDistribution::coordinate_profile(double q) const {
  if (smoothing == 0.0) return q < edge ? 1.0 : 0.0;
  return 0.5 * std::erfc((q - edge) / (std::sqrt(2.0) * smoothing));
}

double StepTestDistribution::density(double q, double p) const {
  return coordinate_profile(q) * gaussian(p - p0, dp0);
}

PhaseSpaceGrid tabulate(const std::function<double(double, double)>& rho, double q_lo, double q_hi,
                        std::size_t nq, double p_lo, double p_hi, std::size_t np) {
  PhaseSpaceGrid g;
  g.q = linspace(q_lo, q_hi, nq);
  g.p = linspace(p_lo, p_hi, np);
  g.values.resize(nq * np);
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < np; ++j) g.values[i * np + j] = rho(g.q[i], g.p[j]);
  }
  return g;
}

PhaseSpaceGrid sample(const GaussianWignerState& s, std::size_t nq, std::size_t np, double extent) {
  return tabulate([&](double q, double p) { return s.density(q, p); }, s.q0 - extent * s.dq0,
                  s.q0 + extent * s.dq0, nq, s.p0 - extent * s.dp0, s.p0 + extent * s.dp0, np);
}

PhaseSpaceMoments moments(const PhaseSpaceGrid& rho) {
  const std::size_t nq = rho.q.size();
  const std::size_t np = rho.p.size();
  if (nq < 2 || np < 2 || rho.values.size() != nq * np) throw InvalidParameter("malformed phase-space grid");
  const double hq = (rho.q.back() - rho.q.front()) / static_cast<double>(nq - 1);
  const double hp = (rho.p.back() - rho.p.front()) / static_cast<double>(np - 1);

  double mass = 0.0, sq = 0.0, sp = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double w = trapezoid_weight(i, nq, hq) * trapezoid_weight(j, np, hp) * rho.at(i, j);
      mass += w;
      sq += w * rho.q[i];
      sp += w * rho.p[j];
    }
  }
  if (std::abs(mass - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << "phase-space distribution is not normalized: integral = " << mass;
    throw NormalizationError(msg.str());
  }
  PhaseSpaceMoments m;
  m.q0 = sq / mass;
  m.p0 = sp / mass;
  double vq = 0.0, vp = 0.0;
  for (std::size_t i = 0; i < nq; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      const double w = trapezoid_weight(i, nq, hq) * trapezoid_weight(j, np, hp) * rho.at(i, j);
      vq += w * (rho.q[i] - m.q0) * (rho.q[i] - m.q0);
      vp += w * (rho.p[j] - m.p0) * (rho.p[j] - m.p0);
    }
  }
  m.dq0 = std::sqrt(vq / mass);
  m.dp0 = std::sqrt(vp / mass);
  return m;
}

double free_marginal(const GaussianWignerState& s, double t, double q) {
  return gaussian(q - s.center_at(t), s.width_at(t));
}

double free_marginal_slope(const GaussianWignerState& s, double t, double q) {
  const double dq = s.width_at(t);
  return -(q - s.center_at(t)) / (dq * dq) * free_marginal(s, t, q);
}

double first_moment(const GaussianWignerState& s, double t, double q) {
  const double dq = s.width_at(t);
  return t * (q - s.center_at(t)) * s.dp0 * s.dp0 / (s.mass * dq * dq) * free_marginal(s, t, q);
}

} // namespace tunnel
