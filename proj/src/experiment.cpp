#include "tunnel/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "tunnel/asymptotics.hpp"
#include "tunnel/errors.hpp"
#include "tunnel/profile.hpp"
#include "tunnel/scattering.hpp"
#include "tunnel/tdse_oracle.hpp"
#include "tunnel/times.hpp"
#include "tunnel/wigner.hpp"

namespace tunnel {
namespace {

namespace fs = std::filesystem;

class Csv {
public:
  explicit Csv(std::string header) { body_ << header << '\n'; }

  void row(std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
      if (!first) body_ << ',';
      body_ << format_number(v);
      first = false;
    }
    body_ << '\n';
  }

  std::string str() const { return body_.str(); }

private:
  std::ostringstream body_;
};

class Summary {
public:
  explicit Summary(const ExperimentConfig& cfg) {
    out_ << "experiment = " << to_string(cfg.kind) << '\n';
    out_ << "barrier = " << to_string(cfg.barrier.kind()) << " center " << format_number(cfg.barrier.center())
         << " support_radius " << format_number(cfg.barrier.support_radius()) << " max_height "
         << format_number(cfg.barrier.max_height()) << '\n';
  }

  void observable(const std::string& name, double value, const std::string& provenance) {
    out_ << name << " = " << format_number(value) << "  # " << provenance << '\n';
  }

  void check(const std::string& name, double value, double tolerance, bool pass, const std::string& provenance) {
    out_ << name << " = " << format_number(value) << " tolerance " << format_number(tolerance) << ' '
         << (pass ? "PASS" : "FAIL") << "  # " << provenance << '\n';
  }

  void note(const std::string& text) { out_ << "# " << text << '\n'; }

  std::string str() const { return out_.str(); }

private:
  std::ostringstream out_;
};

class Output {
public:
  explicit Output(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, const std::string& content) {
    const fs::path target = dir_ / name;
    const fs::path temp = dir_ / (name + ".tmp");
    {
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot write " + temp.string());
      out << content;
      out.flush();
      if (!out) throw Error("write failed for " + temp.string());
    }
    fs::rename(temp, target);
    written_.push_back(target);
  }

  std::vector<fs::path> written() const { return written_; }

private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

double barrier_width(const Barrier& b) { return 2.0 * b.support_radius(); }

TunnelingTimes reference_times(const Barrier& b, double mass, double kappa0, double step) {
  const auto grid = local_kappa_grid(kappa0, step);
  return tunneling_times(transmission_amplitudes(b, mass, grid), kappa0);
}

double transmission_probability(const Barrier& b, double mass, double kappa) {
  return std::exp(2.0 * transfer_matrix_amplitude(b, mass, kappa).log_abs_transmission);
}

GaussianWignerState gaussian_state(const PacketSpec& p) { return GaussianWignerState::make(p.p0, p.q0, p.dp0, p.dq0, p.mass); }

const char* kTimesProvenance = "times: tau_w = d(arg A)/d eps, tau_a = d(ln|A|)/d eps at kappa0, central differences "
                               "at h and 2h with one Richardson step";

void record_times(Summary& summary, const TunnelingTimes& t) {
  summary.observable("tau_w", t.tau_w, kTimesProvenance);
  summary.observable("tau_a", t.tau_a, kTimesProvenance);
  summary.observable("tau_bl", t.tau_bl, "times: |tau_w - i tau_a|");
}

// ---------------------------------------------------------------------------

void run_amplitudes(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  const double mass = cfg.packet.mass;
  double kmax = cfg.kappa_max;
  if (kmax <= 0.0) kmax = cfg.barrier.is_free() ? 5.0 : 5.0 * std::sqrt(2.0 * mass * cfg.barrier.max_height());
  const auto grid = uniform_kappa_grid(kmax, cfg.kappa_points);
  const auto amps = transmission_amplitudes(cfg.barrier, mass, grid);

  Csv csv("kappa,re_A,im_A,abs_A,arg_A_unwrapped,re_B,im_B");
  double defect = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const Complex a = amps.transmission[i];
    const Complex b = amps.reflection[i];
    csv.row({amps.kappa[i], a.real(), a.imag(), std::exp(amps.log_abs_transmission[i]), amps.phase[i], b.real(),
             b.imag()});
    defect = std::max(defect, std::abs(std::norm(a) + std::norm(b) - 1.0));
  }
  out.write("amplitudes.csv", csv.str());
  summary.observable("kappa_max", kmax, "grid: uniform, kappa_j = j kappa_max / n");
  summary.observable("points", static_cast<double>(amps.size()), "grid size");
  summary.observable("max_unitarity_defect", defect, "scattering: max | |A|^2 + |B|^2 - 1 | (transfer matrix)");
  summary.observable("abs_A_at_kappa_max", std::abs(amps.transmission.back()), "scattering: |A| -> 1 as kappa grows");
}

void run_times(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  Csv csv("kappa0,tau_w,tau_a,tau_bl");
  for (double k0 : cfg.reference_momenta) {
    const TunnelingTimes t = reference_times(cfg.barrier, cfg.packet.mass, k0, cfg.derivative_step);
    csv.row({k0, t.tau_w, t.tau_a, t.tau_bl});
    summary.note("kappa0 = " + format_number(k0));
    record_times(summary, t);
  }
  out.write("times.csv", csv.str());
  summary.observable("derivative_step", cfg.derivative_step, "times: kappa step h");
}

void run_propagator(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  const double h = cfg.propagator_spacing;
  Csv csv("p,r,T");
  for (double p : cfg.propagator_momenta) {
    const auto grid = propagator_kappa_grid(p, cfg.propagator_dr, barrier_width(cfg.barrier), h);
    const auto amps = transmission_amplitudes(cfg.barrier, cfg.packet.mass, grid);
    const PropagatorRow row = transmission_propagator(amps, p, cfg.propagator_dr);
    double peak = 0.0, acausal = 0.0;
    for (std::size_t i = 0; i < row.r.size(); ++i) {
      csv.row({row.p, row.r[i], row.values[i]});
      peak = std::max(peak, std::abs(row.values[i]));
      if (row.r[i] < -row.dr) acausal = std::max(acausal, std::abs(row.values[i]));
    }
    summary.note("p = " + format_number(p) + ", momentum spacing " + format_number(amps.lattice_spacing()));
    summary.observable("bin_width", row.dr, "propagator: resolved bin width");
    summary.observable("integral_T", row.integral(), "propagator: sum of bins times dr");
    summary.observable("abs_A_squared", transmission_probability(cfg.barrier, cfg.packet.mass, p),
                       "scattering: |A(p)|^2, equals integral_T");
    summary.observable("acausal_ratio", peak > 0.0 ? acausal / peak : 0.0,
                       "propagator: max_{r < -dr} |T| / max |T|, zero for a causal kernel");
    summary.observable("max_imag", row.max_imag, "propagator: largest imaginary residue before taking Re T");
  }
  out.write("propagator.csv", csv.str());
  summary.observable("sigma_max", required_sigma_max(cfg.propagator_dr),
                     "propagator: band 112/dr for Gaussian-smoothed bins");
}

void run_distribution(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  const GaussianWignerState s = gaussian_state(cfg.packet);
  const double w = barrier_width(cfg.barrier);
  Csv dist("t,q,p_exact,p_first_order,p_free_scaled");
  Csv obs("t,tau0,zeta,delta_q_peak,tau_h,exact_peak_shift,exact_transmission");
  bool times_recorded = false;
  for (double t : cfg.times) {
    const double c = s.center_at(t);
    const double dq = s.width_at(t);
    const auto q = linspace(c - cfg.q_extent * dq, c + cfg.q_extent * dq, cfg.q_points);
    const auto grid = exact_kappa_grid(s, w, t, q.front(), q.back());
    const auto amps = transmission_amplitudes(cfg.barrier, s.mass, grid);
    const TransmittedDistribution exact = transmitted_exact(amps, s, t, q);
    const double a2 = exact.transmission_probability;
    const TunnelingTimes& times = exact.times;
    if (!times_recorded) {
      record_times(summary, times);
      summary.observable("abs_A_squared", a2, "scattering: |A(P0)|^2");
      times_recorded = true;
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      dist.row({t, q[i], exact.values[i], transmitted_first_order(times, a2, s, t, q[i]),
                a2 * free_marginal(s, t, q[i])});
    }
    const ShiftObservables o = shift_observables(times, s, t);
    const double peak_shift = parabolic_peak(q, exact.values) - c;
    const double total = profile_moments(q, exact.values).norm;
    obs.row({t, o.tau0, o.zeta, o.delta_q_peak, o.tau_h, peak_shift, total});

    summary.note("t = " + format_number(t) + ", momentum grid " + std::to_string(amps.size()) + " points");
    summary.observable("tau0", o.tau0, "asymptotics: tau0 = 2 t tau_a dp0^2 / m - tau_w");
    summary.observable("delta_q_peak", o.delta_q_peak,
                       "asymptotics: 2 v0 tau0 / (sqrt(1 + zeta^2) + 1), zeta = 2 v0 tau0 / dq");
    summary.observable("exact_peak_shift", peak_shift,
                       "asymptotics: parabolic peak of the exact quadrature minus Q0 + v0 t");
    summary.observable("exact_transmission", total, "asymptotics: trapezoid integral of the exact distribution");
  }
  out.write("distribution.csv", dist.str());
  out.write("observables.csv", obs.str());
}

void run_oracle(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  const GaussianWignerState s = gaussian_state(cfg.packet);
  const TunnelingTimes times = reference_times(cfg.barrier, s.mass, s.p0, cfg.derivative_step);
  const double a2 = transmission_probability(cfg.barrier, s.mass, s.p0);
  record_times(summary, times);
  summary.observable("abs_A_squared", a2, "scattering: |A(P0)|^2");

  Csv csv("t_final,transmission,peak_q,half_height_q,variance");
  for (std::size_t k = 0; k < cfg.times.size(); ++k) {
    const double t = cfg.times[k];
    const EvolutionSetup setup =
        make_setup(cfg.barrier, s.p0, s.q0, s.dq0, s.mass, t, cfg.tdse_dx, cfg.tdse_dt_factor);
    const EvolutionResult r = evolve(setup);
    const TransmittedObservables o = transmitted_observables(r.final_state, cfg.barrier);
    csv.row({t, o.transmission, o.peak_q, o.half_height_q, o.variance});

    const ShiftObservables predicted = shift_observables(times, s, t);
    const double advance = o.peak_q - s.center_at(t);
    const double deviation = std::abs(advance - predicted.delta_q_peak) / std::abs(predicted.delta_q_peak);
    const double ratio = s.dp0 / s.p0;
    const double t_tol = 2.0 * ratio * ratio + 1e-4;
    const double t_err = std::abs(o.transmission - a2);
    const double oracle = momentum_resolved_transmission(represented_barrier(setup), s.mass, s.p0, s.dp0);

    summary.note("t = " + format_number(t) + ": grid " + std::to_string(setup.points) + " points, dx " +
                 format_number(setup.dx) + ", " + std::to_string(setup.steps) + " steps");
    summary.observable("tdse_peak_advance", advance, "tdse_oracle: parabolic peak beyond the barrier minus Q0 + v0 t");
    summary.observable("predicted_peak_advance", predicted.delta_q_peak,
                       "asymptotics: 2 v0 tau0 / (sqrt(1 + zeta^2) + 1)");
    summary.check("peak_advance_relative_deviation", deviation, cfg.peak_tolerance, deviation <= cfg.peak_tolerance,
                  "tdse_oracle vs shift_observables");
    summary.check("transmission_deviation", t_err, t_tol, t_err <= t_tol,
                  "tdse_oracle transmission vs |A(P0)|^2, tolerance 2 (dp0/P0)^2 + 1e-4");
    summary.observable("momentum_resolved_transmission", oracle,
                       "tdse_oracle: int |A(p)|^2 g(p) dp over the initial momentum marginal");
    summary.observable("norm_drift_total", r.total_norm_drift, "tdse_oracle: |norm(T) - norm(0)|");
    if (cfg.tdse_snapshot) {
      Csv snap("q,density");
      const auto rho = r.final_state.density();
      for (std::size_t j = 0; j < rho.size(); ++j) snap.row({r.final_state.x(j), rho[j]});
      out.write("snapshot_" + std::to_string(k) + ".csv", snap.str());
    }
  }
  out.write("oracle.csv", csv.str());
}

void run_shift_sweep(const ExperimentConfig& cfg, Output& out, Summary& summary) {
  const TunnelingTimes times = reference_times(cfg.barrier, cfg.packet.mass, cfg.packet.p0, cfg.derivative_step);
  record_times(summary, times);

  if (cfg.packet.kind == "step") {
    const auto step = StepTestDistribution::make(cfg.packet.p0, cfg.packet.q0, cfg.packet.dp0, cfg.packet.mass,
                                                 cfg.packet.smoothing);
    Csv csv("t,tau_h,half_height_shift");
    for (double t : cfg.times) {
      const double shift = half_height_shift(step, times, t);
      csv.row({t, shift * step.mass / step.p0, shift});
    }
    out.write("shift_sweep.csv", csv.str());
    summary.note("half_height_shift = v0 tau_h, tau_h = t tau_a dp0^2 / m - tau_w");
    return;
  }

  const GaussianWignerState s = gaussian_state(cfg.packet);
  Csv csv("t,tau0,zeta,delta_q_peak,tau_h,half_height_shift");
  std::vector<ShiftObservables> rows;
  double identity = 0.0;
  for (double t : cfg.times) {
    const ShiftObservables o = shift_observables(times, s, t);
    rows.push_back(o);
    csv.row({t, o.tau0, o.zeta, o.delta_q_peak, o.tau_h, o.half_height_shift});
    identity = std::max(identity, std::abs((o.tau_h + times.tau_w) - 0.5 * (o.tau0 + times.tau_w)));
  }
  out.write("shift_sweep.csv", csv.str());

  const double t_star = tau0_sign_change_time(times, s);
  summary.observable("t_star", t_star, "asymptotics: zero of tau0, m tau_w / (2 tau_a dp0^2)");
  summary.observable("half_height_identity_residual", identity,
                     "asymptotics: max |(tau_h + tau_w) - (tau0 + tau_w)/2| over the sweep");
  bool found = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if ((rows[i - 1].delta_q_peak < 0.0) != (rows[i].delta_q_peak < 0.0)) {
      found = true;
      const bool bracketed = cfg.times[i - 1] <= t_star && t_star <= cfg.times[i];
      summary.note("delta_q_peak changes sign between t = " + format_number(cfg.times[i - 1]) + " and t = " +
                   format_number(cfg.times[i]));
      summary.check("sign_change_offset", std::abs(0.5 * (cfg.times[i - 1] + cfg.times[i]) - t_star),
                    cfg.times[i] - cfg.times[i - 1], bracketed, "sweep interval containing t_star");
    }
  }
  if (!found) summary.note("delta_q_peak keeps its sign over the sweep");
}

// ---------------------------------------------------------------------------

ExperimentKind parse_kind(const std::string& name) {
  for (const auto& info : experiment_catalog()) {
    if (name == info.name) return info.kind;
  }
  throw ConfigurationError("experiment.kind: unknown experiment '" + name + "'");
}

template <class F>
auto with_context(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const ConfigurationError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigurationError(context + ": " + e.what());
  }
}

Barrier load_barrier(const Config& c) {
  const std::string kind = c.string("barrier.kind", "rectangular");
  return with_context("barrier", [&] {
    if (kind == "rectangular") {
      return Barrier::rectangular(c.number("barrier.v0"), c.number("barrier.width"), c.number("barrier.center", 0.0));
    }
    if (kind == "free") {
      return Barrier::rectangular(0.0, c.number("barrier.width", 1.0), c.number("barrier.center", 0.0));
    }
    if (kind == "piecewise") {
      std::vector<Segment> segs;
      const auto rows = c.tuples("barrier.segments");
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != 3) {
          throw ConfigurationError("barrier.segments[" + std::to_string(i) + "]: expected (left, right, height)");
        }
        segs.push_back({rows[i][0], rows[i][1], rows[i][2]});
      }
      return Barrier::piecewise(std::move(segs));
    }
    if (kind == "sampled") {
      return Barrier::sampled(c.number("barrier.first"), c.number("barrier.spacing"), c.numbers("barrier.heights"));
    }
    throw ConfigurationError("barrier.kind: expected rectangular, free, piecewise or sampled, got '" + kind + "'");
  });
}

void require_positive(double v, const std::string& key) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigurationError(key + ": must be positive");
}

} // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog{
      {ExperimentKind::amplitudes, "amplitudes", "transmission and reflection amplitudes on a uniform momentum grid"},
      {ExperimentKind::times, "times", "phase, amplitude and Buttiker-Landauer times at reference momenta"},
      {ExperimentKind::propagator, "propagator", "transmission propagator rows T(r, p)"},
      {ExperimentKind::distribution, "distribution",
       "exact, first-order and scaled free transmitted distributions at given times"},
      {ExperimentKind::oracle_compare, "oracle-compare",
       "split-operator wave-packet evolution against the asymptotic predictions"},
      {ExperimentKind::shift_sweep, "shift-sweep", "peak and half-height shift observables over a time sweep"},
  };
  return catalog;
}

const char* to_string(ExperimentKind kind) {
  for (const auto& info : experiment_catalog()) {
    if (info.kind == kind) return info.name;
  }
  return "unknown";
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.16e", value);
  return buf;
}

ExperimentConfig load_experiment(const Config& c) {
  ExperimentConfig cfg;
  cfg.kind = parse_kind(c.string("experiment.kind"));
  cfg.barrier = load_barrier(c);

  PacketSpec& p = cfg.packet;
  p.kind = c.string("packet.kind", "gaussian");
  if (p.kind != "gaussian" && p.kind != "step") {
    throw ConfigurationError("packet.kind: expected gaussian or step, got '" + p.kind + "'");
  }
  p.mass = c.number("packet.mass", 1.0);
  require_positive(p.mass, "packet.mass");
  p.p0 = c.number("packet.p0", 1.0);
  p.q0 = c.number("packet.q0", 0.0);
  p.dq0 = c.number("packet.dq0", 0.0);
  p.dp0 = c.number("packet.dp0", p.dq0 > 0.0 ? 0.5 / p.dq0 : 0.0);
  p.smoothing = c.number("packet.smoothing", 0.0);

  cfg.reference_momenta = c.has("reference.kappa0") ? c.numbers("reference.kappa0") : std::vector<double>{p.p0};
  if (c.has("run.times")) cfg.times = c.numbers("run.times");
  if (c.has("sweep.start") || c.has("sweep.stop") || c.has("sweep.count")) {
    if (!cfg.times.empty()) throw ConfigurationError("sweep.*: give either run.times or a sweep, not both");
    const double lo = c.number("sweep.start");
    const double hi = c.number("sweep.stop");
    const std::size_t n = c.count("sweep.count", 0);
    if (n < 2 || !(hi > lo)) throw ConfigurationError("sweep: need sweep.stop > sweep.start and sweep.count >= 2");
    cfg.times = linspace(lo, hi, n);
  }

  cfg.kappa_points = c.count("grid.kappa_points", cfg.kappa_points);
  cfg.kappa_max = c.number("grid.kappa_max", cfg.kappa_max);
  cfg.derivative_step = c.number("grid.derivative_step", cfg.derivative_step);
  cfg.q_points = c.count("grid.q_points", cfg.q_points);
  cfg.q_extent = c.number("grid.q_extent", cfg.q_extent);
  if (c.has("propagator.p")) cfg.propagator_momenta = c.numbers("propagator.p");
  cfg.propagator_dr = c.number("propagator.dr", cfg.propagator_dr);
  cfg.propagator_spacing = c.number("propagator.spacing", cfg.propagator_spacing);
  cfg.tdse_dx = c.number("tdse.dx", cfg.tdse_dx);
  cfg.tdse_dt_factor = c.number("tdse.dt_factor", cfg.tdse_dt_factor);
  cfg.tdse_snapshot = c.flag("tdse.snapshot", cfg.tdse_snapshot);
  cfg.peak_tolerance = c.number("tolerance.peak_advance", cfg.peak_tolerance);

  const auto unused = c.unused();
  if (!unused.empty()) {
    std::string list;
    for (const auto& k : unused) list += (list.empty() ? "" : ", ") + k;
    throw ConfigurationError("unknown key(s): " + list);
  }

  if (cfg.kappa_points < 2) throw ConfigurationError("grid.kappa_points: need at least 2");
  if (cfg.kappa_max < 0.0) throw ConfigurationError("grid.kappa_max: must be non-negative");
  require_positive(cfg.derivative_step, "grid.derivative_step");
  if (cfg.q_points < 5) throw ConfigurationError("grid.q_points: need at least 5");
  require_positive(cfg.q_extent, "grid.q_extent");
  require_positive(cfg.propagator_dr, "propagator.dr");
  require_positive(cfg.propagator_spacing, "propagator.spacing");
  require_positive(cfg.tdse_dx, "tdse.dx");
  if (!(cfg.tdse_dt_factor > 0.0 && cfg.tdse_dt_factor < 0.5)) {
    throw ConfigurationError("tdse.dt_factor: must lie in (0, 0.5) so that dt * E_max < 0.5");
  }
  require_positive(cfg.peak_tolerance, "tolerance.peak_advance");
  for (std::size_t i = 0; i < cfg.times.size(); ++i) {
    if (!(cfg.times[i] >= 0.0)) throw ConfigurationError("run.times[" + std::to_string(i) + "]: must be >= 0");
  }
  for (std::size_t i = 0; i < cfg.reference_momenta.size(); ++i) {
    const double k = cfg.reference_momenta[i];
    if (!(k > 4.0 * cfg.derivative_step)) {
      throw ConfigurationError("reference.kappa0[" + std::to_string(i) + "]: must exceed 4 grid.derivative_step");
    }
  }

  const bool needs_packet = cfg.kind == ExperimentKind::distribution || cfg.kind == ExperimentKind::oracle_compare ||
                            cfg.kind == ExperimentKind::shift_sweep;
  const bool needs_times = needs_packet;
  if (needs_times && cfg.times.empty()) throw ConfigurationError("run.times: required for " + std::string(to_string(cfg.kind)));
  if (cfg.kind == ExperimentKind::shift_sweep) {
    for (std::size_t i = 1; i < cfg.times.size(); ++i) {
      if (!(cfg.times[i] > cfg.times[i - 1])) throw ConfigurationError("run.times: sweep times must increase");
    }
  }
  if (cfg.kind == ExperimentKind::propagator && cfg.propagator_momenta.empty()) {
    throw ConfigurationError("propagator.p: required for propagator");
  }
  for (std::size_t i = 0; i < cfg.propagator_momenta.size(); ++i) {
    if (!(cfg.propagator_momenta[i] > 0.0)) {
      throw ConfigurationError("propagator.p[" + std::to_string(i) + "]: must be positive");
    }
  }

  if (needs_packet) {
    if (p.kind == "step") {
      if (cfg.kind != ExperimentKind::shift_sweep) {
        throw ConfigurationError("packet.kind: the step distribution is only supported by shift-sweep");
      }
      with_context("packet", [&] { return StepTestDistribution::make(p.p0, p.q0, p.dp0, p.mass, p.smoothing); });
    } else {
      const GaussianWignerState s = with_context("packet", [&] { return gaussian_state(p); });
      if (cfg.kind != ExperimentKind::shift_sweep) with_context("packet", [&] {
          check_free_space(s, cfg.barrier);
          return 0;
        });
      if (cfg.kind == ExperimentKind::oracle_compare && std::abs(p.dp0 * p.dq0 - 0.5) > 1e-12) {
        throw ConfigurationError("packet.dp0: the wave-function oracle needs a pure state, dp0 = 1/(2 dq0)");
      }
    }
  }
  if (cfg.kind == ExperimentKind::oracle_compare) {
    for (double t : cfg.times) {
      with_context("tdse", [&] {
        return make_setup(cfg.barrier, p.p0, p.q0, p.dq0, p.mass, t, cfg.tdse_dx, cfg.tdse_dt_factor);
      });
    }
  }
  return cfg;
}

std::vector<fs::path> run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  Output out(out_dir);
  Summary summary(cfg);
  switch (cfg.kind) {
    case ExperimentKind::amplitudes: run_amplitudes(cfg, out, summary); break;
    case ExperimentKind::times: run_times(cfg, out, summary); break;
    case ExperimentKind::propagator: run_propagator(cfg, out, summary); break;
    case ExperimentKind::distribution: run_distribution(cfg, out, summary); break;
    case ExperimentKind::oracle_compare: run_oracle(cfg, out, summary); break;
    case ExperimentKind::shift_sweep: run_shift_sweep(cfg, out, summary); break;
  }
  out.write("summary.txt", summary.str());
  return out.written();
}

} // namespace tunnel
