// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status if
// any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "tunnel/asymptotics.hpp"
#include "tunnel/diagnostics.hpp"
#include "tunnel/profile.hpp"
#include "tunnel/scattering.hpp"
#include "tunnel/tdse_oracle.hpp"
#include "tunnel/times.hpp"
#include "tunnel/wigner.hpp"

using namespace tunnel;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(int id, const std::string& detail) {
  std::printf("[INFO] %2d %s\n", id, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

const Barrier kStandard = Barrier::rectangular(1.0, 2.0);

// Packet 8 widths left of the barrier, observed at its clearing time.
GaussianWignerState incident(const Barrier& b, double dp0) {
  const double dq0 = 0.5 / dp0;
  return GaussianWignerState::pure(1.0, -(8.0 * dq0 + b.support_radius()), dq0, 1.0);
}

TransmittedDistribution exact_on(const Barrier& b, const GaussianWignerState& s, double t,
                                 const std::vector<double>& q) {
  const auto grid = exact_kappa_grid(s, 2.0 * b.support_radius(), t, q.front(), q.back());
  return transmitted_exact(transmission_amplitudes(b, s.mass, grid), s, t, q);
}

void unitarity() {
  const auto amps = transmission_amplitudes(kStandard, 1.0, uniform_kappa_grid(5.0, 2048));
  double worst = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    worst = std::max(worst, std::abs(std::norm(amps.transmission[i]) + std::norm(amps.reflection[i]) - 1.0));
  }
  report(1, "unitarity", worst < 1e-10, "max ||A|^2+|B|^2-1| = " + fmt(worst) + " (tol 1e-10, 2048 points on (0,5])");
}

void closed_form() {
  auto grid = uniform_kappa_grid(5.0, 2048);
  const double top = std::sqrt(2.0);
  grid.insert(std::upper_bound(grid.begin(), grid.end(), top), top);
  double worst = 0.0;
  int below = 0, near = 0, above = 0;
  for (double k : grid) {
    const Complex tm = transfer_matrix_amplitude(kStandard, 1.0, k).transmission;
    const Complex cf = rectangular_closed_form(1.0, 2.0, 1.0, k);
    worst = std::max(worst, std::abs(tm - cf) / std::abs(cf));
    const double eps = 0.5 * k * k;
    if (std::abs(eps - 1.0) < 0.05) {
      ++near;
    } else {
      (eps < 1.0 ? below : above)++;
    }
  }
  report(2, "transfer matrix vs closed form", worst < 1e-8,
         "max rel dev = " + fmt(worst) + " (tol 1e-8; " + std::to_string(below) + " below, " + std::to_string(near) +
             " near, " + std::to_string(above) + " above V0)");
}

void free_identity() {
  const Barrier free = Barrier::rectangular(0.0, 2.0);
  const GaussianWignerState s = incident(free, 0.05);
  const double t = s.clearing_time();
  const double c = s.center_at(t);
  const double dq = s.width_at(t);
  const double dq2 = dq * dq;
  const double peak = free_marginal(s, t, c);

  const auto q = linspace(c - 12.0 * dq, c + 12.0 * dq, 481); // includes q = Q
  const TransmittedDistribution exact = exact_on(free, s, t, q);
  const auto first = tabulate_first_order(make_times(s.p0, s.mass, 0.0, 0.0), 1.0, s, t, q,
                                          DistributionMethod::first_order);
  std::vector<double> marginal;
  for (double x : q) marginal.push_back(free_marginal(s, t, x));
  double dev_exact = 0.0, dev_first = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    dev_exact = std::max(dev_exact, std::abs(exact.values[i] - marginal[i]) / peak);
    dev_first = std::max(dev_first, std::abs(first.values[i] - marginal[i]) / peak);
  }

  const EvolutionSetup setup = make_setup(free, s.p0, s.q0, s.dq0, s.mass, t, 0.5);
  const EvolutionResult r = evolve(setup);
  std::vector<double> x, rho = r.final_state.density();
  double dev_tdse = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    x.push_back(r.final_state.x(j));
    dev_tdse = std::max(dev_tdse, std::abs(rho[j] - free_marginal(s, t, x.back())) / peak);
  }

  const double var_marginal = std::abs(profile_moments(q, marginal).variance / dq2 - 1.0);
  const double var_exact = std::abs(profile_moments(q, exact.values).variance / dq2 - 1.0);
  const double var_tdse = std::abs(profile_moments(x, rho).variance / dq2 - 1.0);

  const bool pass = dev_exact < 1e-8 && dev_first < 1e-8 && dev_tdse < 1e-8 && var_marginal < 1e-8 &&
                    var_exact < 1e-8 && var_tdse < 1e-8;
  report(3, "free-barrier identity", pass,
         "rel dev at peak scale: exact " + fmt(dev_exact) + ", first-order " + fmt(dev_first) + ", tdse " +
             fmt(dev_tdse) + "; variance law rel err: marginal " + fmt(var_marginal) + ", exact " + fmt(var_exact) +
             ", tdse " + fmt(var_tdse) + " (tol 1e-8)");
}

PropagatorRow row_at(const Barrier& b, double p, double dr) {
  const auto grid = propagator_kappa_grid(p, dr, 2.0 * b.support_radius());
  return transmission_propagator(transmission_amplitudes(b, 1.0, grid), p, dr);
}

void causality() {
  double worst = 0.0;
  for (double w : {0.5, 2.0, 8.0}) {
    for (double p : {0.5, 1.0, 1.5, 2.0}) {
      const PropagatorRow row = row_at(Barrier::rectangular(1.0, w), p, 0.25);
      double peak = 0.0, acausal = 0.0;
      for (std::size_t j = 0; j < row.r.size(); ++j) {
        peak = std::max(peak, std::abs(row.values[j]));
        if (row.r[j] < -row.dr) acausal = std::max(acausal, std::abs(row.values[j]));
      }
      worst = std::max(worst, acausal / peak);
    }
  }
  report(4, "causality", worst < 1e-6,
         "max_{r<-dr}|T| / max|T| = " + fmt(worst) + " (tol 1e-6; w in {0.5,2,8}, p in {0.5,1,1.5,2})");
}

void normalization() {
  double worst = 0.0;
  for (double p : {0.5, 0.8, 1.0, 1.3, 2.0}) {
    const PropagatorRow row = row_at(kStandard, p, 0.25);
    const double a2 = std::exp(2.0 * transfer_matrix_amplitude(kStandard, 1.0, p).log_abs_transmission);
    worst = std::max(worst, std::abs(row.integral() - a2));
  }
  report(5, "propagator normalization", worst < 1e-8,
         "max |int T dr - |A|^2| = " + fmt(worst) + " (tol 1e-8, p in {0.5,0.8,1,1.3,2})");
}

void peak_closed_form() {
  double worst = 0.0;
  for (double tau0 : {-20.0, -4.0, 0.0, 3.0, 15.0}) {
    for (double dq : {1.0, 4.0, 10.0, 25.0, 60.0}) {
      // At t = 0, tau0 = -tau_w and dq = dq0.
      // P0 = m = 10 keeps v0 = 1 and dp0/P0 small for the narrowest packet.
      const auto s = GaussianWignerState::make(10.0, -10.0 * dq, 0.5 / dq, dq, 10.0);
      const auto times = make_times(s.p0, s.mass, -tau0, 1.0);
      const ShiftObservables o = shift_observables(times, s, 0.0);
      const double found = golden_section_maximize(
          [&](double q) { return gaussian_first_order(s, times, 1.0, 0.0, q); }, s.q0 - 2.0 * dq, s.q0 + 2.0 * dq,
          1e-11 * dq);
      worst = std::max(worst, std::abs(found - s.q0 - o.delta_q_peak) / dq);
    }
  }
  report(6, "peak-shift closed form", worst < 1e-6,
         "max |argmax - Q - dQ| / dq = " + fmt(worst) + " (tol 1e-6, 5x5 sweep of tau0 x dq)");
}

double first_order_gap(double dp0) {
  const GaussianWignerState s = incident(kStandard, dp0);
  const double t = s.clearing_time();
  const double c = s.center_at(t);
  const double dq = s.width_at(t);
  const auto q = linspace(c - 8.0 * dq, c + 8.0 * dq, 321);
  const TransmittedDistribution exact = exact_on(kStandard, s, t, q);
  const auto first = tabulate_first_order(exact.times, exact.transmission_probability, s, t, q,
                                          DistributionMethod::first_order);
  double gap = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) gap = std::max(gap, std::abs(exact.values[i] - first.values[i]));
  return gap / max_of(exact.values);
}

void order_scaling() {
  const double coarse = first_order_gap(0.04);
  const double fine = first_order_gap(0.02);
  const double ratio = coarse / fine;
  report(7, "first-order scaling", ratio >= 3.0 && ratio <= 6.0,
         "gap(0.04) = " + fmt(coarse) + ", gap(0.02) = " + fmt(fine) + ", ratio = " + fmt(ratio) + " (want [3,6])");
}

void oracle_agreement() {
  const GaussianWignerState s = incident(kStandard, 0.02);
  const double t = s.clearing_time();
  const TunnelingTimes times = tunneling_times(transmission_amplitudes(kStandard, 1.0, local_kappa_grid(1.0, 1e-3)), 1.0);
  const double a2 = std::exp(2.0 * transfer_matrix_amplitude(kStandard, 1.0, 1.0).log_abs_transmission);
  const EvolutionSetup setup = make_setup(kStandard, s.p0, s.q0, s.dq0, s.mass, t, 0.2);
  const TransmittedObservables o = transmitted_observables(evolve(setup).final_state, kStandard);
  const double predicted = shift_observables(times, s, t).delta_q_peak;
  const double advance = o.peak_q - s.center_at(t);
  const double peak_dev = std::abs(advance - predicted) / std::abs(predicted);
  const double t_tol = 2.0 * std::pow(s.dp0 / s.p0, 2) + 1e-4;
  const double t_dev = std::abs(o.transmission - a2);
  report(8, "TDSE oracle agreement", peak_dev <= 0.1 && t_dev <= t_tol,
         "peak advance tdse " + fmt(advance) + " vs " + fmt(predicted) + " (rel " + fmt(peak_dev) +
             ", tol 0.1); transmission " + fmt(o.transmission) + " vs |A|^2 " + fmt(a2) + " (|diff| " + fmt(t_dev) +
             ", tol " + fmt(t_tol) + ")");
}

void wigner_limit() {
  const Barrier b = Barrier::rectangular(0.2, 4.0);
  const GaussianWignerState s = incident(b, 0.01);
  const double t = 1.01 * s.clearing_time();
  const double c = s.center_at(t);
  const double dq = s.width_at(t);
  const auto q = linspace(c - 4.0 * dq, c + 4.0 * dq, 2001);
  const TransmittedDistribution exact = exact_on(b, s, t, q);
  const double measured = parabolic_peak(q, exact.values) - c;
  const double wigner = -s.v0() * exact.times.tau_w;
  const double dev = std::abs(measured - wigner) / std::abs(wigner);
  report(9, "Wigner limit", dev <= 0.05,
         "dQ = " + fmt(measured) + " vs -v0 tau_w = " + fmt(wigner) + " (rel " + fmt(dev) +
             ", tol 0.05; V0 0.2, w 4, dp0/P0 0.01)");
}

void sign_dynamics_and_half_height() {
  // Delay at t = 0 (tau_w > 0) that the speed-up overtakes.
  const Barrier narrow = Barrier::rectangular(1.0, 1.0);
  const GaussianWignerState s = incident(narrow, 0.02);
  const TunnelingTimes times =
      tunneling_times(transmission_amplitudes(narrow, 1.0, local_kappa_grid(1.0, 1e-3)), 1.0);
  const double t_star = tau0_sign_change_time(times, s);
  const double step = 25.0;
  const auto sweep = linspace(0.0, 2000.0, 81);
  std::vector<ShiftObservables> rows;
  for (double t : sweep) rows.push_back(shift_observables(times, s, t));

  int changes = 0;
  bool located = false;
  double where = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if ((rows[i - 1].delta_q_peak < 0.0) != (rows[i].delta_q_peak < 0.0)) {
      ++changes;
      where = 0.5 * (sweep[i - 1] + sweep[i]);
      located = std::abs(where - t_star) <= step;
    }
  }
  report(10, "sign dynamics", changes == 1 && located,
         "tau_w " + fmt(times.tau_w) + ", tau_a " + fmt(times.tau_a) + "; dQ changes sign near t = " + fmt(where) +
             ", t* = " + fmt(t_star) + " (within one step " + fmt(step) + ")");

  const TunnelingTimes wide =
      tunneling_times(transmission_amplitudes(kStandard, 1.0, local_kappa_grid(1.0, 1e-3)), 1.0);
  const GaussianWignerState sw = incident(kStandard, 0.02);
  int wide_changes = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    const double a = shift_observables(wide, sw, sweep[i - 1]).delta_q_peak;
    const double b = shift_observables(wide, sw, sweep[i]).delta_q_peak;
    if ((a < 0.0) != (b < 0.0)) ++wide_changes;
  }
  info(10, "with tau_w < 0 (V0 1, w 2: tau_w " + fmt(wide.tau_w) + ") t* = " + fmt(tau0_sign_change_time(wide, sw)) +
               " < 0 and dQ changes sign " + std::to_string(wide_changes) + " times over t in [0, 2000]");

  double worst = 0.0;
  for (const auto& o : rows) {
    const double residual = std::abs((o.tau_h + times.tau_w) - 0.5 * (o.tau0 + times.tau_w));
    const double scale = std::max(std::abs(o.tau0), std::abs(times.tau_w));
    worst = std::max(worst, residual / (std::numeric_limits<double>::epsilon() * scale));
  }
  report(11, "half-height relation", worst <= 4.0,
         "max |(tau_h + tau_w) - (tau0 + tau_w)/2| = " + fmt(worst) + " ulp of max(|tau0|,|tau_w|) (tol 4 ulp)");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void determinism() {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "tunnel_acceptance_determinism";
  fs::remove_all(base);
  const std::string config = std::string(TUNNEL_CONFIG_DIR) + "/distribution.cfg";
  bool ran = true;
  for (const char* run : {"a", "b"}) {
    const std::string cmd =
        std::string("\"") + TUNNEL_CLI + "\" run \"" + config + "\" -o \"" + (base / run).string() + "\" > /dev/null";
    ran = ran && std::system(cmd.c_str()) == 0;
  }
  std::size_t compared = 0;
  bool identical = ran;
  if (ran) {
    for (const auto& entry : fs::directory_iterator(base / "a")) {
      const fs::path other = base / "b" / entry.path().filename();
      identical = identical && fs::exists(other) && slurp(entry.path()) == slurp(other);
      ++compared;
    }
  }
  report(12, "determinism", identical && compared >= 3,
         std::to_string(compared) + " output files compared byte for byte across two CLI runs");
  fs::remove_all(base);
}

} // namespace

int main() {
  // Keep the report to one line per criterion.
  set_warning_handler([](const std::string&) {});
  const std::vector<std::function<void()>> criteria{unitarity,      closed_form,  free_identity, causality,
                                                    normalization,  peak_closed_form, order_scaling,
                                                    oracle_agreement, wigner_limit, sign_dynamics_and_half_height,
                                                    determinism};
  for (const auto& c : criteria) {
    try {
      c();
    } catch (const std::exception& e) {
      std::printf("[FAIL] exception: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
