#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <cmath>
#include <limits>

#include "support.hpp"
#include "tunnel/asymptotics.hpp"
#include "tunnel/errors.hpp"
#include "tunnel/profile.hpp"
#include "tunnel/tdse_oracle.hpp"

using namespace tunnel;

namespace {

const Barrier kStandard = make_rectangular(1.0, 2.0, 0.0);

ScatteringAmplitudes lattice_amplitudes(const Barrier& b, double h, std::size_t n) {
  return transmission_amplitudes(b, 1.0, lattice_kappa_grid(h, n));
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Exact distribution for a packet starting 8 widths left of the barrier,
// observed at the clearing time on Q +- extent dq.
struct ExactRun {
  GaussianWignerState s;
  double t;
  std::vector<double> q;
  TransmittedDistribution exact;
};

ExactRun run_exact(const Barrier& b, double dq0, double extent = 8.0, std::size_t nq = 161) {
  const double q0 = -(8.0 * dq0 + b.support_radius());
  ExactRun run{GaussianWignerState::pure(1.0, q0, dq0, 1.0), 0.0, {}, {}};
  run.t = run.s.clearing_time();
  const double c = run.s.center_at(run.t);
  const double dq = run.s.width_at(run.t);
  run.q = test::linspace(c - extent * dq, c + extent * dq, nq);
  const double w = 2.0 * b.support_radius();
  const auto grid = exact_kappa_grid(run.s, w, run.t, run.q.front(), run.q.back());
  const auto amps = transmission_amplitudes(b, 1.0, grid);
  run.exact = transmitted_exact(amps, run.s, run.t, run.q);
  return run;
}

} // namespace

TEST_CASE("free propagator is a discrete delta") {
  const auto amps = lattice_amplitudes(make_rectangular(0.0, 1.0, 0.0), 0.01, 60000);
  const PropagatorRow row = transmission_propagator(amps, amps.kappa[100], 0.1);
  REQUIRE(row.dr >= 0.1);
  for (std::size_t j = 0; j < row.r.size(); ++j) {
    if (row.r[j] == 0.0) {
      CHECK(std::abs(row.values[j] - 1.0 / row.dr) < 1e-10);
    } else {
      CHECK(std::abs(row.values[j]) < 1e-10);
    }
  }
}

TEST_CASE("propagator is causal and carries |A(p)|^2") {
  const auto amps = lattice_amplitudes(kStandard, 0.01, 30000);
  for (double p : {0.5, 0.8, 1.0, 1.3, 2.0}) {
    const std::size_t i = amps.index_of(p + 0.005);
    REQUIRE(i < amps.size());
    const PropagatorRow row = transmission_propagator(amps, amps.kappa[i], 0.2);
    double peak = 0.0, acausal = 0.0;
    for (std::size_t j = 0; j < row.r.size(); ++j) {
      peak = std::max(peak, std::abs(row.values[j]));
      if (row.r[j] < -row.dr) acausal = std::max(acausal, std::abs(row.values[j]));
    }
    CAPTURE(p);
    CHECK(acausal < 1e-6 * peak);
    const double a2 = std::exp(2.0 * transfer_matrix_amplitude(kStandard, 1.0, amps.kappa[i]).log_abs_transmission);
    CHECK(std::abs(row.integral() - a2) < 1e-8);
    CHECK(row.max_imag < 1e-10 * peak);
  }
}

TEST_CASE("propagator resolution and grid checks") {
  const auto amps = lattice_amplitudes(kStandard, 0.01, 2000);
  // 112/dr beyond the top of the grid.
  CHECK_THROWS_AS(transmission_propagator(amps, amps.kappa[100], 0.01), ResolutionError);
  CHECK_THROWS_AS(transmission_propagator(amps, 1.0, 0.5), OutOfRange);
  CHECK(required_sigma_max(0.5) == doctest::Approx(224.0));

  const auto uniform = transmission_amplitudes(kStandard, 1.0, uniform_kappa_grid(5.0, 500));
  CHECK_THROWS_AS(transmission_propagator(uniform, uniform.kappa[100], 0.5), InvalidParameter);
}

TEST_CASE("exact distribution of a free packet is the free marginal") {
  const ExactRun run = run_exact(make_rectangular(0.0, 2.0, 0.0), 10.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < run.q.size(); ++i) {
    worst = std::max(worst, std::abs(run.exact.values[i] - free_marginal(run.s, run.t, run.q[i])));
  }
  CHECK(worst < 1e-9);
  CHECK(run.exact.transmission_probability == 1.0);
}

TEST_CASE("exact distribution matches the transmitted wave function of a pure state") {
  const ExactRun run = run_exact(kStandard, 10.0, 6.0, 97);
  const auto oracle = test::wave_function_density(kStandard, 1.0, run.s.p0, run.s.q0, run.s.dq0, run.t, run.q);
  const double scale = max_abs(oracle);
  double worst = 0.0;
  for (std::size_t i = 0; i < run.q.size(); ++i) worst = std::max(worst, std::abs(run.exact.values[i] - oracle[i]));
  CHECK(worst < 1e-7 * scale);
  CHECK(*std::min_element(run.exact.values.begin(), run.exact.values.end()) >= -1e-8 * scale);
}

TEST_CASE("total transmitted probability approaches |A(P0)|^2") {
  const ExactRun run = run_exact(kStandard, 25.0);
  const ProfileMoments m = profile_moments(run.q, run.exact.values);
  std::vector<double> free;
  for (double q : run.q) free.push_back(free_marginal(run.s, run.t, q));
  const double ratio = m.norm / profile_moments(run.q, free).norm;
  const double a2 = run.exact.transmission_probability;
  const double order = std::pow(run.s.dp0 / run.s.p0, 2);
  CHECK(std::abs(ratio - a2) < order);
  // The exact total is the momentum average of |A|^2.
  CHECK(std::abs(ratio - momentum_resolved_transmission(kStandard, 1.0, 1.0, run.s.dp0)) < 1e-8);
}

TEST_CASE("first-order form") {
  const auto s = GaussianWignerState::make(1.0, -100.0, 0.02, 25.0, 1.0);
  const TunnelingTimes free_times = make_times(1.0, 1.0, 0.0, 0.0);
  for (double q : {-20.0, 80.0, 100.0, 130.0}) {
    CHECK(transmitted_first_order(free_times, 1.0, s, 200.0, q) == free_marginal(s, 200.0, q));
  }

  const TunnelingTimes times = make_times(1.0, 1.0, -0.07194, 1.92806);
  const double a2 = 0.070651;
  for (double t : {0.0, 200.0, 1000.0}) {
    const double c = s.center_at(t);
    const double dq = s.width_at(t);
    const auto q = test::linspace(c - 12.0 * dq, c + 12.0 * dq, 4001);
    std::vector<double> y;
    for (double x : q) {
      const double fo = transmitted_first_order(times, a2, s, t, x);
      const double g = gaussian_first_order(s, times, a2, t, x);
      CHECK(std::abs(fo - g) <= 1e-12 * a2 * free_marginal(s, t, c));
      y.push_back(fo);
    }
    CHECK(profile_moments(q, y).norm == doctest::Approx(a2).epsilon(1e-12));
    CHECK(gaussian_first_order(s, times, a2, t, c) == doctest::Approx(a2 * free_marginal(s, t, c)).epsilon(1e-15));
  }

  // tau0 = 0 at t = m tau_w / (2 tau_a dp0^2) leaves the scaled marginal.
  const TunnelingTimes delayed = make_times(1.0, 1.0, 0.5, 1.0);
  const double t_zero = tau0_sign_change_time(delayed, s);
  CHECK(t_zero == doctest::Approx(625.0));
  for (double q : {-40.0, 500.0, 600.0}) {
    CHECK(gaussian_first_order(s, delayed, 0.3, t_zero, q) ==
          doctest::Approx(0.3 * free_marginal(s, t_zero, q)).epsilon(1e-12));
  }

  const auto tab = tabulate_first_order(times, a2, s, 200.0, std::vector<double>{90.0, 100.0},
                                        DistributionMethod::gaussian_closed_form);
  CHECK(tab.values.size() == 2);
  CHECK(tab.method == DistributionMethod::gaussian_closed_form);
  CHECK_THROWS_AS(tabulate_first_order(times, a2, s, 200.0, std::vector<double>{1.0}, DistributionMethod::exact),
                  InvalidParameter);
}

TEST_CASE("peak of the Gaussian form sits at the closed-form advance") {
  test::Gen gen(17);
  for (int trial = 0; trial < 30; ++trial) {
    const double dq0 = gen.uniform(12.0, 50.0);
    const auto s = GaussianWignerState::make(1.0, -10.0 * dq0, gen.uniform(0.6, 2.0) / (2.0 * dq0) + 0.01, dq0, 1.0);
    const auto times = make_times(1.0, 1.0, gen.uniform(-10.0, 10.0), gen.uniform(0.0, 50.0));
    const double t = gen.uniform(0.0, 3000.0);
    const ShiftObservables o = shift_observables(times, s, t);
    const double c = s.center_at(t);
    const double dq = s.width_at(t);
    const double found = golden_section_maximize([&](double q) { return gaussian_first_order(s, times, 1.0, t, q); },
                                                 c - 2.0 * dq, c + 2.0 * dq, 1e-10 * dq);
    CHECK(std::abs(found - c - o.delta_q_peak) < 1e-6 * dq);
  }
}

TEST_CASE("shift observables") {
  const auto s = GaussianWignerState::make(1.0, -100.0, 0.02, 25.0, 1.0);

  // Small dp0 and t = 0: the Wigner limit.
  const auto wig = make_times(1.0, 1.0, 1.3, 0.01);
  const ShiftObservables o0 = shift_observables(wig, s, 0.0);
  CHECK(o0.tau0 == -1.3);
  CHECK(std::abs(o0.zeta) < 0.11);
  CHECK(o0.delta_q_peak == doctest::Approx(-1.3).epsilon(0.01));

  const ShiftObservables none = shift_observables(make_times(1.0, 1.0, 0.0, 0.0), s, 50.0);
  CHECK(none.tau0 == 0.0);
  CHECK(none.delta_q_peak == 0.0);

  // Large tau0: the advance saturates at the final width.
  const auto fast = make_times(1.0, 1.0, 0.0, 1e9);
  const ShiftObservables big = shift_observables(fast, s, 1000.0);
  CHECK(big.zeta > 1e6);
  CHECK(big.delta_q_peak == doctest::Approx(s.width_at(1000.0)).epsilon(1e-6));
  CHECK(big.delta_q_peak < s.width_at(1000.0));

  CHECK_THROWS_AS(shift_observables(wig, s, -1.0), InvalidParameter);
}

TEST_CASE("property: half-height speed-up is half of the peak speed-up") {
  test::Gen gen(23);
  for (int trial = 0; trial < 500; ++trial) {
    const double dq0 = gen.uniform(5.0, 50.0);
    const auto s = GaussianWignerState::make(gen.uniform(0.5, 3.0), -10.0 * dq0, 0.6 / dq0, dq0, gen.uniform(0.5, 2.0));
    const auto times = make_times(s.p0, s.mass, gen.uniform(-10.0, 10.0), gen.uniform(0.0, 20.0));
    const double t = gen.uniform(0.0, 5000.0);
    const ShiftObservables o = shift_observables(times, s, t);
    const double lhs = o.tau_h + times.tau_w;
    const double rhs = 0.5 * (o.tau0 + times.tau_w);
    const double ulp = std::numeric_limits<double>::epsilon() * std::max({std::abs(o.tau0), std::abs(times.tau_w), 1e-300});
    CHECK(std::abs(lhs - rhs) <= 4.0 * ulp);
    CHECK(o.half_height_shift == doctest::Approx(s.v0() * o.tau_h).epsilon(1e-15));
    CHECK(o.delta_q_peak == doctest::Approx(2.0 * s.v0() * o.tau0 / (std::sqrt(1.0 + o.zeta * o.zeta) + 1.0)));
  }
}

TEST_CASE("step distribution half-height shift") {
  const auto step = StepTestDistribution::make(1.0, -50.0, 0.05, 1.0);
  const auto pure_phase = make_times(1.0, 1.0, 0.8, 0.0);
  CHECK(half_height_shift(step, pure_phase, 300.0) == doctest::Approx(-0.8));
  const auto times = make_times(1.0, 1.0, 0.8, 2.0);
  CHECK(half_height_shift(step, times, 0.0) == doctest::Approx(-0.8));
  CHECK(half_height_shift(step, times, 100.0) == doctest::Approx(100.0 * 2.0 * 0.0025 - 0.8));
}

TEST_CASE("sign change time of tau0") {
  const auto s = GaussianWignerState::make(1.0, -100.0, 0.02, 25.0, 1.0);
  const auto delayed = make_times(1.0, 1.0, 0.523, 0.762);
  const double t_star = tau0_sign_change_time(delayed, s);
  CHECK(t_star > 0.0);
  CHECK(shift_observables(delayed, s, 0.99 * t_star).delta_q_peak < 0.0);
  CHECK(shift_observables(delayed, s, 1.01 * t_star).delta_q_peak > 0.0);

  // Advance from the phase time and a positive speed-up never cancel.
  const auto advanced = make_times(1.0, 1.0, -0.07194, 1.92806);
  CHECK(tau0_sign_change_time(advanced, s) < 0.0);
  for (double t : {0.0, 10.0, 1e3, 1e5}) CHECK(shift_observables(advanced, s, t).tau0 > 0.0);

  // Speed-up eventually dominates the phase time.
  CHECK(shift_observables(delayed, s, 100.0 * t_star).tau0 > 50.0 * delayed.tau_w);
}

TEST_CASE("exact quadrature rejects coarse or narrow momentum grids") {
  const auto s = GaussianWignerState::pure(1.0, -81.0, 10.0, 1.0);
  const double t = s.clearing_time();
  const auto q = test::linspace(s.center_at(t) - 50.0, s.center_at(t) + 50.0, 11);
  // P0 = 1 is the 26th point of this lattice.
  const auto coarse = lattice_amplitudes(kStandard, 2.0 / 51.0, 400);
  CHECK_THROWS_AS(transmitted_exact(coarse, s, t, q), GridTooCoarse);

  const auto grid = exact_kappa_grid(s, 2.0, t, q.front(), q.back());
  std::vector<double> short_grid(grid.begin(), grid.begin() + static_cast<long>(grid.size() / 2));
  const auto narrow = transmission_amplitudes(kStandard, 1.0, short_grid);
  CHECK_THROWS_AS(transmitted_exact(narrow, s, t, q), OutOfRange);
}

TEST_CASE("negative dispersion behind a wide barrier") {
  // Regression pinned from a width scan: at w = 8 the transmitted packet is
  // narrower than the scaled free packet by 0.9% in variance.
  const Barrier wide = make_rectangular(1.0, 8.0, 0.0);
  const ExactRun run = run_exact(wide, 25.0, 8.0, 321);
  const ProfileMoments m = profile_moments(run.q, run.exact.values);
  const double dq = run.s.width_at(run.t);
  const double contraction = m.variance / (dq * dq) - 1.0;
  CHECK(contraction < 0.0);
  CHECK(contraction == doctest::Approx(-0.0089).epsilon(0.05));
}

TEST_CASE("results do not depend on the worker count") {
  const auto s = GaussianWignerState::pure(1.0, -81.0, 10.0, 1.0);
  const double t = s.clearing_time();
  const auto q = test::linspace(s.center_at(t) - 40.0, s.center_at(t) + 40.0, 33);
  const auto amps = transmission_amplitudes(kStandard, 1.0, exact_kappa_grid(s, 2.0, t, q.front(), q.back()));
  const char* saved = std::getenv("TUNNEL_THREADS");
  const std::string restore = saved ? saved : "";
  setenv("TUNNEL_THREADS", "1", 1);
  const auto one = transmitted_exact(amps, s, t, q);
  setenv("TUNNEL_THREADS", "5", 1);
  const auto five = transmitted_exact(amps, s, t, q);
  if (saved) {
    setenv("TUNNEL_THREADS", restore.c_str(), 1);
  } else {
    unsetenv("TUNNEL_THREADS");
  }
  CHECK(one.values == five.values);
}
