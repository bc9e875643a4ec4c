#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "tunnel/config.hpp"
#include "tunnel/potential.hpp"

namespace tunnel {

enum class ExperimentKind { amplitudes, times, propagator, distribution, oracle_compare, shift_sweep };

struct ExperimentInfo {
  ExperimentKind kind;
  const char* name;
  const char* description;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const char* to_string(ExperimentKind kind);

struct PacketSpec {
  std::string kind = "gaussian"; ///< gaussian or step
  double p0 = 1.0;
  double q0 = 0.0;
  double dp0 = 0.0;
  double dq0 = 0.0;
  double mass = 1.0;
  double smoothing = 0.0;
};

/// Validated experiment description. Defaults apply to absent keys.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::amplitudes;
  Barrier barrier = Barrier::rectangular(0.0, 1.0);
  PacketSpec packet;
  std::vector<double> reference_momenta; ///< times
  std::vector<double> times;             ///< distribution, oracle-compare, shift-sweep

  std::size_t kappa_points = 2048; ///< amplitudes
  double kappa_max = 0.0;          ///< amplitudes; 0 selects 5 sqrt(2 m V_max) (or 5 for a free barrier)
  double derivative_step = 1e-3;   ///< times: kappa step of the local derivative grid

  std::vector<double> propagator_momenta;
  double propagator_dr = 0.25;
  double propagator_spacing = 0.01; ///< upper bound; wide barriers need finer spacing

  std::size_t q_points = 201;
  double q_extent = 8.0; ///< distribution q grid: Q(t) +- q_extent dq(t)

  double tdse_dx = 0.2;
  double tdse_dt_factor = 0.45;
  bool tdse_snapshot = false;

  double peak_tolerance = 0.1; ///< oracle-compare relative tolerance on the peak advance
};

/// Reads and validates every key; throws ConfigurationError naming the key
/// path on any violation, including unknown keys.
ExperimentConfig load_experiment(const Config& config);

/// Runs the experiment and writes its CSV files plus `summary.txt` into
/// out_dir (created if needed). Each file is written to a temporary name and
/// renamed into place. Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// 17 significant digits in scientific notation.
std::string format_number(double value);

} // namespace tunnel
