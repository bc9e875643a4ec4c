// Experiment runner.
//
//   tunnel run <config> -o <dir>
//   tunnel validate <config>
//   tunnel list-experiments
//
// Exit status: 0 success, 2 config parse error, 3 validation error,
// 4 numerical error, 1 anything else. TUNNEL_THREADS overrides the worker
// count.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "tunnel/config.hpp"
#include "tunnel/errors.hpp"
#include "tunnel/experiment.hpp"

namespace {

enum ExitCode { ok = 0, failure = 1, parse_error = 2, validation_error = 3, numerical_error = 4 };

template <class F>
int guarded(F&& f) {
  try {
    f();
    return ok;
  } catch (const tunnel::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return parse_error;
  } catch (const tunnel::InvalidParameter& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return validation_error;
  } catch (const tunnel::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return numerical_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tunneling-time observables for wave packets on 1D barriers"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("-o,--output", out_dir, "Output directory")->required();

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a config file without running it");
  validate->add_option("config", validate_path, "Config file")->required();

  auto* list = app.add_subcommand("list-experiments", "List experiment kinds");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    return guarded([&] {
      const auto cfg = tunnel::load_experiment(tunnel::Config::load(config_path));
      for (const auto& path : tunnel::run_experiment(cfg, out_dir)) std::cout << path.string() << '\n';
    });
  }
  if (*validate) {
    return guarded([&] {
      const auto cfg = tunnel::load_experiment(tunnel::Config::load(validate_path));
      std::cout << validate_path << ": ok (" << tunnel::to_string(cfg.kind) << ")\n";
    });
  }
  if (*list) {
    for (const auto& info : tunnel::experiment_catalog()) std::cout << info.name << "  " << info.description << '\n';
  }
  return ok;
}
