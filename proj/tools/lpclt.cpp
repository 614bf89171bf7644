#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lpclt/cli/config.hpp"
#include "lpclt/cli/experiment.hpp"

int main(int argc, char** argv) {
  using namespace lpclt::cli;
  CLI::App app{"Weighted-sum CLT experiments for stationary sequences"};
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--workers", options.workers, "Worker threads for replicates")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", options.out_dir, "Output directory");
  run->add_option("--seed", seed, "Override the config seed");

  app.add_subcommand("list-models", "Print the model and map catalogs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (app.got_subcommand("list-models")) {
    std::cout << model_catalog();
    return 0;
  }

  ExperimentConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfigError;
  }
  options.seed = seed;
  const RunResult r = run_experiment(config, options);
  for (const auto& c : r.checks) std::cout << format_check(c) << '\n';
  if (!r.error.empty()) std::cerr << r.error << '\n';
  return r.exit_code;
}
