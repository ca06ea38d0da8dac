#include <CLI11.hpp>
#include <iostream>

#include "fwgames/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Frank-Wolfe learning in potential, Markov potential and congestion games"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one learner on one game");
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> run_out;
  run->add_option("--config", config, "Run config (JSON)")->required();
  run->add_option("--seed", seed, "Override the seed");
  run->add_option("--out", run_out, "Output directory");

  auto* repro = app.add_subcommand("reproduce-experiment", "Reproduce the 8-player facility experiment");
  fwg::ExperimentOptions opts;
  std::string repro_out = "experiment";
  repro->add_option("--seeds", opts.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  repro->add_option("--first-seed", opts.first_seed, "First seed");
  repro->add_option("--out", repro_out, "Output directory");
  repro->add_option("--T", opts.T, "Iterations");
  repro->add_flag("--literal-stopping", opts.literal_stopping,
                  "Read 0.99 as the per-step stopping probability");

  auto* sweep = app.add_subcommand("sweep", "Run a grid of configurations");
  std::string grid, sweep_out;
  std::size_t jobs = 1;
  sweep->add_option("--grid", grid, "Grid file (JSON)")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Evaluate a strategy profile exactly");
  std::string game, strategy;
  eval->add_option("--game", game, "Game file (JSON)")->required();
  eval->add_option("--strategy", strategy, "Strategy file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fwg::kExitConfig;
  }

  if (run->parsed()) {
    std::optional<std::filesystem::path> out;
    if (run_out) out = *run_out;
    return fwg::cli_run(config, seed, out, std::cerr);
  }
  if (repro->parsed()) {
    opts.out = repro_out;
    return fwg::cli_reproduce_experiment(opts, std::cerr);
  }
  if (sweep->parsed()) return fwg::cli_sweep(grid, sweep_out, jobs, std::cerr);
  return fwg::cli_eval(game, strategy, std::cout, std::cerr);
}
