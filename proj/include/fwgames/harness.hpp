#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwgames/game_io.hpp"
#include "fwgames/learners.hpp"

namespace fwg {

inline constexpr const char* kVersion = "0.1.0";

// Exit statuses of the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitPartial = 4;

struct RunConfig {
  nlohmann::json game;  // inline definition, {"builtin": ...}, or a string path
  std::filesystem::path base_dir;
  LearnerConfig learner;
  std::optional<std::optional<std::size_t>> horizon_cap;  // set: override the Markov cap
  std::filesystem::path output = "out";
  nlohmann::json echo;  // the config as read, echoed into log headers
};

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
Game resolve_game(const RunConfig& config);

ScheduleConfig schedule_from_json(const nlohmann::json& j, ScheduleFamily fallback);
nlohmann::json schedule_to_json(const ScheduleConfig& s);

/// Shortest round-trip decimal; NaN becomes the empty string.
std::string format_double(double v);

std::vector<std::string> csv_columns(std::size_t num_players);
/// '#' header lines with the config echo, then the column row and data rows.
void write_csv(std::ostream& out, const RunLog& log, const nlohmann::json& header);
std::string csv_string(const RunLog& log, const nlohmann::json& header);

struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

/// {"strategy": [player][state][action]}; congestion iterates are written as
/// {"marginals": [player][0][resource]}.
nlohmann::json strategy_json(const Game& game, const StrategySnapshot& s);

/// OLS slope of log r on log t over points with t0 ≤ t ≤ t1. All values are
/// shifted by +1 when any r in the window is zero.
double fit_regret_slope(std::span<const double> t, std::span<const double> r, double t0, double t1);
/// Dense series with r[k] the value at t = k + 1.
double fit_regret_slope(std::span<const double> series, std::size_t t0, std::size_t t1);

/// (number of completed iterations, cumulative Nash regret) from the log rows.
void nash_regret_points(const RunLog& log, std::vector<double>& t, std::vector<double>& r);
/// Same for the largest individual regret across players.
void individual_regret_points(const RunLog& log, std::vector<double>& t, std::vector<double>& r);

/// Runs a config and writes run.csv, final_strategy.json and run_meta.json.
RunLog execute_run(const RunConfig& config, const Game& game);

/// Maps a library error onto an exit status.
int exit_code_for(const std::exception& e);

int cli_run(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::filesystem::path> out, std::ostream& err);

struct ExperimentOptions {
  std::size_t seeds = 5;
  std::uint64_t first_seed = 0;
  std::filesystem::path out = "experiment";
  bool literal_stopping = false;
  std::size_t T = 150;
  std::size_t trajectories = 10;
  std::size_t horizon = 20;
  double fw_eta = 0.1;
  PowerLaw fw_rho{0.9, 0.6, 1.0};
  double mu = 0.001;
  double sgd_eta = 1e-4;
  /// The SGD rate is stated for unnormalized costs, so it is multiplied by the
  /// game's cost scale when true.
  bool sgd_raw_units = true;
  std::size_t compare_from = 75;
  ExperimentConfig game{};
};

/// Writes fw_seed<k>.csv, sgd_seed<k>.csv and summary.json; returns the summary.
nlohmann::json reproduce_experiment(const ExperimentOptions& options);
int cli_reproduce_experiment(const ExperimentOptions& options, std::ostream& err);

int cli_sweep(const std::filesystem::path& grid_path, const std::filesystem::path& out,
              std::size_t jobs, std::ostream& err);

int cli_eval(const std::filesystem::path& game_path, const std::filesystem::path& strategy_path,
             std::ostream& out, std::ostream& err);

}  // namespace fwg
