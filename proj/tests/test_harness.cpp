#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fwgames/error.hpp"
#include "fwgames/experiment_game.hpp"
#include "fwgames/generators.hpp"
#include "fwgames/harness.hpp"

using namespace fwg;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh directory under the system temp dir, removed at scope exit.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("fwgames_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

fs::path tiny_config(const fs::path& dir, std::size_t T, std::size_t every) {
  Rng rng(71);
  save_game(random_potential_game({2, 3}, rng, {NoiseModel::Kind::bernoulli}), dir / "game.json");
  const json cfg = {{"game", "game.json"}, {"T", T}, {"eval_every", every}, {"seed", 5}, {"output", (dir / "out").string()}};
  spit(dir / "run.json", cfg.dump());
  return dir / "run.json";
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(FWGAMES_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// ---- CSV --------------------------------------------------------------------

TEST(FormatDouble, RoundTripsExactly) {
  Rng rng(72);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(rng.uniform(), static_cast<int>(rng.uniform() * 40) - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::nan("")), "");
}

TEST(Csv, RunLogRoundTrip) {
  Rng grng(73);
  const Game g = random_potential_game({2, 2}, grng, {NoiseModel::Kind::bernoulli});
  LearnerConfig cfg;
  cfg.T = 40;
  cfg.seed = 3;
  const auto log = run_learning(g, cfg);
  std::istringstream in(csv_string(log, {{"note", "x"}}));
  const auto table = read_csv(in);
  EXPECT_EQ(table.columns, csv_columns(2));
  ASSERT_EQ(table.rows.size(), log.rows.size());
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(table.columns.begin(), table.columns.end(), name) - table.columns.begin());
  };
  for (std::size_t r = 0; r < log.rows.size(); ++r) {
    EXPECT_EQ(std::stod(table.rows[r][col("nash_gap")]), log.rows[r].nash_gap);
    EXPECT_EQ(std::stod(table.rows[r][col("rho")]), log.rows[r].rho);
    EXPECT_EQ(std::stod(table.rows[r][col("regret_1")]), log.rows[r].regret[1]);
    EXPECT_EQ(std::stod(table.rows[r][col("l1_to_final")]), log.rows[r].l1_to_final);
  }
  ASSERT_FALSE(table.comments.empty());
}

// ---- slopes -----------------------------------------------------------------------

TEST(FitRegretSlope, ExactPowerLaws) {
  std::vector<double> lin(1000), p8(1000), flat(1000, 3.0);
  for (std::size_t k = 0; k < 1000; ++k) {
    lin[k] = static_cast<double>(k + 1);
    p8[k] = std::pow(static_cast<double>(k + 1), 0.8);
  }
  EXPECT_NEAR(fit_regret_slope(lin, 100, 1000), 1.0, 1e-9);
  EXPECT_NEAR(fit_regret_slope(p8, 100, 1000), 0.8, 1e-9);
  EXPECT_NEAR(fit_regret_slope(flat, 100, 1000), 0.0, 1e-9);
}

TEST(FitRegretSlope, ZerosShiftTheSeriesAndBadWindowsThrow) {
  std::vector<double> z(50, 0.0);
  EXPECT_NEAR(fit_regret_slope(z, 1, 50), 0.0, 1e-12);
  EXPECT_THROW(fit_regret_slope(z, 10, 60), Error);
  EXPECT_THROW(fit_regret_slope(z, 10, 10), Error);
}

// ---- game files --------------------------------------------------------------------

TEST(GameJson, RoundTripsEveryKind) {
  Rng rng(74);
  const std::vector<Game> games{random_potential_game({2, 3}, rng, {NoiseModel::Kind::bernoulli}),
                                random_congestion_game(3, 4, 2, 4, rng),
                                random_markov_game(2, {2, 2}, 0.3, rng),
                                build_experiment_game(ExperimentConfig{})};
  for (const auto& g : games) {
    const json j = game_to_json(g);
    EXPECT_EQ(game_to_json(game_from_json(j)), j);
  }
}

TEST(GameJson, MalformedInputIsAConfigError) {
  EXPECT_THROW(game_from_json(json{{"kind", "chess"}}), Error);
  EXPECT_THROW(game_from_json(json{{"kind", "normal_form"}, {"action_counts", {2, 2}}}), Error);
}

// ---- run ----------------------------------------------------------------------------

TEST(CliRun, MissingGameFileExitsTwoWithoutOutputs) {
  TempDir dir("missing");
  spit(dir.path / "run.json", json{{"game", "nope.json"}, {"T", 3}, {"output", (dir.path / "out").string()}}.dump());
  std::ostringstream err;
  EXPECT_EQ(cli_run(dir.path / "run.json", std::nullopt, std::nullopt, err), kExitConfig);
  EXPECT_FALSE(fs::exists(dir.path / "out"));
  EXPECT_NE(err.str().find("error"), std::string::npos);
}

TEST(CliRun, RowCountAndByteIdenticalReruns) {
  TempDir dir("rows");
  const auto cfg = tiny_config(dir.path, 10, 3);
  std::ostringstream err;
  ASSERT_EQ(cli_run(cfg, std::nullopt, std::nullopt, err), kExitOk) << err.str();
  std::istringstream first(slurp(dir.path / "out" / "run.csv"));
  EXPECT_EQ(read_csv(first).rows.size(), 4u + 1u);  // ⌈10/3⌉ + 1
  const std::string a = slurp(dir.path / "out" / "run.csv");
  ASSERT_EQ(cli_run(cfg, std::nullopt, dir.path / "again", err), kExitOk);
  EXPECT_EQ(slurp(dir.path / "again" / "run.csv"), a);
  ASSERT_EQ(cli_run(cfg, 6, dir.path / "other", err), kExitOk);
  EXPECT_NE(slurp(dir.path / "other" / "run.csv"), a);
  const json fin = json::parse(slurp(dir.path / "out" / "final_strategy.json"));
  EXPECT_EQ(fin.at("strategy").size(), 2u);
}

TEST(CliRun, IncompatibleFeedbackIsAConfigError) {
  TempDir dir("feedback");
  tiny_config(dir.path, 5, 1);
  spit(dir.path / "bad.json", json{{"game", "game.json"}, {"T", 5}, {"feedback", "semi_bandit"}}.dump());
  std::ostringstream err;
  EXPECT_EQ(cli_run(dir.path / "bad.json", std::nullopt, dir.path / "o", err), kExitConfig);
}

// ---- sweep -------------------------------------------------------------------------

TEST(CliSweep, SingleCellMatchesAPlainRun) {
  TempDir dir("sweep");
  spit(dir.path / "grid.json", json{{"T", 30}, {"n", 2}, {"m", 2}, {"seeds", {1}}}.dump());
  std::ostringstream err;
  ASSERT_EQ(cli_sweep(dir.path / "grid.json", dir.path / "out", 1, err), kExitOk) << err.str();
  std::istringstream in(slurp(dir.path / "out" / "summary.csv"));
  std::string header, line, extra;
  std::getline(in, header);
  std::getline(in, line);
  EXPECT_FALSE(std::getline(in, extra) && !extra.empty());
  EXPECT_NE(line.find(",ok,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir.path / "out" / "cell_0.csv"));
}

TEST(CliSweep, EmptyGridExitsTwo) {
  TempDir dir("empty");
  spit(dir.path / "grid.json", json{{"T", json::array()}, {"n", 2}, {"m", 2}, {"seeds", {1}}}.dump());
  std::ostringstream err;
  EXPECT_EQ(cli_sweep(dir.path / "grid.json", dir.path / "out", 1, err), kExitConfig);
}

TEST(CliSweep, ParallelCellsMatchSerialOnes) {
  TempDir dir("jobs");
  spit(dir.path / "grid.json", json{{"T", 40}, {"n", {2, 3}}, {"m", 2}, {"seeds", {1, 2}}}.dump());
  std::ostringstream err;
  ASSERT_EQ(cli_sweep(dir.path / "grid.json", dir.path / "serial", 1, err), kExitOk);
  ASSERT_EQ(cli_sweep(dir.path / "grid.json", dir.path / "parallel", 3, err), kExitOk);
  for (int c = 0; c < 4; ++c) {
    const std::string name = "cell_" + std::to_string(c) + ".csv";
    EXPECT_EQ(slurp(dir.path / "serial" / name), slurp(dir.path / "parallel" / name));
  }
}

// ---- eval -------------------------------------------------------------------------

TEST(CliEval, ReportsExactGaps) {
  TempDir dir("eval");
  const std::vector<double> c{0.0, 1.0, 1.0, 0.5};
  save_game(NormalFormPotentialGame({2, 2}, {c, c}, c), dir.path / "game.json");
  spit(dir.path / "s.json", json{{"strategy", {{{0.5, 0.5}}, {{0.5, 0.5}}}}}.dump());
  std::ostringstream out, err;
  ASSERT_EQ(cli_eval(dir.path / "game.json", dir.path / "s.json", out, err), kExitOk) << err.str();
  const json r = json::parse(out.str());
  EXPECT_NEAR(r.at("nash_gap").get<double>(), 0.125, 1e-15);
  EXPECT_NEAR(r.at("fw_gap").get<double>(), 0.25, 1e-15);
  spit(dir.path / "bad.json", json{{"strategy", {{{0.5, 0.6}}, {{0.5, 0.5}}}}}.dump());
  EXPECT_EQ(cli_eval(dir.path / "game.json", dir.path / "bad.json", out, err), kExitConfig);
}

// ---- binary --------------------------------------------------------------------------

TEST(CliBinary, ExitCodes) {
  TempDir dir("binary");
  EXPECT_EQ(run_cli("run --config " + (dir.path / "absent.json").string()), kExitConfig);
  EXPECT_EQ(run_cli("frobnicate"), kExitConfig);
  EXPECT_EQ(run_cli("--help"), kExitOk);
  const auto cfg = tiny_config(dir.path, 4, 1);
  EXPECT_EQ(run_cli("run --config " + cfg.string() + " --out " + (dir.path / "b").string()), kExitOk);
  EXPECT_TRUE(fs::exists(dir.path / "b" / "run.csv"));
  EXPECT_TRUE(fs::exists(dir.path / "b" / "run_meta.json"));
}

// ---- experiment --------------------------------------------------------------------

TEST(ReproduceExperiment, WritesTwoCsvsPerSeedAndASummary) {
  TempDir dir("experiment");
  ExperimentOptions o;
  o.seeds = 2;
  o.T = 4;
  o.trajectories = 2;
  o.out = dir.path;
  const json s = reproduce_experiment(o);
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir.path)) csvs += e.path().extension() == ".csv";
  EXPECT_EQ(csvs, 4u);
  EXPECT_TRUE(fs::exists(dir.path / "summary.json"));
  EXPECT_EQ(s.at("l1_to_final").at("fw").at("mean").size(), o.T + 1);
  EXPECT_TRUE(s.at("checks").contains("fw_safe_cheapest_two_mass"));
}
