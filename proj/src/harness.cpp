#include "fwgames/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "fwgames/error.hpp"
#include "fwgames/evaluation.hpp"
#include "fwgames/generators.hpp"

namespace fwg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

PowerLaw power_law_from_json(const json& j, const char* what) {
  if (j.is_number()) return {j.get<double>(), 0.0, 0.0};
  if (!j.is_object()) config_error(std::string(what) + " must be a number or {scale, power, offset}");
  return {get_or(j, "scale", 1.0), get_or(j, "power", 0.0), get_or(j, "offset", 0.0)};
}

json power_law_to_json(const PowerLaw& p) {
  return {{"scale", p.scale}, {"power", p.power}, {"offset", p.offset}};
}

ScheduleFamily family_from_string(const std::string& s) {
  if (s == "potential_game") return ScheduleFamily::potential_game;
  if (s == "markov_pg") return ScheduleFamily::markov_pg;
  if (s == "congestion_bandit") return ScheduleFamily::congestion_bandit;
  if (s == "congestion_semibandit") return ScheduleFamily::congestion_semibandit;
  if (s == "custom") return ScheduleFamily::custom;
  config_error("unknown schedule family \"" + s + "\"");
}

LearnerKind learner_from_string(const std::string& s) {
  if (s == "fw_explore") return LearnerKind::fw_explore;
  if (s == "projected_sgd") return LearnerKind::projected_sgd;
  config_error("unknown learner \"" + s + "\"");
}

FeedbackKind feedback_from_string(const std::string& s) {
  if (s == "full_bandit") return FeedbackKind::full_bandit;
  if (s == "semi_bandit") return FeedbackKind::semi_bandit;
  if (s == "bandit_linear") return FeedbackKind::bandit_linear;
  if (s == "trajectory") return FeedbackKind::trajectory;
  if (s == "exact_gradient") return FeedbackKind::exact_gradient;
  config_error("unknown feedback \"" + s + "\"");
}

// Game kind without building the game, for defaults.
std::string game_kind(const json& game, const fs::path& base) {
  json g = game;
  if (g.is_string()) g = read_json_file(base / g.get<std::string>());
  if (g.is_object() && g.contains("builtin")) return "markov";
  if (g.is_object() && g.contains("kind") && g.at("kind").is_string()) return g.at("kind").get<std::string>();
  config_error("game must be a file path or a JSON object with \"kind\" or \"builtin\"");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot write " + path.string());
  out << text;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

// ---- config ------------------------------------------------------------------------

ScheduleConfig schedule_from_json(const json& j, ScheduleFamily fallback) {
  ScheduleConfig s;
  s.family = fallback;
  if (j.is_null()) return s;
  if (j.is_string()) {
    s.family = family_from_string(j.get<std::string>());
    return s;
  }
  if (!j.is_object()) config_error("schedule must be a string or an object");
  if (j.contains("family")) s.family = family_from_string(get_or<std::string>(j, "family", ""));
  s.alpha = get_or(j, "alpha", s.alpha);
  s.beta = get_or(j, "beta", s.beta);
  if (j.contains("eta")) s.eta = power_law_from_json(j.at("eta"), "eta");
  if (j.contains("rho")) s.rho = power_law_from_json(j.at("rho"), "rho");
  if (j.contains("mu")) s.mu = get_or(j, "mu", 0.0);
  if (!(s.alpha > 0.0 && s.alpha < 1.0 && s.beta > 0.0 && s.beta < 1.0))
    config_error("alpha and beta must lie in (0,1)");
  if (s.family == ScheduleFamily::custom && !(s.eta && s.rho && s.mu))
    config_error("custom schedule needs eta, rho and mu");
  return s;
}

json schedule_to_json(const ScheduleConfig& s) {
  json j = {{"family", to_string(s.family)}, {"alpha", s.alpha}, {"beta", s.beta}};
  if (s.eta) j["eta"] = power_law_to_json(*s.eta);
  if (s.rho) j["rho"] = power_law_to_json(*s.rho);
  if (s.mu) j["mu"] = *s.mu;
  return j;
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) config_error("run config must be a JSON object");
  RunConfig c;
  c.base_dir = base_dir;
  c.echo = j;
  if (!j.contains("game")) config_error("run config needs a \"game\"");
  c.game = j.at("game");
  const std::string kind = game_kind(c.game, base_dir);

  auto& L = c.learner;
  L.learner = learner_from_string(get_or<std::string>(j, "learner", "fw_explore"));
  const std::string default_feedback = kind == "normal_form" ? "full_bandit"
                                       : kind == "congestion" ? "semi_bandit"
                                                              : "trajectory";
  L.feedback = feedback_from_string(get_or<std::string>(j, "feedback", default_feedback));
  const ScheduleFamily default_family =
      kind == "normal_form"  ? ScheduleFamily::potential_game
      : kind == "markov"     ? ScheduleFamily::markov_pg
      : L.feedback == FeedbackKind::bandit_linear ? ScheduleFamily::congestion_bandit
                                                  : ScheduleFamily::congestion_semibandit;
  L.schedule = schedule_from_json(j.contains("schedule") ? j.at("schedule") : json(nullptr), default_family);
  const auto T = get_or<long long>(j, "T", -1);
  if (T < 0) config_error("run config needs T >= 0");
  L.T = static_cast<std::size_t>(T);
  const auto B = get_or<long long>(j, "trajectories_per_update", 1);
  const auto every = get_or<long long>(j, "eval_every", 1);
  if (B < 1) config_error("trajectories_per_update must be at least 1");
  if (every < 1) config_error("eval_every must be at least 1");
  L.trajectories = static_cast<std::size_t>(B);
  L.eval_every = static_cast<std::size_t>(every);
  L.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("explore_coef")) L.explore_coef = get_or(j, "explore_coef", 0.0);
  if (j.contains("horizon_cap")) {
    if (j.at("horizon_cap").is_null())
      c.horizon_cap = std::optional<std::size_t>{};
    else
      c.horizon_cap = std::optional<std::size_t>{get_or<std::size_t>(j, "horizon_cap", 1)};
  }
  c.output = get_or<std::string>(j, "output", "out");
  return c;
}

Game resolve_game(const RunConfig& config) {
  Game g = config.game.is_string() ? load_game(config.base_dir / config.game.get<std::string>())
                                   : game_from_json(config.game);
  if (config.horizon_cap) {
    auto* m = std::get_if<MarkovGame>(&g);
    if (!m) config_error("horizon_cap applies to Markov games only");
    g = m->with_horizon_cap(*config.horizon_cap);
  }
  return g;
}

// ---- CSV --------------------------------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> csv_columns(std::size_t n) {
  std::vector<std::string> c = {"t", "eta", "rho", "mu", "nash_gap", "fw_gap", "nash_gap_played",
                                "fw_gap_played"};
  for (std::size_t i = 0; i < n; ++i) c.push_back("cost_" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i) c.push_back("cost_played_" + std::to_string(i));
  c.push_back("nash_regret");
  for (std::size_t i = 0; i < n; ++i) c.push_back("regret_" + std::to_string(i));
  c.push_back("l1_to_final");
  return c;
}

void write_csv(std::ostream& out, const RunLog& log, const json& header) {
  out << "# fwgames run log\n# version: " << kVersion << '\n';
  if (header.is_object())
    for (const auto& [k, v] : header.items()) out << "# " << k << ": " << v.dump() << '\n';
  const auto cols = csv_columns(log.num_players);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& r : log.rows) {
    out << r.t << ',' << format_double(r.eta) << ',' << format_double(r.rho) << ','
        << format_double(r.mu) << ',' << format_double(r.nash_gap) << ',' << format_double(r.fw_gap)
        << ',' << format_double(r.nash_gap_played) << ',' << format_double(r.fw_gap_played);
    for (double v : r.cost) out << ',' << format_double(v);
    for (double v : r.cost_played) out << ',' << format_double(v);
    out << ',' << format_double(r.nash_regret);
    for (double v : r.regret) out << ',' << format_double(v);
    out << ',' << format_double(r.l1_to_final) << '\n';
  }
}

std::string csv_string(const RunLog& log, const json& header) {
  std::ostringstream s;
  write_csv(s, log, header);
  return s.str();
}

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line);
    } else if (t.columns.empty()) {
      t.columns = split(line, ',');
    } else {
      t.rows.push_back(split(line, ','));
    }
  }
  return t;
}

json strategy_json(const Game& game, const StrategySnapshot& s) {
  if (std::holds_alternative<CongestionGame>(game)) return {{"marginals", s}};
  return {{"strategy", s}};
}

// ---- slopes ---------------------------------------------------------------------------------

double fit_regret_slope(std::span<const double> t, std::span<const double> r, double t0, double t1) {
  require(t.size() == r.size(), Errc::ShapeMismatch, "time and regret series differ in length");
  std::vector<double> xs, ys;
  bool zero = false;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 || t[k] > t1) continue;
    xs.push_back(t[k]);
    ys.push_back(r[k]);
    zero = zero || r[k] <= 0.0;
  }
  require(xs.size() >= 2, Errc::InvalidArgument, "window outside series range");
  const double shift = zero ? 1.0 : 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    require(xs[k] > 0.0 && ys[k] + shift > 0.0, Errc::InvalidArgument, "series must be positive");
    xs[k] = std::log(xs[k]);
    ys[k] = std::log(ys[k] + shift);
    mx += xs[k];
    my += ys[k];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxy += (xs[k] - mx) * (ys[k] - my);
    sxx += (xs[k] - mx) * (xs[k] - mx);
  }
  require(sxx > 0.0, Errc::InvalidArgument, "window holds a single time point");
  return sxy / sxx;
}

double fit_regret_slope(std::span<const double> series, std::size_t t0, std::size_t t1) {
  require(t0 >= 1 && t1 <= series.size() && t0 < t1, Errc::InvalidArgument,
          "window outside series range");
  std::vector<double> t(series.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k + 1);
  return fit_regret_slope(t, series, static_cast<double>(t0), static_cast<double>(t1));
}

void nash_regret_points(const RunLog& log, std::vector<double>& t, std::vector<double>& r) {
  t.clear();
  r.clear();
  for (const auto& row : log.rows) {
    if (row.t < 2) continue;
    t.push_back(static_cast<double>(row.t - 1));
    r.push_back(row.nash_regret);
  }
}

void individual_regret_points(const RunLog& log, std::vector<double>& t, std::vector<double>& r) {
  t.clear();
  r.clear();
  for (const auto& row : log.rows) {
    if (row.t < 2 || row.regret.empty()) continue;
    t.push_back(static_cast<double>(row.t - 1));
    r.push_back(*std::max_element(row.regret.begin(), row.regret.end()));
  }
}

// ---- run ---------------------------------------------------------------------------------------

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->code()) {
      case Errc::NumericalDivergence:
      case Errc::NoConvergence:
      case Errc::DecompositionUnstable:
      case Errc::EstimatorInconsistent:
      case Errc::DivisionByZeroProb:
        return kExitDivergence;
      default:
        return kExitConfig;
    }
  }
  return kExitConfig;
}

RunLog execute_run(const RunConfig& config, const Game& game) {
  const auto start = std::chrono::steady_clock::now();
  RunLog log = run_learning(game, config.learner);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::create_directories(config.output);
  write_text(config.output / "run.csv", csv_string(log, {{"config", config.echo}}));
  write_text(config.output / "final_strategy.json", strategy_json(game, log.final_strategy).dump() + "\n");
  const json meta = {{"wall_clock_seconds", secs},
                     {"rows", log.rows.size()},
                     {"schedule_clamped", log.clamped},
                     {"version", kVersion}};
  write_text(config.output / "run_meta.json", meta.dump(1) + "\n");
  return log;
}

int cli_run(const fs::path& config_path, std::optional<std::uint64_t> seed,
            std::optional<fs::path> out, std::ostream& err) {
  try {
    RunConfig c = run_config_from_json(read_json_file(config_path), config_path.parent_path());
    if (seed) {
      c.learner.seed = *seed;
      c.echo["seed"] = *seed;
    }
    if (out) c.output = *out;
    const Game game = resolve_game(c);
    const RunLog log = execute_run(c, game);
    if (log.clamped) err << "note: schedule values above 1 were clamped\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- experiment ---------------------------------------------------------------------------------

namespace {

std::string facility_name(std::size_t f) {
  return f < 26 ? std::string(1, static_cast<char>('A' + f)) : "F" + std::to_string(f);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Per state: mean probability mass per facility across players and seeds,
// plus the per-seed count of players whose most likely facility is f.
json occupancy_summary(const std::vector<StrategySnapshot>& finals, std::size_t num_states,
                       std::size_t F) {
  json out = json::object();
  for (std::size_t s = 0; s < num_states; ++s) {
    std::vector<double> mass(F, 0.0);
    json counts = json::array();
    for (const auto& snap : finals) {
      std::vector<std::size_t> c(F, 0);
      for (const auto& player : snap) {
        const auto& row = player[s];
        for (std::size_t f = 0; f < F; ++f) mass[f] += row[f];
        c[static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin())]++;
      }
      counts.push_back(c);
    }
    const double norm = static_cast<double>(finals.size() * (finals.empty() ? 0 : finals[0].size()));
    for (double& m : mass) m /= norm;
    json per = json::object();
    for (std::size_t f = 0; f < F; ++f) per[facility_name(f)] = mass[f];
    out[s == kSafeState ? "safe" : s == kDistancingState ? "distancing" : std::to_string(s)] = {
        {"mean_mass_per_player", per}, {"argmax_counts_per_seed", counts}};
  }
  return out;
}

}  // namespace

json reproduce_experiment(const ExperimentOptions& o) {
  require(o.seeds >= 1, Errc::ConfigError, "need at least one seed");
  ExperimentConfig gc = o.game;
  gc.literal_stopping = o.literal_stopping;
  gc.horizon_cap = o.horizon;
  const MarkovGame mg = build_experiment_game(gc);
  const Game game = mg;
  const std::size_t F = gc.weights.size();
  fs::create_directories(o.out);

  LearnerConfig fw;
  fw.learner = LearnerKind::fw_explore;
  fw.feedback = FeedbackKind::trajectory;
  fw.schedule.family = ScheduleFamily::custom;
  fw.schedule.eta = PowerLaw{o.fw_eta, 0.0, 0.0};
  fw.schedule.rho = o.fw_rho;
  fw.schedule.mu = o.mu;
  fw.T = o.T;
  fw.trajectories = o.trajectories;
  fw.eval_every = 1;

  LearnerConfig sgd = fw;
  sgd.learner = LearnerKind::projected_sgd;
  const double sgd_eta = o.sgd_eta * (o.sgd_raw_units ? mg.cost_scale() : 1.0);
  sgd.schedule.eta = PowerLaw{sgd_eta, 0.0, 0.0};
  sgd.schedule.rho = PowerLaw{1.0, 0.0, 0.0};

  const json echo = {{"game", experiment_config_to_json(gc)},
                     {"T", o.T},
                     {"trajectories_per_update", o.trajectories},
                     {"fw", schedule_to_json(fw.schedule)},
                     {"sgd", schedule_to_json(sgd.schedule)},
                     {"sgd_raw_units", o.sgd_raw_units}};

  std::vector<std::vector<double>> curves_fw, curves_sgd;
  std::vector<StrategySnapshot> finals_fw, finals_sgd;
  json files = json::array();
  for (std::size_t k = 0; k < o.seeds; ++k) {
    const std::uint64_t seed = o.first_seed + k;
    for (int which = 0; which < 2; ++which) {
      LearnerConfig cfg = which == 0 ? fw : sgd;
      cfg.seed = seed;
      const RunLog log = run_learning(game, cfg);
      const std::string name = std::string(which == 0 ? "fw" : "sgd") + "_seed" + std::to_string(seed) + ".csv";
      json header = {{"experiment", echo}, {"learner", to_string(cfg.learner)}, {"seed", seed}};
      write_text(o.out / name, csv_string(log, header));
      files.push_back(name);
      std::vector<double> curve;
      for (const auto& r : log.rows) curve.push_back(r.l1_to_final);
      (which == 0 ? curves_fw : curves_sgd).push_back(std::move(curve));
      (which == 0 ? finals_fw : finals_sgd).push_back(log.final_strategy);
    }
  }

  const std::size_t len = curves_fw.front().size();
  json t = json::array(), fw_mean = json::array(), fw_std = json::array(), sgd_mean = json::array(),
       sgd_std = json::array();
  bool below = true;
  std::size_t first_violation = 0;
  for (std::size_t r = 0; r < len; ++r) {
    std::vector<double> a, b;
    for (const auto& c : curves_fw) a.push_back(c[r]);
    for (const auto& c : curves_sgd) b.push_back(c[r]);
    const std::size_t tt = r + 1;
    t.push_back(tt);
    fw_mean.push_back(mean_of(a));
    fw_std.push_back(sample_std(a));
    sgd_mean.push_back(mean_of(b));
    sgd_std.push_back(sample_std(b));
    // The row after the last step is the final strategy itself, at distance 0 for both.
    if (tt >= o.compare_from && tt <= o.T && !(mean_of(a) < mean_of(b)) && below) {
      below = false;
      first_violation = tt;
    }
  }

  const json occ_fw = occupancy_summary(finals_fw, mg.num_states(), F);
  const json occ_sgd = occupancy_summary(finals_sgd, mg.num_states(), F);

  // Safe-state mass on the two cheapest facilities and the even split between them.
  std::vector<std::size_t> order(F);
  for (std::size_t f = 0; f < F; ++f) order[f] = f;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gc.weights[a] < gc.weights[b]; });
  double cheap_mass = 0.0;
  bool even_split = true;
  const std::size_t n = gc.num_players;
  if (F >= 2) {
    const auto& safe = occ_fw.at("safe");
    cheap_mass = safe.at("mean_mass_per_player").at(facility_name(order[0])).get<double>() +
                 safe.at("mean_mass_per_player").at(facility_name(order[1])).get<double>();
    for (const auto& c : safe.at("argmax_counts_per_seed")) {
      const auto counts = c.get<std::vector<std::size_t>>();
      even_split = even_split && counts[order[0]] == n / 2 && counts[order[1]] == n - n / 2;
    }
  }

  json summary = {
      {"config", echo},
      {"seeds", o.seeds},
      {"first_seed", o.first_seed},
      {"files", files},
      {"l1_to_final",
       {{"t", t}, {"fw", {{"mean", fw_mean}, {"std", fw_std}}}, {"sgd", {{"mean", sgd_mean}, {"std", sgd_std}}}}},
      {"final_occupancy", {{"fw", occ_fw}, {"sgd", occ_sgd}}},
      {"checks",
       {{"fw_safe_cheapest_two_mass", cheap_mass},
        {"fw_safe_even_split_all_seeds", even_split},
        {"fw_below_sgd_from", o.compare_from},
        {"fw_below_sgd", below},
        {"first_violation_t", below ? json(nullptr) : json(first_violation)}}}};
  write_text(o.out / "summary.json", summary.dump(1) + "\n");
  return summary;
}

int cli_reproduce_experiment(const ExperimentOptions& options, std::ostream& err) {
  try {
    const json s = reproduce_experiment(options);
    const auto& c = s.at("checks");
    err << "safe-state mass on the two cheapest facilities: " << c.at("fw_safe_cheapest_two_mass").dump()
        << "\neven split in every seed: " << c.at("fw_safe_even_split_all_seeds").dump()
        << "\nFW below SGD from t=" << c.at("fw_below_sgd_from").dump() << ": "
        << c.at("fw_below_sgd").dump() << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

// ---- sweep ------------------------------------------------------------------------------------------

namespace {

struct Cell {
  std::size_t index = 0;
  std::size_t T = 0, n = 0, m = 0;
  ScheduleFamily family = ScheduleFamily::potential_game;
  std::uint64_t seed = 0;
};

struct CellResult {
  std::string status = "ok";
  std::string message;
  double nash_regret = std::numeric_limits<double>::quiet_NaN();
  double max_regret = std::numeric_limits<double>::quiet_NaN();
  double nash_slope = std::numeric_limits<double>::quiet_NaN();
  double regret_slope = std::numeric_limits<double>::quiet_NaN();
};

template <typename T>
std::vector<T> list_of(const json& g, const char* key, std::vector<T> fallback) {
  if (!g.contains(key)) return fallback;
  const auto& v = g.at(key);
  try {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
  } catch (const json::exception& e) {
    config_error(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

int cli_sweep(const fs::path& grid_path, const fs::path& out, std::size_t jobs, std::ostream& err) {
  std::vector<Cell> cells;
  json grid;
  std::optional<Game> fixed_game;
  try {
    grid = read_json_file(grid_path);
    if (!grid.is_object()) config_error("grid must be a JSON object");
    const auto Ts = list_of<std::size_t>(grid, "T", {});
    const auto seeds = list_of<std::uint64_t>(grid, "seeds", {});
    std::vector<std::string> fams = list_of<std::string>(grid, "family", {"potential_game"});
    std::vector<std::size_t> ns = list_of<std::size_t>(grid, "n", {});
    std::vector<std::size_t> ms = list_of<std::size_t>(grid, "m", {});
    if (grid.contains("game")) {
      RunConfig probe;
      probe.game = grid.at("game");
      probe.base_dir = grid_path.parent_path();
      fixed_game = resolve_game(probe);
      ns = {std::visit([](const auto& g) { return g.num_players(); }, *fixed_game)};
      ms = {0};
    }
    for (std::size_t T : Ts)
      for (std::size_t n : ns)
        for (std::size_t m : ms)
          for (const auto& f : fams)
            for (std::uint64_t s : seeds) cells.push_back({cells.size(), T, n, m, family_from_string(f), s});
    if (cells.empty()) config_error("grid has no cells");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  fs::create_directories(out);
  const auto noise = grid.contains("noise") ? noise_from_json(grid.at("noise")) : NoiseModel{};
  const std::uint64_t game_seed = grid.value("game_seed", std::uint64_t{0});
  const double w0 = grid.contains("window") ? grid.at("window").at(0).get<double>() : 0.1;
  const double w1 = grid.contains("window") ? grid.at("window").at(1).get<double>() : 1.0;
  const json base_schedule = grid.value("schedule", json::object());
  const std::string learner = grid.value("learner", std::string("fw_explore"));
  const std::size_t eval_every = grid.value("eval_every", std::size_t{1});

  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < cells.size();) {
      const Cell& c = cells[k];
      CellResult& res = results[k];
      try {
        const Game game = fixed_game ? *fixed_game : [&]() -> Game {
          Rng rng(derive_stream_seed(game_seed, c.n * 1000 + c.m));
          return random_potential_game(std::vector<std::size_t>(c.n, c.m), rng, noise);
        }();
        json sched = base_schedule;
        sched["family"] = to_string(c.family);
        json cfg_j = {{"game", "<grid>"}, {"learner", learner}, {"T", c.T}, {"seed", c.seed},
                      {"eval_every", eval_every}, {"schedule", sched}};
        LearnerConfig L;
        L.learner = learner_from_string(learner);
        const std::string kind = std::visit(
            [](const auto& g) -> std::string {
              using G = std::decay_t<decltype(g)>;
              if constexpr (std::is_same_v<G, NormalFormPotentialGame>) return "full_bandit";
              else if constexpr (std::is_same_v<G, CongestionGame>) return "semi_bandit";
              else return "trajectory";
            },
            game);
        L.feedback = feedback_from_string(grid.value("feedback", kind));
        L.schedule = schedule_from_json(sched, c.family);
        L.T = c.T;
        L.seed = c.seed;
        L.eval_every = eval_every;
        L.trajectories = grid.value("trajectories_per_update", std::size_t{1});
        const RunLog log = run_learning(game, L);
        write_text(out / ("cell_" + std::to_string(c.index) + ".csv"), csv_string(log, {{"cell", cfg_j}}));
        res.nash_regret = log.rows.back().nash_regret;
        if (!log.rows.back().regret.empty())
          res.max_regret = *std::max_element(log.rows.back().regret.begin(), log.rows.back().regret.end());
        std::vector<double> t, r;
        const double t0 = w0 * static_cast<double>(c.T), t1 = w1 * static_cast<double>(c.T);
        nash_regret_points(log, t, r);
        try {
          res.nash_slope = fit_regret_slope(t, r, t0, t1);
        } catch (const Error&) {
        }
        individual_regret_points(log, t, r);
        try {
          if (!std::isnan(res.max_regret)) res.regret_slope = fit_regret_slope(t, r, t0, t1);
        } catch (const Error&) {
        }
      } catch (const std::exception& e) {
        res.status = exit_code_for(e) == kExitDivergence ? "diverged" : "failed";
        res.message = e.what();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::ostringstream s;
  s << "cell,T,n,m,family,seed,status,nash_regret,max_individual_regret,nash_slope,individual_slope,message\n";
  bool failed = false;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& c = cells[k];
    const auto& r = results[k];
    failed = failed || r.status != "ok";
    std::string msg = r.message;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    s << c.index << ',' << c.T << ',' << c.n << ',' << c.m << ',' << to_string(c.family) << ','
      << c.seed << ',' << r.status << ',' << format_double(r.nash_regret) << ','
      << format_double(r.max_regret) << ',' << format_double(r.nash_slope) << ','
      << format_double(r.regret_slope) << ',' << msg << '\n';
    if (r.status != "ok") err << "cell " << c.index << ' ' << r.status << ": " << r.message << '\n';
  }
  write_text(out / "summary.csv", s.str());
  return failed ? kExitPartial : kExitOk;
}

// ---- eval --------------------------------------------------------------------------------------------

int cli_eval(const fs::path& game_path, const fs::path& strategy_path, std::ostream& out,
             std::ostream& err) {
  try {
    const Game game = load_game(game_path);
    const json sj = read_json_file(strategy_path);
    auto tables = [&](const char* key) {
      if (!sj.contains(key)) config_error(std::string("strategy file lacks \"") + key + "\"");
      try {
        return sj.at(key).get<StrategySnapshot>();
      } catch (const json::exception& e) {
        config_error(std::string("bad strategy: ") + e.what());
      }
    };
    json result;
    std::visit(
        [&](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          ProfileEvaluation ev;
          if constexpr (std::is_same_v<G, NormalFormPotentialGame>) {
            MixedProfile p;
            for (const auto& player : tables("strategy")) {
              if (player.size() != 1) config_error("normal-form strategies have one state");
              p.emplace_back(player[0]);
            }
            ev = evaluate_profile(g, p);
            result["potential"] = expected_potential(g, to_distributions(p));
          } else if constexpr (std::is_same_v<G, CongestionGame>) {
            Marginals x;
            if (sj.contains("marginals")) {
              for (const auto& player : tables("marginals")) {
                if (player.size() != 1) config_error("marginals have one state");
                x.push_back(player[0]);
              }
            } else {
              MixedProfile p;
              for (const auto& player : tables("strategy")) {
                if (player.size() != 1) config_error("congestion strategies have one state");
                p.emplace_back(player[0]);
              }
              x = marginals_of(g, p);
            }
            ev = evaluate_profile(g, x);
            result["fractional_potential"] = fractional_potential(g, x);
          } else {
            MarkovProfile p;
            for (const auto& player : tables("strategy")) {
              std::vector<Simplex> rows;
              for (const auto& row : player) rows.emplace_back(row);
              p.emplace_back(std::move(rows));
            }
            ev = evaluate_profile(g, p);
            const auto vt = value_function(g, p);
            result["state_values"] = vt.v;
            const auto occ = occupancy_measure(g, p);
            result["occupancy"] = occ.visits;
            result["expected_length"] = occ.expected_length;
          }
          result["nash_gap"] = ev.nash.max;
          result["nash_gap_per_player"] = ev.nash.per_player;
          result["fw_gap"] = ev.fw_gap;
          result["values"] = ev.costs;
        },
        game);
    out << result.dump(1) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace fwg
