#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fwgames/estimators.hpp"
#include "fwgames/evaluation.hpp"
#include "fwgames/games.hpp"
#include "fwgames/rng.hpp"
#include "fwgames/strategies.hpp"

namespace fwg {

// ---- schedules ----------------------------------------------------------------

enum class ScheduleFamily { potential_game, markov_pg, congestion_bandit, congestion_semibandit, custom };

inline constexpr double kDefaultAlpha = 8.0 / 15.0;
inline constexpr double kDefaultBeta = 1.0 / 5.0;

/// scale / (t + offset)^power
struct PowerLaw {
  double scale = 1.0;
  double power = 0.0;
  double offset = 0.0;

  double operator()(std::size_t t) const;
};

struct ScheduleConfig {
  ScheduleFamily family = ScheduleFamily::potential_game;
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;
  std::optional<PowerLaw> eta;
  std::optional<PowerLaw> rho;
  std::optional<double> mu;
};

/// Sizes the preset formulas depend on.
struct ScheduleDims {
  std::size_t n = 1;
  std::size_t m = 1;  // max action count
  std::size_t d = 1;  // resources (congestion)
  std::size_t k = 1;  // strategy size (congestion)
  double kappa = 1.0;
  std::size_t horizon = 1;  // T
};

struct ScheduleValues {
  double eta = 0.0;
  double rho = 0.0;
  double mu = 0.0;
  bool clamped = false;  // η or ρ hit the upper clamp
};

// Preset formulas. η and ρ are clamped to at most 1.
double eta_pg(std::size_t t, std::size_t n, double alpha = kDefaultAlpha);
double rho_pg(std::size_t t, std::size_t n, std::size_t m, double mu, double alpha = kDefaultAlpha);
double mu_pg(double T, std::size_t n, std::size_t m, double beta = kDefaultBeta);

double eta_mpg(std::size_t t, std::size_t n, std::size_t m, double kappa, double alpha = kDefaultAlpha);
double rho_mpg(std::size_t t, std::size_t n, std::size_t m, double mu, double alpha = kDefaultAlpha);
double mu_mpg(double T, std::size_t n, std::size_t m, double kappa, double beta = kDefaultBeta);

enum class CongestionFeedbackKind { bandit, semi_bandit };

struct EtaRho {
  double eta = 0.0;
  double rho = 0.0;
};
EtaRho schedules_congestion(std::size_t t, std::size_t n, std::size_t d, std::size_t k, double mu,
                            CongestionFeedbackKind feedback, double alpha = kDefaultAlpha);
double mu_congestion(double T, std::size_t n, std::size_t d, CongestionFeedbackKind feedback,
                     double beta = kDefaultBeta);

/// Preset values at iteration t with overrides applied and η, ρ clamped to 1.
ScheduleValues schedule_at(const ScheduleConfig& config, const ScheduleDims& dims, std::size_t t);

// ---- learner states -------------------------------------------------------------

/// Per-player rng streams plus the environment stream, all derived from one seed.
struct RngStreams {
  std::vector<Rng> players;
  Rng nature;

  static RngStreams from_seed(std::uint64_t seed, std::size_t num_players);
};

/// Fixed opponent: t ↦ mixed strategy played at iteration t.
using Script = std::function<Simplex(std::size_t)>;

/// How a simplex learner forms its gradient sample.
enum class PgGradient {
  importance_sampling,  // bandit or trajectory feedback, the algorithm as stated
  exact                 // exact gradient at π̃; for testing the optimization part alone
};

struct PgState {
  MixedProfile strategy;
  std::vector<RecursiveGrad> recursive;
  std::size_t t = 1;
  RngStreams rng;
  /// Entry i set means player i replays the script instead of learning.
  std::vector<Script> scripted;
  PgGradient gradient = PgGradient::importance_sampling;

  static PgState init(const NormalFormPotentialGame& game, std::uint64_t seed);
};

struct PgStepInfo {
  MixedProfile explored;
  JointAction played;
  std::vector<double> costs;
  ScheduleValues schedule;
};

PgStepInfo fw_explore_step_pg(PgState& state, const NormalFormPotentialGame& game,
                              const ScheduleValues& schedule);

struct MpgState {
  MarkovProfile strategy;
  std::vector<RecursiveGrad> recursive;
  std::size_t t = 1;
  RngStreams rng;
  std::size_t trajectories = 1;
  PgGradient gradient = PgGradient::importance_sampling;  // exact: d^π̃·Q̄ oracle

  static MpgState init(const MarkovGame& game, std::uint64_t seed, std::size_t trajectories = 1);
};

struct Episode {
  std::vector<std::size_t> states;
  std::vector<JointAction> actions;
  std::vector<std::vector<double>> costs;  // [h][player]
};

/// One episode under `policy`: initial draw (skipped when S = 1), per-player
/// actions, costs, then the stop draw (skipped when κ_{s,a} ≥ 1 or the cap is hit)
/// and the transition draw (skipped when S = 1).
Episode sample_episode(const MarkovGame& game, const MarkovProfile& policy, RngStreams& rng);

struct MpgStepInfo {
  MarkovProfile explored;
  std::size_t steps = 0;  // total steps across the batch
  ScheduleValues schedule;
};

MpgStepInfo fw_explore_step_mpg(MpgState& state, const MarkovGame& game,
                                const ScheduleValues& schedule);

struct CongestionState {
  std::vector<PolytopePoint> strategy;
  std::vector<PolytopePoint> cover;
  std::vector<RecursiveGrad> recursive;
  std::size_t t = 1;
  RngStreams rng;
  CongestionFeedbackKind feedback = CongestionFeedbackKind::semi_bandit;
  double explore_coef = 0.0;  // ε = coef·μ

  /// Uniform mixture over each action set; coef defaults to d.
  static CongestionState init(const CongestionGame& game, std::uint64_t seed,
                              CongestionFeedbackKind feedback,
                              std::optional<double> explore_coef = std::nullopt);
};

struct CongestionStepInfo {
  std::vector<PolytopePoint> explored;
  JointAction played;
  CongestionFeedback feedback;
  ScheduleValues schedule;
};

CongestionStepInfo fw_explore_step_congestion(CongestionState& state, const CongestionGame& game,
                                              const ScheduleValues& schedule);

/// Projected SGD on the simplex with the same exploration and one-sample
/// estimator as the Frank-Wolfe learner. Only η and μ of the schedule are used.
PgStepInfo projected_sgd_step(PgState& state, const NormalFormPotentialGame& game,
                              const ScheduleValues& schedule);
MpgStepInfo projected_sgd_step(MpgState& state, const MarkovGame& game,
                               const ScheduleValues& schedule);

// ---- runs ----------------------------------------------------------------------

enum class LearnerKind { fw_explore, projected_sgd };
enum class FeedbackKind { full_bandit, semi_bandit, bandit_linear, trajectory, exact_gradient };

struct LearnerConfig {
  LearnerKind learner = LearnerKind::fw_explore;
  FeedbackKind feedback = FeedbackKind::full_bandit;
  ScheduleConfig schedule;
  std::size_t T = 0;
  std::size_t trajectories = 1;
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;
  std::optional<double> explore_coef;
  /// Scripted opponents for one-shot games (player index → script).
  std::vector<std::pair<std::size_t, Script>> scripts;
};

/// Iterate in a form every game kind shares: [player][state][entry]. For
/// congestion games the single "state" holds the resource marginals.
using StrategySnapshot = std::vector<std::vector<std::vector<double>>>;

struct LogRow {
  std::size_t t = 0;
  double eta = 0.0, rho = 0.0, mu = 0.0;
  double nash_gap = 0.0, fw_gap = 0.0;                // at π^t
  double nash_gap_played = 0.0, fw_gap_played = 0.0;  // at π̃^t
  std::vector<double> cost;         // c_i(π^t), or V_i(μ0)
  std::vector<double> cost_played;  // c_i(π̃^t)
  double nash_regret = 0.0;         // Σ_{τ<t} nash_gap(π̃^τ)
  std::vector<double> regret;       // individual; NaN where undefined
  double l1_to_final = 0.0;
};

struct RunLog {
  std::vector<LogRow> rows;
  StrategySnapshot final_strategy;
  std::vector<StrategySnapshot> played_history;  // only when requested
  std::size_t num_players = 0;
  bool clamped = false;
};

struct RunOptions {
  bool keep_played_history = false;
};

/// T iterations with exact evaluation of every iterate; rows are kept at
/// t = 1, 1 + e, … and always at T + 1. Bit-reproducible in (seed, config).
RunLog run_learning(const Game& game, const LearnerConfig& config, const RunOptions& options = {});

StrategySnapshot snapshot(const MixedProfile& p);
StrategySnapshot snapshot(const MarkovProfile& p);
StrategySnapshot snapshot(const std::vector<PolytopePoint>& p);
double l1_distance(const StrategySnapshot& a, const StrategySnapshot& b);

std::string to_string(LearnerKind k);
std::string to_string(FeedbackKind k);
std::string to_string(ScheduleFamily f);

}  // namespace fwg
