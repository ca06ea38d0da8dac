#include "fwgames/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fwgames/error.hpp"

namespace fwg {

// ---- schedules -------------------------------------------------------------------

namespace {

double clamp1(double v) { return std::min(v, 1.0); }
double tpow(std::size_t t, double p) { return std::pow(static_cast<double>(t), p); }
double dpow(double x, double p) { return std::pow(x, p); }

void check_t(std::size_t t) { require(t >= 1, Errc::InvalidArgument, "iteration index starts at 1"); }

}  // namespace

double PowerLaw::operator()(std::size_t t) const {
  return scale / std::pow(static_cast<double>(t) + offset, power);
}

double eta_pg(std::size_t t, std::size_t n, double alpha) {
  check_t(t);
  return clamp1(1.0 / (std::sqrt(static_cast<double>(n)) * tpow(t, 1.5 * alpha)));
}

double rho_pg(std::size_t t, std::size_t n, std::size_t m, double mu, double alpha) {
  check_t(t);
  const double v = 4.0 * std::cbrt(mu) * std::cbrt(static_cast<double>(n)) *
                   std::cbrt(static_cast<double>(m)) / tpow(t, alpha);
  return clamp1(v);
}

double mu_pg(double T, std::size_t n, std::size_t m, double beta) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::min(1.0 / (mm * nn), mm / (dpow(nn, 1.0 / 8.0) * dpow(T, beta)));
}

double eta_mpg(std::size_t t, std::size_t n, std::size_t m, double kappa, double alpha) {
  check_t(t);
  return clamp1(kappa / (dpow(static_cast<double>(n), 1.5) * static_cast<double>(m) *
                         tpow(t, 1.5 * alpha)));
}

double rho_mpg(std::size_t t, std::size_t n, std::size_t m, double mu, double alpha) {
  check_t(t);
  return clamp1(4.0 * std::cbrt(mu) /
                (std::cbrt(static_cast<double>(n)) * dpow(static_cast<double>(m), 2.0 / 3.0) *
                 tpow(t, alpha)));
}

double mu_mpg(double T, std::size_t n, std::size_t m, double kappa, double beta) {
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return std::min(1.0 / (mm * mm * nn), dpow(kappa, 4.0 / 3.0) /
                                            (dpow(nn, 7.0 / 8.0) * dpow(mm, 0.25) * dpow(T, beta)));
}

EtaRho schedules_congestion(std::size_t t, std::size_t n, std::size_t d, std::size_t /*k*/, double mu,
                            CongestionFeedbackKind feedback, double alpha) {
  check_t(t);
  EtaRho out;
  out.eta = clamp1(2.0 / tpow(t, 1.5 * alpha));
  double rho = 4.0 * std::cbrt(mu) * dpow(static_cast<double>(d), 1.0 / 6.0) / tpow(t, alpha);
  if (feedback == CongestionFeedbackKind::semi_bandit) rho /= std::cbrt(static_cast<double>(n));
  out.rho = clamp1(rho);
  return out;
}

double mu_congestion(double T, std::size_t n, std::size_t d, CongestionFeedbackKind feedback,
                     double beta) {
  const double nn = static_cast<double>(n), dd = static_cast<double>(d);
  if (feedback == CongestionFeedbackKind::bandit)
    return 1.0 / (dpow(nn, 3.0 / 8.0) * dpow(dd, 17.0 / 16.0) * dpow(T, beta));
  return 1.0 / (dpow(nn * dd, 3.0 / 8.0) * dpow(T, beta));
}

ScheduleValues schedule_at(const ScheduleConfig& c, const ScheduleDims& dims, std::size_t t) {
  check_t(t);
  require(c.alpha > 0.0 && c.alpha < 1.0 && c.beta > 0.0 && c.beta < 1.0, Errc::ConfigError,
          "alpha and beta must lie in (0,1)");
  const double T = static_cast<double>(std::max<std::size_t>(dims.horizon, 1));
  ScheduleValues v;
  double eta = 0.0, rho = 0.0;
  switch (c.family) {
    case ScheduleFamily::potential_game:
      v.mu = c.mu.value_or(mu_pg(T, dims.n, dims.m, c.beta));
      eta = 1.0 / (std::sqrt(static_cast<double>(dims.n)) * tpow(t, 1.5 * c.alpha));
      rho = 4.0 * std::cbrt(v.mu * static_cast<double>(dims.n * dims.m)) / tpow(t, c.alpha);
      break;
    case ScheduleFamily::markov_pg:
      v.mu = c.mu.value_or(mu_mpg(T, dims.n, dims.m, dims.kappa, c.beta));
      eta = dims.kappa / (dpow(static_cast<double>(dims.n), 1.5) * static_cast<double>(dims.m) *
                          tpow(t, 1.5 * c.alpha));
      rho = 4.0 * std::cbrt(v.mu) /
            (std::cbrt(static_cast<double>(dims.n)) * dpow(static_cast<double>(dims.m), 2.0 / 3.0) *
             tpow(t, c.alpha));
      break;
    case ScheduleFamily::congestion_bandit:
    case ScheduleFamily::congestion_semibandit: {
      const auto fb = c.family == ScheduleFamily::congestion_bandit
                          ? CongestionFeedbackKind::bandit
                          : CongestionFeedbackKind::semi_bandit;
      v.mu = c.mu.value_or(mu_congestion(T, dims.n, dims.d, fb, c.beta));
      eta = 2.0 / tpow(t, 1.5 * c.alpha);
      rho = 4.0 * std::cbrt(v.mu) * dpow(static_cast<double>(dims.d), 1.0 / 6.0) / tpow(t, c.alpha);
      if (fb == CongestionFeedbackKind::semi_bandit) rho /= std::cbrt(static_cast<double>(dims.n));
      break;
    }
    case ScheduleFamily::custom:
      require(c.eta && c.rho && c.mu, Errc::ConfigError,
              "custom schedule needs explicit eta, rho and mu");
      v.mu = *c.mu;
      break;
  }
  if (c.eta) eta = (*c.eta)(t);
  if (c.rho) rho = (*c.rho)(t);
  require(std::isfinite(eta) && std::isfinite(rho) && eta >= 0.0 && rho >= 0.0, Errc::ConfigError,
          "schedule produced a negative or non-finite value");
  require(v.mu >= 0.0 && v.mu <= 1.0, Errc::ConfigError, "mu must lie in [0,1]");
  v.clamped = eta > 1.0 || rho > 1.0;
  v.eta = clamp1(eta);
  v.rho = clamp1(rho);
  return v;
}

// ---- shared pieces -----------------------------------------------------------------

RngStreams RngStreams::from_seed(std::uint64_t seed, std::size_t num_players) {
  RngStreams out{{}, Rng(derive_stream_seed(seed, kNatureStream))};
  for (std::size_t i = 0; i < num_players; ++i) out.players.emplace_back(derive_stream_seed(seed, i));
  return out;
}

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    require(std::isfinite(x), Errc::NumericalDivergence, std::string(what) + " is not finite");
}

PolicyTable fw_rows(const PolicyTable& pi, const std::vector<double>& d, double eta) {
  const std::size_t m = pi.num_actions();
  std::vector<Simplex> rows;
  for (std::size_t s = 0; s < pi.num_states(); ++s) {
    const std::size_t v = linear_min_vertex(std::span<const double>(d.data() + s * m, m));
    rows.push_back(fw_update(pi.row(s), v, eta));
  }
  return PolicyTable(std::move(rows));
}

PolicyTable projected_rows(const PolicyTable& pi, const std::vector<double>& g, double eta) {
  const std::size_t m = pi.num_actions();
  std::vector<Simplex> rows;
  std::vector<double> v(m);
  for (std::size_t s = 0; s < pi.num_states(); ++s) {
    for (std::size_t a = 0; a < m; ++a) v[a] = pi.row(s)[a] - eta * g[s * m + a];
    rows.push_back(simplex_projection(v));
  }
  return PolicyTable(std::move(rows));
}

MixedProfile explore_pg(const PgState& state, double mu) {
  MixedProfile out;
  for (std::size_t i = 0; i < state.strategy.size(); ++i) {
    const bool scripted = i < state.scripted.size() && state.scripted[i];
    out.push_back(scripted ? state.strategy[i] : mix_with_uniform(state.strategy[i], mu));
  }
  return out;
}

MarkovProfile explore_mpg(const MarkovProfile& strategy, double mu) {
  MarkovProfile out;
  for (const auto& p : strategy) out.push_back(mix_with_uniform(p, mu));
  return out;
}

// Samples the joint action and costs of one round and forms every player's
// one-sample estimate. Shared by the FW and SGD one-shot learners.
std::vector<GradEstimate> pg_round(PgState& state, const NormalFormPotentialGame& game,
                                   PgStepInfo& info) {
  const std::size_t n = game.num_players();
  info.played.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    info.played[i] = state.rng.players[i].categorical(info.explored[i].probs());
  info.costs = game.sample_cost(info.played, state.rng.nature);
  std::vector<GradEstimate> est(n);
  if (state.gradient == PgGradient::exact) {
    const auto grads = all_grad_potential(game, info.explored);
    for (std::size_t i = 0; i < n; ++i) est[i] = {grads[i], EstimatorKind::full_bandit_simplex};
  } else {
    for (std::size_t i = 0; i < n; ++i)
      est[i] = importance_sampling_full(info.costs[i], info.played[i], info.explored[i]);
  }
  return est;
}

bool is_scripted(const PgState& state, std::size_t i) {
  return i < state.scripted.size() && static_cast<bool>(state.scripted[i]);
}

void advance_scripts(PgState& state) {
  ++state.t;
  for (std::size_t i = 0; i < state.strategy.size(); ++i)
    if (is_scripted(state, i)) state.strategy[i] = state.scripted[i](state.t);
}

// Mean of B REINFORCE estimates per player.
std::vector<GradEstimate> mpg_round(MpgState& state, const MarkovGame& game, MpgStepInfo& info) {
  const std::size_t n = game.num_players();
  std::vector<GradEstimate> est(n);
  for (std::size_t i = 0; i < n; ++i)
    est[i] = {std::vector<double>(game.num_states() * game.num_actions(i), 0.0),
              EstimatorKind::reinforce};
  require(state.trajectories >= 1, Errc::ConfigError, "need at least one trajectory per update");
  if (state.gradient == PgGradient::exact) {
    for (std::size_t i = 0; i < n; ++i) est[i].values = exact_policy_gradient(game, info.explored, i);
    return est;
  }
  std::vector<TrajectoryStep> view;
  for (std::size_t b = 0; b < state.trajectories; ++b) {
    const Episode ep = sample_episode(game, info.explored, state.rng);
    info.steps += ep.states.size();
    for (std::size_t i = 0; i < n; ++i) {
      view.clear();
      for (std::size_t h = 0; h < ep.states.size(); ++h)
        view.push_back({ep.states[h], ep.actions[h][i], ep.costs[h][i]});
      const auto one = reinforce_estimate(view, info.explored[i]);
      for (std::size_t k = 0; k < one.values.size(); ++k) est[i].values[k] += one.values[k];
    }
  }
  const double inv = 1.0 / static_cast<double>(state.trajectories);
  for (auto& e : est)
    for (double& v : e.values) v *= inv;
  return est;
}

}  // namespace

// ---- one-shot -----------------------------------------------------------------------

PgState PgState::init(const NormalFormPotentialGame& game, std::uint64_t seed) {
  PgState s;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    s.strategy.push_back(Simplex::uniform(game.num_actions(i)));
    s.recursive.push_back(RecursiveGrad::zeros(game.num_actions(i)));
  }
  s.rng = RngStreams::from_seed(seed, game.num_players());
  return s;
}

PgStepInfo fw_explore_step_pg(PgState& state, const NormalFormPotentialGame& game,
                              const ScheduleValues& schedule) {
  PgStepInfo info;
  info.schedule = schedule;
  info.explored = explore_pg(state, schedule.mu);
  const auto est = pg_round(state, game, info);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    if (is_scripted(state, i)) continue;
    state.recursive[i] = recursive_blend(state.recursive[i], est[i], schedule.rho);
    const std::size_t v = linear_min_vertex(state.recursive[i].d);
    state.strategy[i] = fw_update(state.strategy[i], v, schedule.eta);
  }
  advance_scripts(state);
  return info;
}

PgStepInfo projected_sgd_step(PgState& state, const NormalFormPotentialGame& game,
                              const ScheduleValues& schedule) {
  PgStepInfo info;
  info.schedule = schedule;
  info.explored = explore_pg(state, schedule.mu);
  const auto est = pg_round(state, game, info);
  std::vector<double> v;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    if (is_scripted(state, i)) continue;
    require_finite(est[i].values, "gradient estimate");
    const auto& p = state.strategy[i];
    v.resize(p.size());
    for (std::size_t a = 0; a < p.size(); ++a) v[a] = p[a] - schedule.eta * est[i].values[a];
    state.strategy[i] = simplex_projection(v);
  }
  advance_scripts(state);
  return info;
}

// ---- Markov ----------------------------------------------------------------------------

MpgState MpgState::init(const MarkovGame& game, std::uint64_t seed, std::size_t trajectories) {
  MpgState s;
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    s.strategy.push_back(PolicyTable::uniform(game.num_states(), game.num_actions(i)));
    s.recursive.push_back(RecursiveGrad::zeros(game.num_states() * game.num_actions(i)));
  }
  s.rng = RngStreams::from_seed(seed, game.num_players());
  s.trajectories = trajectories;
  return s;
}

Episode sample_episode(const MarkovGame& game, const MarkovProfile& policy, RngStreams& rng) {
  const std::size_t S = game.num_states();
  const std::size_t n = game.num_players();
  Episode ep;
  std::size_t s = S > 1 ? rng.nature.categorical(game.init_dist()) : 0;
  JointAction joint(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) joint[i] = rng.players[i].categorical(policy[i].row(s).probs());
    ep.states.push_back(s);
    ep.actions.push_back(joint);
    ep.costs.push_back(game.sample_cost(s, joint, rng.nature));
    if (game.horizon_cap() && ep.states.size() >= *game.horizon_cap()) break;
    const std::size_t flat = game.indexer().flat(joint);
    if (rng.nature.bernoulli(game.stop_prob(s, flat))) break;
    if (S > 1) s = rng.nature.categorical(game.transition(s, flat));
  }
  return ep;
}

MpgStepInfo fw_explore_step_mpg(MpgState& state, const MarkovGame& game,
                                const ScheduleValues& schedule) {
  MpgStepInfo info;
  info.schedule = schedule;
  info.explored = explore_mpg(state.strategy, schedule.mu);
  const auto est = mpg_round(state, game, info);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    state.recursive[i] = recursive_blend(state.recursive[i], est[i], schedule.rho);
    state.strategy[i] = fw_rows(state.strategy[i], state.recursive[i].d, schedule.eta);
  }
  ++state.t;
  return info;
}

MpgStepInfo projected_sgd_step(MpgState& state, const MarkovGame& game,
                               const ScheduleValues& schedule) {
  MpgStepInfo info;
  info.schedule = schedule;
  info.explored = explore_mpg(state.strategy, schedule.mu);
  const auto est = mpg_round(state, game, info);
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    require_finite(est[i].values, "gradient estimate");
    state.strategy[i] = projected_rows(state.strategy[i], est[i].values, schedule.eta);
  }
  ++state.t;
  return info;
}

// ---- congestion --------------------------------------------------------------------------

CongestionState CongestionState::init(const CongestionGame& game, std::uint64_t seed,
                                      CongestionFeedbackKind feedback,
                                      std::optional<double> explore_coef) {
  CongestionState s;
  const std::size_t d = game.num_resources();
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    std::vector<Atom> atoms;
    const double w = 1.0 / static_cast<double>(game.num_actions(i));
    for (std::size_t a = 0; a < game.num_actions(i); ++a) atoms.push_back({game.indicator(i, a), w, a});
    s.strategy.push_back(PolytopePoint::from_atoms(std::move(atoms)));
    s.cover.push_back(covering_exploration_point(d, game.action_set(i)));
    s.recursive.push_back(RecursiveGrad::zeros(d));
  }
  s.rng = RngStreams::from_seed(seed, game.num_players());
  s.feedback = feedback;
  s.explore_coef = explore_coef.value_or(static_cast<double>(d));
  return s;
}

CongestionStepInfo fw_explore_step_congestion(CongestionState& state, const CongestionGame& game,
                                              const ScheduleValues& schedule) {
  const std::size_t n = game.num_players();
  CongestionStepInfo info;
  info.schedule = schedule;
  std::vector<std::vector<Atom>> atoms(n);
  info.played.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    info.explored.push_back(
        mix_polytope_exploration(state.strategy[i], schedule.mu, state.cover[i], state.explore_coef));
  }
  std::vector<double> weights;
  for (std::size_t i = 0; i < n; ++i) {
    atoms[i] = caratheodory_decompose(info.explored[i]);
    weights.clear();
    for (const auto& a : atoms[i]) weights.push_back(a.weight);
    const auto& atom = atoms[i][state.rng.players[i].categorical(weights)];
    require(atom.action != kNoAction, Errc::InvalidAction, "sampled atom has no action index");
    info.played[i] = atom.action;
  }
  info.feedback = game.sample(info.played, state.rng.nature);
  for (std::size_t i = 0; i < n; ++i) {
    GradEstimate est;
    if (state.feedback == CongestionFeedbackKind::semi_bandit) {
      est = semi_bandit_estimate(info.feedback.resource[i], game.strategy(i, info.played[i]),
                                 info.explored[i].dense());
    } else {
      const auto mat = second_moment_matrix(atoms[i]);
      est = bandit_linear_estimate(info.feedback.total[i], game.indicator(i, info.played[i]), mat);
    }
    state.recursive[i] = recursive_blend(state.recursive[i], est, schedule.rho);
    const std::size_t v = linear_min_vertex(state.recursive[i].d, game.action_set(i));
    state.strategy[i] = fw_update(state.strategy[i], Atom{game.indicator(i, v), 1.0, v}, schedule.eta);
  }
  ++state.t;
  return info;
}

// ---- snapshots ---------------------------------------------------------------------------

StrategySnapshot snapshot(const MixedProfile& p) {
  StrategySnapshot out;
  for (const auto& s : p) out.push_back({s.probs()});
  return out;
}

StrategySnapshot snapshot(const MarkovProfile& p) {
  StrategySnapshot out;
  for (const auto& table : p) {
    out.emplace_back();
    for (const auto& row : table.rows()) out.back().push_back(row.probs());
  }
  return out;
}

StrategySnapshot snapshot(const std::vector<PolytopePoint>& p) {
  StrategySnapshot out;
  for (const auto& x : p) out.push_back({x.dense()});
  return out;
}

double l1_distance(const StrategySnapshot& a, const StrategySnapshot& b) {
  require(a.size() == b.size(), Errc::ShapeMismatch, "snapshots differ in player count");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].size() == b[i].size(), Errc::ShapeMismatch, "snapshots differ in state count");
    for (std::size_t k = 0; k < a[i].size(); ++k) {
      require(a[i][k].size() == b[i][k].size(), Errc::ShapeMismatch, "snapshots differ in length");
      for (std::size_t j = 0; j < a[i][k].size(); ++j) s += std::abs(a[i][k][j] - b[i][k][j]);
    }
  }
  return s;
}

// ---- runs --------------------------------------------------------------------------------

namespace {

void require_finite(const StrategySnapshot& snap) {
  for (const auto& p : snap)
    for (const auto& row : p) require_finite(row, "iterate");
}

bool keep_row(std::size_t t, std::size_t T, std::size_t every) {
  return t == T + 1 || (t - 1) % every == 0;
}

// Drives any learner through the shared logging loop. `Driver` supplies
// snapshot(), explored(sched), evaluate(iterate?) and step(sched).
template <typename Driver>
RunLog drive(Driver& drv, const LearnerConfig& cfg, const ScheduleDims& dims,
             const RunOptions& options) {
  require(cfg.eval_every >= 1, Errc::ConfigError, "eval_every must be at least 1");
  RunLog log;
  log.num_players = dims.n;
  const bool individual = drv.has_individual_regret();
  RegretAccumulator acc(drv.action_counts());
  std::vector<StrategySnapshot> kept;
  for (std::size_t t = 1; t <= cfg.T + 1; ++t) {
    const ScheduleValues sched = schedule_at(cfg.schedule, dims, t);
    const StrategySnapshot current = drv.snapshot();
    require_finite(current);
    const ProfileEvaluation it = drv.evaluate_iterate();
    const ProfileEvaluation pl = drv.evaluate_explored(sched);
    if (keep_row(t, cfg.T, cfg.eval_every)) {
      LogRow row;
      row.t = t;
      row.eta = sched.eta;
      row.rho = sched.rho;
      row.mu = sched.mu;
      row.nash_gap = it.nash.max;
      row.fw_gap = it.fw_gap;
      row.nash_gap_played = pl.nash.max;
      row.fw_gap_played = pl.fw_gap;
      row.cost = it.costs;
      row.cost_played = pl.costs;
      row.nash_regret = acc.nash();
      for (std::size_t i = 0; i < dims.n; ++i)
        row.regret.push_back(individual ? acc.individual(i)
                                        : std::numeric_limits<double>::quiet_NaN());
      log.rows.push_back(std::move(row));
      kept.push_back(current);
    }
    if (t > cfg.T) break;
    if (individual)
      acc.add(pl.nash.max, pl.costs, pl.grads);
    else
      acc.add(pl.nash.max, pl.costs, std::vector<std::vector<double>>(dims.n));
    if (options.keep_played_history) log.played_history.push_back(drv.explored_snapshot(sched));
    drv.step(sched);
    log.clamped = log.clamped || sched.clamped;
  }
  log.final_strategy = drv.snapshot();
  require_finite(log.final_strategy);
  for (std::size_t r = 0; r < log.rows.size(); ++r)
    log.rows[r].l1_to_final = l1_distance(kept[r], log.final_strategy);
  return log;
}

struct PgDriver {
  const NormalFormPotentialGame& game;
  PgState state;
  LearnerKind learner;

  StrategySnapshot snapshot() const { return fwg::snapshot(state.strategy); }
  StrategySnapshot explored_snapshot(const ScheduleValues& s) const {
    return fwg::snapshot(explore_pg(state, s.mu));
  }
  ProfileEvaluation evaluate_iterate() const { return evaluate_profile(game, state.strategy); }
  ProfileEvaluation evaluate_explored(const ScheduleValues& s) const {
    return evaluate_profile(game, explore_pg(state, s.mu));
  }
  void step(const ScheduleValues& s) {
    if (learner == LearnerKind::fw_explore)
      fw_explore_step_pg(state, game, s);
    else
      projected_sgd_step(state, game, s);
  }
  bool has_individual_regret() const { return true; }
  std::vector<std::size_t> action_counts() const { return game.indexer().counts(); }
};

struct MpgDriver {
  const MarkovGame& game;
  MpgState state;
  LearnerKind learner;

  StrategySnapshot snapshot() const { return fwg::snapshot(state.strategy); }
  StrategySnapshot explored_snapshot(const ScheduleValues& s) const {
    return fwg::snapshot(explore_mpg(state.strategy, s.mu));
  }
  ProfileEvaluation evaluate_iterate() const { return evaluate_profile(game, state.strategy); }
  ProfileEvaluation evaluate_explored(const ScheduleValues& s) const {
    return evaluate_profile(game, explore_mpg(state.strategy, s.mu));
  }
  void step(const ScheduleValues& s) {
    if (learner == LearnerKind::fw_explore)
      fw_explore_step_mpg(state, game, s);
    else
      projected_sgd_step(state, game, s);
  }
  bool has_individual_regret() const { return false; }
  std::vector<std::size_t> action_counts() const {
    return std::vector<std::size_t>(game.num_players(), 0);
  }
};

struct CongestionDriver {
  const CongestionGame& game;
  CongestionState state;

  std::vector<PolytopePoint> explored(const ScheduleValues& s) const {
    std::vector<PolytopePoint> out;
    for (std::size_t i = 0; i < state.strategy.size(); ++i)
      out.push_back(
          mix_polytope_exploration(state.strategy[i], s.mu, state.cover[i], state.explore_coef));
    return out;
  }
  StrategySnapshot snapshot() const { return fwg::snapshot(state.strategy); }
  StrategySnapshot explored_snapshot(const ScheduleValues& s) const {
    return fwg::snapshot(explored(s));
  }
  ProfileEvaluation evaluate_iterate() const {
    return evaluate_profile(game, marginals_of(state.strategy));
  }
  ProfileEvaluation evaluate_explored(const ScheduleValues& s) const {
    return evaluate_profile(game, marginals_of(explored(s)));
  }
  void step(const ScheduleValues& s) { fw_explore_step_congestion(state, game, s); }
  bool has_individual_regret() const { return true; }
  std::vector<std::size_t> action_counts() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < game.num_players(); ++i) out.push_back(game.num_actions(i));
    return out;
  }
};

std::size_t max_count(const JointActionIndexer& idx) {
  return *std::max_element(idx.counts().begin(), idx.counts().end());
}

}  // namespace

RunLog run_learning(const Game& game, const LearnerConfig& cfg, const RunOptions& options) {
  return std::visit(
      [&](const auto& g) -> RunLog {
        using G = std::decay_t<decltype(g)>;
        ScheduleDims dims;
        dims.n = g.num_players();
        dims.horizon = cfg.T;
        if constexpr (std::is_same_v<G, NormalFormPotentialGame>) {
          require(cfg.feedback == FeedbackKind::full_bandit ||
                      cfg.feedback == FeedbackKind::exact_gradient,
                  Errc::ConfigError, "normal-form games take full_bandit or exact_gradient feedback");
          dims.m = max_count(g.indexer());
          PgDriver drv{g, PgState::init(g, cfg.seed), cfg.learner};
          drv.state.gradient = cfg.feedback == FeedbackKind::exact_gradient ? PgGradient::exact
                                                                            : PgGradient::importance_sampling;
          drv.state.scripted.resize(dims.n);
          for (const auto& [i, script] : cfg.scripts) {
            require(i < dims.n, Errc::ConfigError, "scripted player index out of range");
            drv.state.scripted[i] = script;
            drv.state.strategy[i] = script(1);
            require(drv.state.strategy[i].size() == g.num_actions(i), Errc::ConfigError,
                    "script produces the wrong number of actions");
          }
          return drive(drv, cfg, dims, options);
        } else if constexpr (std::is_same_v<G, MarkovGame>) {
          require(cfg.feedback == FeedbackKind::trajectory ||
                      cfg.feedback == FeedbackKind::exact_gradient,
                  Errc::ConfigError, "Markov games take trajectory or exact_gradient feedback");
          require(cfg.scripts.empty(), Errc::ConfigError, "scripted players need a normal-form game");
          dims.m = max_count(g.indexer());
          dims.kappa = g.kappa();
          MpgDriver drv{g, MpgState::init(g, cfg.seed, cfg.trajectories), cfg.learner};
          if (cfg.feedback == FeedbackKind::exact_gradient) drv.state.gradient = PgGradient::exact;
          return drive(drv, cfg, dims, options);
        } else {
          require(cfg.learner == LearnerKind::fw_explore, Errc::ConfigError,
                  "projected SGD needs simplex strategies");
          require(cfg.feedback == FeedbackKind::semi_bandit ||
                      cfg.feedback == FeedbackKind::bandit_linear,
                  Errc::ConfigError, "congestion games take semi_bandit or bandit_linear feedback");
          require(cfg.scripts.empty(), Errc::ConfigError, "scripted players need a normal-form game");
          dims.d = g.num_resources();
          dims.k = g.strategy_size();
          dims.m = 0;
          for (std::size_t i = 0; i < dims.n; ++i) dims.m = std::max(dims.m, g.num_actions(i));
          const auto fb = cfg.feedback == FeedbackKind::semi_bandit ? CongestionFeedbackKind::semi_bandit
                                                                    : CongestionFeedbackKind::bandit;
          CongestionDriver drv{g, CongestionState::init(g, cfg.seed, fb, cfg.explore_coef)};
          return drive(drv, cfg, dims, options);
        }
      },
      game);
}

std::string to_string(LearnerKind k) {
  return k == LearnerKind::fw_explore ? "fw_explore" : "projected_sgd";
}

std::string to_string(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::full_bandit: return "full_bandit";
    case FeedbackKind::semi_bandit: return "semi_bandit";
    case FeedbackKind::bandit_linear: return "bandit_linear";
    case FeedbackKind::trajectory: return "trajectory";
    case FeedbackKind::exact_gradient: return "exact_gradient";
  }
  return "unknown";
}

std::string to_string(ScheduleFamily f) {
  switch (f) {
    case ScheduleFamily::potential_game: return "potential_game";
    case ScheduleFamily::markov_pg: return "markov_pg";
    case ScheduleFamily::congestion_bandit: return "congestion_bandit";
    case ScheduleFamily::congestion_semibandit: return "congestion_semibandit";
    case ScheduleFamily::custom: return "custom";
  }
  return "unknown";
}

}  // namespace fwg
