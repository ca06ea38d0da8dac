#include "fwgames/evaluation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fwgames/error.hpp"

namespace fwg {

namespace {

void check_profile_shape(const JointActionIndexer& idx, const MixedProfile& profile) {
  require(profile.size() == idx.num_players(), Errc::ShapeMismatch, "profile has wrong player count");
  for (std::size_t i = 0; i < profile.size(); ++i)
    require(profile[i].size() == idx.count(i), Errc::ShapeMismatch,
            "profile of player " + std::to_string(i) + " has wrong length");
}

void check_cap(const JointActionIndexer& idx, std::size_t cap) {
  if (idx.total() > cap)
    throw Error(Errc::EnumerationTooLarge,
                std::to_string(idx.total()) + " joint actions exceed the cap of " + std::to_string(cap));
}

// Fills weights[i] = Π_{j≠i} probs[j][joint[j]] using prefix and suffix products.
// Returns the full product.
template <typename ProbFn>
double leave_one_out(std::size_t n, ProbFn&& prob, std::vector<double>& prefix,
                     std::vector<double>& weights) {
  prefix.assign(n + 1, 1.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * prob(j);
  double suffix = 1.0;
  weights.resize(n);
  for (std::size_t j = n; j-- > 0;) {
    weights[j] = prefix[j] * suffix;
    suffix *= prob(j);
  }
  return prefix[n];
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double min_of(std::span<const double> v) { return *std::min_element(v.begin(), v.end()); }

NashGap gaps_from(const std::vector<std::vector<double>>& grads,
                  const std::vector<const std::vector<double>*>& probs) {
  NashGap out;
  out.per_player.resize(grads.size());
  for (std::size_t i = 0; i < grads.size(); ++i) {
    out.per_player[i] = dot(*probs[i], grads[i]) - min_of(grads[i]);
    out.max = i == 0 ? out.per_player[i] : std::max(out.max, out.per_player[i]);
  }
  return out;
}

double fw_from(const std::vector<std::vector<double>>& grads,
               const std::vector<const std::vector<double>*>& probs) {
  double g = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i) g += dot(*probs[i], grads[i]) - min_of(grads[i]);
  return g;
}

std::vector<const std::vector<double>*> prob_ptrs(const MixedProfile& profile) {
  std::vector<const std::vector<double>*> out;
  for (const auto& p : profile) out.push_back(&p.probs());
  return out;
}

}  // namespace

// ---- one-shot ----------------------------------------------------------------

std::vector<std::vector<double>> all_grad_potential(const NormalFormPotentialGame& game,
                                                    const MixedProfile& profile, std::size_t cap) {
  const auto& idx = game.indexer();
  check_profile_shape(idx, profile);
  check_cap(idx, cap);
  const std::size_t n = idx.num_players();
  std::vector<std::vector<double>> grads(n);
  for (std::size_t i = 0; i < n; ++i) grads[i].assign(idx.count(i), 0.0);
  std::vector<double> prefix, w;
  for_each_joint(idx, [&](std::size_t flat, const JointAction& a) {
    leave_one_out(n, [&](std::size_t j) { return profile[j][a[j]]; }, prefix, w);
    for (std::size_t i = 0; i < n; ++i)
      if (w[i] != 0.0) grads[i][a[i]] += w[i] * game.cost(i, flat);
  });
  return grads;
}

std::vector<double> grad_potential(const NormalFormPotentialGame& game, const MixedProfile& profile,
                                   std::size_t i, std::size_t cap) {
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  return all_grad_potential(game, profile, cap)[i];
}

double expected_cost(const NormalFormPotentialGame& game, const MixedProfile& profile, std::size_t i,
                     std::size_t cap) {
  const auto g = grad_potential(game, profile, i, cap);
  return dot(profile[i].probs(), g);
}

NashGap nash_gap(const NormalFormPotentialGame& game, const MixedProfile& profile, std::size_t cap) {
  return gaps_from(all_grad_potential(game, profile, cap), prob_ptrs(profile));
}

double fw_gap(const NormalFormPotentialGame& game, const MixedProfile& profile, std::size_t cap) {
  return fw_from(all_grad_potential(game, profile, cap), prob_ptrs(profile));
}

double estimate_smoothness(const NormalFormPotentialGame& game, std::size_t samples, Rng& rng) {
  auto random_profile = [&] {
    MixedProfile p;
    for (std::size_t i = 0; i < game.num_players(); ++i) {
      std::vector<double> v(game.num_actions(i));
      double s = 0.0;
      for (double& x : v) s += (x = -std::log(1.0 - rng.uniform()));
      for (double& x : v) x /= s;
      p.emplace_back(std::move(v));
    }
    return p;
  };
  double best = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto a = random_profile();
    const auto b = random_profile();
    const auto ga = all_grad_potential(game, a);
    const auto gb = all_grad_potential(game, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a[i].size(); ++j) {
        num += (ga[i][j] - gb[i][j]) * (ga[i][j] - gb[i][j]);
        den += (a[i][j] - b[i][j]) * (a[i][j] - b[i][j]);
      }
    if (den > 0.0) best = std::max(best, std::sqrt(num / den));
  }
  return best;
}

// ---- congestion ----------------------------------------------------------------

Marginals marginals_of(const CongestionGame& game, const MixedProfile& profile) {
  require(profile.size() == game.num_players(), Errc::ShapeMismatch, "profile has wrong player count");
  Marginals x(game.num_players(), std::vector<double>(game.num_resources(), 0.0));
  for (std::size_t i = 0; i < profile.size(); ++i) {
    require(profile[i].size() == game.num_actions(i), Errc::ShapeMismatch,
            "profile of player " + std::to_string(i) + " has wrong length");
    for (std::size_t a = 0; a < profile[i].size(); ++a)
      for (std::size_t e : game.strategy(i, a)) x[i][e] += profile[i][a];
  }
  return x;
}

Marginals marginals_of(const std::vector<PolytopePoint>& points) {
  Marginals x;
  for (const auto& p : points) x.push_back(p.dense());
  return x;
}

std::vector<double> poisson_binomial_pmf(std::span<const double> probs) {
  std::vector<double> pmf(probs.size() + 1, 0.0);
  pmf[0] = 1.0;
  for (std::size_t j = 0; j < probs.size(); ++j) {
    const double p = probs[j];
    require(p >= 0.0 && p <= 1.0, Errc::InvalidArgument, "probability outside [0,1]");
    for (std::size_t l = j + 1; l > 0; --l) pmf[l] = pmf[l] * (1.0 - p) + pmf[l - 1] * p;
    pmf[0] *= 1.0 - p;
  }
  return pmf;
}

namespace {

void check_marginals(const CongestionGame& game, const Marginals& x) {
  require(x.size() == game.num_players(), Errc::ShapeMismatch, "marginals have wrong player count");
  for (const auto& row : x) {
    require(row.size() == game.num_resources(), Errc::ShapeMismatch,
            "marginal row has wrong resource count");
    for (double v : row)
      require(v >= -1e-12 && v <= 1.0 + 1e-12, Errc::InvalidArgument, "marginal outside [0,1]");
  }
}

std::vector<double> column(const Marginals& x, std::size_t e, std::size_t skip) {
  std::vector<double> out;
  out.reserve(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    if (j != skip) out.push_back(std::clamp(x[j][e], 0.0, 1.0));
  return out;
}

}  // namespace

double fractional_potential(const CongestionGame& game, const Marginals& x) {
  check_marginals(game, x);
  double psi = 0.0;
  for (std::size_t e = 0; e < game.num_resources(); ++e) {
    const auto pmf = poisson_binomial_pmf(column(x, e, kNoAction));
    double cum = 0.0;
    for (std::size_t l = 0; l < pmf.size(); ++l) {
      cum += game.facility_cost(e, l);
      psi += pmf[l] * cum;
    }
  }
  return psi;
}

std::vector<double> grad_fractional_potential(const CongestionGame& game, const Marginals& x,
                                              std::size_t i) {
  check_marginals(game, x);
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  std::vector<double> g(game.num_resources(), 0.0);
  for (std::size_t e = 0; e < g.size(); ++e) {
    const auto pmf = poisson_binomial_pmf(column(x, e, i));
    for (std::size_t l = 0; l < pmf.size(); ++l) g[e] += pmf[l] * game.facility_cost(e, l + 1);
  }
  return g;
}

std::vector<std::vector<double>> action_costs(const CongestionGame& game, const Marginals& x) {
  std::vector<std::vector<double>> out(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    const auto ge = grad_fractional_potential(game, x, i);
    out[i].resize(game.num_actions(i));
    for (std::size_t a = 0; a < game.num_actions(i); ++a)
      for (std::size_t e : game.strategy(i, a)) out[i][a] += ge[e];
  }
  return out;
}

double expected_cost_factored(const CongestionGame& game, const Marginals& x, std::size_t i) {
  const auto ge = grad_fractional_potential(game, x, i);
  return dot(x[i], ge);
}

std::vector<double> grad_potential(const CongestionGame& game, const MixedProfile& profile,
                                   std::size_t i) {
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  const auto x = marginals_of(game, profile);
  const auto ge = grad_fractional_potential(game, x, i);
  std::vector<double> g(game.num_actions(i), 0.0);
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t e : game.strategy(i, a)) g[a] += ge[e];
  return g;
}

std::vector<double> grad_potential_enumerated(const CongestionGame& game,
                                              const MixedProfile& profile, std::size_t i,
                                              std::size_t cap) {
  const auto idx = game.indexer();
  check_profile_shape(idx, profile);
  check_cap(idx, cap);
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  const std::size_t n = idx.num_players();
  std::vector<double> g(idx.count(i), 0.0);
  std::vector<double> prefix, w;
  for_each_joint(idx, [&](std::size_t, const JointAction& a) {
    leave_one_out(n, [&](std::size_t j) { return profile[j][a[j]]; }, prefix, w);
    if (w[i] != 0.0) g[a[i]] += w[i] * game.cost(i, a);
  });
  return g;
}

double expected_cost(const CongestionGame& game, const MixedProfile& profile, std::size_t i) {
  return dot(profile[i].probs(), grad_potential(game, profile, i));
}

NashGap nash_gap(const CongestionGame& game, const MixedProfile& profile) {
  const auto costs = action_costs(game, marginals_of(game, profile));
  return gaps_from(costs, prob_ptrs(profile));
}

double fw_gap(const CongestionGame& game, const MixedProfile& profile) {
  const auto costs = action_costs(game, marginals_of(game, profile));
  return fw_from(costs, prob_ptrs(profile));
}

NashGap nash_gap(const CongestionGame& game, const Marginals& x) {
  NashGap out;
  const auto costs = action_costs(game, x);
  out.per_player.resize(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    out.per_player[i] = expected_cost_factored(game, x, i) - min_of(costs[i]);
    out.max = i == 0 ? out.per_player[i] : std::max(out.max, out.per_player[i]);
  }
  return out;
}

double fw_gap(const CongestionGame& game, const Marginals& x) {
  // ⟨x_i, ∇ψ_i⟩ − min over vertices; the vertex minimum is the cheapest action.
  double g = 0.0;
  const auto costs = action_costs(game, x);
  for (std::size_t i = 0; i < game.num_players(); ++i)
    g += expected_cost_factored(game, x, i) - min_of(costs[i]);
  return g;
}

// ---- Markov ----------------------------------------------------------------------

namespace {

void check_markov_profile(const MarkovGame& game, const MarkovProfile& profile) {
  require(profile.size() == game.num_players(), Errc::ShapeMismatch,
          "policy profile has wrong player count");
  for (std::size_t i = 0; i < profile.size(); ++i)
    require(profile[i].num_states() == game.num_states() &&
                profile[i].num_actions() == game.num_actions(i),
            Errc::ShapeMismatch, "policy table of player " + std::to_string(i) + " has wrong shape");
}

// Σ_a π(a|s)·next[s][a] as a dense matrix and the matching expected cost.
void policy_kernel(const InducedMdp& mdp, const PolicyTable& pi, Eigen::MatrixXd& m,
                   Eigen::VectorXd& r) {
  const auto S = static_cast<Eigen::Index>(mdp.cost.size());
  m = Eigen::MatrixXd::Zero(S, S);
  r = Eigen::VectorXd::Zero(S);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& row = pi.row(static_cast<std::size_t>(s));
    for (std::size_t a = 0; a < row.size(); ++a) {
      const double p = row[a];
      if (p == 0.0) continue;
      r(s) += p * mdp.cost[s][a];
      for (Eigen::Index t = 0; t < S; ++t) m(s, t) += p * mdp.next[s][a][t];
    }
  }
}

Eigen::VectorXd solve_guarded(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  require(lu.isInvertible(), Errc::NumericalDivergence, "singular linear system");
  Eigen::VectorXd x = lu.solve(b);
  require(x.allFinite(), Errc::NumericalDivergence, "non-finite linear solve");
  return x;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> evaluate(const InducedMdp& mdp, const PolicyTable& pi) {
  Eigen::MatrixXd m;
  Eigen::VectorXd r;
  policy_kernel(mdp, pi, m, r);
  const auto S = m.rows();
  return to_std(solve_guarded(Eigen::MatrixXd::Identity(S, S) - m, r));
}

std::vector<std::vector<double>> q_values(const InducedMdp& mdp, const std::vector<double>& v) {
  std::vector<std::vector<double>> q(mdp.cost.size());
  for (std::size_t s = 0; s < q.size(); ++s) {
    q[s].resize(mdp.cost[s].size());
    for (std::size_t a = 0; a < q[s].size(); ++a) q[s][a] = mdp.cost[s][a] + dot(mdp.next[s][a], v);
  }
  return q;
}

double at_init(const MarkovGame& game, const std::vector<double>& v) { return dot(game.init_dist(), v); }

std::vector<double> occupancy_from(const MarkovGame& game, const InducedMdp& mdp,
                                   const PolicyTable& pi) {
  Eigen::MatrixXd m;
  Eigen::VectorXd r;
  policy_kernel(mdp, pi, m, r);
  const auto S = m.rows();
  const Eigen::Map<const Eigen::VectorXd> mu0(game.init_dist().data(), S);
  return to_std(solve_guarded(Eigen::MatrixXd::Identity(S, S) - m.transpose(), mu0));
}

std::vector<double> policy_gradient_from(const MarkovGame& game, const InducedMdp& mdp,
                                         const PolicyTable& pi, const std::vector<double>& visits) {
  const auto q = q_values(mdp, evaluate(mdp, pi));
  const std::size_t m = pi.num_actions();
  std::vector<double> g(game.num_states() * m);
  for (std::size_t s = 0; s < game.num_states(); ++s)
    for (std::size_t a = 0; a < m; ++a) g[s * m + a] = visits[s] * q[s][a];
  return g;
}

BestResponse best_response_from(const MarkovGame& game, const InducedMdp& mdp, double tol,
                                std::size_t max_sweeps) {
  const std::size_t S = game.num_states();
  std::vector<double> v(S, 0.0), next(S);
  BestResponse out;
  for (;;) {
    require(out.sweeps < max_sweeps, Errc::NoConvergence, "value iteration did not converge");
    ++out.sweeps;
    double diff = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < mdp.cost[s].size(); ++a)
        best = std::min(best, mdp.cost[s][a] + dot(mdp.next[s][a], v));
      next[s] = best;
      diff = std::max(diff, std::abs(best - v[s]));
    }
    v.swap(next);
    if (diff <= tol) break;
  }
  std::vector<Simplex> rows;
  const auto q = q_values(mdp, v);
  for (std::size_t s = 0; s < S; ++s) {
    std::size_t arg = 0;
    for (std::size_t a = 1; a < q[s].size(); ++a)
      if (q[s][a] < q[s][arg]) arg = a;
    rows.push_back(Simplex::vertex(q[s].size(), arg));
  }
  out.policy = PolicyTable(std::move(rows));
  out.state_values = evaluate(mdp, out.policy);
  out.value = at_init(game, out.state_values);
  return out;
}

}  // namespace

std::vector<InducedMdp> induced_mdps(const MarkovGame& game, const MarkovProfile& profile) {
  check_markov_profile(game, profile);
  const auto& idx = game.indexer();
  const std::size_t n = idx.num_players();
  const std::size_t S = game.num_states();
  std::vector<InducedMdp> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].cost.assign(S, std::vector<double>(idx.count(i), 0.0));
    out[i].next.assign(S, std::vector<std::vector<double>>(idx.count(i), std::vector<double>(S, 0.0)));
  }
  std::vector<double> prefix, w;
  for (std::size_t s = 0; s < S; ++s) {
    for_each_joint(idx, [&](std::size_t flat, const JointAction& a) {
      leave_one_out(n, [&](std::size_t j) { return profile[j].row(s)[a[j]]; }, prefix, w);
      const double cont = 1.0 - game.stop_prob(s, flat);
      const auto p = game.transition(s, flat);
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] == 0.0) continue;
        out[i].cost[s][a[i]] += w[i] * game.cost(i, s, flat);
        if (cont == 0.0) continue;
        auto& row = out[i].next[s][a[i]];
        for (std::size_t t = 0; t < S; ++t) row[t] += w[i] * cont * p[t];
      }
    });
  }
  return out;
}

ValueTable value_function(const MarkovGame& game, const MarkovProfile& profile) {
  const auto mdps = induced_mdps(game, profile);
  ValueTable out;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    auto v = evaluate(mdps[i], profile[i]);
    out.q.push_back(q_values(mdps[i], v));
    out.v_init.push_back(at_init(game, v));
    out.v.push_back(std::move(v));
  }
  return out;
}

BestResponse best_response_value(const MarkovGame& game, const MarkovProfile& profile, std::size_t i,
                                 double tol, std::size_t max_sweeps) {
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  return best_response_from(game, induced_mdps(game, profile)[i], tol, max_sweeps);
}

OccupancyMeasure occupancy_measure(const MarkovGame& game, const MarkovProfile& profile) {
  const auto mdps = induced_mdps(game, profile);
  OccupancyMeasure out;
  out.visits = occupancy_from(game, mdps.front(), profile.front());
  for (std::size_t s = 0; s < out.visits.size(); ++s) {
    out.expected_length += out.visits[s];
    const double mu = game.init_dist()[s];
    const double ratio = mu > 0.0 ? out.visits[s] / mu : std::numeric_limits<double>::infinity();
    out.mismatch = std::max(out.mismatch, ratio);
  }
  return out;
}

std::vector<double> exact_policy_gradient(const MarkovGame& game, const MarkovProfile& profile,
                                          std::size_t i) {
  require(i < game.num_players(), Errc::InvalidArgument, "player index out of range");
  const auto mdps = induced_mdps(game, profile);
  const auto visits = occupancy_from(game, mdps.front(), profile.front());
  return policy_gradient_from(game, mdps[i], profile[i], visits);
}

NashGap nash_gap(const MarkovGame& game, const MarkovProfile& profile) {
  const auto mdps = induced_mdps(game, profile);
  NashGap out;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    const double v = at_init(game, evaluate(mdps[i], profile[i]));
    const auto br = best_response_from(game, mdps[i], kValueIterationTolerance,
                                       kValueIterationMaxSweeps);
    out.per_player.push_back(v - br.value);
    out.max = i == 0 ? out.per_player[i] : std::max(out.max, out.per_player[i]);
  }
  return out;
}

double fw_gap(const MarkovGame& game, const MarkovProfile& profile) {
  const auto mdps = induced_mdps(game, profile);
  const auto visits = occupancy_from(game, mdps.front(), profile.front());
  double total = 0.0;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    const auto g = policy_gradient_from(game, mdps[i], profile[i], visits);
    const std::size_t m = profile[i].num_actions();
    for (std::size_t s = 0; s < game.num_states(); ++s) {
      const std::span<const double> row(g.data() + s * m, m);
      total += dot(profile[i].row(s).probs(), row) - min_of(row);
    }
  }
  return total;
}

// ---- combined ------------------------------------------------------------------

ProfileEvaluation evaluate_profile(const NormalFormPotentialGame& game, const MixedProfile& profile) {
  ProfileEvaluation out;
  out.grads = all_grad_potential(game, profile);
  const auto probs = prob_ptrs(profile);
  out.nash = gaps_from(out.grads, probs);
  out.fw_gap = fw_from(out.grads, probs);
  for (std::size_t i = 0; i < profile.size(); ++i) out.costs.push_back(dot(profile[i].probs(), out.grads[i]));
  return out;
}

ProfileEvaluation evaluate_profile(const CongestionGame& game, const Marginals& x) {
  ProfileEvaluation out;
  out.grads = action_costs(game, x);
  out.nash.per_player.resize(game.num_players());
  for (std::size_t i = 0; i < game.num_players(); ++i) {
    out.costs.push_back(expected_cost_factored(game, x, i));
    out.nash.per_player[i] = out.costs[i] - min_of(out.grads[i]);
    out.nash.max = i == 0 ? out.nash.per_player[i] : std::max(out.nash.max, out.nash.per_player[i]);
    out.fw_gap += out.nash.per_player[i];
  }
  return out;
}

ProfileEvaluation evaluate_profile(const MarkovGame& game, const MarkovProfile& profile) {
  const auto mdps = induced_mdps(game, profile);
  const auto visits = occupancy_from(game, mdps.front(), profile.front());
  ProfileEvaluation out;
  for (std::size_t i = 0; i < mdps.size(); ++i) {
    const double v = at_init(game, evaluate(mdps[i], profile[i]));
    const auto br = best_response_from(game, mdps[i], kValueIterationTolerance,
                                       kValueIterationMaxSweeps);
    out.costs.push_back(v);
    out.nash.per_player.push_back(v - br.value);
    out.nash.max = i == 0 ? out.nash.per_player[i] : std::max(out.nash.max, out.nash.per_player[i]);
    const auto g = policy_gradient_from(game, mdps[i], profile[i], visits);
    const std::size_t m = profile[i].num_actions();
    for (std::size_t s = 0; s < game.num_states(); ++s) {
      const std::span<const double> row(g.data() + s * m, m);
      out.fw_gap += dot(profile[i].row(s).probs(), row) - min_of(row);
    }
  }
  return out;
}

// ---- regret ------------------------------------------------------------------------

RegretAccumulator::RegretAccumulator(std::vector<std::size_t> action_counts)
    : cum_cost_(action_counts.size(), 0.0) {
  for (std::size_t m : action_counts) cum_grad_.emplace_back(m, 0.0);
}

void RegretAccumulator::add(double gap, std::span<const double> costs,
                            const std::vector<std::vector<double>>& grads) {
  require(costs.size() == cum_cost_.size() && grads.size() == cum_grad_.size(), Errc::ShapeMismatch,
          "regret update has wrong player count");
  nash_ += gap;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    require(grads[i].size() == cum_grad_[i].size(), Errc::ShapeMismatch,
            "regret update has wrong action count");
    cum_cost_[i] += costs[i];
    for (std::size_t a = 0; a < grads[i].size(); ++a) cum_grad_[i][a] += grads[i][a];
  }
  ++steps_;
}

double RegretAccumulator::individual(std::size_t i) const {
  return cum_cost_[i] - min_of(cum_grad_[i]);
}

namespace {

template <typename GradFn>
RegretSeries accumulate(std::vector<std::size_t> counts, std::span<const MixedProfile> played,
                        GradFn&& grads_of) {
  RegretSeries out;
  out.individual.resize(counts.size());
  RegretAccumulator acc(counts);
  for (const auto& profile : played) {
    const auto grads = grads_of(profile);
    std::vector<double> costs(grads.size());
    for (std::size_t i = 0; i < grads.size(); ++i) costs[i] = dot(profile[i].probs(), grads[i]);
    acc.add(gaps_from(grads, prob_ptrs(profile)).max, costs, grads);
    out.nash.push_back(acc.nash());
    for (std::size_t i = 0; i < grads.size(); ++i) out.individual[i].push_back(acc.individual(i));
  }
  return out;
}

}  // namespace

RegretSeries regret_accumulators(const NormalFormPotentialGame& game,
                                 std::span<const MixedProfile> played) {
  return accumulate(game.indexer().counts(), played,
                    [&](const MixedProfile& p) { return all_grad_potential(game, p); });
}

RegretSeries regret_accumulators(const CongestionGame& game, std::span<const MixedProfile> played) {
  std::vector<std::size_t> counts;
  for (std::size_t i = 0; i < game.num_players(); ++i) counts.push_back(game.num_actions(i));
  return accumulate(counts, played,
                    [&](const MixedProfile& p) { return action_costs(game, marginals_of(game, p)); });
}

}  // namespace fwg
