#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fwgames/games.hpp"
#include "fwgames/strategies.hpp"

namespace fwg {

struct NashGap {
  double max = 0.0;
  std::vector<double> per_player;
};

// ---- one-shot games, exact enumeration ------------------------------------

/// c_i(π) = ⟨π_i, c_i(·, π_{-i})⟩.
double expected_cost(const NormalFormPotentialGame& game, const MixedProfile& profile, std::size_t i,
                     std::size_t cap = kEnumerationCap);
/// a_i ↦ c_i(a_i, π_{-i}), which is also ∇_{π_i}Φ(π).
std::vector<double> grad_potential(const NormalFormPotentialGame& game, const MixedProfile& profile,
                                   std::size_t i, std::size_t cap = kEnumerationCap);
/// grad_potential for every player in one pass over the joint actions.
std::vector<std::vector<double>> all_grad_potential(const NormalFormPotentialGame& game,
                                                    const MixedProfile& profile,
                                                    std::size_t cap = kEnumerationCap);
NashGap nash_gap(const NormalFormPotentialGame& game, const MixedProfile& profile,
                 std::size_t cap = kEnumerationCap);
/// G(π) = Σ_i [⟨π_i, g_i⟩ − min g_i].
double fw_gap(const NormalFormPotentialGame& game, const MixedProfile& profile,
              std::size_t cap = kEnumerationCap);

/// Largest observed ‖∇Φ(π) − ∇Φ(π′)‖₂ / ‖π − π′‖₂ over random profile pairs.
/// A diagnostic estimate of the smoothness constant, never a bound.
double estimate_smoothness(const NormalFormPotentialGame& game, std::size_t samples, Rng& rng);

// ---- congestion games ------------------------------------------------------

/// Per-player resource marginals x_{i,e}.
using Marginals = std::vector<std::vector<double>>;

Marginals marginals_of(const CongestionGame& game, const MixedProfile& profile);
Marginals marginals_of(const std::vector<PolytopePoint>& points);

/// Exact pmf of a sum of independent Bernoulli(probs[j]).
std::vector<double> poisson_binomial_pmf(std::span<const double> probs);

/// ψ(x) = Σ_e E[Σ_{j=0}^{L_e} c̄(e,j)], L_e ~ PoissonBinomial(x_{·,e}).
double fractional_potential(const CongestionGame& game, const Marginals& x);
/// ∂ψ/∂x_{i,e} = E[c̄(e, L_e^{-i} + 1)]; this is also player i's expected cost
/// of resource e when using it.
std::vector<double> grad_fractional_potential(const CongestionGame& game, const Marginals& x,
                                              std::size_t i);

/// Per-action expected costs c_i(a, π_{-i}) over the action set. Uses the
/// factored marginal path, which is exact for product profiles.
std::vector<double> grad_potential(const CongestionGame& game, const MixedProfile& profile,
                                   std::size_t i);
/// Same quantity by brute-force enumeration of joint actions.
std::vector<double> grad_potential_enumerated(const CongestionGame& game,
                                              const MixedProfile& profile, std::size_t i,
                                              std::size_t cap = kEnumerationCap);
double expected_cost(const CongestionGame& game, const MixedProfile& profile, std::size_t i);
/// Always the factored path: Σ_e x_{i,e}·E[c̄(e, 1 + N_e^{-i})].
double expected_cost_factored(const CongestionGame& game, const Marginals& x, std::size_t i);
NashGap nash_gap(const CongestionGame& game, const MixedProfile& profile);
double fw_gap(const CongestionGame& game, const MixedProfile& profile);
/// Per-action costs of every player against the fractional profile x.
std::vector<std::vector<double>> action_costs(const CongestionGame& game, const Marginals& x);

/// Gaps of a fractional profile; the inner minimization runs over the action set.
NashGap nash_gap(const CongestionGame& game, const Marginals& x);
double fw_gap(const CongestionGame& game, const Marginals& x);

// ---- Markov games ----------------------------------------------------------

struct ValueTable {
  std::vector<std::vector<double>> v;               // [i][s]
  std::vector<std::vector<std::vector<double>>> q;  // [i][s][a_i], opponents marginalized
  std::vector<double> v_init;                       // [i] V_i(μ0)
};

struct BestResponse {
  double value = 0.0;                // V_i at μ0 under the greedy policy
  std::vector<double> state_values;  // [s]
  PolicyTable policy;                // deterministic
  std::size_t sweeps = 0;
};

struct OccupancyMeasure {
  std::vector<double> visits;  // d^π(s; μ0)
  double expected_length = 0.0;
  /// max_s d(s)/μ0(s); infinite when μ0 has zeros. Diagnostic only.
  double mismatch = 0.0;
};

inline constexpr double kValueIterationTolerance = 1e-10;
inline constexpr std::size_t kValueIterationMaxSweeps = 1'000'000;

ValueTable value_function(const MarkovGame& game, const MarkovProfile& profile);
BestResponse best_response_value(const MarkovGame& game, const MarkovProfile& profile, std::size_t i,
                                 double tol = kValueIterationTolerance,
                                 std::size_t max_sweeps = kValueIterationMaxSweeps);
OccupancyMeasure occupancy_measure(const MarkovGame& game, const MarkovProfile& profile);
/// g[s][a] = d^π(s; μ0)·Q̄_i(s,a); flattened row-major like the REINFORCE estimate.
std::vector<double> exact_policy_gradient(const MarkovGame& game, const MarkovProfile& profile,
                                          std::size_t i);
NashGap nash_gap(const MarkovGame& game, const MarkovProfile& profile);
/// Σ_i [⟨π_i, g_i⟩ − Σ_s min_a g_i(s,a)] with g_i the exact policy gradient.
double fw_gap(const MarkovGame& game, const MarkovProfile& profile);

/// Player i's view of the game with opponents fixed: per-(s, a_i) expected cost
/// and continuation kernel (1 − κ)·P marginalized over opponents.
struct InducedMdp {
  std::vector<std::vector<double>> cost;                 // [s][a]
  std::vector<std::vector<std::vector<double>>> next;    // [s][a][s'], substochastic
};
std::vector<InducedMdp> induced_mdps(const MarkovGame& game, const MarkovProfile& profile);

// ---- combined -----------------------------------------------------------------

/// Everything the run log needs about one profile from a single pass.
struct ProfileEvaluation {
  NashGap nash;
  double fw_gap = 0.0;
  std::vector<double> costs;               // c_i(π), or V_i(μ0) for Markov games
  std::vector<std::vector<double>> grads;  // per-action costs; empty for Markov games
};

ProfileEvaluation evaluate_profile(const NormalFormPotentialGame& game, const MixedProfile& profile);
ProfileEvaluation evaluate_profile(const CongestionGame& game, const Marginals& x);
ProfileEvaluation evaluate_profile(const MarkovGame& game, const MarkovProfile& profile);

// ---- regret -----------------------------------------------------------------

struct RegretSeries {
  std::vector<double> nash;                     // cumulative, index t-1
  std::vector<std::vector<double>> individual;  // [i][t-1]
};

/// Running Nash regret and best-fixed-action individual regret.
class RegretAccumulator {
 public:
  explicit RegretAccumulator(std::vector<std::size_t> action_counts);

  /// grads[i][a] = c_i(a, π_{-i}^t); costs[i] = c_i(π^t).
  void add(double nash_gap, std::span<const double> costs,
           const std::vector<std::vector<double>>& grads);

  double nash() const { return nash_; }
  double individual(std::size_t i) const;
  std::size_t steps() const { return steps_; }

 private:
  double nash_ = 0.0;
  std::vector<double> cum_cost_;
  std::vector<std::vector<double>> cum_grad_;
  std::size_t steps_ = 0;
};

RegretSeries regret_accumulators(const NormalFormPotentialGame& game,
                                 std::span<const MixedProfile> played);
RegretSeries regret_accumulators(const CongestionGame& game, std::span<const MixedProfile> played);

}  // namespace fwg
