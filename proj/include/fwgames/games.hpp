#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fwgames/rng.hpp"

namespace fwg {

using JointAction = std::vector<std::size_t>;

/// Exact expectations enumerate joint actions up to this many.
inline constexpr std::size_t kEnumerationCap = 10'000'000;

/// Cost noise. Bernoulli keeps the stored mean exactly; the truncated gaussian
/// is clipped to [0,1] and is therefore biased near the boundary.
struct NoiseModel {
  enum class Kind { deterministic, bernoulli, truncated_gaussian };
  Kind kind = Kind::deterministic;
  double sigma = 0.0;

  double sample(double mean, Rng& rng) const;
};

/// Row-major flattening of joint actions; player 0 is the most significant digit.
class JointActionIndexer {
 public:
  JointActionIndexer() = default;
  explicit JointActionIndexer(std::vector<std::size_t> action_counts);

  std::size_t num_players() const { return counts_.size(); }
  std::size_t total() const { return total_; }
  std::size_t count(std::size_t i) const { return counts_[i]; }
  const std::vector<std::size_t>& counts() const { return counts_; }
  std::size_t stride(std::size_t i) const { return strides_[i]; }

  std::size_t flat(std::span<const std::size_t> joint) const;
  void unflatten(std::size_t flat, std::span<std::size_t> joint) const;
  /// Throws InvalidAction on wrong arity or out-of-range entries.
  void validate(std::span<const std::size_t> joint) const;

 private:
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

/// Normal-form game with costs in [0,1] and an exact potential. The potential is
/// either supplied or reconstructed by telescoping player costs from the all-zero
/// profile; verify_potential_property checks whichever is stored.
class NormalFormPotentialGame {
 public:
  NormalFormPotentialGame(std::vector<std::size_t> action_counts,
                          std::vector<std::vector<double>> costs,
                          std::optional<std::vector<double>> potential = std::nullopt,
                          NoiseModel noise = {});

  std::size_t num_players() const { return indexer_.num_players(); }
  std::size_t num_actions(std::size_t i) const { return indexer_.count(i); }
  std::size_t max_actions() const;
  const JointActionIndexer& indexer() const { return indexer_; }
  const NoiseModel& noise() const { return noise_; }
  bool has_explicit_potential() const { return explicit_potential_; }

  double cost(std::size_t i, std::size_t flat) const { return costs_[i][flat]; }
  double cost(std::size_t i, std::span<const std::size_t> joint) const;
  double potential(std::size_t flat) const { return potential_[flat]; }
  double potential(std::span<const std::size_t> joint) const;
  const std::vector<double>& cost_table(std::size_t i) const { return costs_[i]; }
  const std::vector<double>& potential_table() const { return potential_; }

  std::vector<double> sample_cost(std::span<const std::size_t> joint, Rng& rng) const;

 private:
  JointActionIndexer indexer_;
  std::vector<std::vector<double>> costs_;
  std::vector<double> potential_;
  bool explicit_potential_ = false;
  NoiseModel noise_;
};

using ResourceSet = std::vector<std::size_t>;

/// Realized feedback of one congestion round.
struct CongestionFeedback {
  std::vector<std::size_t> loads;              // N_e(a)
  std::vector<std::vector<double>> resource;   // [player][e]; observed only for e in a_i, else 0
  std::vector<double> total;                   // [player] sum over own resources
};

/// Congestion game: every strategy uses exactly k of the d resources and the
/// per-resource cost depends only on the load.
class CongestionGame {
 public:
  CongestionGame(std::size_t num_players, std::size_t num_resources,
                 std::vector<std::vector<ResourceSet>> action_sets,
                 std::vector<std::vector<double>> facility_costs, NoiseModel noise = {});

  std::size_t num_players() const { return n_; }
  std::size_t num_resources() const { return d_; }
  std::size_t strategy_size() const { return k_; }
  std::size_t num_actions(std::size_t i) const { return action_sets_[i].size(); }
  const std::vector<ResourceSet>& action_set(std::size_t i) const { return action_sets_[i]; }
  const ResourceSet& strategy(std::size_t i, std::size_t a) const { return action_sets_[i][a]; }
  /// 0/1 indicator over resources of strategy a of player i.
  std::vector<double> indicator(std::size_t i, std::size_t a) const;
  /// c̄(e, l); l = 0 is stored but never charged.
  double facility_cost(std::size_t e, std::size_t load) const { return facility_costs_[e][load]; }
  const std::vector<std::vector<double>>& facility_costs() const { return facility_costs_; }
  const NoiseModel& noise() const { return noise_; }
  JointActionIndexer indexer() const;

  std::vector<std::size_t> loads(std::span<const std::size_t> joint) const;
  double cost(std::size_t i, std::span<const std::size_t> joint) const;
  CongestionFeedback sample(std::span<const std::size_t> joint, Rng& rng) const;

  /// Enumerated normal form with the Rosenthal potential attached.
  NormalFormPotentialGame to_normal_form() const;

 private:
  void validate_joint(std::span<const std::size_t> joint) const;

  std::size_t n_;
  std::size_t d_;
  std::size_t k_ = 0;
  std::vector<std::vector<ResourceSet>> action_sets_;
  std::vector<std::vector<double>> facility_costs_;
  NoiseModel noise_;
};

/// Stochastic game with per-(s,a) stopping probabilities. Tables are indexed by
/// state and flat joint action.
class MarkovGame {
 public:
  MarkovGame(std::size_t num_states, std::vector<std::size_t> action_counts,
             std::vector<std::vector<std::vector<double>>> costs,        // [i][s][joint]
             std::vector<std::vector<std::vector<double>>> transitions,  // [s][joint][s']
             std::vector<std::vector<double>> stop_prob,                 // [s][joint]
             std::vector<double> init_dist, std::optional<std::size_t> horizon_cap = std::nullopt,
             NoiseModel noise = {}, double cost_scale = 1.0);

  std::size_t num_states() const { return num_states_; }
  std::size_t num_players() const { return indexer_.num_players(); }
  std::size_t num_actions(std::size_t i) const { return indexer_.count(i); }
  std::size_t max_actions() const;
  const JointActionIndexer& indexer() const { return indexer_; }

  double cost(std::size_t i, std::size_t s, std::size_t flat) const { return costs_[i][s][flat]; }
  std::span<const double> transition(std::size_t s, std::size_t flat) const {
    return transitions_[s][flat];
  }
  double stop_prob(std::size_t s, std::size_t flat) const { return stop_prob_[s][flat]; }
  /// κ = min over (s,a) of the stopping probability.
  double kappa() const { return kappa_; }
  const std::vector<double>& init_dist() const { return init_dist_; }
  std::optional<std::size_t> horizon_cap() const { return horizon_cap_; }
  const NoiseModel& noise() const { return noise_; }
  /// Factor by which the stored (normalized) costs were divided; 1 when the
  /// costs were given directly in [0,1].
  double cost_scale() const { return cost_scale_; }

  MarkovGame with_horizon_cap(std::optional<std::size_t> cap) const;

  std::vector<double> sample_cost(std::size_t s, std::span<const std::size_t> joint,
                                  Rng& rng) const;

 private:
  std::size_t num_states_;
  JointActionIndexer indexer_;
  std::vector<std::vector<std::vector<double>>> costs_;
  std::vector<std::vector<std::vector<double>>> transitions_;
  std::vector<std::vector<double>> stop_prob_;
  std::vector<double> init_dist_;
  std::optional<std::size_t> horizon_cap_;
  NoiseModel noise_;
  double cost_scale_ = 1.0;
  double kappa_ = 1.0;
};

using Game = std::variant<NormalFormPotentialGame, CongestionGame, MarkovGame>;

/// Product distribution over pure actions, one vector per player.
using ActionDistributions = std::vector<std::vector<double>>;

double rosenthal_potential(const CongestionGame& game, std::span<const std::size_t> joint);

/// E_{a~π}[Φ(a)] by enumeration; throws EnumerationTooLarge above the cap.
double expected_potential(const NormalFormPotentialGame& game, const ActionDistributions& profile,
                          std::size_t cap = kEnumerationCap);
double expected_potential(const CongestionGame& game, const ActionDistributions& profile,
                          std::size_t cap = kEnumerationCap);

struct PotentialReport {
  double max_residual = 0.0;
  bool passed = false;
};

inline constexpr double kPotentialTolerance = 1e-12;

/// max over players and unilateral deviations of |Δc_i − ΔΦ|.
PotentialReport verify_potential_property(const NormalFormPotentialGame& game);
PotentialReport verify_potential_property(const CongestionGame& game);

/// Calls fn(flat, joint) for every joint action in row-major order.
template <typename Fn>
void for_each_joint(const JointActionIndexer& idx, Fn&& fn) {
  JointAction joint(idx.num_players(), 0);
  for (std::size_t flat = 0; flat < idx.total(); ++flat) {
    fn(flat, static_cast<const JointAction&>(joint));
    for (std::size_t p = idx.num_players(); p-- > 0;) {
      if (++joint[p] < idx.count(p)) break;
      joint[p] = 0;
    }
  }
}

}  // namespace fwg
