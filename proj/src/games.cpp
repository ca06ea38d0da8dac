#include "fwgames/games.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fwgames/error.hpp"

namespace fwg {

namespace {

void check_unit_interval(double v, const char* what) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, Errc::InvalidArgument,
          std::string(what) + " must lie in [0,1], got " + std::to_string(v));
}

}  // namespace

double NoiseModel::sample(double mean, Rng& rng) const {
  switch (kind) {
    case Kind::deterministic:
      return mean;
    case Kind::bernoulli:
      return rng.bernoulli(mean) ? 1.0 : 0.0;
    case Kind::truncated_gaussian:
      return std::clamp(mean + sigma * rng.normal(), 0.0, 1.0);
  }
  return mean;
}

JointActionIndexer::JointActionIndexer(std::vector<std::size_t> action_counts)
    : counts_(std::move(action_counts)), strides_(counts_.size(), 1) {
  require(!counts_.empty(), Errc::InvalidArgument, "game needs at least one player");
  total_ = 1;
  for (std::size_t p = counts_.size(); p-- > 0;) {
    require(counts_[p] >= 1, Errc::InvalidArgument, "every player needs at least one action");
    strides_[p] = total_;
    require(total_ <= (std::size_t{1} << 52) / counts_[p], Errc::EnumerationTooLarge,
            "joint action space overflows");
    total_ *= counts_[p];
  }
}

std::size_t JointActionIndexer::flat(std::span<const std::size_t> joint) const {
  std::size_t f = 0;
  for (std::size_t p = 0; p < counts_.size(); ++p) f += joint[p] * strides_[p];
  return f;
}

void JointActionIndexer::unflatten(std::size_t flat, std::span<std::size_t> joint) const {
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    joint[p] = flat / strides_[p];
    flat %= strides_[p];
  }
}

void JointActionIndexer::validate(std::span<const std::size_t> joint) const {
  require(joint.size() == counts_.size(), Errc::InvalidAction,
          "joint action has " + std::to_string(joint.size()) + " entries, expected " +
              std::to_string(counts_.size()));
  for (std::size_t p = 0; p < counts_.size(); ++p) {
    require(joint[p] < counts_[p], Errc::InvalidAction,
            "action " + std::to_string(joint[p]) + " out of range for player " + std::to_string(p));
  }
}

// ---------------------------------------------------------------------------

NormalFormPotentialGame::NormalFormPotentialGame(std::vector<std::size_t> action_counts,
                                                 std::vector<std::vector<double>> costs,
                                                 std::optional<std::vector<double>> potential,
                                                 NoiseModel noise)
    : indexer_(std::move(action_counts)), costs_(std::move(costs)), noise_(noise) {
  const std::size_t n = indexer_.num_players();
  require(costs_.size() == n, Errc::ShapeMismatch, "one cost table per player required");
  for (const auto& table : costs_) {
    require(table.size() == indexer_.total(), Errc::ShapeMismatch,
            "cost table size does not match the joint action space");
    for (double c : table) check_unit_interval(c, "cost");
  }
  if (potential) {
    require(potential->size() == indexer_.total(), Errc::ShapeMismatch,
            "potential table size does not match the joint action space");
    potential_ = std::move(*potential);
    explicit_potential_ = true;
    return;
  }
  // Telescoping from the all-zero profile: switch players 0..n-1 one at a time.
  potential_.assign(indexer_.total(), 0.0);
  JointAction path(n);
  for_each_joint(indexer_, [&](std::size_t flat, const JointAction& joint) {
    std::fill(path.begin(), path.end(), 0);
    double phi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double before = costs_[i][indexer_.flat(path)];
      path[i] = joint[i];
      phi += costs_[i][indexer_.flat(path)] - before;
    }
    potential_[flat] = phi;
  });
}

std::size_t NormalFormPotentialGame::max_actions() const {
  return *std::max_element(indexer_.counts().begin(), indexer_.counts().end());
}

double NormalFormPotentialGame::cost(std::size_t i, std::span<const std::size_t> joint) const {
  indexer_.validate(joint);
  return costs_[i][indexer_.flat(joint)];
}

double NormalFormPotentialGame::potential(std::span<const std::size_t> joint) const {
  indexer_.validate(joint);
  return potential_[indexer_.flat(joint)];
}

std::vector<double> NormalFormPotentialGame::sample_cost(std::span<const std::size_t> joint,
                                                         Rng& rng) const {
  indexer_.validate(joint);
  const std::size_t f = indexer_.flat(joint);
  std::vector<double> out(num_players());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = noise_.sample(costs_[i][f], rng);
  return out;
}

// ---------------------------------------------------------------------------

CongestionGame::CongestionGame(std::size_t num_players, std::size_t num_resources,
                               std::vector<std::vector<ResourceSet>> action_sets,
                               std::vector<std::vector<double>> facility_costs, NoiseModel noise)
    : n_(num_players),
      d_(num_resources),
      action_sets_(std::move(action_sets)),
      facility_costs_(std::move(facility_costs)),
      noise_(noise) {
  require(n_ >= 1 && d_ >= 1, Errc::InvalidArgument, "congestion game needs n >= 1 and d >= 1");
  require(action_sets_.size() == n_, Errc::ShapeMismatch, "one action set per player required");
  require(facility_costs_.size() == d_, Errc::ShapeMismatch, "facility costs must have d rows");
  for (const auto& row : facility_costs_) {
    require(row.size() == n_ + 1, Errc::ShapeMismatch, "facility cost rows must have n+1 entries");
    for (double c : row) check_unit_interval(c, "facility cost");
  }
  bool first = true;
  for (std::size_t i = 0; i < n_; ++i) {
    require(!action_sets_[i].empty(), Errc::InvalidArgument, "empty action set");
    std::vector<bool> covered(d_, false);
    for (auto& s : action_sets_[i]) {
      std::sort(s.begin(), s.end());
      require(std::adjacent_find(s.begin(), s.end()) == s.end(), Errc::InvalidArgument,
              "strategy lists a resource twice");
      require(!s.empty() && s.back() < d_, Errc::InvalidArgument, "strategy resource out of range");
      if (first) {
        k_ = s.size();
        first = false;
      }
      require(s.size() == k_, Errc::InvalidArgument,
              "every strategy must use exactly k = " + std::to_string(k_) + " resources");
      for (std::size_t e : s) covered[e] = true;
    }
    for (std::size_t e = 0; e < d_; ++e) {
      require(covered[e], Errc::NotCoverable,
              "resource " + std::to_string(e) + " appears in no strategy of player " +
                  std::to_string(i));
    }
  }
}

std::vector<double> CongestionGame::indicator(std::size_t i, std::size_t a) const {
  std::vector<double> v(d_, 0.0);
  for (std::size_t e : action_sets_[i][a]) v[e] = 1.0;
  return v;
}

JointActionIndexer CongestionGame::indexer() const {
  std::vector<std::size_t> counts(n_);
  for (std::size_t i = 0; i < n_; ++i) counts[i] = action_sets_[i].size();
  return JointActionIndexer(std::move(counts));
}

void CongestionGame::validate_joint(std::span<const std::size_t> joint) const {
  require(joint.size() == n_, Errc::InvalidAction, "joint action has wrong arity");
  for (std::size_t i = 0; i < n_; ++i) {
    require(joint[i] < action_sets_[i].size(), Errc::InvalidAction,
            "action " + std::to_string(joint[i]) + " out of range for player " + std::to_string(i));
  }
}

std::vector<std::size_t> CongestionGame::loads(std::span<const std::size_t> joint) const {
  validate_joint(joint);
  std::vector<std::size_t> load(d_, 0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t e : action_sets_[i][joint[i]]) ++load[e];
  return load;
}

double CongestionGame::cost(std::size_t i, std::span<const std::size_t> joint) const {
  const auto load = loads(joint);
  double c = 0.0;
  for (std::size_t e : action_sets_[i][joint[i]]) c += facility_costs_[e][load[e]];
  return c;
}

CongestionFeedback CongestionGame::sample(std::span<const std::size_t> joint, Rng& rng) const {
  CongestionFeedback fb;
  fb.loads = loads(joint);
  fb.resource.assign(n_, std::vector<double>(d_, 0.0));
  fb.total.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t e : action_sets_[i][joint[i]]) {
      const double c = noise_.sample(facility_costs_[e][fb.loads[e]], rng);
      fb.resource[i][e] = c;
      fb.total[i] += c;
    }
  }
  return fb;
}

NormalFormPotentialGame CongestionGame::to_normal_form() const {
  const JointActionIndexer idx = indexer();
  require(idx.total() <= kEnumerationCap, Errc::EnumerationTooLarge,
          "normal form of this congestion game exceeds the enumeration cap");
  // Normal-form costs must lie in [0,1]; strategies with k resources cost up to k.
  const double scale = static_cast<double>(k_);
  std::vector<std::vector<double>> costs(n_, std::vector<double>(idx.total()));
  std::vector<double> potential(idx.total());
  for_each_joint(idx, [&](std::size_t flat, const JointAction& joint) {
    for (std::size_t i = 0; i < n_; ++i) costs[i][flat] = cost(i, joint) / scale;
    potential[flat] = rosenthal_potential(*this, joint) / scale;
  });
  return NormalFormPotentialGame(idx.counts(), std::move(costs), std::move(potential), noise_);
}

// ---------------------------------------------------------------------------

MarkovGame::MarkovGame(std::size_t num_states, std::vector<std::size_t> action_counts,
                       std::vector<std::vector<std::vector<double>>> costs,
                       std::vector<std::vector<std::vector<double>>> transitions,
                       std::vector<std::vector<double>> stop_prob, std::vector<double> init_dist,
                       std::optional<std::size_t> horizon_cap, NoiseModel noise, double cost_scale)
    : num_states_(num_states),
      indexer_(std::move(action_counts)),
      costs_(std::move(costs)),
      transitions_(std::move(transitions)),
      stop_prob_(std::move(stop_prob)),
      init_dist_(std::move(init_dist)),
      horizon_cap_(horizon_cap),
      noise_(noise),
      cost_scale_(cost_scale) {
  const std::size_t S = num_states_;
  const std::size_t J = indexer_.total();
  require(S >= 1, Errc::InvalidArgument, "Markov game needs at least one state");
  require(costs_.size() == num_players(), Errc::ShapeMismatch, "one cost table per player required");
  for (const auto& per_state : costs_) {
    require(per_state.size() == S, Errc::ShapeMismatch, "cost table must have one row per state");
    for (const auto& row : per_state) {
      require(row.size() == J, Errc::ShapeMismatch, "cost row must cover every joint action");
      for (double c : row) check_unit_interval(c, "cost");
    }
  }
  require(transitions_.size() == S && stop_prob_.size() == S, Errc::ShapeMismatch,
          "transition and stopping tables must have one entry per state");
  kappa_ = 1.0;
  for (std::size_t s = 0; s < S; ++s) {
    require(transitions_[s].size() == J && stop_prob_[s].size() == J, Errc::ShapeMismatch,
            "transition and stopping tables must cover every joint action");
    for (std::size_t a = 0; a < J; ++a) {
      const auto& row = transitions_[s][a];
      require(row.size() == S, Errc::ShapeMismatch, "transition row must have one entry per state");
      double sum = 0.0;
      for (double p : row) {
        require(p >= 0.0 && std::isfinite(p), Errc::InvalidArgument, "negative transition probability");
        sum += p;
      }
      require(std::abs(sum - 1.0) <= 1e-12, Errc::InvalidArgument,
              "transition row does not sum to 1");
      const double k = stop_prob_[s][a];
      require(k > 0.0 && k <= 1.0, Errc::InvalidArgument, "stopping probability must lie in (0,1]");
      kappa_ = std::min(kappa_, k);
    }
  }
  require(init_dist_.size() == S, Errc::ShapeMismatch, "initial distribution must cover every state");
  double sum = 0.0;
  for (double p : init_dist_) {
    require(p >= 0.0, Errc::InvalidArgument, "negative initial probability");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= 1e-12, Errc::InvalidArgument, "initial distribution must sum to 1");
  require(!horizon_cap_ || *horizon_cap_ >= 1, Errc::InvalidArgument, "horizon cap must be >= 1");
  require(cost_scale_ > 0.0 && std::isfinite(cost_scale_), Errc::InvalidArgument,
          "cost scale must be positive");
}

std::size_t MarkovGame::max_actions() const {
  return *std::max_element(indexer_.counts().begin(), indexer_.counts().end());
}

MarkovGame MarkovGame::with_horizon_cap(std::optional<std::size_t> cap) const {
  MarkovGame copy = *this;
  require(!cap || *cap >= 1, Errc::InvalidArgument, "horizon cap must be >= 1");
  copy.horizon_cap_ = cap;
  return copy;
}

std::vector<double> MarkovGame::sample_cost(std::size_t s, std::span<const std::size_t> joint,
                                            Rng& rng) const {
  require(s < num_states_, Errc::InvalidAction, "state out of range");
  indexer_.validate(joint);
  const std::size_t f = indexer_.flat(joint);
  std::vector<double> out(num_players());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = noise_.sample(costs_[i][s][f], rng);
  return out;
}

// ---------------------------------------------------------------------------

double rosenthal_potential(const CongestionGame& game, std::span<const std::size_t> joint) {
  const auto load = game.loads(joint);
  double phi = 0.0;
  for (std::size_t e = 0; e < game.num_resources(); ++e)
    for (std::size_t l = 1; l <= load[e]; ++l) phi += game.facility_cost(e, l);
  return phi;
}

namespace {

template <typename PotentialFn>
double expected_potential_impl(const JointActionIndexer& idx, const ActionDistributions& profile,
                               std::size_t cap, PotentialFn&& phi) {
  require(profile.size() == idx.num_players(), Errc::ShapeMismatch,
          "profile must have one distribution per player");
  for (std::size_t i = 0; i < profile.size(); ++i)
    require(profile[i].size() == idx.count(i), Errc::ShapeMismatch,
            "distribution length must match the action count");
  require(idx.total() <= cap, Errc::EnumerationTooLarge,
          std::to_string(idx.total()) + " joint actions exceed the cap " + std::to_string(cap));
  double acc = 0.0;
  for_each_joint(idx, [&](std::size_t flat, const JointAction& joint) {
    double w = 1.0;
    for (std::size_t i = 0; i < joint.size() && w != 0.0; ++i) w *= profile[i][joint[i]];
    if (w != 0.0) acc += w * phi(flat, joint);
  });
  return acc;
}

}  // namespace

double expected_potential(const NormalFormPotentialGame& game, const ActionDistributions& profile,
                          std::size_t cap) {
  return expected_potential_impl(game.indexer(), profile, cap,
                                 [&](std::size_t flat, const JointAction&) { return game.potential(flat); });
}

double expected_potential(const CongestionGame& game, const ActionDistributions& profile,
                          std::size_t cap) {
  return expected_potential_impl(
      game.indexer(), profile, cap,
      [&](std::size_t, const JointAction& joint) { return rosenthal_potential(game, joint); });
}

namespace {

template <typename CostFn, typename PotentialFn>
PotentialReport verify_impl(const JointActionIndexer& idx, CostFn&& cost, PotentialFn&& phi) {
  PotentialReport report;
  JointAction dev;
  for_each_joint(idx, [&](std::size_t flat, const JointAction& joint) {
    dev = joint;
    for (std::size_t i = 0; i < idx.num_players(); ++i) {
      for (std::size_t alt = joint[i] + 1; alt < idx.count(i); ++alt) {
        dev[i] = alt;
        const std::size_t f2 = flat + (alt - joint[i]) * idx.stride(i);
        const double dc = cost(i, flat, joint) - cost(i, f2, dev);
        const double dphi = phi(flat, joint) - phi(f2, dev);
        report.max_residual = std::max(report.max_residual, std::abs(dc - dphi));
      }
      dev[i] = joint[i];
    }
  });
  report.passed = report.max_residual <= kPotentialTolerance;
  return report;
}

}  // namespace

PotentialReport verify_potential_property(const NormalFormPotentialGame& game) {
  return verify_impl(
      game.indexer(),
      [&](std::size_t i, std::size_t flat, const JointAction&) { return game.cost(i, flat); },
      [&](std::size_t flat, const JointAction&) { return game.potential(flat); });
}

PotentialReport verify_potential_property(const CongestionGame& game) {
  const JointActionIndexer idx = game.indexer();
  return verify_impl(
      idx, [&](std::size_t i, std::size_t, const JointAction& joint) { return game.cost(i, joint); },
      [&](std::size_t, const JointAction& joint) { return rosenthal_potential(game, joint); });
}

}  // namespace fwg
