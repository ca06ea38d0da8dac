#include "fwgames/experiment_game.hpp"

#include <algorithm>
#include <cmath>

#include "fwgames/error.hpp"

namespace fwg {

double experiment_raw_cost(double weight, std::size_t load, std::size_t n) {
  return weight * static_cast<double>(n - load + 1) / static_cast<double>(n);
}

std::size_t experiment_next_state(const ExperimentConfig& config, std::size_t state,
                                  const std::vector<std::size_t>& loads) {
  const std::size_t n = config.num_players;
  const std::size_t crowd = config.crowd_threshold.value_or(n / 2);
  const std::size_t spread = config.spread_threshold.value_or(n / 4);
  const std::size_t peak = *std::max_element(loads.begin(), loads.end());
  if (state == kSafeState) return peak > crowd ? kDistancingState : kSafeState;
  return peak <= spread ? kSafeState : kDistancingState;
}

MarkovGame build_experiment_game(const ExperimentConfig& config) {
  const std::size_t n = config.num_players;
  const std::size_t F = config.weights.size();
  require(n >= 1, Errc::ConfigError, "experiment needs at least one player");
  require(F >= 1, Errc::ConfigError, "experiment needs at least one facility");
  for (double w : config.weights)
    require(w > 0.0 && std::isfinite(w), Errc::ConfigError, "facility weights must be positive");
  require(config.penalty >= 1.0 && std::isfinite(config.penalty), Errc::ConfigError,
          "penalty multiplier must be at least 1");
  require(config.continuation >= 0.0 && config.continuation < 1.0, Errc::ConfigError,
          "continuation probability must lie in [0,1)");

  const double stop = config.literal_stopping ? config.continuation : 1.0 - config.continuation;
  require(stop > 0.0, Errc::ConfigError, "stopping probability must be positive");
  const double wmax = *std::max_element(config.weights.begin(), config.weights.end());
  const double scale = config.penalty * wmax;

  JointActionIndexer idx(std::vector<std::size_t>(n, F));
  const std::size_t J = idx.total();
  std::vector<std::vector<std::vector<double>>> costs(n, std::vector<std::vector<double>>(2, std::vector<double>(J)));
  std::vector<std::vector<std::vector<double>>> trans(2, std::vector<std::vector<double>>(J, std::vector<double>(2, 0.0)));
  std::vector<std::vector<double>> stop_prob(2, std::vector<double>(J, stop));
  std::vector<std::size_t> loads(F);
  for_each_joint(idx, [&](std::size_t flat, const JointAction& a) {
    std::fill(loads.begin(), loads.end(), 0);
    for (std::size_t f : a) ++loads[f];
    for (std::size_t i = 0; i < n; ++i) {
      const double raw = experiment_raw_cost(config.weights[a[i]], loads[a[i]], n);
      costs[i][kSafeState][flat] = raw / scale;
      const double dist = config.penalty_mode == ExperimentConfig::Penalty::additive
                              ? raw + (config.penalty - 1.0) * wmax
                              : raw * config.penalty;
      costs[i][kDistancingState][flat] = std::min(1.0, dist / scale);
    }
    for (std::size_t s = 0; s < 2; ++s) trans[s][flat][experiment_next_state(config, s, loads)] = 1.0;
  });
  return MarkovGame(2, std::vector<std::size_t>(n, F), std::move(costs), std::move(trans),
                    std::move(stop_prob), {1.0, 0.0}, config.horizon_cap, config.noise, scale);
}

}  // namespace fwg
