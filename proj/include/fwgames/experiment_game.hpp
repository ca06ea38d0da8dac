#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fwgames/games.hpp"

namespace fwg {

/// Two-state facility game: players pick one of the facilities in a "safe" and a
/// "distancing" state. Crowding a facility beyond `crowd_threshold` sends the
/// game to distancing; it returns to safe once no facility holds more than
/// `spread_threshold` players.
struct ExperimentConfig {
  std::size_t num_players = 8;
  /// Per-facility weights in facility order A, B, C, ...; smaller is preferred.
  std::vector<double> weights{0.8, 0.6, 0.4, 0.2};
  double penalty = 100.0;
  /// multiplicative: distancing cost = penalty·raw. additive: raw plus the
  /// constant (penalty − 1)·max weight, so both modes share the same top cost.
  enum class Penalty { multiplicative, additive } penalty_mode = Penalty::multiplicative;
  /// Unset thresholds default to n/2 and n/4.
  std::optional<std::size_t> crowd_threshold;
  std::optional<std::size_t> spread_threshold;
  /// Continuation 0.99 per step by default; literal_stopping makes 0.99 the
  /// stopping probability instead.
  double continuation = 0.99;
  bool literal_stopping = false;
  std::optional<std::size_t> horizon_cap = 20;
  NoiseModel noise{};
};

inline constexpr std::size_t kSafeState = 0;
inline constexpr std::size_t kDistancingState = 1;

/// Raw (unscaled) cost of a facility with weight w at load l among n players:
/// w·(n − l + 1)/n, so sharing a facility is cheaper.
double experiment_raw_cost(double weight, std::size_t load, std::size_t n);

/// Costs are divided by the largest raw cost (penalty·max weight), which is
/// stored as the game's cost_scale.
MarkovGame build_experiment_game(const ExperimentConfig& config = {});

/// Next state of the experiment game given per-facility loads (deterministic).
std::size_t experiment_next_state(const ExperimentConfig& config, std::size_t state,
                                  const std::vector<std::size_t>& loads);

}  // namespace fwg
