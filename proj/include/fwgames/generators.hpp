#pragma once

#include <cstddef>
#include <vector>

#include "fwgames/games.hpp"
#include "fwgames/rng.hpp"

namespace fwg {

/// c_i(a) = (Φ(a) + h_i(a_{-i}))/2 with Φ, h_i uniform in [0,1]; Φ/2 is stored
/// as the explicit potential.
NormalFormPotentialGame random_potential_game(const std::vector<std::size_t>& action_counts, Rng& rng,
                                              NoiseModel noise = {});

/// Every player gets the same action set: `num_strategies` distinct k-subsets
/// (or all of them when fewer exist), extended if needed so every resource is
/// covered. Facility costs are uniform in [0,1].
CongestionGame random_congestion_game(std::size_t n, std::size_t d, std::size_t k,
                                      std::size_t num_strategies, Rng& rng, NoiseModel noise = {});

/// Uniform costs, Dirichlet(1) transition rows and a constant stopping probability.
MarkovGame random_markov_game(std::size_t num_states, const std::vector<std::size_t>& action_counts,
                              double stop_prob, Rng& rng, NoiseModel noise = {});

}  // namespace fwg
