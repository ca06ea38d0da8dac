#include "fwgames/generators.hpp"

#include <algorithm>
#include <cmath>

#include "fwgames/error.hpp"

namespace fwg {

NormalFormPotentialGame random_potential_game(const std::vector<std::size_t>& action_counts, Rng& rng,
                                              NoiseModel noise) {
  const JointActionIndexer idx(action_counts);
  const std::size_t n = idx.num_players();
  std::vector<double> phi(idx.total());
  for (double& p : phi) p = rng.uniform();
  std::vector<std::vector<double>> costs(n, std::vector<double>(idx.total()));
  for (std::size_t i = 0; i < n; ++i) {
    // h_i depends on a_{-i} only: one draw per opponent profile.
    const std::size_t others = idx.total() / idx.count(i);
    std::vector<double> h(others);
    for (double& x : h) x = rng.uniform();
    for_each_joint(idx, [&](std::size_t flat, const JointAction& a) {
      const std::size_t key = (flat / (idx.stride(i) * idx.count(i))) * idx.stride(i) + flat % idx.stride(i);
      (void)a;
      costs[i][flat] = 0.5 * (phi[flat] + h[key]);
    });
  }
  for (double& p : phi) p *= 0.5;
  return NormalFormPotentialGame(action_counts, std::move(costs), std::move(phi), noise);
}

CongestionGame random_congestion_game(std::size_t n, std::size_t d, std::size_t k,
                                      std::size_t num_strategies, Rng& rng, NoiseModel noise) {
  require(k >= 1 && k <= d, Errc::InvalidArgument, "need 1 <= k <= d");
  // All k-subsets in lexicographic order.
  std::vector<ResourceSet> all;
  std::vector<std::size_t> pick(k);
  for (std::size_t j = 0; j < k; ++j) pick[j] = j;
  for (;;) {
    all.push_back(pick);
    std::size_t j = k;
    while (j-- > 0 && pick[j] == d - k + j) {}
    if (j == static_cast<std::size_t>(-1)) break;
    ++pick[j];
    for (std::size_t l = j + 1; l < k; ++l) pick[l] = pick[l - 1] + 1;
  }
  // Partial Fisher-Yates for the chosen subsets.
  const std::size_t take = std::min(std::max<std::size_t>(num_strategies, 1), all.size());
  for (std::size_t j = 0; j < take; ++j) {
    const std::size_t r = j + static_cast<std::size_t>(rng.uniform() * static_cast<double>(all.size() - j));
    std::swap(all[j], all[std::min(r, all.size() - 1)]);
  }
  std::vector<ResourceSet> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take));
  std::vector<bool> covered(d, false);
  for (const auto& s : chosen)
    for (std::size_t e : s) covered[e] = true;
  for (std::size_t j = take; j < all.size(); ++j) {
    bool helps = false;
    for (std::size_t e : all[j]) helps = helps || !covered[e];
    if (!helps) continue;
    chosen.push_back(all[j]);
    for (std::size_t e : all[j]) covered[e] = true;
  }
  std::vector<std::vector<double>> fc(d, std::vector<double>(n + 1));
  for (auto& row : fc)
    for (double& c : row) c = rng.uniform();
  return CongestionGame(n, d, std::vector<std::vector<ResourceSet>>(n, chosen), std::move(fc), noise);
}

MarkovGame random_markov_game(std::size_t num_states, const std::vector<std::size_t>& action_counts,
                              double stop_prob, Rng& rng, NoiseModel noise) {
  const JointActionIndexer idx(action_counts);
  const std::size_t S = num_states, J = idx.total(), n = idx.num_players();
  std::vector<std::vector<std::vector<double>>> costs(n, std::vector<std::vector<double>>(S, std::vector<double>(J)));
  for (auto& per_state : costs)
    for (auto& row : per_state)
      for (double& c : row) c = rng.uniform();
  std::vector<std::vector<std::vector<double>>> trans(S, std::vector<std::vector<double>>(J, std::vector<double>(S)));
  for (auto& per_joint : trans)
    for (auto& row : per_joint) {
      double sum = 0.0;
      for (double& p : row) sum += (p = -std::log(1.0 - rng.uniform()));
      for (double& p : row) p /= sum;
      // Push the rounding residual into the largest entry so rows sum to 1.
      double acc = 0.0;
      std::size_t big = 0;
      for (std::size_t t = 0; t < S; ++t) {
        acc += row[t];
        if (row[t] > row[big]) big = t;
      }
      row[big] += 1.0 - acc;
    }
  std::vector<double> init(S);
  double sum = 0.0;
  for (double& p : init) sum += (p = -std::log(1.0 - rng.uniform()));
  for (double& p : init) p /= sum;
  return MarkovGame(S, action_counts, std::move(costs), std::move(trans),
                    std::vector<std::vector<double>>(S, std::vector<double>(J, stop_prob)),
                    std::move(init), std::nullopt, noise);
}

}  // namespace fwg
