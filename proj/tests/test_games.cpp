#include <gtest/gtest.h>

#include <cmath>

#include "fwgames/error.hpp"
#include "fwgames/evaluation.hpp"
#include "fwgames/experiment_game.hpp"
#include "fwgames/games.hpp"
#include "fwgames/generators.hpp"
#include "oracles.hpp"

using namespace fwg;

namespace {

NormalFormPotentialGame two_by_two(std::vector<double> c0, std::vector<double> c1,
                                   NoiseModel noise = {}) {
  return NormalFormPotentialGame({2, 2}, {std::move(c0), std::move(c1)}, std::nullopt, noise);
}

// one resource e0 plus a spare e1, both players may only use {e0} or {e1}
CongestionGame shared_facility() {
  return CongestionGame(2, 2, {{{0}, {1}}, {{0}, {1}}}, {{0.0, 0.3, 0.5}, {0.0, 0.2, 0.9}});
}

}  // namespace

TEST(JointActionIndexer, RoundTripsEveryJointAction) {
  JointActionIndexer idx({2, 3, 4});
  EXPECT_EQ(idx.total(), 24u);
  JointAction back(3);
  for_each_joint(idx, [&](std::size_t flat, const JointAction& a) {
    EXPECT_EQ(idx.flat(a), flat);
    idx.unflatten(flat, back);
    EXPECT_EQ(back, a);
  });
  EXPECT_THROW(idx.validate(std::vector<std::size_t>{0, 3, 0}), Error);
  EXPECT_THROW(idx.validate(std::vector<std::size_t>{0, 0}), Error);
}

TEST(SampleCost, DeterministicReturnsTheMean) {
  const auto g = two_by_two({0.3, 0.1, 0.2, 0.4}, {0.3, 0.1, 0.2, 0.4});
  Rng rng(1);
  EXPECT_DOUBLE_EQ(g.sample_cost(std::vector<std::size_t>{0, 0}, rng)[0], 0.3);
}

TEST(SampleCost, BernoulliAtTheEndpointsIsDegenerate) {
  const auto g = two_by_two({0.0, 1.0, 0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}, {NoiseModel::Kind::bernoulli});
  Rng rng(2);
  for (int k = 0; k < 1000; ++k) {
    EXPECT_EQ(g.sample_cost(std::vector<std::size_t>{0, 0}, rng)[0], 0.0);
    EXPECT_EQ(g.sample_cost(std::vector<std::size_t>{0, 1}, rng)[0], 1.0);
  }
}

TEST(SampleCost, BernoulliMeanMatchesStoredCost) {
  const auto g = two_by_two({0.4, 0.4, 0.4, 0.4}, {0.4, 0.4, 0.4, 0.4}, {NoiseModel::Kind::bernoulli});
  Rng rng(3);
  const int N = 100000;
  double s = 0.0;
  for (int k = 0; k < N; ++k) s += g.sample_cost(std::vector<std::size_t>{1, 0}, rng)[0];
  const double se = std::sqrt(0.4 * 0.6 / N);
  EXPECT_NEAR(s / N, 0.4, 4 * se);
}

TEST(SampleCost, AlwaysInUnitIntervalForEveryNoiseKind) {
  const NoiseModel kinds[] = {{NoiseModel::Kind::deterministic},
                              {NoiseModel::Kind::bernoulli},
                              {NoiseModel::Kind::truncated_gaussian, 0.5}};
  Rng rng(4);
  for (const auto& noise : kinds) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto g = random_potential_game({3, 2, 2}, rng, noise);
      for (int k = 0; k < 500; ++k) {
        const JointAction a{rng.categorical(std::vector<double>{1, 1, 1}),
                            rng.categorical(std::vector<double>{1, 1}),
                            rng.categorical(std::vector<double>{1, 1})};
        for (double c : g.sample_cost(a, rng)) {
          EXPECT_GE(c, 0.0);
          EXPECT_LE(c, 1.0);
        }
      }
      const auto mg = random_markov_game(2, {2, 2}, 0.3, rng, noise);
      for (int k = 0; k < 200; ++k)
        for (double c : mg.sample_cost(k % 2, std::vector<std::size_t>{1, 0}, rng)) {
          EXPECT_GE(c, 0.0);
          EXPECT_LE(c, 1.0);
        }
    }
  }
}

TEST(Rosenthal, SingleTerm) {
  const auto g = shared_facility();
  // player 0 on e0, player 1 on e1: 0.3 + 0.2
  EXPECT_DOUBLE_EQ(rosenthal_potential(g, std::vector<std::size_t>{0, 1}), 0.5);
}

TEST(Rosenthal, TwoPlayersOnOneFacilitySumBothLoadLevels) {
  const auto g = shared_facility();
  // e1 is empty and contributes nothing
  EXPECT_DOUBLE_EQ(rosenthal_potential(g, std::vector<std::size_t>{0, 0}), 0.3 + 0.5);
}

TEST(Rosenthal, SinglePlayerOnOneFacility) {
  const CongestionGame g(1, 2, {{{0}, {1}}}, {{0.0, 0.3}, {0.0, 0.7}});
  EXPECT_DOUBLE_EQ(rosenthal_potential(g, std::vector<std::size_t>{0}), 0.3);
}

TEST(ExpectedPotential, PointMassGivesThePurePotential) {
  Rng rng(5);
  const auto g = random_potential_game({2, 3}, rng);
  for_each_joint(g.indexer(), [&](std::size_t flat, const JointAction& a) {
    ActionDistributions p{std::vector<double>(2, 0.0), std::vector<double>(3, 0.0)};
    p[0][a[0]] = 1.0;
    p[1][a[1]] = 1.0;
    EXPECT_EQ(expected_potential(g, p), g.potential(flat));
  });
}

TEST(ExpectedPotential, UniformIsTheAverage) {
  const NormalFormPotentialGame g({2, 2}, {{0.1, 0.2, 0.3, 0.4}, {0.1, 0.2, 0.3, 0.4}},
                                  std::vector<double>{0.1, 0.5, 0.2, 0.8});
  EXPECT_NEAR(expected_potential(g, {{0.5, 0.5}, {0.5, 0.5}}), (0.1 + 0.5 + 0.2 + 0.8) / 4, 1e-15);
}

TEST(ExpectedPotential, CongestionMatchesFractionalPotentialUpToTheEmptyLoadTerm) {
  Rng rng(6);
  const auto g = random_congestion_game(3, 4, 2, 4, rng);
  MixedProfile prof;
  for (std::size_t i = 0; i < 3; ++i) {
    std::vector<double> w(g.num_actions(i));
    for (auto& x : w) x = 0.1 + rng.uniform();
    double z = 0;
    for (double x : w) z += x;
    for (auto& x : w) x /= z;
    prof.emplace_back(w);
  }
  double empty = 0.0;
  for (std::size_t e = 0; e < 4; ++e) empty += g.facility_cost(e, 0);
  const double lhs = expected_potential(g, to_distributions(prof));
  EXPECT_NEAR(lhs, fractional_potential(g, marginals_of(g, prof)) - empty, 1e-12);
}

TEST(VerifyPotential, RandomCongestionGamesSatisfyTheIdentity) {
  Rng rng(7);
  for (int k = 0; k < 10; ++k) {
    const auto g = random_congestion_game(3, 5, 2, 6, rng);
    const auto rep = verify_potential_property(g);
    EXPECT_TRUE(rep.passed);
    EXPECT_LE(rep.max_residual, 1e-12);
  }
}

TEST(VerifyPotential, InjectedViolationIsMeasured) {
  Rng rng(8);
  const auto g = random_potential_game({2, 2}, rng);
  auto c0 = g.cost_table(0);
  auto c1 = g.cost_table(1);
  c0[3] += c0[3] <= 0.9 ? 0.1 : -0.1;
  const NormalFormPotentialGame bad({2, 2}, {c0, c1}, g.potential_table());
  const auto rep = verify_potential_property(bad);
  EXPECT_FALSE(rep.passed);
  EXPECT_NEAR(rep.max_residual, 0.1, 1e-12);
}

TEST(VerifyPotential, SinglePlayerWithPotentialEqualToCost) {
  const std::vector<double> c{0.2, 0.7, 0.4};
  const NormalFormPotentialGame g({3}, {c}, c);
  EXPECT_EQ(verify_potential_property(g).max_residual, 0.0);
}

TEST(VerifyPotential, ReconstructedPotentialOfAnExactPotentialGame) {
  Rng rng(9);
  const auto g = random_potential_game({3, 2, 2}, rng);
  const NormalFormPotentialGame rebuilt(g.indexer().counts(),
                                        {g.cost_table(0), g.cost_table(1), g.cost_table(2)});
  EXPECT_TRUE(verify_potential_property(rebuilt).passed);
}

TEST(MarkovGame, ConstructorsKeepRowsStochasticAndKappaPositive) {
  Rng rng(10);
  for (int k = 0; k < 5; ++k) {
    const auto g = random_markov_game(3, {2, 3}, 0.2 + 0.1 * k, rng);
    EXPECT_GT(g.kappa(), 0.0);
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t a = 0; a < g.indexer().total(); ++a) {
        double sum = 0.0;
        for (double p : g.transition(s, a)) sum += p;
        EXPECT_NEAR(sum, 1.0, 1e-12);
      }
  }
}

TEST(MarkovGame, RejectsBadInputs) {
  auto make = [](std::vector<std::vector<std::vector<double>>> trans, double stop) {
    return MarkovGame(1, {1}, {{{0.5}}}, std::move(trans), {{stop}}, {1.0});
  };
  EXPECT_NO_THROW(make({{{1.0}}}, 0.5));
  EXPECT_THROW(make({{{0.9}}}, 0.5), Error);
  EXPECT_THROW(make({{{1.0}}}, 0.0), Error);
  EXPECT_THROW(MarkovGame(1, {1}, {{{1.5}}}, {{{1.0}}}, {{0.5}}, {1.0}), Error);
}

TEST(ExperimentGame, CrowdingSendsToDistancing) {
  const ExperimentConfig c;
  EXPECT_EQ(experiment_next_state(c, kSafeState, {0, 0, 0, 8}), kDistancingState);
  EXPECT_EQ(experiment_next_state(c, kSafeState, {0, 0, 3, 5}), kDistancingState);
}

TEST(ExperimentGame, EvenSpreadReturnsToSafe) {
  const ExperimentConfig c;
  EXPECT_EQ(experiment_next_state(c, kDistancingState, {2, 2, 2, 2}), kSafeState);
  EXPECT_EQ(experiment_next_state(c, kDistancingState, {1, 2, 3, 2}), kDistancingState);
}

TEST(ExperimentGame, FourFourSplitStaysSafe) {
  const ExperimentConfig c;
  EXPECT_EQ(experiment_next_state(c, kSafeState, {0, 0, 4, 4}), kSafeState);
}

TEST(ExperimentGame, BuiltTablesFollowTheRules) {
  ExperimentConfig c;
  c.num_players = 4;  // keeps the joint table small
  const auto g = build_experiment_game(c);
  EXPECT_EQ(g.num_states(), 2u);
  EXPECT_EQ(g.num_players(), 4u);
  EXPECT_NEAR(g.kappa(), 0.01, 1e-15);
  EXPECT_EQ(g.horizon_cap(), std::optional<std::size_t>(20));
  const auto all_d = g.indexer().flat(std::vector<std::size_t>{3, 3, 3, 3});
  EXPECT_EQ(g.transition(kSafeState, all_d)[kDistancingState], 1.0);
  const auto spread = g.indexer().flat(std::vector<std::size_t>{0, 1, 2, 3});
  EXPECT_EQ(g.transition(kDistancingState, spread)[kSafeState], 1.0);
  // sharing is cheaper, D is cheapest, distancing is costlier
  const auto alone_d = g.indexer().flat(std::vector<std::size_t>{3, 0, 1, 2});
  const auto shared_d = g.indexer().flat(std::vector<std::size_t>{3, 3, 1, 2});
  EXPECT_LT(g.cost(0, kSafeState, shared_d), g.cost(0, kSafeState, alone_d));
  EXPECT_GT(g.cost(1, kSafeState, alone_d), g.cost(0, kSafeState, alone_d));  // A vs D
  EXPECT_NEAR(g.cost(0, kDistancingState, alone_d), 100 * g.cost(0, kSafeState, alone_d), 1e-12);
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t a = 0; a < g.indexer().total(); ++a)
      for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_GE(g.cost(i, s, a), 0.0);
        EXPECT_LE(g.cost(i, s, a), 1.0);
      }
}

TEST(ExperimentGame, LiteralStoppingUsesTheStatedProbability) {
  ExperimentConfig c;
  c.num_players = 2;
  c.literal_stopping = true;
  EXPECT_NEAR(build_experiment_game(c).kappa(), 0.99, 1e-15);
}

TEST(ExperimentGame, AdditivePenaltyAddsAConstant) {
  ExperimentConfig c;
  c.num_players = 2;
  c.penalty_mode = ExperimentConfig::Penalty::additive;
  const auto g = build_experiment_game(c);
  const auto a = g.indexer().flat(std::vector<std::size_t>{0, 1});
  const auto b = g.indexer().flat(std::vector<std::size_t>{3, 1});
  EXPECT_NEAR(g.cost(0, kDistancingState, a) - g.cost(0, kSafeState, a),
              g.cost(0, kDistancingState, b) - g.cost(0, kSafeState, b), 1e-12);
}

TEST(ExperimentGame, InvalidConfigIsRejected) {
  ExperimentConfig c;
  c.weights = {0.5, -0.1};
  EXPECT_THROW(build_experiment_game(c), Error);
  c = {};
  c.continuation = 1.0;
  EXPECT_THROW(build_experiment_game(c), Error);
}

TEST(Congestion, LoadsAndCosts) {
  const auto g = shared_facility();
  EXPECT_EQ(g.loads(std::vector<std::size_t>{0, 0}), (std::vector<std::size_t>{2, 0}));
  EXPECT_DOUBLE_EQ(g.cost(0, std::vector<std::size_t>{0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(g.cost(1, std::vector<std::size_t>{0, 1}), 0.2);
  const auto nf = g.to_normal_form();
  EXPECT_TRUE(verify_potential_property(nf).passed);
}

TEST(Congestion, UncoveredResourceIsRejected) {
  EXPECT_THROW(CongestionGame(1, 3, {{{0}, {1}}}, {{0, 0.1}, {0, 0.1}, {0, 0.1}}), Error);
}
