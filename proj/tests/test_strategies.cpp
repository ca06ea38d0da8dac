#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fwgames/error.hpp"
#include "fwgames/strategies.hpp"

using namespace fwg;

namespace {

Atom atom(std::vector<double> ind, double w, std::size_t action = kNoAction) {
  return {std::move(ind), w, action};
}

std::vector<double> marginals(const std::vector<Atom>& atoms, std::size_t d) {
  std::vector<double> m(d, 0.0);
  for (const auto& a : atoms)
    for (std::size_t e = 0; e < d; ++e) m[e] += a.weight * a.indicator[e];
  return m;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double r = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) r = std::max(r, std::abs(a[k] - b[k]));
  return r;
}

void expect_probs(const Simplex& s, std::vector<double> want, double tol = 1e-12) {
  ASSERT_EQ(s.size(), want.size());
  for (std::size_t k = 0; k < want.size(); ++k) EXPECT_NEAR(s[k], want[k], tol) << "entry " << k;
}

}  // namespace

TEST(Simplex, ValidatesAndNormalizes) {
  EXPECT_THROW(Simplex(std::vector<double>{0.5, 0.6}), Error);
  EXPECT_THROW(Simplex(std::vector<double>{-0.5, 1.5}), Error);
  const Simplex s(std::vector<double>{0.25, 0.75});
  EXPECT_EQ(s[1], 0.75);
  expect_probs(Simplex::vertex(3, 2), {0, 0, 1});
  expect_probs(Simplex::uniform(4), {0.25, 0.25, 0.25, 0.25});
}

TEST(MixWithUniform, Examples) {
  const Simplex p(std::vector<double>{1.0, 0.0});
  expect_probs(mix_with_uniform(p, 0.0), {1.0, 0.0});
  expect_probs(mix_with_uniform(p, 1.0), {0.5, 0.5});
  expect_probs(mix_with_uniform(p, 0.2), {0.9, 0.1});
}

TEST(MixWithUniform, PolicyTableRowwise) {
  const PolicyTable t({Simplex::vertex(2, 0), Simplex::vertex(2, 1)});
  const auto m = mix_with_uniform(t, 0.2);
  expect_probs(m.row(0), {0.9, 0.1});
  expect_probs(m.row(1), {0.1, 0.9});
}

TEST(MixPolytope, ZeroMuLeavesThePointUnchanged) {
  const auto x = PolytopePoint::from_atoms({atom({1, 0}, 0.6, 0), atom({0, 1}, 0.4, 1)});
  const auto cover = covering_exploration_point(2, {{0}, {1}});
  EXPECT_EQ(mix_polytope_exploration(x, 0.0, cover, 2.0).dense(), x.dense());
}

TEST(MixPolytope, FullExplorationGivesTheCover) {
  const auto x = PolytopePoint::point_mass(atom({1, 0}, 1.0, 0));
  const auto cover = covering_exploration_point(2, {{0}, {1}});
  const auto y = mix_polytope_exploration(x, 0.5, cover, 2.0);  // ε = 1
  EXPECT_LE(max_abs_diff(y.dense(), cover.dense()), 1e-15);
}

TEST(MixPolytope, ConvexCombinationOfMarginals) {
  const auto x = PolytopePoint::from_atoms({atom({1, 0}, 0.6, 0), atom({0, 1}, 0.4, 1)});
  const auto cover = covering_exploration_point(2, {{0}, {1}});
  const auto y = mix_polytope_exploration(x, 0.05, cover, 2.0);  // ε = 0.1
  EXPECT_NEAR(y.dense()[0], 0.59, 1e-12);
  EXPECT_NEAR(y.dense()[1], 0.41, 1e-12);
  EXPECT_THROW(mix_polytope_exploration(x, 0.6, cover, 2.0), Error);
}

TEST(CoveringPoint, ExactCover) {
  const auto c = covering_exploration_point(2, {{0}, {1}});
  ASSERT_EQ(c.atoms().size(), 2u);
  for (const auto& a : c.atoms()) EXPECT_NEAR(a.weight, 0.5, 1e-15);
  EXPECT_EQ(c.dense(), (std::vector<double>{0.5, 0.5}));
}

TEST(CoveringPoint, OverlappingStrategies) {
  const auto c = covering_exploration_point(3, {{0, 1}, {1, 2}});
  EXPECT_EQ(c.atoms().size(), 2u);
  EXPECT_NEAR(c.dense()[0], 0.5, 1e-15);
  EXPECT_NEAR(c.dense()[1], 1.0, 1e-15);
  EXPECT_NEAR(c.dense()[2], 0.5, 1e-15);
}

TEST(CoveringPoint, SingleCoveringStrategy) {
  const auto c = covering_exploration_point(3, {{0, 1}, {0, 1, 2}});
  ASSERT_EQ(c.atoms().size(), 1u);
  EXPECT_EQ(c.atoms()[0].weight, 1.0);
  EXPECT_EQ(c.atoms()[0].action, 1u);
}

TEST(CoveringPoint, UncoverableResourceThrows) {
  EXPECT_THROW(covering_exploration_point(3, {{0}, {1}}), Error);
}

TEST(Caratheodory, SingleAtom) {
  const auto x = PolytopePoint::point_mass(atom({1, 0, 1}, 1.0, 4));
  const auto out = caratheodory_decompose(x);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].weight, 1.0);
  EXPECT_EQ(out[0].action, 4u);
}

TEST(Caratheodory, AlreadyMinimal) {
  const auto x = PolytopePoint::from_atoms({atom({1, 0}, 0.5), atom({0, 1}, 0.5)});
  const auto out = caratheodory_decompose(x);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_LE(max_abs_diff(marginals(out, 2), {0.5, 0.5}), 1e-15);
}

TEST(Caratheodory, SixAtomsInThreeDimensions) {
  const std::vector<std::vector<double>> inds{{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                              {1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
  const std::vector<double> w{0.1, 0.2, 0.15, 0.25, 0.2, 0.1};
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < 6; ++k) atoms.push_back(atom(inds[k], w[k], k));
  const auto want = marginals(atoms, 3);
  const auto out = prune_atoms(atoms);
  EXPECT_LE(out.size(), 4u);
  EXPECT_LE(max_abs_diff(marginals(out, 3), want), 1e-12);
  for (const auto& a : out) EXPECT_GE(a.weight, 0.0);
}

TEST(PruneAtoms, MergesDuplicates) {
  const auto out = prune_atoms({atom({1, 0}, 0.3, 0), atom({1, 0}, 0.7, 0)});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NEAR(out[0].weight, 1.0, 1e-15);
}

TEST(PruneAtoms, SmallSupportUntouched) {
  const auto out = prune_atoms({atom({1}, 0.5), atom({0}, 0.5)});
  EXPECT_EQ(out.size(), 2u);
}

TEST(PruneAtoms, AffinelyIndependentAtomsAreKept) {
  // (1,0), (0,1), (1,1) with the ones row form an invertible 3x3 system, so
  // (0.25, 0.25, 0.5) is the only way to reach (0.75, 0.75) with them
  const auto out = prune_atoms({atom({1, 0}, 0.25), atom({0, 1}, 0.25), atom({1, 1}, 0.5)});
  EXPECT_EQ(out.size(), 3u);
  EXPECT_LE(max_abs_diff(marginals(out, 2), {0.75, 0.75}), 1e-12);
}

TEST(PruneAtoms, AffineDependencyInTwoDimensions) {
  // (1,0) + (0,1) = (0,0) + (1,1): four atoms in d = 2 must drop to three
  const auto out =
      prune_atoms({atom({1, 0}, 0.25), atom({0, 1}, 0.25), atom({1, 1}, 0.25), atom({0, 0}, 0.25)});
  EXPECT_EQ(out.size(), 3u);
  EXPECT_LE(max_abs_diff(marginals(out, 2), {0.5, 0.5}), 1e-12);
}

TEST(PruneAtoms, NeverIncreasesAtomCountAndKeepsMarginals) {
  Rng rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t d = 2 + rep % 5;
    const std::size_t K = 1 + rep % 9;
    std::vector<Atom> atoms;
    double z = 0;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<double> ind(d);
      for (auto& v : ind) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
      atoms.push_back(atom(ind, 0.05 + rng.uniform()));
      z += atoms.back().weight;
    }
    for (auto& a : atoms) a.weight /= z;
    const auto want = marginals(atoms, d);
    const auto out = prune_atoms(atoms);
    EXPECT_LE(out.size(), atoms.size());
    EXPECT_LE(out.size(), d + 1);
    EXPECT_LE(max_abs_diff(marginals(out, d), want), 1e-12);
  }
}

TEST(Caratheodory, RandomUpdateSequencesKeepMarginalsExact) {
  Rng rng(12);
  const std::size_t d = 6;
  std::vector<ResourceSet> sets;
  for (std::size_t a = 0; a < d; ++a) {
    ResourceSet s{a, (a + 1) % d};
    std::sort(s.begin(), s.end());
    sets.push_back(s);
  }
  const auto cover = covering_exploration_point(d, sets);
  auto ind = [&](std::size_t a) {
    std::vector<double> v(d, 0.0);
    for (auto e : sets[a]) v[e] = 1.0;
    return v;
  };
  auto x = PolytopePoint::point_mass(atom(ind(0), 1.0, 0));
  for (int step = 0; step < 300; ++step) {
    const std::size_t a = rng.categorical(std::vector<double>(d, 1.0));
    if (rng.bernoulli(0.5))
      x = fw_update(x, atom(ind(a), 1.0, a), rng.uniform());
    else
      x = mix_polytope_exploration(x, 0.1 * rng.uniform(), cover, 1.0);
    const auto out = caratheodory_decompose(x);
    ASSERT_LE(out.size(), d + 1);
    ASSERT_LE(max_abs_diff(marginals(out, d), x.dense()), 1e-12);
  }
}

TEST(LinearMinVertex, Examples) {
  EXPECT_EQ(linear_min_vertex(std::vector<double>{0.2, 0.1, 0.3}), 1u);
  EXPECT_EQ(linear_min_vertex(std::vector<double>{0.4, 0.4, 0.4}), 0u);
  EXPECT_EQ(linear_min_vertex(std::vector<double>{0.5, 0.1, 0.1}, {{0, 1}, {1, 2}}), 1u);
}

TEST(LinearMinVertex, InvariantToShiftAndPositiveScale) {
  Rng rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(5);
    for (auto& x : v) x = rng.uniform();
    const auto base = linear_min_vertex(v);
    const double shift = rng.uniform() * 10 - 5, scale = 0.1 + rng.uniform() * 10;
    std::vector<double> w(v);
    for (auto& x : w) x = scale * x + shift;
    EXPECT_EQ(linear_min_vertex(w), base);
  }
}

TEST(FwUpdate, Examples) {
  const Simplex p(std::vector<double>{0.5, 0.5});
  expect_probs(fw_update(p, 0, 0.0), {0.5, 0.5});
  expect_probs(fw_update(p, 1, 1.0), {0.0, 1.0});
  expect_probs(fw_update(p, 0, 0.2), {0.6, 0.4});
}

TEST(FwUpdate, StaysFeasibleForAllSteps) {
  Rng rng(14);
  Simplex p = Simplex::uniform(4);
  for (int k = 0; k < 1000; ++k) {
    p = fw_update(p, rng.categorical(std::vector<double>(4, 1.0)), rng.uniform());
    double s = 0;
    for (double x : p.probs()) {
      EXPECT_GE(x, 0.0);
      s += x;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SimplexProjection, Examples) {
  expect_probs(simplex_projection(std::vector<double>{0.3, 0.7}), {0.3, 0.7});
  expect_probs(simplex_projection(std::vector<double>{2.0, 0.0}), {1.0, 0.0});
  // threshold τ = (0.8 + 0.6 − 1)/2 = 0.2
  expect_probs(simplex_projection(std::vector<double>{0.8, 0.6}), {0.6, 0.4});
}

TEST(SimplexProjection, IdempotentAndNormalized) {
  Rng rng(15);
  for (int rep = 0; rep < 500; ++rep) {
    std::vector<double> v(1 + rep % 7);
    for (auto& x : v) x = 4 * rng.uniform() - 2;
    const auto p = simplex_projection(v);
    const auto q = simplex_projection(p.probs());
    EXPECT_EQ(p.probs(), q.probs());
    double s = 0;
    for (double x : p.probs()) s += x;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(SimplexProjection, IsTheClosestPoint) {
  // the projection beats random feasible points in Euclidean distance
  Rng rng(16);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> v(3);
    for (auto& x : v) x = 3 * rng.uniform() - 1;
    const auto p = simplex_projection(v);
    auto dist = [&](const std::vector<double>& q) {
      double s = 0;
      for (std::size_t k = 0; k < 3; ++k) s += (q[k] - v[k]) * (q[k] - v[k]);
      return s;
    };
    for (int k = 0; k < 50; ++k) {
      std::vector<double> q{rng.uniform(), rng.uniform(), rng.uniform()};
      const double z = q[0] + q[1] + q[2];
      for (auto& x : q) x /= z;
      EXPECT_LE(dist(p.probs()), dist(q) + 1e-12);
    }
  }
}

TEST(L1Distance, Examples) {
  const MixedProfile a{Simplex(std::vector<double>{1.0, 0.0})};
  const MixedProfile b{Simplex(std::vector<double>{0.0, 1.0})};
  EXPECT_EQ(l1_distance(a, a), 0.0);
  EXPECT_EQ(l1_distance(a, b), 2.0);
  const MixedProfile c{Simplex(std::vector<double>{0.7, 0.3})};
  const MixedProfile d{Simplex(std::vector<double>{0.5, 0.5})};
  EXPECT_NEAR(l1_distance(c, d), 0.4, 1e-15);
}

TEST(L1Distance, MarkovSumsOverStates) {
  const MarkovProfile a{PolicyTable({Simplex::vertex(2, 0), Simplex::vertex(2, 0)})};
  const MarkovProfile b{PolicyTable({Simplex::vertex(2, 1), Simplex::vertex(2, 0)})};
  EXPECT_EQ(l1_distance(a, b), 2.0);
}
