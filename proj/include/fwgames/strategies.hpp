#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "fwgames/games.hpp"

namespace fwg {

/// Probability vector. Construction clips round-off negatives, checks the sum
/// and renormalizes, so every arithmetic result stays a valid distribution.
class Simplex {
 public:
  Simplex() = default;
  explicit Simplex(std::vector<double> probs);

  static Simplex uniform(std::size_t m);
  static Simplex vertex(std::size_t m, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const Simplex&, const Simplex&) = default;

 private:
  std::vector<double> probs_;
};

/// One distribution per state.
class PolicyTable {
 public:
  PolicyTable() = default;
  explicit PolicyTable(std::vector<Simplex> rows);

  static PolicyTable uniform(std::size_t num_states, std::size_t m);

  std::size_t num_states() const { return rows_.size(); }
  std::size_t num_actions() const { return rows_.empty() ? 0 : rows_.front().size(); }
  const Simplex& row(std::size_t s) const { return rows_[s]; }
  const std::vector<Simplex>& rows() const { return rows_; }
  /// Row-major flattening, length S·m.
  std::vector<double> flat() const;

  friend bool operator==(const PolicyTable&, const PolicyTable&) = default;

 private:
  std::vector<Simplex> rows_;
};

using MixedProfile = std::vector<Simplex>;
using MarkovProfile = std::vector<PolicyTable>;

inline constexpr std::size_t kNoAction = std::numeric_limits<std::size_t>::max();

/// A pure strategy of the polytope as a 0/1 resource indicator with its weight.
/// `action` is the index into the owning action set when known.
struct Atom {
  std::vector<double> indicator;
  double weight = 0.0;
  std::size_t action = kNoAction;
};

inline constexpr double kRankTolerance = 1e-10;

/// Fractional strategy over d resources held as an explicit convex combination of
/// pure strategies. The dense marginal vector is updated by its own arithmetic so
/// that it can be checked against the atoms.
class PolytopePoint {
 public:
  PolytopePoint() = default;
  /// Dense marginals are computed from the atoms, which are then pruned.
  static PolytopePoint from_atoms(std::vector<Atom> atoms);
  static PolytopePoint point_mass(Atom atom);

  std::size_t dim() const { return dense_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<double>& dense() const { return dense_; }

  /// (1 − lambda)·this + lambda·other, atoms concatenated and pruned.
  PolytopePoint blend(const PolytopePoint& other, double lambda) const;

 private:
  PolytopePoint(std::vector<Atom> atoms, std::vector<double> dense);

  std::vector<Atom> atoms_;
  std::vector<double> dense_;
};

Simplex mix_with_uniform(const Simplex& p, double mu);
PolicyTable mix_with_uniform(const PolicyTable& p, double mu);

/// y = (1 − ε)x + ε·cover with ε = coef·mu; throws when ε > 1.
PolytopePoint mix_polytope_exploration(const PolytopePoint& x, double mu, const PolytopePoint& cover,
                                       double coef);

/// Uniform mixture over a greedy set cover of the resources by the action set.
PolytopePoint covering_exploration_point(std::size_t num_resources,
                                         const std::vector<ResourceSet>& action_set);

/// Distribution over pure strategies with support ≤ d+1 reproducing the marginals.
std::vector<Atom> caratheodory_decompose(const PolytopePoint& x);

/// Merges duplicate atoms and removes affine dependencies until at most d+1 remain.
std::vector<Atom> prune_atoms(std::vector<Atom> atoms, double rank_tol = kRankTolerance);

/// Argmin coordinate, lowest index on ties.
std::size_t linear_min_vertex(std::span<const double> direction);
/// Index of the strategy in `action_set` minimizing ⟨a, direction⟩.
std::size_t linear_min_vertex(std::span<const double> direction,
                              const std::vector<ResourceSet>& action_set);

Simplex fw_update(const Simplex& current, std::size_t vertex, double eta);
PolytopePoint fw_update(const PolytopePoint& current, const Atom& vertex, double eta);

/// Euclidean projection onto the probability simplex (sort and threshold).
Simplex simplex_projection(std::span<const double> v);

double l1_distance(const MixedProfile& a, const MixedProfile& b);
double l1_distance(const MarkovProfile& a, const MarkovProfile& b);

/// Action distributions of a mixed profile, the form the game-level helpers take.
ActionDistributions to_distributions(const MixedProfile& profile);

}  // namespace fwg
