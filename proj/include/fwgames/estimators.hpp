#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "fwgames/strategies.hpp"

namespace fwg {

enum class EstimatorKind { full_bandit_simplex, semi_bandit, bandit_linear, reinforce };

/// One-sample gradient estimate of a player's cost gradient.
struct GradEstimate {
  std::vector<double> values;
  EstimatorKind kind = EstimatorKind::full_bandit_simplex;
};

/// Recursive blend d^t = (1 − ρ)d^{t−1} + ρ·Ĉ^t. Starts at zero.
struct RecursiveGrad {
  std::vector<double> d;
  std::size_t t_last = 0;

  static RecursiveGrad zeros(std::size_t length) { return {std::vector<double>(length, 0.0), 0}; }
};

/// E[a aᵀ] under the atom distribution, with its eigen-pseudoinverse.
struct SecondMomentMatrix {
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd pinv;
  double rank_tol = kRankTolerance;
};

/// Ĉ = cost·𝕀{a = played} / mixed[played].
GradEstimate importance_sampling_full(double cost, std::size_t played, const Simplex& mixed);

/// Ĉ_e = observed_e·𝕀{e ∈ played} / y_e. `resource_costs` is indexed by resource.
GradEstimate semi_bandit_estimate(std::span<const double> resource_costs, const ResourceSet& played,
                                  std::span<const double> y_dense);

SecondMomentMatrix second_moment_matrix(const std::vector<Atom>& atoms,
                                        double rank_tol = kRankTolerance);
inline SecondMomentMatrix second_moment_matrix(const PolytopePoint& point,
                                               double rank_tol = kRankTolerance) {
  return second_moment_matrix(caratheodory_decompose(point), rank_tol);
}

/// Ĉ = total_cost·Σ⁺·played; played must lie in the row space of Σ.
GradEstimate bandit_linear_estimate(double total_cost, std::span<const double> played,
                                    const SecondMomentMatrix& mat);

/// A player's view of one visited step.
struct TrajectoryStep {
  std::size_t state = 0;
  std::size_t action = 0;
  double cost = 0.0;
};

/// (Σ_h C^h)·g with g[s,a] = Σ_h 𝕀{s^h = s, a^h = a}/policy(a|s), flattened row-major.
GradEstimate reinforce_estimate(std::span<const TrajectoryStep> trajectory, const PolicyTable& policy);

RecursiveGrad recursive_blend(const RecursiveGrad& prev, const GradEstimate& est, double rho);

}  // namespace fwg
