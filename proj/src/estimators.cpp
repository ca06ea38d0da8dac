#include "fwgames/estimators.hpp"

#include <cmath>
#include <string>

#include "fwgames/error.hpp"

namespace fwg {

GradEstimate importance_sampling_full(double cost, std::size_t played, const Simplex& mixed) {
  require(played < mixed.size(), Errc::InvalidAction, "played action out of range");
  require(mixed[played] > 0.0, Errc::DivisionByZeroProb,
          "played action " + std::to_string(played) + " has zero probability");
  GradEstimate est{std::vector<double>(mixed.size(), 0.0), EstimatorKind::full_bandit_simplex};
  est.values[played] = cost / mixed[played];
  return est;
}

GradEstimate semi_bandit_estimate(std::span<const double> resource_costs, const ResourceSet& played,
                                  std::span<const double> y_dense) {
  require(resource_costs.size() == y_dense.size(), Errc::ShapeMismatch,
          "resource costs and marginals differ in length");
  GradEstimate est{std::vector<double>(y_dense.size(), 0.0), EstimatorKind::semi_bandit};
  for (std::size_t e : played) {
    require(e < y_dense.size(), Errc::InvalidAction, "played resource out of range");
    require(y_dense[e] > 0.0, Errc::DivisionByZeroProb,
            "played resource " + std::to_string(e) + " has zero marginal");
    est.values[e] = resource_costs[e] / y_dense[e];
  }
  return est;
}

SecondMomentMatrix second_moment_matrix(const std::vector<Atom>& atoms, double rank_tol) {
  require(!atoms.empty(), Errc::DegenerateDistribution, "no atoms");
  const auto d = static_cast<Eigen::Index>(atoms.front().indicator.size());
  SecondMomentMatrix out;
  out.rank_tol = rank_tol;
  out.sigma = Eigen::MatrixXd::Zero(d, d);
  for (const auto& a : atoms) {
    const Eigen::Map<const Eigen::VectorXd> v(a.indicator.data(), d);
    out.sigma.noalias() += a.weight * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.sigma);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  require(lmax > 0.0, Errc::DegenerateDistribution, "second-moment matrix is zero");
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k)
    if (lambda(k) > rank_tol * lmax) inv(k) = 1.0 / lambda(k);
  out.pinv = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
  return out;
}

GradEstimate bandit_linear_estimate(double total_cost, std::span<const double> played,
                                    const SecondMomentMatrix& mat) {
  const auto d = static_cast<Eigen::Index>(played.size());
  require(mat.sigma.rows() == d, Errc::ShapeMismatch, "played vector length mismatch");
  const Eigen::Map<const Eigen::VectorXd> a(played.data(), d);
  const Eigen::VectorXd coeff = mat.pinv * a;
  // Σ Σ⁺ a = a exactly when a lies in the row space.
  const double miss = (mat.sigma * coeff - a).norm();
  require(miss <= 1e-8 * std::max(1.0, a.norm()), Errc::EstimatorInconsistent,
          "played strategy lies outside the row space of the sampling distribution");
  GradEstimate est{std::vector<double>(played.size()), EstimatorKind::bandit_linear};
  for (Eigen::Index e = 0; e < d; ++e) est.values[static_cast<std::size_t>(e)] = total_cost * coeff(e);
  return est;
}

GradEstimate reinforce_estimate(std::span<const TrajectoryStep> trajectory,
                                const PolicyTable& policy) {
  const std::size_t m = policy.num_actions();
  GradEstimate est{std::vector<double>(policy.num_states() * m, 0.0), EstimatorKind::reinforce};
  double total_cost = 0.0;
  for (const auto& step : trajectory) {
    require(step.state < policy.num_states() && step.action < m, Errc::InvalidAction,
            "trajectory step outside the policy table");
    const double p = policy.row(step.state)[step.action];
    require(p > 0.0, Errc::DivisionByZeroProb, "visited action has zero probability");
    est.values[step.state * m + step.action] += 1.0 / p;
    total_cost += step.cost;
  }
  for (double& v : est.values) v *= total_cost;
  return est;
}

RecursiveGrad recursive_blend(const RecursiveGrad& prev, const GradEstimate& est, double rho) {
  require(rho >= 0.0 && rho <= 1.0, Errc::InvalidArgument, "rho must lie in [0,1]");
  require(prev.d.size() == est.values.size(), Errc::ShapeMismatch,
          "recursive gradient and estimate differ in length");
  RecursiveGrad next{std::vector<double>(prev.d.size()), prev.t_last + 1};
  for (std::size_t k = 0; k < next.d.size(); ++k) {
    next.d[k] = (1.0 - rho) * prev.d[k] + rho * est.values[k];
    require(std::isfinite(next.d[k]), Errc::NumericalDivergence, "recursive gradient is not finite");
  }
  return next;
}

}  // namespace fwg
