#include "fwgames/strategies.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fwgames/error.hpp"

namespace fwg {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_unit(double v, const char* name) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, Errc::InvalidArgument,
          std::string(name) + " must lie in [0,1], got " + std::to_string(v));
}

}  // namespace

Simplex::Simplex(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), Errc::InvalidArgument, "simplex of dimension 0");
  double sum = 0.0;
  for (double& p : probs_) {
    require(std::isfinite(p) && p >= -1e-12, Errc::InvalidArgument,
            "probability entries must be finite and nonnegative");
    p = std::max(p, 0.0);
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kSumTolerance, Errc::InvalidArgument,
          "probabilities sum to " + std::to_string(sum));
  if (sum != 1.0)
    for (double& p : probs_) p /= sum;
}

Simplex Simplex::uniform(std::size_t m) {
  require(m >= 1, Errc::InvalidArgument, "simplex of dimension 0");
  return Simplex(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

Simplex Simplex::vertex(std::size_t m, std::size_t index) {
  require(index < m, Errc::InvalidArgument, "vertex index out of range");
  std::vector<double> v(m, 0.0);
  v[index] = 1.0;
  return Simplex(std::move(v));
}

PolicyTable::PolicyTable(std::vector<Simplex> rows) : rows_(std::move(rows)) {
  require(!rows_.empty(), Errc::InvalidArgument, "policy table needs at least one state");
  for (const auto& r : rows_)
    require(r.size() == rows_.front().size(), Errc::ShapeMismatch, "policy rows differ in length");
}

PolicyTable PolicyTable::uniform(std::size_t num_states, std::size_t m) {
  return PolicyTable(std::vector<Simplex>(num_states, Simplex::uniform(m)));
}

std::vector<double> PolicyTable::flat() const {
  std::vector<double> out;
  out.reserve(num_states() * num_actions());
  for (const auto& r : rows_) out.insert(out.end(), r.probs().begin(), r.probs().end());
  return out;
}

// ---------------------------------------------------------------------------

PolytopePoint::PolytopePoint(std::vector<Atom> atoms, std::vector<double> dense)
    : atoms_(std::move(atoms)), dense_(std::move(dense)) {}

PolytopePoint PolytopePoint::from_atoms(std::vector<Atom> atoms) {
  require(!atoms.empty(), Errc::InvalidArgument, "polytope point needs at least one atom");
  const std::size_t d = atoms.front().indicator.size();
  double total = 0.0;
  for (const auto& a : atoms) {
    require(a.indicator.size() == d, Errc::ShapeMismatch, "atom indicators differ in length");
    require(std::isfinite(a.weight) && a.weight >= 0.0, Errc::InvalidArgument,
            "atom weights must be nonnegative");
    total += a.weight;
  }
  require(std::abs(total - 1.0) <= kSumTolerance, Errc::InvalidArgument,
          "atom weights sum to " + std::to_string(total));
  for (auto& a : atoms) a.weight /= total;
  std::vector<double> dense(d, 0.0);
  for (const auto& a : atoms)
    for (std::size_t e = 0; e < d; ++e) dense[e] += a.weight * a.indicator[e];
  return PolytopePoint(prune_atoms(std::move(atoms)), std::move(dense));
}

PolytopePoint PolytopePoint::point_mass(Atom atom) {
  atom.weight = 1.0;
  std::vector<double> dense = atom.indicator;
  return PolytopePoint({std::move(atom)}, std::move(dense));
}

PolytopePoint PolytopePoint::blend(const PolytopePoint& other, double lambda) const {
  require(other.dim() == dim(), Errc::ShapeMismatch, "polytope points differ in dimension");
  check_unit(lambda, "blend coefficient");
  if (lambda == 0.0) return *this;
  if (lambda == 1.0) return other;
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size() + other.atoms_.size());
  for (Atom a : atoms_) {
    a.weight *= 1.0 - lambda;
    atoms.push_back(std::move(a));
  }
  for (Atom a : other.atoms_) {
    a.weight *= lambda;
    atoms.push_back(std::move(a));
  }
  std::vector<double> dense(dim());
  for (std::size_t e = 0; e < dim(); ++e)
    dense[e] = (1.0 - lambda) * dense_[e] + lambda * other.dense_[e];
  return PolytopePoint(prune_atoms(std::move(atoms)), std::move(dense));
}

// ---------------------------------------------------------------------------

Simplex mix_with_uniform(const Simplex& p, double mu) {
  check_unit(mu, "exploration mu");
  const double share = mu / static_cast<double>(p.size());
  std::vector<double> out(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = (1.0 - mu) * p[k] + share;
  return Simplex(std::move(out));
}

PolicyTable mix_with_uniform(const PolicyTable& p, double mu) {
  std::vector<Simplex> rows;
  rows.reserve(p.num_states());
  for (const auto& r : p.rows()) rows.push_back(mix_with_uniform(r, mu));
  return PolicyTable(std::move(rows));
}

PolytopePoint mix_polytope_exploration(const PolytopePoint& x, double mu, const PolytopePoint& cover,
                                       double coef) {
  require(mu >= 0.0 && coef >= 0.0, Errc::InvalidArgument, "exploration parameters must be >= 0");
  const double eps = coef * mu;
  require(eps <= 1.0, Errc::InvalidArgument,
          "exploration coefficient coef*mu = " + std::to_string(eps) + " exceeds 1");
  return x.blend(cover, eps);
}

PolytopePoint covering_exploration_point(std::size_t num_resources,
                                         const std::vector<ResourceSet>& action_set) {
  require(!action_set.empty(), Errc::NotCoverable, "empty action set");
  std::vector<bool> covered(num_resources, false);
  std::size_t remaining = num_resources;
  std::vector<std::size_t> chosen;
  while (remaining > 0) {
    std::size_t best = kNoAction;
    std::size_t best_gain = 0;
    for (std::size_t a = 0; a < action_set.size(); ++a) {
      std::size_t gain = 0;
      for (std::size_t e : action_set[a]) {
        require(e < num_resources, Errc::InvalidArgument, "strategy resource out of range");
        if (!covered[e]) ++gain;
      }
      if (gain > best_gain) {
        best_gain = gain;
        best = a;
      }
    }
    require(best != kNoAction, Errc::NotCoverable, "some resource appears in no strategy");
    chosen.push_back(best);
    for (std::size_t e : action_set[best]) {
      if (!covered[e]) {
        covered[e] = true;
        --remaining;
      }
    }
  }
  const double w = 1.0 / static_cast<double>(chosen.size());
  std::vector<Atom> atoms;
  for (std::size_t a : chosen) {
    Atom atom{std::vector<double>(num_resources, 0.0), w, a};
    for (std::size_t e : action_set[a]) atom.indicator[e] = 1.0;
    atoms.push_back(std::move(atom));
  }
  return PolytopePoint::from_atoms(std::move(atoms));
}

std::vector<Atom> caratheodory_decompose(const PolytopePoint& x) {
  return prune_atoms(x.atoms());
}

std::vector<Atom> prune_atoms(std::vector<Atom> atoms, double rank_tol) {
  require(!atoms.empty(), Errc::InvalidArgument, "prune_atoms needs at least one atom");
  const std::size_t d = atoms.front().indicator.size();

  // Merge duplicates and drop zero weights.
  std::vector<Atom> merged;
  merged.reserve(atoms.size());
  for (auto& a : atoms) {
    if (a.weight <= 0.0) continue;
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Atom& m) { return m.indicator == a.indicator; });
    if (it != merged.end()) {
      it->weight += a.weight;
      if (it->action == kNoAction) it->action = a.action;
    } else {
      merged.push_back(std::move(a));
    }
  }
  require(!merged.empty(), Errc::InvalidArgument, "all atom weights are zero");

  while (merged.size() > d + 1) {
    const auto K = static_cast<Eigen::Index>(merged.size());
    const auto rows = static_cast<Eigen::Index>(d + 1);
    Eigen::MatrixXd M(rows, K);
    for (Eigen::Index j = 0; j < K; ++j) {
      for (std::size_t e = 0; e < d; ++e) M(static_cast<Eigen::Index>(e), j) = merged[j].indicator[e];
      M(rows - 1, j) = 1.0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    // K > d+1, so the trailing right singular vector spans part of the null space.
    Eigen::VectorXd z = svd.matrixV().col(K - 1);
    const double scale = svd.singularValues()(0);
    const double residual = (M * z).norm();
    require(residual <= rank_tol * std::max(scale, 1.0) && z.cwiseAbs().maxCoeff() > rank_tol,
            Errc::DecompositionUnstable, "affine dependency solve is degenerate");
    if (z.maxCoeff() <= 0.0) z = -z;

    double theta = std::numeric_limits<double>::infinity();
    Eigen::Index drop = -1;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (z(j) > rank_tol) {
        const double ratio = merged[j].weight / z(j);
        if (ratio < theta) {
          theta = ratio;
          drop = j;
        }
      }
    }
    require(drop >= 0, Errc::DecompositionUnstable, "null direction has no positive entry");

    std::vector<Atom> next;
    next.reserve(merged.size() - 1);
    double total = 0.0;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j == drop) continue;
      double w = merged[j].weight - theta * z(j);
      require(w >= -1e-12, Errc::DecompositionUnstable, "weight shift produced a negative weight");
      if (w <= 0.0) continue;
      merged[j].weight = w;
      total += w;
      next.push_back(std::move(merged[j]));
    }
    for (auto& a : next) a.weight /= total;
    merged = std::move(next);
  }
  return merged;
}

std::size_t linear_min_vertex(std::span<const double> direction) {
  require(!direction.empty(), Errc::InvalidArgument, "empty direction");
  std::size_t best = 0;
  for (std::size_t k = 0; k < direction.size(); ++k) {
    require(!std::isnan(direction[k]), Errc::InvalidGradient, "NaN in gradient direction");
    if (direction[k] < direction[best]) best = k;
  }
  return best;
}

std::size_t linear_min_vertex(std::span<const double> direction,
                              const std::vector<ResourceSet>& action_set) {
  require(!action_set.empty(), Errc::InvalidArgument, "empty action set");
  for (double v : direction) require(!std::isnan(v), Errc::InvalidGradient, "NaN in gradient direction");
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < action_set.size(); ++a) {
    double score = 0.0;
    for (std::size_t e : action_set[a]) {
      require(e < direction.size(), Errc::ShapeMismatch, "direction shorter than resource count");
      score += direction[e];
    }
    if (score < best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

Simplex fw_update(const Simplex& current, std::size_t vertex, double eta) {
  check_unit(eta, "step size eta");
  require(vertex < current.size(), Errc::InvalidArgument, "vertex index out of range");
  std::vector<double> out(current.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = (1.0 - eta) * current[k];
  out[vertex] += eta;
  return Simplex(std::move(out));
}

PolytopePoint fw_update(const PolytopePoint& current, const Atom& vertex, double eta) {
  check_unit(eta, "step size eta");
  return current.blend(PolytopePoint::point_mass(vertex), eta);
}

Simplex simplex_projection(std::span<const double> v) {
  require(!v.empty(), Errc::InvalidArgument, "projection of an empty vector");
  bool feasible = true;
  double sum = 0.0;
  for (double x : v) {
    require(std::isfinite(x), Errc::InvalidArgument, "projection input must be finite");
    feasible = feasible && x >= 0.0;
    sum += x;
  }
  if (feasible && std::abs(sum - 1.0) <= 1e-12) return Simplex(std::vector<double>(v.begin(), v.end()));

  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::max(v[k] - tau, 0.0);
  return Simplex(std::move(out));
}

double l1_distance(const MixedProfile& a, const MixedProfile& b) {
  require(a.size() == b.size(), Errc::ShapeMismatch, "profiles differ in player count");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].size() == b[i].size(), Errc::ShapeMismatch, "strategies differ in length");
    for (std::size_t k = 0; k < a[i].size(); ++k) acc += std::abs(a[i][k] - b[i][k]);
  }
  return acc;
}

double l1_distance(const MarkovProfile& a, const MarkovProfile& b) {
  require(a.size() == b.size(), Errc::ShapeMismatch, "profiles differ in player count");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    require(a[i].num_states() == b[i].num_states(), Errc::ShapeMismatch,
            "policy tables differ in state count");
    acc += l1_distance(a[i].rows(), b[i].rows());
  }
  return acc;
}

ActionDistributions to_distributions(const MixedProfile& profile) {
  ActionDistributions out;
  out.reserve(profile.size());
  for (const auto& s : profile) out.push_back(s.probs());
  return out;
}

}  // namespace fwg
