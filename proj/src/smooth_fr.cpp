#include "graphtest/smooth_fr.hpp"

#include "graphtest/classical.hpp"
#include "graphtest/errors.hpp"
#include "graphtest/rng.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace graphtest {

namespace {

void check_fr_args(const EdgeSystem& es, double lambda) {
  if (es.directed()) throw ModeError("spanning-tree model requires an undirected edge system");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("temperature lambda must be positive and finite");
}

[[noreturn]] void conditioning_failure(const char* why, double lambda) {
  std::ostringstream msg;
  msg << "grounded Laplacian is numerically singular at lambda = " << lambda << " (" << why
      << ")";
  throw ConditioningError(msg.str(), lambda);
}

}  // namespace

GroundedLaplacian grounded_laplacian(const EdgeSystem& es, double lambda) {
  check_fr_args(es, lambda);
  const Index n = es.vertex_count();
  GroundedLaplacian lap;
  lap.grounded_vertex = n - 1;
  const double d_min = es.distances().minCoeff();
  lap.edge_weights = (-(es.distances().array() - d_min) / lambda).exp();
  if ((lap.edge_weights.array() == 0.0).any()) conditioning_failure("edge weight underflow", lambda);
  lap.matrix = Matrix::Zero(n - 1, n - 1);
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    const double w = lap.edge_weights[e];
    const Index i = ed.source;
    const Index j = ed.target;
    if (i < n - 1) lap.matrix(i, i) += w;
    if (j < n - 1) lap.matrix(j, j) += w;
    if (i < n - 1 && j < n - 1) {
      lap.matrix(i, j) -= w;
      lap.matrix(j, i) -= w;
    }
  }
  return lap;
}

double mst_exchange_gap(const EdgeSystem& es) {
  const Index n = es.vertex_count();
  const NeighbourhoodSet tree = mst_kruskal(es);
  std::vector<std::vector<std::pair<Index, double>>> adj(static_cast<std::size_t>(n));
  std::vector<char> in_tree(static_cast<std::size_t>(es.edge_count()), 0);
  for (Index e : tree.edge_indices) {
    const Edge& ed = es.edge(e);
    adj[ed.source].push_back({ed.target, es.distance(e)});
    adj[ed.target].push_back({ed.source, es.distance(e)});
    in_tree[e] = 1;
  }
  // path_max(s, v): heaviest tree edge between s and v.
  Matrix path_max = Matrix::Zero(n, n);
  std::vector<Index> stack;
  std::vector<Index> parent(static_cast<std::size_t>(n));
  for (Index s = 0; s < n; ++s) {
    std::fill(parent.begin(), parent.end(), Index{-1});
    parent[s] = s;
    stack.assign(1, s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (auto [v, w] : adj[u]) {
        if (parent[v] != -1) continue;
        parent[v] = u;
        path_max(s, v) = std::max(path_max(s, u), w);
        stack.push_back(v);
      }
    }
  }
  double gap = std::numeric_limits<double>::infinity();
  for (Index e = 0; e < es.edge_count(); ++e) {
    if (in_tree[e]) continue;
    const Edge& ed = es.edge(e);
    gap = std::min(gap, es.distance(e) - path_max(ed.source, ed.target));
  }
  return gap;
}

SpanningTreeModel::SpanningTreeModel(const EdgeSystem& es, double lambda)
    : es_(&es), lambda_(lambda) {
  check_fr_args(es, lambda);
  const Index n = es.vertex_count();
  const double log_trees = (n - 2) * std::log(static_cast<double>(n));
  if (mst_exchange_gap(es) / lambda > 700.0 + log_trees) {
    hard_ = true;
    marginals_ = Vector::Zero(es.edge_count());
    for (Index e : mst_kruskal(es).edge_indices) marginals_[e] = 1.0;
    return;
  }

  GroundedLaplacian lap = grounded_laplacian(es, lambda);
  weights_ = std::move(lap.edge_weights);
  Eigen::LLT<Matrix> llt(lap.matrix);
  if (llt.info() != Eigen::Success) conditioning_failure("Cholesky factorisation failed", lambda);
  inverse_ = Matrix::Zero(n, n);
  inverse_.topLeftCorner(n - 1, n - 1) = llt.solve(Matrix::Identity(n - 1, n - 1));
  if (!inverse_.allFinite()) conditioning_failure("non-finite inverse", lambda);

  marginals_.resize(es.edge_count());
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    const double resistance = potential(ed.source, ed.source) + potential(ed.target, ed.target) -
                              2.0 * potential(ed.source, ed.target);
    marginals_[e] = std::clamp(weights_[e] * resistance, 0.0, 1.0);
  }
}

double SpanningTreeModel::kernel(Index e, Index f) const {
  if (hard_) return e == f ? marginals_[e] : 0.0;
  const Edge& a = es_->edge(e);
  const Edge& b = es_->edge(f);
  const double quad = potential(a.source, b.source) - potential(a.source, b.target) -
                      potential(a.target, b.source) + potential(a.target, b.target);
  return std::sqrt(weights_[e] * weights_[f]) * quad;
}

double SpanningTreeModel::pair_moment(Index e, Index f) const {
  if (e == f) return marginals_[e];
  if (hard_) return marginals_[e] * marginals_[f];
  const double kef = kernel(e, f);
  return std::clamp(marginals_[e] * marginals_[f] - kef * kef, 0.0, 1.0);
}

Vector SpanningTreeModel::marginals_vjp(const Vector& cotangent) const {
  if (cotangent.size() != es_->edge_count())
    throw InvalidInputError("cotangent does not match the edge system");
  if (hard_) return Vector::Zero(es_->edge_count());
  const Index n = es_->vertex_count();
  // sum_e c_e K_ef^2 = w_f b_f^T (G L_c G) b_f, L_c = sum_e c_e w_e b_e b_e^T.
  Matrix lc = Matrix::Zero(n, n);
  for (Index e = 0; e < es_->edge_count(); ++e) {
    const double c = cotangent[e] * weights_[e];
    if (c == 0.0) continue;
    const Edge& ed = es_->edge(e);
    lc(ed.source, ed.source) += c;
    lc(ed.target, ed.target) += c;
    lc(ed.source, ed.target) -= c;
    lc(ed.target, ed.source) -= c;
  }
  const Matrix sandwich = inverse_ * lc * inverse_;
  Vector grad(es_->edge_count());
  for (Index f = 0; f < es_->edge_count(); ++f) {
    const Edge& ed = es_->edge(f);
    const double quad = sandwich(ed.source, ed.source) + sandwich(ed.target, ed.target) -
                        2.0 * sandwich(ed.source, ed.target);
    const double dtheta = cotangent[f] * marginals_[f] - weights_[f] * quad;
    grad[f] = -dtheta / lambda_;
  }
  return grad;
}

MarginalVector st_marginals(const EdgeSystem& es, double lambda) {
  return {SpanningTreeModel(es, lambda).marginals(), lambda};
}

double st_pair_moment(const EdgeSystem& es, double lambda, Index e, Index f) {
  if (e == f) throw ParameterError("st_pair_moment expects two distinct edges");
  if (e < 0 || f < 0 || e >= es.edge_count() || f >= es.edge_count())
    throw InvalidInputError("edge index out of range");
  return SpanningTreeModel(es, lambda).pair_moment(e, f);
}

SmoothStatistic smooth_fr_statistic(const EdgeSystem& es, const PooledData& data,
                                    double lambda) {
  SpanningTreeModel model(es, lambda);
  SmoothStatistic out{0.0, {model.marginals(), lambda}};
  out.statistic = crossing_indicator(es, data.labels).dot(out.marginals.values);
  return out;
}

StatisticGradient smooth_fr_backward(const EdgeSystem& es, const PooledData& data,
                                     double lambda, double upstream) {
  SpanningTreeModel model(es, lambda);
  StatisticGradient g;
  g.distances = model.marginals_vjp(upstream * crossing_indicator(es, data.labels));
  g.points = distance_backward(es, data.points, g.distances);
  return g;
}

Index jl_dimension(Index n, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("epsilon must lie in (0, 1)");
  return static_cast<Index>(
      std::ceil(24.0 * std::log(static_cast<double>(n)) / (epsilon * epsilon)));
}

MarginalVector approx_marginals_jl(const EdgeSystem& es, double lambda, double epsilon,
                                   std::uint64_t seed) {
  check_fr_args(es, lambda);
  const Index n = es.vertex_count();
  const Index p = jl_dimension(n, epsilon);
  if (mst_exchange_gap(es) / lambda > 700.0 + (n - 2) * std::log(static_cast<double>(n)))
    return st_marginals(es, lambda);

  GroundedLaplacian lap = grounded_laplacian(es, lambda);
  Eigen::LLT<Matrix> llt(lap.matrix);
  if (llt.info() != Eigen::Success) conditioning_failure("Cholesky factorisation failed", lambda);

  // Y = A diag(sqrt(w)) R, accumulated one edge (one row of R) at a time.
  Engine rng = make_engine(seed);
  const double entry = 1.0 / std::sqrt(static_cast<double>(p));
  Matrix y = Matrix::Zero(n, p);
  Eigen::RowVectorXd r(p);
  for (Index e = 0; e < es.edge_count(); ++e) {
    std::uint64_t bits = 0;
    for (Index c = 0; c < p; ++c) {
      if (c % 64 == 0) bits = rng();
      r[c] = (bits >> (c % 64)) & 1U ? entry : -entry;
    }
    const Edge& ed = es.edge(e);
    const double s = std::sqrt(lap.edge_weights[e]);
    y.row(ed.source) += s * r;
    y.row(ed.target) -= s * r;
  }
  Matrix zt = Matrix::Zero(n, p);
  zt.topRows(n - 1) = llt.solve(y.topRows(n - 1));

  MarginalVector mu{Vector(es.edge_count()), lambda};
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    mu.values[e] = lap.edge_weights[e] * (zt.row(ed.source) - zt.row(ed.target)).squaredNorm();
  }
  return mu;
}

}  // namespace graphtest
