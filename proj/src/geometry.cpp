#include "graphtest/geometry.hpp"

#include "graphtest/errors.hpp"
#include "graphtest/marginals.hpp"

#include <string>

namespace graphtest {

PointSample::PointSample(Matrix points) : points_(std::move(points)) {
  if (points_.cols() < 1)
    throw InvalidInputError("point sample must have dimension >= 1");
  if (!points_.allFinite())
    throw InvalidInputError("point sample contains non-finite coordinates");
}

Labels canonical_labels(Index n1, Index n2) {
  Labels labels(static_cast<std::size_t>(n1 + n2), 2);
  std::fill_n(labels.begin(), n1, std::uint8_t{1});
  return labels;
}

PooledData pool_samples(const PointSample& x1, const PointSample& x2) {
  if (x1.dim() != x2.dim())
    throw InvalidInputError("dimension mismatch: " + std::to_string(x1.dim()) +
                            " vs " + std::to_string(x2.dim()));
  if (x1.size() < 1 || x2.size() < 1)
    throw SizeError("both samples must contain at least one point");
  PooledData pooled;
  pooled.n1 = x1.size();
  pooled.n2 = x2.size();
  pooled.points.resize(pooled.n1 + pooled.n2, x1.dim());
  pooled.points.topRows(pooled.n1) = x1.points();
  pooled.points.bottomRows(pooled.n2) = x2.points();
  pooled.labels = canonical_labels(pooled.n1, pooled.n2);
  return pooled;
}

Index complete_edge_count(Index n, GraphMode mode) noexcept {
  if (n < 2) return 0;
  return mode == GraphMode::directed ? n * (n - 1) : n * (n - 1) / 2;
}

Index edge_index(Index n, GraphMode mode, Index i, Index j) {
  if (i < 0 || j < 0 || i >= n || j >= n || i == j)
    throw InvalidInputError("no edge between vertices " + std::to_string(i) +
                            " and " + std::to_string(j));
  if (mode == GraphMode::directed) return i * (n - 1) + (j < i ? j : j - 1);
  if (i > j) std::swap(i, j);
  // Rows 0..i-1 hold (n-1) + (n-2) + ... + (n-i) edges.
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

Edge edge_endpoints(Index n, GraphMode mode, Index e) {
  if (e < 0 || e >= complete_edge_count(n, mode))
    throw InvalidInputError("edge index out of range: " + std::to_string(e));
  if (mode == GraphMode::directed) {
    const Index i = e / (n - 1);
    const Index r = e % (n - 1);
    return {i, r < i ? r : r + 1};
  }
  Index i = 0;
  Index row = n - 1;
  while (e >= row) {
    e -= row;
    ++i;
    --row;
  }
  return {i, i + 1 + e};
}

EdgeSystem::EdgeSystem(Index n, GraphMode mode, Vector distances)
    : n_(n), mode_(mode), distances_(std::move(distances)) {
  if (n < 2) throw SizeError("edge system needs at least two vertices");
  const Index count = complete_edge_count(n, mode);
  if (distances_.size() != count)
    throw InvalidInputError("expected " + std::to_string(count) +
                            " distances, got " +
                            std::to_string(distances_.size()));
  if (!distances_.allFinite() || (distances_.array() < 0.0).any())
    throw InvalidInputError("distances must be finite and nonnegative");
  edges_.reserve(static_cast<std::size_t>(count));
  for (Index i = 0; i < n; ++i) {
    if (mode == GraphMode::directed) {
      for (Index j = 0; j < n; ++j)
        if (j != i) edges_.push_back({i, j});
    } else {
      for (Index j = i + 1; j < n; ++j) edges_.push_back({i, j});
    }
  }
}

Index EdgeSystem::reverse(Index e) const {
  if (mode_ != GraphMode::directed)
    throw ModeError("reverse edges exist only in directed mode");
  const Edge& ed = edge(e);
  return edge_index(n_, mode_, ed.target, ed.source);
}

EdgeSystem EdgeSystem::with_mode(GraphMode mode) const {
  if (mode == mode_) return *this;
  Vector d(complete_edge_count(n_, mode));
  for (Index e = 0; e < d.size(); ++e) {
    const Edge ed = edge_endpoints(n_, mode, e);
    d[e] = distances_[index_of(ed.source, ed.target)];
  }
  return EdgeSystem(n_, mode, std::move(d));
}

EdgeSystem pairwise_distances(const Matrix& points, GraphMode mode,
                              Metric metric) {
  if (points.rows() < 2)
    throw SizeError("pairwise distances need at least two points");
  if (!points.allFinite())
    throw InvalidInputError("points contain non-finite coordinates");
  (void)metric;  // euclidean is the only metric
  const Index n = points.rows();
  Vector d(complete_edge_count(n, mode));
  Index e = 0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = mode == GraphMode::directed ? 0 : i + 1; j < n; ++j) {
      if (j == i) continue;
      d[e++] = (points.row(i) - points.row(j)).norm();
    }
  }
  return EdgeSystem(n, mode, std::move(d));
}

EdgeSystem pairwise_distances(const PointSample& sample, GraphMode mode,
                              Metric metric) {
  return pairwise_distances(sample.points(), mode, metric);
}

Matrix distance_backward(const EdgeSystem& es, const Matrix& points,
                         const Vector& grad_d) {
  if (points.rows() != es.vertex_count() || grad_d.size() != es.edge_count())
    throw InvalidInputError("distance_backward: shape mismatch");
  Matrix grad = Matrix::Zero(points.rows(), points.cols());
  for (Index e = 0; e < es.edge_count(); ++e) {
    const double g = grad_d[e];
    if (g == 0.0) continue;
    const Edge& ed = es.edge(e);
    const double len = (points.row(ed.source) - points.row(ed.target)).norm();
    if (len == 0.0) continue;
    const double scale = g / len;
    for (Index c = 0; c < points.cols(); ++c) {
      const double step = scale * (points(ed.source, c) - points(ed.target, c));
      grad(ed.source, c) += step;
      grad(ed.target, c) -= step;
    }
  }
  return grad;
}

Vector crossing_indicator(const EdgeSystem& es, const Labels& labels) {
  if (static_cast<Index>(labels.size()) != es.vertex_count())
    throw InvalidInputError("label count does not match the edge system");
  Vector delta(es.edge_count());
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    delta[e] = labels[ed.source] != labels[ed.target] ? 1.0 : 0.0;
  }
  return delta;
}

}  // namespace graphtest
