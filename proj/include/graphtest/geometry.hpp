#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <utility>
#include <vector>

namespace graphtest {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Sample membership of every pooled point: 1 for the first sample, 2 for the
// second.
using Labels = std::vector<std::uint8_t>;

// n x d matrix of points, one per row. Entries are finite, d >= 1.
class PointSample {
 public:
  PointSample() : points_(0, 1) {}
  explicit PointSample(Matrix points);

  const Matrix& points() const noexcept { return points_; }
  Index size() const noexcept { return points_.rows(); }
  Index dim() const noexcept { return points_.cols(); }

 private:
  Matrix points_;
};

// Both samples stacked: rows [0, n1) come from the first sample, the rest from
// the second.
struct PooledData {
  Matrix points;
  Index n1 = 0;
  Index n2 = 0;
  Labels labels;

  Index size() const noexcept { return n1 + n2; }
  Index dim() const noexcept { return points.cols(); }
};

PooledData pool_samples(const PointSample& x1, const PointSample& x2);

// Labels (1,...,1,2,...,2) with n1 ones.
Labels canonical_labels(Index n1, Index n2);

enum class GraphMode { directed, undirected };

enum class Metric { euclidean };

struct Edge {
  Index source;
  Index target;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Number of edges of the complete graph on n vertices in the given mode.
Index complete_edge_count(Index n, GraphMode mode) noexcept;

// Canonical position of edge (i, j). Undirected edges are stored with i < j in
// lexicographic order, directed edges as all ordered pairs i != j, also
// lexicographic. Undirected lookups accept either endpoint order.
Index edge_index(Index n, GraphMode mode, Index i, Index j);
Edge edge_endpoints(Index n, GraphMode mode, Index e);

// Complete graph over the pooled points with one distance per canonical edge.
class EdgeSystem {
 public:
  EdgeSystem(Index n, GraphMode mode, Vector distances);

  GraphMode mode() const noexcept { return mode_; }
  bool directed() const noexcept { return mode_ == GraphMode::directed; }
  Index vertex_count() const noexcept { return n_; }
  Index edge_count() const noexcept { return distances_.size(); }

  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Edge& edge(Index e) const { return edges_[static_cast<std::size_t>(e)]; }
  const Vector& distances() const noexcept { return distances_; }
  double distance(Index e) const { return distances_[e]; }

  Index index_of(Index i, Index j) const { return edge_index(n_, mode_, i, j); }

  // Index of j -> i for the directed edge i -> j. ModeError when undirected.
  Index reverse(Index e) const;

  // Same graph and weights in the other orientation.
  EdgeSystem with_mode(GraphMode mode) const;

 private:
  Index n_;
  GraphMode mode_;
  std::vector<Edge> edges_;
  Vector distances_;
};

EdgeSystem pairwise_distances(const PointSample& sample,
                              GraphMode mode = GraphMode::undirected,
                              Metric metric = Metric::euclidean);
EdgeSystem pairwise_distances(const Matrix& points,
                              GraphMode mode = GraphMode::undirected,
                              Metric metric = Metric::euclidean);

// Chain rule from edge distances to point coordinates:
// grad_points[i] += grad_d[e] * (x_i - x_j) / |x_i - x_j| for e = (i, j), and
// the negated term for j. Coincident endpoints contribute nothing.
Matrix distance_backward(const EdgeSystem& es, const Matrix& points,
                         const Vector& grad_d);

}  // namespace graphtest
