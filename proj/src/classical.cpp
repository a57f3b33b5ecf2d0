#include "graphtest/classical.hpp"

#include "graphtest/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace graphtest {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)), rank_(parent_.size(), 0) {
    std::iota(parent_.begin(), parent_.end(), Index{0});
  }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<Index> parent_;
  std::vector<int> rank_;
};

}  // namespace

NeighbourhoodSet mst_kruskal(const EdgeSystem& es) {
  if (es.directed()) throw ModeError("mst_kruskal requires an undirected edge system");
  const Index n = es.vertex_count();
  std::vector<Index> order(static_cast<std::size_t>(es.edge_count()));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& d = es.distances();
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return d[a] < d[b] || (d[a] == d[b] && a < b);
  });

  NeighbourhoodSet tree{NeighbourhoodKind::mst, 0, n, GraphMode::undirected, {}};
  tree.edge_indices.reserve(static_cast<std::size_t>(n - 1));
  DisjointSets sets(n);
  for (Index e : order) {
    const Edge& ed = es.edge(e);
    if (sets.unite(ed.source, ed.target)) {
      tree.edge_indices.push_back(e);
      if (static_cast<Index>(tree.edge_indices.size()) == n - 1) break;
    }
  }
  std::sort(tree.edge_indices.begin(), tree.edge_indices.end());
  return tree;
}

NeighbourhoodSet knn_edges(const EdgeSystem& es, int k) {
  if (!es.directed()) throw ModeError("knn_edges requires a directed edge system");
  const Index n = es.vertex_count();
  if (k < 1 || k > n - 1)
    throw ParameterError("k must lie in [1, n-1], got " + std::to_string(k));

  NeighbourhoodSet knn{NeighbourhoodKind::knn, k, n, GraphMode::directed, {}};
  knn.edge_indices.reserve(static_cast<std::size_t>(k * n));
  std::vector<Index> sources;
  sources.reserve(static_cast<std::size_t>(n - 1));
  for (Index j = 0; j < n; ++j) {
    sources.clear();
    for (Index i = 0; i < n; ++i)
      if (i != j) sources.push_back(i);
    auto closer = [&](Index a, Index b) {
      const double da = es.distance(es.index_of(a, j));
      const double db = es.distance(es.index_of(b, j));
      return da < db || (da == db && a < b);
    };
    std::partial_sort(sources.begin(), sources.begin() + k, sources.end(), closer);
    for (int r = 0; r < k; ++r) knn.edge_indices.push_back(es.index_of(sources[r], j));
  }
  std::sort(knn.edge_indices.begin(), knn.edge_indices.end());
  return knn;
}

std::vector<Edge> euclidean_mst(const Matrix& points) {
  const Index n = points.rows();
  if (n < 2) throw SizeError("euclidean_mst needs at least two points");
  std::vector<double> best(static_cast<std::size_t>(n),
                           std::numeric_limits<double>::infinity());
  std::vector<Index> parent(static_cast<std::size_t>(n), -1);
  std::vector<char> in_tree(static_cast<std::size_t>(n), 0);
  std::vector<Edge> tree;
  tree.reserve(static_cast<std::size_t>(n - 1));

  Index current = 0;
  in_tree[0] = 1;
  for (Index step = 1; step < n; ++step) {
    Index next = -1;
    double next_d = std::numeric_limits<double>::infinity();
    for (Index v = 0; v < n; ++v) {
      if (in_tree[v]) continue;
      const double dv = (points.row(v) - points.row(current)).squaredNorm();
      if (dv < best[v]) {
        best[v] = dv;
        parent[v] = current;
      }
      if (best[v] < next_d) {
        next_d = best[v];
        next = v;
      }
    }
    in_tree[next] = 1;
    tree.push_back({std::min(parent[next], next), std::max(parent[next], next)});
    current = next;
  }
  return tree;
}

long cross_count(const NeighbourhoodSet& u, const Labels& labels) {
  if (static_cast<Index>(labels.size()) != u.vertex_count)
    throw InvalidInputError("label count does not match the neighbourhood graph");
  long count = 0;
  for (Index e : u.edge_indices) {
    const Edge ed = edge_endpoints(u.vertex_count, u.mode, e);
    count += labels[ed.source] != labels[ed.target];
  }
  return count;
}

long cross_count(const NeighbourhoodSet& u, const PooledData& data) {
  return cross_count(u, data.labels);
}

long cross_count(const std::vector<Edge>& edges, const Labels& labels) {
  long count = 0;
  for (const Edge& ed : edges) count += labels.at(ed.source) != labels.at(ed.target);
  return count;
}

}  // namespace graphtest
