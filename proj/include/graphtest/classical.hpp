#pragma once

#include "graphtest/geometry.hpp"

#include <vector>

namespace graphtest {

enum class NeighbourhoodKind { mst, knn };

// A subset of the edges of a complete graph on `vertex_count` vertices, in
// the canonical indexing of `mode`.
struct NeighbourhoodSet {
  NeighbourhoodKind kind = NeighbourhoodKind::mst;
  int k = 0;  // knn only
  Index vertex_count = 0;
  GraphMode mode = GraphMode::undirected;
  std::vector<Index> edge_indices;  // sorted ascending
};

// Kruskal with union-find. Ties in distance go to the smaller edge index.
NeighbourhoodSet mst_kruskal(const EdgeSystem& es);

// Edge i -> j is selected iff i is one of the k nearest points to j; ties go
// to the smaller source index.
NeighbourhoodSet knn_edges(const EdgeSystem& es, int k);

// Dense Prim's algorithm on Euclidean distances without materialising an
// EdgeSystem, O(n^2) time and O(n) memory for large 1-D/low-d samples.
std::vector<Edge> euclidean_mst(const Matrix& points);

// Number of selected edges whose endpoints carry different labels.
long cross_count(const NeighbourhoodSet& u, const Labels& labels);
long cross_count(const NeighbourhoodSet& u, const PooledData& data);

// Edges (i, j) of a spanning tree, any order, with i != j.
long cross_count(const std::vector<Edge>& edges, const Labels& labels);

}  // namespace graphtest
