#include "graphtest/permutation.hpp"

#include "graphtest/errors.hpp"
#include "graphtest/parallel.hpp"
#include "graphtest/rng.hpp"

#include <algorithm>
#include <cmath>

namespace graphtest {

namespace {

constexpr int kBatch = 128;

}  // namespace

Labels random_labelling(Index n1, Index n2, std::uint64_t seed, std::uint64_t draw) {
  Labels labels = canonical_labels(n1, n2);
  Engine rng = make_engine(seed, {draw});
  for (std::size_t i = labels.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(labels[i - 1], labels[pick(rng)]);
  }
  return labels;
}

double pvalue_from_null(double observed, std::span<const double> null_values,
                        Tail tail) {
  const double tol = 1e-9 * std::max(1.0, std::abs(observed));
  std::size_t count = 0;
  for (double v : null_values) {
    if (tail == Tail::lower ? v <= observed + tol : v >= observed - tol) ++count;
  }
  return (1.0 + static_cast<double>(count)) /
         (static_cast<double>(null_values.size()) + 1.0);
}

double permutation_pvalue(const LabelStatistic& stat, const PooledData& data,
                          int n_perms, std::uint64_t seed, Tail tail, int workers) {
  if (n_perms < 1) throw ParameterError("permutation count must be positive");
  const double observed = stat(data.labels);
  std::vector<double> null(static_cast<std::size_t>(n_perms));
  parallel_for(null.size(), workers, [&](std::size_t b) {
    null[b] = stat(random_labelling(data.n1, data.n2, seed, b));
  });
  return pvalue_from_null(observed, null, tail);
}

BlockSums block_sums(const Matrix& weights, const Labels& labels) {
  const Index n = weights.rows();
  if (weights.cols() != n || static_cast<Index>(labels.size()) != n)
    throw InvalidInputError("block_sums: shape mismatch");
  BlockSums s;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double w = weights(i, j);
      if (labels[i] == 1 && labels[j] == 1) s.within_first += w;
      else if (labels[i] == 2 && labels[j] == 2) s.within_second += w;
      else if (labels[i] == 1) s.cross += w;
    }
  }
  return s;
}

std::vector<BlockSums> permutation_block_sums(const Matrix& weights, Index n1,
                                              Index n2, int n_perms,
                                              std::uint64_t seed, int workers) {
  const Index n = n1 + n2;
  if (weights.rows() != n || weights.cols() != n)
    throw InvalidInputError("permutation_block_sums: shape mismatch");
  if (n_perms < 1) throw ParameterError("permutation count must be positive");

  Matrix w = weights;
  w.diagonal().setZero();
  const Vector row_sums = w.rowwise().sum();
  const double total = row_sums.sum();

  std::vector<BlockSums> out(static_cast<std::size_t>(n_perms));
  const std::size_t batches = (out.size() + kBatch - 1) / kBatch;
  parallel_for(batches, workers, [&](std::size_t batch) {
    const std::size_t first = batch * kBatch;
    const Index width = static_cast<Index>(std::min<std::size_t>(kBatch, out.size() - first));
    Matrix z = Matrix::Zero(n, width);
    for (Index b = 0; b < width; ++b) {
      const Labels labels = random_labelling(n1, n2, seed, first + static_cast<std::size_t>(b));
      for (Index i = 0; i < n; ++i) z(i, b) = labels[i] == 1 ? 1.0 : 0.0;
    }
    const Matrix wz = w * z;
    for (Index b = 0; b < width; ++b) {
      BlockSums& s = out[first + static_cast<std::size_t>(b)];
      s.within_first = z.col(b).dot(wz.col(b));
      s.cross = z.col(b).dot(row_sums) - s.within_first;
      s.within_second = total - s.within_first - 2.0 * s.cross;
    }
  });
  return out;
}

Matrix edge_weight_matrix(const EdgeSystem& es, const Vector& values) {
  if (values.size() != es.edge_count())
    throw InvalidInputError("edge_weight_matrix: value vector does not match edges");
  const Index n = es.vertex_count();
  Matrix w = Matrix::Zero(n, n);
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    w(ed.source, ed.target) += values[e];
    if (!es.directed()) w(ed.target, ed.source) += values[e];
  }
  if (es.directed()) w = (w + w.transpose()).eval();
  return w;
}

}  // namespace graphtest
