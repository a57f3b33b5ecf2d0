#pragma once

#include "graphtest/geometry.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace graphtest {

// Which end of the null distribution is evidence against H0. The graph
// statistics reject for small values, MMD and energy for large ones.
enum class Tail { lower, upper };

// Uniformly random labelling with exactly n1 ones: a Fisher-Yates shuffle of
// the canonical labels, seeded from (seed, draw).
Labels random_labelling(Index n1, Index n2, std::uint64_t seed, std::uint64_t draw);

using LabelStatistic = std::function<double(const Labels&)>;

// Add-one permutation p-value (1 + #{pi : stat(pi*) >= stat(pi)}) / (B + 1)
// for the lower tail, inequality reversed for the upper tail. `stat` must be
// safe to call concurrently when workers > 1.
double permutation_pvalue(const LabelStatistic& stat, const PooledData& data,
                          int n_perms, std::uint64_t seed, Tail tail = Tail::lower,
                          int workers = 1);

// Same estimator given precomputed null values. Values within a relative
// 1e-9 of the observation count as ties, which are counted as at least as
// extreme.
double pvalue_from_null(double observed, std::span<const double> null_values,
                        Tail tail);

// Sums of a symmetric weight matrix W (diagonal ignored) over the blocks a
// labelling induces:
//   within_first  = sum of W_ij over ordered pairs i != j, both labelled 1
//   within_second = same for label 2
//   cross         = sum of W_ij over i labelled 1, j labelled 2
// Every two-sample statistic in this library is a function of these three.
struct BlockSums {
  double within_first = 0.0;
  double within_second = 0.0;
  double cross = 0.0;
};

BlockSums block_sums(const Matrix& weights, const Labels& labels);

// Block sums for n_perms labellings random_labelling(n1, n2, seed, b). The
// labellings are evaluated in fixed-size batches through one matrix product
// each, so the output is independent of the worker count.
std::vector<BlockSums> permutation_block_sums(const Matrix& weights, Index n1,
                                              Index n2, int n_perms,
                                              std::uint64_t seed, int workers = 1);

// Symmetric n x n matrix with W_ij = sum of values[e] over the edges e that
// join i and j (both directions in directed mode).
Matrix edge_weight_matrix(const EdgeSystem& es, const Vector& values);

}  // namespace graphtest
