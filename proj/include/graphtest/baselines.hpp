#pragma once

#include "graphtest/geometry.hpp"
#include "graphtest/permutation.hpp"

#include <vector>

namespace graphtest {

struct KernelConfig {
  double bandwidth = 1.0;  // sigma, in distance units
};

// Unbiased MMD^2 with k(x, y) = exp(-|x - y|^2 / (2 sigma^2)); within-sample
// means exclude the diagonal.
double mmd_unbiased(const PointSample& x1, const PointSample& x2, const KernelConfig& cfg);

// 2 E|x - y| - E|x - x'| - E|y - y'|, within-sample means over ordered
// distinct pairs (zero for a single point).
double energy_statistic(const PointSample& x1, const PointSample& x2);

// Lower median: element floor((n - 1) / 2) of the sorted values.
double lower_median(std::vector<double> values);

// Bandwidth = lower median of all pooled pairwise distances.
KernelConfig median_heuristic(const PooledData& pooled);
KernelConfig median_heuristic(const EdgeSystem& es);

// Pooled Gram matrix of the squared-exponential kernel.
Matrix gaussian_kernel_matrix(const Matrix& points, double bandwidth);
Matrix distance_matrix(const Matrix& points);

// The statistics in terms of BlockSums of the matrices above, so permutation
// nulls can reuse permutation_block_sums.
double mmd_from_blocks(const BlockSums& kernel_sums, Index n1, Index n2);
double energy_from_blocks(const BlockSums& distance_sums, Index n1, Index n2);

}  // namespace graphtest
