#include "graphtest/baselines.hpp"

#include "graphtest/errors.hpp"

#include <algorithm>
#include <cmath>

namespace graphtest {

Matrix distance_matrix(const Matrix& points) {
  const Index n = points.rows();
  Matrix d = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) d(i, j) = d(j, i) = (points.row(i) - points.row(j)).norm();
  return d;
}

Matrix gaussian_kernel_matrix(const Matrix& points, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ParameterError("kernel bandwidth must be positive");
  const Matrix d = distance_matrix(points);
  return (-d.array().square() / (2.0 * bandwidth * bandwidth)).exp().matrix();
}

double mmd_from_blocks(const BlockSums& s, Index n1, Index n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  return s.within_first / (a * (a - 1.0)) + s.within_second / (b * (b - 1.0)) -
         2.0 * s.cross / (a * b);
}

double energy_from_blocks(const BlockSums& s, Index n1, Index n2) {
  const double a = static_cast<double>(n1);
  const double b = static_cast<double>(n2);
  const double within1 = n1 > 1 ? s.within_first / (a * (a - 1.0)) : 0.0;
  const double within2 = n2 > 1 ? s.within_second / (b * (b - 1.0)) : 0.0;
  return 2.0 * s.cross / (a * b) - within1 - within2;
}

double mmd_unbiased(const PointSample& x1, const PointSample& x2, const KernelConfig& cfg) {
  if (x1.size() < 2 || x2.size() < 2) throw SizeError("unbiased MMD needs n1, n2 >= 2");
  const PooledData pooled = pool_samples(x1, x2);
  const Matrix k = gaussian_kernel_matrix(pooled.points, cfg.bandwidth);
  return mmd_from_blocks(block_sums(k, pooled.labels), pooled.n1, pooled.n2);
}

double energy_statistic(const PointSample& x1, const PointSample& x2) {
  const PooledData pooled = pool_samples(x1, x2);
  const Matrix d = distance_matrix(pooled.points);
  return energy_from_blocks(block_sums(d, pooled.labels), pooled.n1, pooled.n2);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw SizeError("median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

KernelConfig median_heuristic(const EdgeSystem& es) {
  const Vector& d = es.distances();
  const double median = lower_median(std::vector<double>(d.data(), d.data() + d.size()));
  if (!(median > 0.0))
    throw DegenerateBandwidthError("median heuristic gives a zero bandwidth (degenerate sample)");
  return {median};
}

KernelConfig median_heuristic(const PooledData& pooled) {
  return median_heuristic(pairwise_distances(pooled.points, GraphMode::undirected));
}

}  // namespace graphtest
