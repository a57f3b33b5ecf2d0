#pragma once

#include "graphtest/geometry.hpp"

namespace graphtest {

// Per-edge inclusion probabilities under a Gibbs model at temperature lambda,
// aligned with the EdgeSystem they were computed from.
struct MarginalVector {
  Vector values;
  double lambda = 1.0;
};

struct SmoothStatistic {
  double statistic = 0.0;
  MarginalVector marginals;
};

struct StatisticGradient {
  Vector distances;  // one entry per edge
  Matrix points;     // same shape as the pooled points
};

// 1 where the endpoints of edge e carry different labels, 0 otherwise.
Vector crossing_indicator(const EdgeSystem& es, const Labels& labels);

}  // namespace graphtest
