#pragma once

#include "graphtest/marginals.hpp"

namespace graphtest {

// Gibbs model over k-subsets S of one node's candidate neighbours,
// P(S) proportional to exp(sum_{j in S} logits[j]) [|S| = k]. For the k-NN
// test the logits are -d(x_j, x_node) / lambda.
struct CardinalityModel {
  Vector logits;
  int k = 1;
};

// Logit gap between the k-th and (k+1)-th largest candidate beyond which the
// model is treated as the deterministic top-k selection.
inline constexpr double kHardSelectionGap = 700.0;

// Exact inclusion probabilities P(j in S), computed in the log domain by the
// forward-backward recursion over (position, count-so-far) states in O(mk).
Vector cardinality_marginals(const CardinalityModel& model);

struct CardinalityTangent {
  Vector marginals;
  Vector tangent;  // d marginals / d eps at logits + eps * direction
};

// Marginals together with their directional derivative along `direction`,
// obtained by differentiating every message of the recursion. The Jacobian of
// the marginals w.r.t. the logits is the (symmetric) covariance of the
// inclusion indicators, so `tangent` is also the gradient of
// direction . marginals w.r.t. the logits. Zero in the hard-selection regime.
CardinalityTangent cardinality_marginals_jvp(const CardinalityModel& model,
                                             const Vector& direction);

// Marginals of all directed edges i -> j; node j's model ranges over the
// sources i != j.
MarginalVector knn_marginals(const EdgeSystem& es, double lambda, int k);

// T = sum_e crossing(e) * mu_e.
SmoothStatistic smooth_knn_statistic(const EdgeSystem& es, const PooledData& data,
                                     double lambda, int k);

// Gradient w.r.t. the edge distances of cotangent . mu(d / lambda).
Vector knn_marginals_vjp(const EdgeSystem& es, double lambda, int k,
                         const Vector& cotangent);

// upstream * dT/dd and upstream * dT/dx.
StatisticGradient smooth_knn_backward(const EdgeSystem& es, const PooledData& data,
                                      double lambda, int k, double upstream);

}  // namespace graphtest
