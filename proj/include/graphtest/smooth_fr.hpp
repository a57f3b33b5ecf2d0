#pragma once

#include "graphtest/marginals.hpp"

#include <cstdint>

namespace graphtest {

// L = A diag(w) A^T over the complete graph with the last vertex removed,
// w_e = exp(-(d_e - d_min) / lambda).
struct GroundedLaplacian {
  Matrix matrix;
  Index grounded_vertex = 0;
  Vector edge_weights;
};

GroundedLaplacian grounded_laplacian(const EdgeSystem& es, double lambda);

// Gibbs measure over spanning trees, P(U) proportional to
// exp(-sum_{e in U} d_e / lambda). The tree edge indicators form a DPP with
// kernel K_ef = sqrt(w_e w_f) b_e^T L^{-1} b_f, b_e = u_i - u_j, so the
// marginals are weighted effective resistances and every joint inclusion
// probability is a minor of K.
//
// When the cheapest non-MST tree costs more than (700 + (n-2) ln n) * lambda
// above the MST, the measure is the point mass on the MST to double
// precision; the model then reports MST indicators and zero derivatives.
class SpanningTreeModel {
 public:
  SpanningTreeModel(const EdgeSystem& es, double lambda);

  const EdgeSystem& edges() const noexcept { return *es_; }
  double lambda() const noexcept { return lambda_; }
  bool low_temperature() const noexcept { return hard_; }

  const Vector& marginals() const noexcept { return marginals_; }
  double kernel(Index e, Index f) const;
  double pair_moment(Index e, Index f) const;

  // Gradient w.r.t. the edge distances of cotangent . mu, using
  // d mu_e / d theta_f = Cov(1_e, 1_f) = [e = f] K_ee - K_ef^2 with
  // theta = -d / lambda.
  Vector marginals_vjp(const Vector& cotangent) const;

 private:
  double potential(Index a, Index b) const { return inverse_(a, b); }

  const EdgeSystem* es_;
  double lambda_;
  bool hard_ = false;
  Vector weights_;
  Matrix inverse_;  // n x n, L^{-1} padded with a zero row/column for the ground
  Vector marginals_;
};

// Minimum over non-tree edges f of d_f minus the largest MST edge on the tree
// path joining f's endpoints; +inf for n = 2.
double mst_exchange_gap(const EdgeSystem& es);

MarginalVector st_marginals(const EdgeSystem& es, double lambda);
double st_pair_moment(const EdgeSystem& es, double lambda, Index e, Index f);

SmoothStatistic smooth_fr_statistic(const EdgeSystem& es, const PooledData& data,
                                    double lambda);
StatisticGradient smooth_fr_backward(const EdgeSystem& es, const PooledData& data,
                                     double lambda, double upstream);

// ceil(24 ln n / eps^2).
Index jl_dimension(Index n, double epsilon);

// Random-projection estimate mu_e ~= w_e |Z b_e|^2 with
// Z^T = L^{-1} A diag(sqrt(w)) R and R uniform over {-1/sqrt(p), +1/sqrt(p)}.
MarginalVector approx_marginals_jl(const EdgeSystem& es, double lambda,
                                   double epsilon, std::uint64_t seed);

}  // namespace graphtest
