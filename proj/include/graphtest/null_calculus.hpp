#pragma once

#include "graphtest/marginals.hpp"

#include <functional>

namespace graphtest {

// Moments of T = sum_e crossing_pi(e) mu_e when pi is a uniformly random
// labelling with n1 ones. m is the size every valid edge set has (n - 1 for
// spanning trees, k n for k-NN graphs); the variance formulas below assume
// sum_e mu_e = m, which holds for all marginal vectors of those models.
struct NullMoments {
  double mean = 0.0;
  double variance = 0.0;
  Index m = 0;
  double chi1 = 0.0;  // n1 n2 / (n (n - 1))
  double chi2 = 0.0;  // 4 (n1 - 1)(n2 - 1) / ((n - 2)(n - 3))
};

// E[crossing(e) crossing(f)] under the permutation null.
double pi_entry(const Edge& e, const Edge& f, Index n1, Index n2);

double null_mean(Index m, Index n1, Index n2);

// O(|E|) variance:
//   chi1 (1 - chi2) sum_v (sum_{e at v} mu_e)^2
//   + chi1 chi2 sum_e mu_e (mu_e + mu_reverse(e))
//   + chi1 (chi2 - 4 chi1) m^2
double null_variance_fast(const Vector& mu, const EdgeSystem& es, Index n1, Index n2,
                          Index m);

// mu^T Pi mu - mean^2 by a double loop over edge pairs; for small graphs.
double null_variance_quadratic(const Vector& mu, const EdgeSystem& es, Index n1,
                               Index n2, Index m);

// Gradient of null_variance_fast w.r.t. mu at fixed m.
Vector null_variance_gradient(const Vector& mu, const EdgeSystem& es, Index n1, Index n2);

NullMoments null_moments(const Vector& mu, const EdgeSystem& es, Index n1, Index n2,
                         Index m);

// (T - mean) / sqrt(variance). DegenerateNullError when variance <= 0.
double t_statistic(double statistic, const NullMoments& moments);

double normal_cdf(double x);

// One-sided normal approximation Phi(t); small t rejects.
inline double normal_pvalue(double t) { return normal_cdf(t); }

// mu_bar_ij = (mu_{i->j} + mu_{j->i}) / 2; an undirected edge counts as one
// direction. Zero diagonal.
Matrix symmetrized_weights(const EdgeSystem& es, const Vector& mu);

struct NormalityTerms {
  double s2 = 0.0;  // sum over distinct i, j, k of mu_ij mu_ik
  double s3 = 0.0;  // sum over distinct i, j, k, l of mu_ij mu_ik mu_il
  double l4 = 0.0;  // sum over distinct i, j, k, l of mu_ij mu_jk mu_kl
  double k = 0.0;   // mean neighbourhood size, sum_{i != j} mu_ij / n
  double bound_numerator = 0.0;  // n k^3 + k S2 + S3 + L4
};

// Diagnostic terms of the normal-approximation error bound. mu_bar must be
// symmetric; its diagonal is ignored. O(n^3).
NormalityTerms normality_terms(const Matrix& mu_bar);

enum class DivergenceKind { fr, nn };

// f-divergence generators of the limits of the two classical statistics,
// shifted so that f(1) = 0:
//   fr: (a x - (1 - a))^2 / (4 a (1 - a) (a x + 1 - a)) - (2a - 1)^2 / (4 a (1 - a))
//   nn: (a^2 x^2 + (1 - a)^2) / (a x + 1 - a) - (a^2 + (1 - a)^2)
double f_generator(double x, double alpha, DivergenceKind kind);

using Density = std::function<double(double)>;

struct QuadratureOptions {
  double lower = -12.0;
  double upper = 12.0;
  double tolerance = 1e-8;  // absolute
};

// Almost-sure limits of the normalised classical statistics for 1-D densities:
//   fr: lim T / n           = 2 a (1 - a) int p q / (a p + (1 - a) q)
//   nn: lim 1 - T / (n k)   = int (a^2 p^2 + (1 - a)^2 q^2) / (a p + (1 - a) q)
// Adaptive Gauss-Kronrod quadrature; NumericalError if the error estimate
// exceeds the tolerance.
double divergence_limit_1d(const Density& p, const Density& q, double alpha,
                           DivergenceKind kind, const QuadratureOptions& options = {});

}  // namespace graphtest
