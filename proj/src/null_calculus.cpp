#include "graphtest/null_calculus.hpp"

#include "graphtest/errors.hpp"
#include "graphtest/permutation.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <sstream>

namespace graphtest {

namespace {

void require_null_size(Index n1, Index n2) {
  if (n1 < 1 || n2 < 1 || n1 + n2 < 4)
    throw ParameterError("null variance needs n1, n2 >= 1 and n = n1 + n2 >= 4");
}

double chi1(Index n1, Index n2) {
  const double n = static_cast<double>(n1 + n2);
  return static_cast<double>(n1) * static_cast<double>(n2) / (n * (n - 1.0));
}

double chi2(Index n1, Index n2) {
  const double n = static_cast<double>(n1 + n2);
  return 4.0 * static_cast<double>(n1 - 1) * static_cast<double>(n2 - 1) /
         ((n - 2.0) * (n - 3.0));
}

void check_mu(const Vector& mu, const EdgeSystem& es) {
  if (mu.size() != es.edge_count())
    throw InvalidInputError("marginal vector does not match the edge system");
}

}  // namespace

double pi_entry(const Edge& e, const Edge& f, Index n1, Index n2) {
  require_null_size(n1, n2);
  int shared = 0;
  shared += e.source == f.source || e.source == f.target;
  shared += e.target == f.source || e.target == f.target;
  const double c1 = chi1(n1, n2);
  if (shared == 2) return 2.0 * c1;
  if (shared == 1) return c1;
  return c1 * chi2(n1, n2);
}

double null_mean(Index m, Index n1, Index n2) {
  const double n = static_cast<double>(n1 + n2);
  if (n < 2) throw ParameterError("null mean needs n >= 2");
  return 2.0 * static_cast<double>(m) * static_cast<double>(n1) * static_cast<double>(n2) /
         (n * (n - 1.0));
}

double null_variance_fast(const Vector& mu, const EdgeSystem& es, Index n1, Index n2,
                          Index m) {
  require_null_size(n1, n2);
  check_mu(mu, es);
  const double c1 = chi1(n1, n2);
  const double c2 = chi2(n1, n2);
  Vector degree = Vector::Zero(es.vertex_count());
  double parallel = 0.0;
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    degree[ed.source] += mu[e];
    degree[ed.target] += mu[e];
    parallel += mu[e] * mu[e];
    if (es.directed()) parallel += mu[e] * mu[es.reverse(e)];
  }
  const double md = static_cast<double>(m);
  return c1 * (1.0 - c2) * degree.squaredNorm() + c1 * c2 * parallel +
         c1 * (c2 - 4.0 * c1) * md * md;
}

double null_variance_quadratic(const Vector& mu, const EdgeSystem& es, Index n1,
                               Index n2, Index m) {
  require_null_size(n1, n2);
  check_mu(mu, es);
  double quad = 0.0;
  for (Index e = 0; e < es.edge_count(); ++e) {
    if (mu[e] == 0.0) continue;
    double row = 0.0;
    for (Index f = 0; f < es.edge_count(); ++f)
      row += pi_entry(es.edge(e), es.edge(f), n1, n2) * mu[f];
    quad += mu[e] * row;
  }
  const double mean = null_mean(m, n1, n2);
  return quad - mean * mean;
}

Vector null_variance_gradient(const Vector& mu, const EdgeSystem& es, Index n1, Index n2) {
  require_null_size(n1, n2);
  check_mu(mu, es);
  const double c1 = chi1(n1, n2);
  const double c2 = chi2(n1, n2);
  Vector degree = Vector::Zero(es.vertex_count());
  for (Index e = 0; e < es.edge_count(); ++e) {
    degree[es.edge(e).source] += mu[e];
    degree[es.edge(e).target] += mu[e];
  }
  Vector grad(es.edge_count());
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Edge& ed = es.edge(e);
    double parallel = 2.0 * mu[e];
    if (es.directed()) parallel += 2.0 * mu[es.reverse(e)];
    grad[e] = 2.0 * c1 * (1.0 - c2) * (degree[ed.source] + degree[ed.target]) +
              c1 * c2 * parallel;
  }
  return grad;
}

NullMoments null_moments(const Vector& mu, const EdgeSystem& es, Index n1, Index n2,
                         Index m) {
  NullMoments out;
  out.m = m;
  out.mean = null_mean(m, n1, n2);
  out.variance = null_variance_fast(mu, es, n1, n2, m);
  out.chi1 = chi1(n1, n2);
  out.chi2 = chi2(n1, n2);
  return out;
}

double t_statistic(double statistic, const NullMoments& moments) {
  if (!(moments.variance > 0.0)) {
    std::ostringstream msg;
    msg << "permutation-null variance is not positive (" << moments.variance << ")";
    throw DegenerateNullError(msg.str());
  }
  return (statistic - moments.mean) / std::sqrt(moments.variance);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

Matrix symmetrized_weights(const EdgeSystem& es, const Vector& mu) {
  check_mu(mu, es);
  return 0.5 * edge_weight_matrix(es, mu);
}

NormalityTerms normality_terms(const Matrix& mu_bar) {
  const Index n = mu_bar.rows();
  if (mu_bar.cols() != n) throw InvalidInputError("normality_terms expects a square matrix");
  Matrix w = mu_bar;
  w.diagonal().setZero();

  NormalityTerms out;
  const Vector row = w.rowwise().sum();
  const Vector row2 = w.array().square().rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    // With r = row sum and q = sum of squares, the other neighbours of j carry
    // r - w_ij and their distinct ordered pairs (r - w_ij)^2 - (q - w_ij^2).
    for (Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      const double rest = row[i] - wij;
      out.s2 += wij * rest;
      out.s3 += wij * (rest * rest - (row2[i] - wij * wij));
    }
  }
  // Paths i - j - k - l: fix the middle edge (j, k), choose i != j, k next to
  // j and l != j, k next to k, then drop i = l.
  const Matrix common = w * w;
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      if (j == k || w(j, k) == 0.0) continue;
      const double left = row[j] - w(j, k);
      const double right = row[k] - w(k, j);
      out.l4 += w(j, k) * (left * right - common(j, k));
    }
  }
  out.k = n > 0 ? w.sum() / static_cast<double>(n) : 0.0;
  out.bound_numerator =
      static_cast<double>(n) * out.k * out.k * out.k + out.k * out.s2 + out.s3 + out.l4;
  return out;
}

double f_generator(double x, double alpha, DivergenceKind kind) {
  if (x < 0.0) throw ParameterError("f_generator expects x >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const double a = alpha;
  const double b = 1.0 - alpha;
  if (kind == DivergenceKind::fr) {
    const double scale = 4.0 * a * b;
    const double shift = (2.0 * a - 1.0) * (2.0 * a - 1.0) / scale;
    return (a * x - b) * (a * x - b) / (scale * (a * x + b)) - shift;
  }
  return (a * a * x * x + b * b) / (a * x + b) - (a * a + b * b);
}

double divergence_limit_1d(const Density& p, const Density& q, double alpha,
                           DivergenceKind kind, const QuadratureOptions& options) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
  const double a = alpha;
  const double b = 1.0 - alpha;
  auto integrand = [&](double x) {
    const double px = p(x);
    const double qx = q(x);
    const double mix = a * px + b * qx;
    if (mix <= 0.0) return 0.0;
    if (kind == DivergenceKind::fr) return 2.0 * a * b * px * qx / mix;
    return (a * a * px * px + b * b * qx * qx) / mix;
  };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      integrand, options.lower, options.upper, 20, 1e-12, &error);
  if (!std::isfinite(value) || error > options.tolerance) {
    std::ostringstream msg;
    msg << "quadrature did not converge (error estimate " << error << ")";
    throw NumericalError(msg.str());
  }
  return value;
}

}  // namespace graphtest
