#include "graphtest/smooth_knn.hpp"

#include "graphtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace graphtest {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Log-domain message with its tangent.
struct Message {
  double value = kNegInf;
  double tangent = 0.0;
};

// log(e^a + e^b) and its derivative along (da, db).
Message log_add(const Message& a, const Message& b) {
  if (a.value == kNegInf) return b;
  if (b.value == kNegInf) return a;
  const bool a_hi = a.value >= b.value;
  const Message& hi = a_hi ? a : b;
  const Message& lo = a_hi ? b : a;
  const double r = std::exp(lo.value - hi.value);
  return {hi.value + std::log1p(r), (hi.tangent + r * lo.tangent) / (1.0 + r)};
}

void validate(const CardinalityModel& model) {
  const Index m = model.logits.size();
  if (model.k < 1 || model.k > m)
    throw ParameterError("subset size k must lie in [1, " + std::to_string(m) +
                         "], got " + std::to_string(model.k));
  if (!model.logits.allFinite()) throw ParameterError("cardinality logits must be finite");
}

// Top-k of the logits when the k-th/(k+1)-th gap is beyond kHardSelectionGap.
bool hard_selection(const Vector& logits, int k, Vector& marginals) {
  const Index m = logits.size();
  marginals = Vector::Zero(m);
  if (k == m) {
    marginals.setOnes();
    return true;
  }
  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::nth_element(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
    return logits[a] > logits[b] || (logits[a] == logits[b] && a < b);
  });
  double kth = std::numeric_limits<double>::infinity();
  for (int r = 0; r < k; ++r) kth = std::min(kth, logits[order[r]]);
  double next = kNegInf;
  for (auto it = order.begin() + k; it != order.end(); ++it) next = std::max(next, logits[*it]);
  if (kth - next <= kHardSelectionGap) return false;
  for (int r = 0; r < k; ++r) marginals[order[r]] = 1.0;
  return true;
}

}  // namespace

CardinalityTangent cardinality_marginals_jvp(const CardinalityModel& model,
                                             const Vector& direction) {
  validate(model);
  const Index m = model.logits.size();
  const int k = model.k;
  if (direction.size() != m) throw InvalidInputError("tangent direction has wrong length");

  CardinalityTangent out;
  if (hard_selection(model.logits, k, out.marginals)) {
    out.tangent = Vector::Zero(m);
    return out;
  }

  // Shifting every logit by a constant rescales all k-subsets alike.
  const Vector theta = model.logits.array() - model.logits.maxCoeff();
  if (k == 1) {
    const Vector p = theta.array().exp() / theta.array().exp().sum();
    out.marginals = p;
    out.tangent = p.array() * (direction.array() - p.dot(direction));
    return out;
  }
  const Index states = k + 1;
  auto at = [states](Index t, Index c) { return t * states + c; };

  // fwd(t, c): subsets of the first t candidates with c members.
  std::vector<Message> fwd(static_cast<std::size_t>((m + 1) * states));
  fwd[at(0, 0)] = {0.0, 0.0};
  for (Index t = 0; t < m; ++t) {
    for (Index c = 0; c <= std::min<Index>(t + 1, k); ++c) {
      Message skip = fwd[at(t, c)];
      Message take;
      if (c > 0 && fwd[at(t, c - 1)].value != kNegInf)
        take = {fwd[at(t, c - 1)].value + theta[t], fwd[at(t, c - 1)].tangent + direction[t]};
      fwd[at(t + 1, c)] = log_add(skip, take);
    }
  }

  // bwd(t, c): completions over candidates t.. given c members so far.
  std::vector<Message> bwd(static_cast<std::size_t>((m + 1) * states));
  bwd[at(m, k)] = {0.0, 0.0};
  for (Index t = m - 1; t >= 0; --t) {
    for (Index c = 0; c <= k; ++c) {
      Message skip = bwd[at(t + 1, c)];
      Message take;
      if (c < k && bwd[at(t + 1, c + 1)].value != kNegInf)
        take = {bwd[at(t + 1, c + 1)].value + theta[t], bwd[at(t + 1, c + 1)].tangent + direction[t]};
      bwd[at(t, c)] = log_add(skip, take);
    }
  }

  const Message log_z = fwd[at(m, k)];
  out.marginals = Vector::Zero(m);
  out.tangent = Vector::Zero(m);
  for (Index t = 0; t < m; ++t) {
    double p = 0.0;
    double dp = 0.0;
    for (Index c = 0; c < k; ++c) {
      const Message& a = fwd[at(t, c)];
      const Message& b = bwd[at(t + 1, c + 1)];
      if (a.value == kNegInf || b.value == kNegInf) continue;
      const double r = std::exp(a.value + theta[t] + b.value - log_z.value);
      p += r;
      dp += r * (a.tangent + direction[t] + b.tangent - log_z.tangent);
    }
    out.marginals[t] = std::clamp(p, 0.0, 1.0);
    out.tangent[t] = dp;
  }
  return out;
}

Vector cardinality_marginals(const CardinalityModel& model) {
  validate(model);
  return cardinality_marginals_jvp(model, Vector::Zero(model.logits.size())).marginals;
}

namespace {

void check_knn_args(const EdgeSystem& es, double lambda, int k) {
  if (!es.directed()) throw ModeError("smooth k-NN requires a directed edge system");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ParameterError("temperature lambda must be positive and finite");
  if (k < 1 || k > es.vertex_count() - 1)
    throw ParameterError("k must lie in [1, n-1], got " + std::to_string(k));
}

// Index of edge (source -> target) where source is the r-th candidate of
// `target`, candidates ordered by source index.
Index incoming_edge(const EdgeSystem& es, Index target, Index r) {
  const Index source = r < target ? r : r + 1;
  return es.index_of(source, target);
}

}  // namespace

MarginalVector knn_marginals(const EdgeSystem& es, double lambda, int k) {
  check_knn_args(es, lambda, k);
  const Index n = es.vertex_count();
  MarginalVector mu{Vector::Zero(es.edge_count()), lambda};
  CardinalityModel model{Vector(n - 1), k};
  for (Index j = 0; j < n; ++j) {
    for (Index r = 0; r < n - 1; ++r) model.logits[r] = -es.distance(incoming_edge(es, j, r)) / lambda;
    const Vector p = cardinality_marginals(model);
    for (Index r = 0; r < n - 1; ++r) mu.values[incoming_edge(es, j, r)] = p[r];
  }
  return mu;
}

SmoothStatistic smooth_knn_statistic(const EdgeSystem& es, const PooledData& data,
                                     double lambda, int k) {
  SmoothStatistic out;
  out.marginals = knn_marginals(es, lambda, k);
  out.statistic = crossing_indicator(es, data.labels).dot(out.marginals.values);
  return out;
}

Vector knn_marginals_vjp(const EdgeSystem& es, double lambda, int k,
                         const Vector& cotangent) {
  check_knn_args(es, lambda, k);
  if (cotangent.size() != es.edge_count())
    throw InvalidInputError("cotangent does not match the edge system");
  const Index n = es.vertex_count();
  Vector grad = Vector::Zero(es.edge_count());
  CardinalityModel model{Vector(n - 1), k};
  Vector direction(n - 1);
  for (Index j = 0; j < n; ++j) {
    for (Index r = 0; r < n - 1; ++r) {
      const Index e = incoming_edge(es, j, r);
      model.logits[r] = -es.distance(e) / lambda;
      direction[r] = cotangent[e];
    }
    const Vector g = cardinality_marginals_jvp(model, direction).tangent;
    for (Index r = 0; r < n - 1; ++r) grad[incoming_edge(es, j, r)] = -g[r] / lambda;
  }
  return grad;
}

StatisticGradient smooth_knn_backward(const EdgeSystem& es, const PooledData& data,
                                      double lambda, int k, double upstream) {
  const Vector cot = upstream * crossing_indicator(es, data.labels);
  StatisticGradient g;
  g.distances = knn_marginals_vjp(es, lambda, k, cot);
  g.points = distance_backward(es, data.points, g.distances);
  return g;
}

}  // namespace graphtest
