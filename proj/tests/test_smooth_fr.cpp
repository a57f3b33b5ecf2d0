#include "graphtest/classical.hpp"
#include "graphtest/errors.hpp"
#include "graphtest/smooth_fr.hpp"
#include "test_support.hpp"

using namespace graphtest;

TEST(SpanningTreeMarginals, EqualWeightsOnSmallCompleteGraphs) {
  const Vector k3 = st_marginals(EdgeSystem(3, GraphMode::undirected, Vector::Ones(3)), 1.0).values;
  for (Index e = 0; e < 3; ++e) EXPECT_NEAR(k3[e], 2.0 / 3.0, 1e-14);
  const Vector k4 = st_marginals(EdgeSystem(4, GraphMode::undirected, Vector::Ones(6)), 1.0).values;
  for (Index e = 0; e < 6; ++e) EXPECT_NEAR(k4[e], 0.5, 1e-14);
}

TEST(SpanningTreeMarginals, TriangleMatchesEnumeration) {
  const EdgeSystem es(3, GraphMode::undirected, Vector{{1.0, 2.0, 3.0}});
  const Vector mu = st_marginals(es, 1.0).values;
  // Trees {01,02}, {01,12}, {02,12} with costs 3, 4, 5.
  const double z = std::exp(-3.0) + std::exp(-4.0) + std::exp(-5.0);
  EXPECT_NEAR(mu[0], (std::exp(-3.0) + std::exp(-4.0)) / z, 1e-12);
  EXPECT_NEAR(mu[1], (std::exp(-3.0) + std::exp(-5.0)) / z, 1e-12);
  EXPECT_NEAR(mu[2], (std::exp(-4.0) + std::exp(-5.0)) / z, 1e-12);
}

TEST(SpanningTreeMarginals, MatchTreeEnumeration) {
  Engine rng(1);
  for (Index n = 2; n <= 6; ++n)
    for (int rep = 0; rep < 5; ++rep) {
      const EdgeSystem es = oracle::random_edge_system(n, GraphMode::undirected, rng);
      for (double lambda : {0.3, 1.0, 3.0}) {
        const SpanningTreeModel model(es, lambda);
        const auto ref = oracle::enumerate_tree_gibbs(es, lambda);
        EXPECT_LT((model.marginals() - ref.marginals).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(model.marginals().sum(), n - 1.0, 1e-9);
        for (Index e = 0; e < es.edge_count(); ++e)
          for (Index f = 0; f < es.edge_count(); ++f) {
            EXPECT_NEAR(model.pair_moment(e, f), ref.pair(e, f), 1e-12);
            if (e != f) EXPECT_LE(model.pair_moment(e, f), model.marginals()[e] * model.marginals()[f] + 1e-15);
          }
      }
    }
}

TEST(SpanningTreePairMoment, EqualWeightTriangle) {
  const EdgeSystem es(3, GraphMode::undirected, Vector::Ones(3));
  EXPECT_NEAR(st_pair_moment(es, 1.0, 0, 2), 1.0 / 3.0, 1e-14);
  EXPECT_THROW(st_pair_moment(es, 1.0, 1, 1), ParameterError);
}

// A near-bridge: one vertex very far from everything except a single neighbour
// makes that edge almost sure, and joint probabilities with it factorise.
TEST(SpanningTreePairMoment, SureEdgeFactorises) {
  Matrix x(5, 1);
  x << 0.0, 0.3, 0.7, 1.0, 1.2;
  Vector d = pairwise_distances(x).distances();
  const Index bridge = edge_index(5, GraphMode::undirected, 3, 4);
  for (Index e = 0; e < d.size(); ++e) {
    const Edge ed = edge_endpoints(5, GraphMode::undirected, e);
    if ((ed.source == 4 || ed.target == 4) && e != bridge) d[e] += 60.0;
  }
  const EdgeSystem es(5, GraphMode::undirected, d);
  const SpanningTreeModel model(es, 1.0);
  EXPECT_NEAR(model.marginals()[bridge], 1.0, 1e-20 + 1e-12);
  for (Index f = 0; f < es.edge_count(); ++f)
    if (f != bridge) EXPECT_NEAR(model.pair_moment(bridge, f), model.marginals()[f], 1e-12);
}

TEST(SpanningTreeMarginals, ShiftInvariance) {
  Engine rng(2);
  const EdgeSystem es = oracle::random_edge_system(9, GraphMode::undirected, rng);
  const EdgeSystem shifted(9, GraphMode::undirected, (es.distances().array() + 5.5).matrix());
  EXPECT_LT((st_marginals(es, 0.7).values - st_marginals(shifted, 0.7).values).cwiseAbs().maxCoeff(),
            1e-10);
}

// Grounding a different vertex is a relabelling of the points; the marginals
// must follow the permutation.
TEST(SpanningTreeMarginals, IndependentOfGroundedVertex) {
  Engine rng(3);
  const Matrix x = oracle::random_points(8, 2, rng);
  Matrix y = x;
  y.row(2).swap(y.row(7));
  auto relabel = [](Index v) { return v == 2 ? Index{7} : v == 7 ? Index{2} : v; };
  const EdgeSystem ex = pairwise_distances(x);
  const EdgeSystem ey = pairwise_distances(y);
  const Vector mx = st_marginals(ex, 0.5).values;
  const Vector my = st_marginals(ey, 0.5).values;
  for (Index e = 0; e < ex.edge_count(); ++e) {
    const Edge& ed = ex.edge(e);
    EXPECT_NEAR(mx[e], my[ey.index_of(relabel(ed.source), relabel(ed.target))], 1e-12);
  }
}

TEST(SpanningTreeMarginals, HighTemperatureIsUniform) {
  Engine rng(4);
  const EdgeSystem es = pairwise_distances(oracle::random_points(10, 3, rng));
  const Vector mu = st_marginals(es, 1e6 * es.distances().maxCoeff()).values;
  EXPECT_LT((mu.array() - 0.2).abs().maxCoeff(), 1e-4);
}

TEST(SpanningTreeMarginals, LowTemperatureRecoversClassical) {
  Engine rng(5);
  const Matrix x = oracle::random_points(16, 2, rng);
  const PooledData data = pool_samples(PointSample(x.topRows(8)), PointSample(x.bottomRows(8)));
  const EdgeSystem es = pairwise_distances(data.points);
  Vector sorted = es.distances();
  std::sort(sorted.begin(), sorted.end());
  double gap = std::numeric_limits<double>::infinity();
  for (Index e = 1; e < sorted.size(); ++e) gap = std::min(gap, sorted[e] - sorted[e - 1]);
  const auto s = smooth_fr_statistic(es, data, 1e-6 * gap);
  EXPECT_EQ(s.statistic, static_cast<double>(cross_count(mst_kruskal(es), data)));
  EXPECT_TRUE(SpanningTreeModel(es, 1e-6 * gap).low_temperature());
}

TEST(SpanningTreeMarginals, UnderflowRaisesConditioningError) {
  // Gap to the next tree is tiny, so the hard regime does not apply, but the
  // far edge underflows.
  Matrix x(4, 1);
  x << 0.0, 1.0, 2.0, 2.0 + 1e-9;
  const EdgeSystem es = pairwise_distances(x);
  Vector d = es.distances();
  d[es.index_of(0, 3)] = 1e6;
  const EdgeSystem far(4, GraphMode::undirected, d);
  try {
    SpanningTreeModel model(far, 1.0);
    FAIL() << "expected ConditioningError";
  } catch (const ConditioningError& e) {
    EXPECT_EQ(e.lambda(), 1.0);
  }
}

TEST(SmoothFr, Examples) {
  const EdgeSystem k3(3, GraphMode::undirected, Vector::Ones(3));
  PooledData data;
  data.points = Matrix::Zero(3, 1);
  data.n1 = 1;
  data.n2 = 2;
  data.labels = {1, 2, 2};
  EXPECT_NEAR(smooth_fr_statistic(k3, data, 1.0).statistic, 4.0 / 3.0, 1e-14);

  Matrix x(2, 1);
  x << 0, 2;
  const PooledData two = pool_samples(PointSample(x.topRows(1)), PointSample(x.bottomRows(1)));
  EXPECT_DOUBLE_EQ(smooth_fr_statistic(pairwise_distances(two.points), two, 0.1).statistic, 1.0);
}

TEST(SmoothFrBackward, DiagonalDerivativeIsNegative) {
  Engine rng(6);
  const EdgeSystem es = oracle::random_edge_system(7, GraphMode::undirected, rng);
  const SpanningTreeModel model(es, 0.8);
  for (Index e = 0; e < es.edge_count(); ++e) {
    const Vector g = model.marginals_vjp(Vector::Unit(es.edge_count(), e));
    EXPECT_LT(g[e], 0.0);
    Vector d = es.distances();
    const double h = 1e-5;
    d[e] += h;
    const double up = st_marginals(EdgeSystem(7, GraphMode::undirected, d), 0.8).values[e];
    d[e] -= 2 * h;
    const double down = st_marginals(EdgeSystem(7, GraphMode::undirected, d), 0.8).values[e];
    EXPECT_NEAR(g[e], (up - down) / (2 * h), 1e-7);
  }
}

TEST(SmoothFrBackward, MatchesFiniteDifferences) {
  Engine rng(7);
  const Matrix x = oracle::random_points(6, 2, rng);
  const PooledData data = pool_samples(PointSample(x.topRows(3)), PointSample(x.bottomRows(3)));
  const EdgeSystem es = pairwise_distances(data.points);
  const auto g = smooth_fr_backward(es, data, 1.0, 1.0);
  Vector fd(es.edge_count());
  for (Index e = 0; e < es.edge_count(); ++e) {
    auto f = [&](double v) {
      Vector d = es.distances();
      d[e] = v;
      return smooth_fr_statistic(EdgeSystem(6, GraphMode::undirected, d), data, 1.0).statistic;
    };
    fd[e] = oracle::central_difference(f, es.distance(e), 1e-5);
  }
  EXPECT_LT(oracle::relative_error(g.distances, fd), 1e-5);

  Matrix fdp(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) {
      auto f = [&](double v) {
        PooledData p = data;
        p.points(i, j) = v;
        return smooth_fr_statistic(pairwise_distances(p.points), p, 1.0).statistic;
      };
      fdp(i, j) = oracle::central_difference(f, data.points(i, j), 1e-5);
    }
  EXPECT_LT((g.points - fdp).cwiseAbs().maxCoeff() / fdp.cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT(g.points.colwise().sum().norm(), 1e-10);
}

TEST(JlApproximation, Dimension) {
  EXPECT_EQ(jl_dimension(20, 0.1), static_cast<Index>(std::ceil(2400 * std::log(20.0))));
  for (Index n : {5, 50, 500}) {
    const Index p = jl_dimension(n, 0.2);
    const Index q = jl_dimension(n, 0.1);
    EXPECT_LE(std::abs(q - 4 * p), 4);
  }
  EXPECT_THROW(jl_dimension(10, 1.0), ParameterError);
}

TEST(JlApproximation, EqualWeightTriangle) {
  const EdgeSystem es(3, GraphMode::undirected, Vector::Ones(3));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Vector mu = approx_marginals_jl(es, 1.0, 0.1, seed).values;
    for (Index e = 0; e < 3; ++e) {
      EXPECT_GE(mu[e], 0.6);
      EXPECT_LE(mu[e], 0.74);
    }
  }
}

TEST(JlApproximation, DeterministicPerSeed) {
  Engine rng(8);
  const EdgeSystem es = pairwise_distances(oracle::random_points(12, 2, rng));
  EXPECT_EQ(approx_marginals_jl(es, 1.0, 0.3, 5).values, approx_marginals_jl(es, 1.0, 0.3, 5).values);
  EXPECT_NE(approx_marginals_jl(es, 1.0, 0.3, 5).values, approx_marginals_jl(es, 1.0, 0.3, 6).values);
}
