#include "graphtest/baselines.hpp"
#include "graphtest/classical.hpp"
#include "graphtest/datasets.hpp"
#include "graphtest/errors.hpp"
#include "graphtest/experiments.hpp"
#include "graphtest/smooth_fr.hpp"
#include "graphtest/smooth_knn.hpp"
#include "test_support.hpp"

#include <set>
#include <sstream>

using namespace graphtest;

namespace {

PooledData gaussian_pair(Index n1, Index n2, Index d, std::uint64_t seed, double shift = 0.0) {
  Engine rng(seed);
  return pool_samples(PointSample(standard_normal(n1, d, rng)),
                      PointSample(shifted_scaled_normal(n2, d, shift, 1.0, rng)));
}

}  // namespace

TEST(TestKinds, NamesRoundTrip) {
  for (auto k : {TestKind::fr, TestKind::knn, TestKind::fr_smooth, TestKind::knn_smooth,
                 TestKind::mmd, TestKind::energy})
    EXPECT_EQ(parse_test_kind(test_name(k)), k);
  EXPECT_THROW(parse_test_kind("t-test"), ParameterError);
}

TEST(Wilson, ReferenceValues) {
  const Interval a = wilson_interval(5, 100);
  EXPECT_NEAR(a.low, 0.021543679154367966, 1e-12);
  EXPECT_NEAR(a.high, 0.11175046923191914, 1e-12);
  const Interval b = wilson_interval(10, 200);
  EXPECT_NEAR(b.low, 0.027382645600763922, 1e-12);
  EXPECT_NEAR(b.high, 0.089578148138776, 1e-12);
  const Interval c = wilson_interval(0, 50);
  EXPECT_NEAR(c.low, 0.0, 1e-15);
  EXPECT_NEAR(c.high, 0.07134759913335874, 1e-12);
}

TEST(PreparedTest, StatisticsMatchDirectComputation) {
  const PooledData data = gaussian_pair(9, 11, 3, 1, 0.4);
  const EdgeSystem und = pairwise_distances(data.points);
  const EdgeSystem dir = und.with_mode(GraphMode::directed);
  auto observed = [&](TestKind kind, TestParameters p = {}) {
    const PreparedTest t = prepare_test(data, kind, p);
    return t.statistic(block_sums(t.weights, data.labels));
  };
  EXPECT_EQ(observed(TestKind::fr), static_cast<double>(cross_count(mst_kruskal(und), data)));
  EXPECT_EQ(observed(TestKind::knn), static_cast<double>(cross_count(knn_edges(dir, 3), data)));
  TestParameters p;
  p.lambda = 0.6;
  p.k = 2;
  EXPECT_NEAR(observed(TestKind::fr_smooth, p), smooth_fr_statistic(und, data, 0.6).statistic, 1e-12);
  EXPECT_NEAR(observed(TestKind::knn_smooth, p), smooth_knn_statistic(dir, data, 0.6, 2).statistic,
              1e-12);
  const PointSample x1(data.points.topRows(9)), x2(data.points.bottomRows(11));
  EXPECT_NEAR(observed(TestKind::mmd), mmd_unbiased(x1, x2, median_heuristic(data)), 1e-13);
  EXPECT_NEAR(observed(TestKind::energy), energy_statistic(x1, x2), 1e-13);
  p.bandwidth = 2.0;
  EXPECT_NEAR(observed(TestKind::mmd, p), mmd_unbiased(x1, x2, {2.0}), 1e-13);
}

TEST(RunTest, ReportFieldsAndJsonLayout) {
  const PooledData data = gaussian_pair(20, 25, 2, 2);
  TestOptions opt;
  opt.test = TestKind::knn_smooth;
  opt.k = 2;
  opt.permutations = 99;
  opt.seed = 5;
  const TestReport r = run_two_sample_test(data, opt);
  ASSERT_TRUE(r.t_stat && r.p_normal && r.lambda && r.k);
  EXPECT_GT(r.p_permutation, 0.0);
  EXPECT_LE(r.p_permutation, 1.0);
  std::vector<std::string> keys;
  const auto j = to_json(r);
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"test_name", "statistic", "t_stat", "p_permutation",
                                            "p_normal", "lambda", "k", "seed", "n1", "n2"}));
  opt.test = TestKind::energy;
  keys.clear();
  const auto j2 = to_json(run_two_sample_test(data, opt));
  for (const auto& [k, v] : j2.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"test_name", "statistic", "p_permutation", "seed",
                                            "n1", "n2"}));
}

TEST(RunTest, ScaleOptions) {
  TestOptions opt;
  EXPECT_FALSE(resolve_scale(opt, 4));
  opt.gamma = 0.5;
  EXPECT_DOUBLE_EQ(*resolve_scale(opt, 16), 4.0);
  opt.lambda = 1.0;
  EXPECT_THROW(resolve_scale(opt, 16), ParameterError);
  opt.gamma.reset();
  opt.lambda = -1.0;
  EXPECT_THROW(resolve_scale(opt, 16), ParameterError);
}

// A file compared with itself pairs every point with an exact duplicate; the
// duplicates dominate the smoothed graph, so the statistic sits far in the
// upper tail and the test never rejects.
TEST(RunTest, SameSampleTwiceNeverRejects) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Engine rng(seed);
    const PointSample x(standard_normal(40, 3, rng));
    TestOptions opt;
    opt.seed = seed;
    opt.permutations = 200;
    const TestReport r = run_two_sample_test(pool_samples(x, x), opt);
    EXPECT_GT(r.p_permutation, 0.05);
  }
}

TEST(RunTest, SmoothFrUnderNullIsCalibrated) {
  const int seeds = 200;
  int rejections = 0;
  double t_sum = 0.0, t_sq = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const PooledData data = gaussian_pair(40, 40, 3, 1000 + s);
    TestOptions opt;
    opt.seed = static_cast<std::uint64_t>(s);
    opt.permutations = 200;
    const TestReport r = run_two_sample_test(data, opt);
    rejections += r.p_permutation <= 0.05;
    t_sum += *r.t_stat;
    t_sq += *r.t_stat * *r.t_stat;
  }
  const Interval ci = wilson_interval(rejections, seeds);
  EXPECT_LE(ci.low, 0.05);
  EXPECT_GE(ci.high, 0.05);
  const double mean = t_sum / seeds;
  const double sd = std::sqrt(t_sq / seeds - mean * mean);
  EXPECT_LT(std::abs(mean), 3.0 * sd / std::sqrt(static_cast<double>(seeds)));
}

TEST(RunTest, DetectsShift) {
  const PooledData data = gaussian_pair(60, 60, 2, 3, 1.5);
  for (auto kind : {TestKind::fr, TestKind::knn, TestKind::fr_smooth, TestKind::knn_smooth,
                    TestKind::mmd, TestKind::energy}) {
    TestOptions opt;
    opt.test = kind;
    opt.permutations = 199;
    EXPECT_LE(run_two_sample_test(data, opt).p_permutation, 0.01) << test_name(kind);
  }
}

TEST(RunTest, WorkerCountDoesNotChangeReport) {
  const PooledData data = gaussian_pair(30, 30, 2, 4, 0.3);
  TestOptions opt;
  opt.permutations = 500;
  opt.workers = 1;
  const auto a = to_json(run_two_sample_test(data, opt)).dump();
  opt.workers = 3;
  EXPECT_EQ(a, to_json(run_two_sample_test(data, opt)).dump());
}

TEST(PowerExperiment, RowCountAndDeterminism) {
  PowerConfig cfg;
  cfg.dims = {2, 3};
  cfg.n = 16;
  cfg.trials = 4;
  cfg.permutations = 50;
  cfg.gammas = {0.0, 1.0};
  const auto cells = power_experiment(cfg);
  // fr, knn, energy: 1 each; smoothed: |gammas| each; mmd: median + |gammas|.
  EXPECT_EQ(cells.size(), 2u * (3 + 2 * 2 + 1 + 2));
  const CsvTable table = power_table(cells);
  EXPECT_EQ(table.rows.size(), cells.size());
  cfg.workers = 3;
  const auto again = power_table(power_experiment(cfg));
  EXPECT_EQ(table.rows, again.rows);
  for (const auto& c : cells) {
    EXPECT_LE(c.interval.low, c.power);
    EXPECT_GE(c.interval.high, c.power);
  }
}

TEST(PowerExperiment, Validation) {
  PowerConfig cfg;
  cfg.trials = 0;
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = {};
  cfg.dims.clear();
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = {};
  cfg.gammas = {1.5};
  EXPECT_THROW(validate(cfg), ParameterError);
}

TEST(KsDistance, AgainstKnownValues) {
  EXPECT_NEAR(ks_distance_to_normal({0.0}), 0.5, 1e-15);
  // Symmetric pair at +-1: sup is Phi(-1) at x = -1 from the left.
  EXPECT_NEAR(ks_distance_to_normal({-1.0, 1.0}), 0.5 - normal_cdf(-1.0), 1e-15);
  Engine rng(5);
  std::normal_distribution<double> g;
  std::vector<double> v(20000);
  for (auto& x : v) x = g(rng);
  EXPECT_LT(ks_distance_to_normal(v), 1.63 / std::sqrt(20000.0));
}

TEST(Diagnostics, SmallRun) {
  DiagnosticsConfig cfg;
  cfg.n = 30;
  cfg.probes = 3;
  const DiagnosticsResult r = null_diagnostics(cfg);
  ASSERT_EQ(r.rows.size(), 3u);
  ASSERT_EQ(r.scatter.size(), 9u);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.ks_distance, 0.0);
    EXPECT_LT(row.ks_distance, 1.0);
  }
  EXPECT_EQ(diagnostics_table(r).rows.size(), 3u);
  EXPECT_EQ(scatter_table(r).header.size(), 5u);
  cfg.permutations = 10;
  EXPECT_THROW(null_diagnostics(cfg), ParameterError);
  cfg = {};
  cfg.test = TestKind::fr;
  EXPECT_THROW(null_diagnostics(cfg), ParameterError);
}

TEST(SmoothObjective, GradientMatchesFiniteDifferences) {
  const PooledData data = gaussian_pair(6, 7, 2, 6, 0.5);
  for (auto kind : {TestKind::knn_smooth, TestKind::fr_smooth}) {
    const Objective obj = smooth_t_objective(data, kind, 2, 0.8);
    Matrix fd(data.points.rows(), data.points.cols());
    for (Index i = 0; i < fd.rows(); ++i)
      for (Index j = 0; j < fd.cols(); ++j) {
        auto f = [&](double v) {
          PooledData p = data;
          p.points(i, j) = v;
          return smooth_t_objective(p, kind, 2, 0.8).t_stat;
        };
        fd(i, j) = oracle::central_difference(f, data.points(i, j), 1e-5);
      }
    EXPECT_LT((obj.grad_points - fd).cwiseAbs().maxCoeff() / fd.cwiseAbs().maxCoeff(), 1e-5)
        << test_name(kind);
  }
}

// End-to-end gradient of the t-statistic w.r.t. the two parameters of a 1-D
// affine generator x = w z + b.
TEST(SmoothObjective, AffineGeneratorGradientMatchesFiniteDifferences) {
  Engine rng(7);
  const Matrix target = standard_normal(12, 1, rng);
  const Matrix z = standard_normal(12, 1, rng);
  auto gen = GeneratorParams::affine(1, 1);
  gen.values() << 0.7, 0.4;
  for (auto kind : {TestKind::knn_smooth, TestKind::fr_smooth}) {
    auto objective = [&](const GeneratorParams& g) {
      return smooth_t_objective(pool_samples(PointSample(target), PointSample(g.forward(z))), kind,
                                1, 1.0);
    };
    const Objective obj = objective(gen);
    const Vector grad = gen.backward(z, obj.grad_points.bottomRows(12));
    for (Index p = 0; p < 2; ++p) {
      auto f = [&](double v) {
        GeneratorParams g = gen;
        g.values()[p] = v;
        return objective(g).t_stat;
      };
      const double fd = oracle::central_difference(f, gen.values()[p], 1e-5);
      EXPECT_NEAR(grad[p], fd, 1e-4 * std::abs(fd)) << test_name(kind) << " param " << p;
    }
  }
}

TEST(LearnToy, ZeroStepsReturnsInitialisation) {
  LearnConfig cfg;
  cfg.steps = 0;
  cfg.batch = 32;
  const LearnResult r = learn_toy(cfg);
  EXPECT_EQ(r.final_params.values(), initial_generator(cfg).values());
  EXPECT_EQ(r.initial.values(), r.final_params.values());
  EXPECT_TRUE(r.trace.empty());
  EXPECT_EQ(r.samples.rows(), 32);
}

TEST(LearnToy, DeterministicAndFinite) {
  LearnConfig cfg;
  cfg.steps = 5;
  cfg.batch = 24;
  cfg.architecture = Architecture::tanh_mlp;
  cfg.width = 8;
  const LearnResult a = learn_toy(cfg);
  const LearnResult b = learn_toy(cfg);
  EXPECT_EQ(a.final_params.values(), b.final_params.values());
  ASSERT_EQ(a.trace.size(), 5u);
  for (const auto& row : a.trace) EXPECT_TRUE(std::isfinite(row.t_stat));
  EXPECT_NE(a.final_params.values(), a.initial.values());
}

TEST(LearnToy, LargeStepsImproveQuickly) {
  LearnConfig cfg;
  cfg.steps = 60;
  cfg.batch = 64;
  cfg.adam.learning_rate = 0.02;
  cfg.eval_batches = 5;
  const LearnResult r = learn_toy(cfg);
  EXPECT_GT(mean_t_statistic(r.final_params, cfg, 99), mean_t_statistic(r.initial, cfg, 99) + 1.0);
}

TEST(LearnToy, Validation) {
  LearnConfig cfg;
  cfg.test = TestKind::mmd;
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = {};
  cfg.lambda = 0.0;
  EXPECT_THROW(validate(cfg), ParameterError);
  cfg = {};
  cfg.batch = 1;
  EXPECT_THROW(validate(cfg), ParameterError);
}
