#pragma once

#include "graphtest/generator.hpp"
#include "graphtest/geometry.hpp"
#include "graphtest/io.hpp"
#include "graphtest/null_calculus.hpp"
#include "graphtest/permutation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace graphtest {

enum class TestKind { fr, knn, fr_smooth, knn_smooth, mmd, energy };

std::string_view test_name(TestKind kind);
TestKind parse_test_kind(std::string_view name);
bool is_smoothed(TestKind kind);
bool is_knn(TestKind kind);

struct TestParameters {
  int k = 3;
  double lambda = 1.0;
  std::optional<double> bandwidth;  // mmd; median heuristic when empty
};

// A two-sample test bound to one pooled dataset. Every supported statistic is
// a function of the block sums of `weights` under a labelling, which is what
// the permutation null is evaluated on.
struct PreparedTest {
  TestKind kind = TestKind::fr;
  TestParameters params;
  Matrix weights;
  Tail tail = Tail::lower;
  std::optional<NullMoments> moments;  // smoothed graph tests only
  Index n1 = 0;
  Index n2 = 0;

  double statistic(const BlockSums& sums) const;
};

// `undirected` and `directed` must both describe data.points.
PreparedTest prepare_test(const PooledData& data, const EdgeSystem& undirected,
                          const EdgeSystem& directed, TestKind kind,
                          const TestParameters& params);
PreparedTest prepare_test(const PooledData& data, TestKind kind, const TestParameters& params);

struct PermutationOutcome {
  double observed = 0.0;
  double p_value = 1.0;
  std::vector<double> null;
};

PermutationOutcome permutation_test(const PreparedTest& test, const PooledData& data,
                                    int n_perms, std::uint64_t seed, int workers = 1);

struct TestOptions {
  TestKind test = TestKind::fr_smooth;
  int k = 3;
  std::optional<double> lambda;
  std::optional<double> gamma;  // lambda = d^gamma
  int permutations = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  int workers = 1;
};

struct TestReport {
  std::string test_name;
  double statistic = 0.0;
  std::optional<double> t_stat;
  double p_permutation = 1.0;
  std::optional<double> p_normal;
  std::optional<double> lambda;
  std::optional<int> k;
  std::uint64_t seed = 0;
  Index n1 = 0;
  Index n2 = 0;
};

// Temperature (smoothed tests) or bandwidth (mmd) implied by the options for
// data of dimension `dim`; empty when neither --lambda nor --gamma is given.
std::optional<double> resolve_scale(const TestOptions& options, Index dim);

TestReport run_two_sample_test(const PooledData& data, const TestOptions& options);
TestReport run_test(const std::filesystem::path& first, const std::filesystem::path& second,
                    const TestOptions& options);

nlohmann::ordered_json to_json(const TestReport& report);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

// Wilson score interval, 95% by default.
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

struct PowerConfig {
  std::vector<Index> dims{2};
  Index n = 128;  // per sample
  int trials = 100;
  double alpha_level = 0.05;
  double mu_shift = 0.0;
  double sigma_scale = 1.0;
  std::vector<double> gammas{0.0, 0.25, 0.5, 0.75, 1.0};
  int k = 3;
  std::vector<TestKind> tests{TestKind::fr, TestKind::fr_smooth, TestKind::knn,
                              TestKind::knn_smooth, TestKind::mmd, TestKind::energy};
  std::uint64_t seed = 0;
  int permutations = 1000;
  int workers = 1;
};

struct PowerCell {
  Index dim = 0;
  TestKind test = TestKind::fr;
  std::optional<double> gamma;  // empty: classical, energy, or median-heuristic mmd
  long rejections = 0;
  long trials = 0;
  double power = 0.0;
  Interval interval;
};

void validate(const PowerConfig& cfg);

// H0: N(0, I) versus N((mu, 0, ...), diag(sigma^2, 1, ...)), n points each;
// every cell shares the same draws within a trial.
std::vector<PowerCell> power_experiment(const PowerConfig& cfg);
CsvTable power_table(const std::vector<PowerCell>& cells);

// sup_x |F_n(x) - Phi(x)|.
double ks_distance_to_normal(std::vector<double> values);

struct DiagnosticsConfig {
  std::vector<double> lambdas{10.0, 1.0, 0.05};
  Index n = 128;  // per sample
  TestKind test = TestKind::knn_smooth;
  int k = 1;
  int permutations = 1000;
  int probes = 10;
  double max_shift = 0.3;
  double noise = 0.05;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct DiagnosticsRow {
  double lambda = 0.0;
  double ks_distance = 0.0;
  double null_mean = 0.0;      // of the standardised null
  double null_variance = 0.0;  // of the standardised null
};

struct ScatterRow {
  double lambda = 0.0;
  int probe = 0;
  double shift = 0.0;
  double p_normal = 0.0;
  double p_permutation = 0.0;
};

struct DiagnosticsResult {
  std::vector<DiagnosticsRow> rows;
  std::vector<ScatterRow> scatter;
};

// Two independent two-moons samples are pooled once; for every lambda the
// permutation null of T is standardised by the closed-form moments and
// compared with N(0, 1). Probe datasets shift the second sample along x by
// up to max_shift and pair the normal-approximation p-value with the
// permutation p-value.
DiagnosticsResult null_diagnostics(const DiagnosticsConfig& cfg);
CsvTable diagnostics_table(const DiagnosticsResult& result);
CsvTable scatter_table(const DiagnosticsResult& result);

// Smoothed t-statistic of pooled data and its gradient w.r.t. the points.
struct Objective {
  double t_stat = 0.0;
  double statistic = 0.0;
  Matrix grad_points;
};

Objective smooth_t_objective(const PooledData& data, TestKind kind, int k, double lambda);

struct LearnConfig {
  TestKind test = TestKind::knn_smooth;
  int k = 1;
  double lambda = 1.0;
  Index batch = 256;  // n1 = n2
  int steps = 500;
  AdamConfig adam;
  Architecture architecture = Architecture::affine;
  Index width = 32;
  Index noise_dim = 10;
  double moons_noise = 0.05;
  int eval_batches = 20;
  std::uint64_t seed = 0;
};

struct TraceRow {
  int step = 0;
  double t_stat = 0.0;
  double statistic = 0.0;
};

struct LearnResult {
  GeneratorParams initial;
  GeneratorParams final_params;
  Matrix samples;  // batch draws from the trained generator
  std::vector<TraceRow> trace;
};

void validate(const LearnConfig& cfg);
GeneratorParams initial_generator(const LearnConfig& cfg);

// Stochastic ascent on the smoothed t-statistic between two-moons batches and
// generated batches. NumericalError naming the step if the objective becomes
// non-finite.
LearnResult learn_toy(const LearnConfig& cfg);

// Mean t-statistic over cfg.eval_batches fresh batches drawn from `eval_seed`.
double mean_t_statistic(const GeneratorParams& params, const LearnConfig& cfg,
                        std::uint64_t eval_seed);

CsvTable trace_table(const std::vector<TraceRow>& trace);

}  // namespace graphtest
