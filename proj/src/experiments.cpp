#include "graphtest/experiments.hpp"

#include "graphtest/baselines.hpp"
#include "graphtest/classical.hpp"
#include "graphtest/datasets.hpp"
#include "graphtest/errors.hpp"
#include "graphtest/parallel.hpp"
#include "graphtest/rng.hpp"
#include "graphtest/smooth_fr.hpp"
#include "graphtest/smooth_knn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace graphtest {

namespace {

constexpr std::array<std::pair<TestKind, std::string_view>, 6> kTestNames{{
    {TestKind::fr, "fr"},
    {TestKind::knn, "knn"},
    {TestKind::fr_smooth, "fr-smooth"},
    {TestKind::knn_smooth, "knn-smooth"},
    {TestKind::mmd, "mmd"},
    {TestKind::energy, "energy"},
}};

Index edge_budget(TestKind kind, Index n, int k) {
  return is_knn(kind) ? static_cast<Index>(k) * n : n - 1;
}

}  // namespace

std::string_view test_name(TestKind kind) {
  for (auto [k, name] : kTestNames)
    if (k == kind) return name;
  return "unknown";
}

TestKind parse_test_kind(std::string_view name) {
  for (auto [k, n] : kTestNames)
    if (n == name) return k;
  throw ParameterError("unknown test '" + std::string(name) +
                       "' (expected fr, knn, fr-smooth, knn-smooth, mmd or energy)");
}

bool is_smoothed(TestKind kind) {
  return kind == TestKind::fr_smooth || kind == TestKind::knn_smooth;
}

bool is_knn(TestKind kind) { return kind == TestKind::knn || kind == TestKind::knn_smooth; }

double PreparedTest::statistic(const BlockSums& sums) const {
  switch (kind) {
    case TestKind::mmd:
      return mmd_from_blocks(sums, n1, n2);
    case TestKind::energy:
      return energy_from_blocks(sums, n1, n2);
    default:
      return sums.cross;
  }
}

PreparedTest prepare_test(const PooledData& data, const EdgeSystem& undirected,
                          const EdgeSystem& directed, TestKind kind,
                          const TestParameters& params) {
  PreparedTest test;
  test.kind = kind;
  test.params = params;
  test.n1 = data.n1;
  test.n2 = data.n2;
  const Index n = data.size();
  switch (kind) {
    case TestKind::fr: {
      Vector chosen = Vector::Zero(undirected.edge_count());
      for (Index e : mst_kruskal(undirected).edge_indices) chosen[e] = 1.0;
      test.weights = edge_weight_matrix(undirected, chosen);
      break;
    }
    case TestKind::knn: {
      Vector chosen = Vector::Zero(directed.edge_count());
      for (Index e : knn_edges(directed, params.k).edge_indices) chosen[e] = 1.0;
      test.weights = edge_weight_matrix(directed, chosen);
      break;
    }
    case TestKind::fr_smooth: {
      const MarginalVector mu = st_marginals(undirected, params.lambda);
      test.weights = edge_weight_matrix(undirected, mu.values);
      test.moments = null_moments(mu.values, undirected, data.n1, data.n2, n - 1);
      break;
    }
    case TestKind::knn_smooth: {
      const MarginalVector mu = knn_marginals(directed, params.lambda, params.k);
      test.weights = edge_weight_matrix(directed, mu.values);
      test.moments = null_moments(mu.values, directed, data.n1, data.n2,
                                  edge_budget(kind, n, params.k));
      break;
    }
    case TestKind::mmd: {
      if (data.n1 < 2 || data.n2 < 2) throw SizeError("unbiased MMD needs n1, n2 >= 2");
      const double sigma =
          params.bandwidth ? *params.bandwidth : median_heuristic(undirected).bandwidth;
      test.params.bandwidth = sigma;
      test.weights = gaussian_kernel_matrix(data.points, sigma);
      test.tail = Tail::upper;
      break;
    }
    case TestKind::energy:
      test.weights = distance_matrix(data.points);
      test.tail = Tail::upper;
      break;
  }
  return test;
}

PreparedTest prepare_test(const PooledData& data, TestKind kind, const TestParameters& params) {
  const EdgeSystem undirected = pairwise_distances(data.points, GraphMode::undirected);
  const EdgeSystem directed = undirected.with_mode(GraphMode::directed);
  return prepare_test(data, undirected, directed, kind, params);
}

PermutationOutcome permutation_test(const PreparedTest& test, const PooledData& data,
                                    int n_perms, std::uint64_t seed, int workers) {
  PermutationOutcome out;
  out.observed = test.statistic(block_sums(test.weights, data.labels));
  const auto sums = permutation_block_sums(test.weights, data.n1, data.n2, n_perms, seed, workers);
  out.null.reserve(sums.size());
  for (const auto& s : sums) out.null.push_back(test.statistic(s));
  out.p_value = pvalue_from_null(out.observed, out.null, test.tail);
  return out;
}

std::optional<double> resolve_scale(const TestOptions& options, Index dim) {
  if (options.lambda && options.gamma)
    throw ParameterError("--lambda and --gamma are mutually exclusive");
  if (options.lambda) {
    if (!(*options.lambda > 0.0)) throw ParameterError("lambda must be positive");
    return options.lambda;
  }
  if (options.gamma) {
    if (*options.gamma < 0.0 || *options.gamma > 1.0)
      throw ParameterError("gamma must lie in [0, 1]");
    return std::pow(static_cast<double>(dim), *options.gamma);
  }
  return std::nullopt;
}

TestReport run_two_sample_test(const PooledData& data, const TestOptions& options) {
  if (options.permutations < 1) throw ParameterError("permutation count must be positive");
  if (!(options.alpha > 0.0 && options.alpha < 1.0))
    throw ParameterError("alpha must lie in (0, 1)");
  if (data.size() < 2) throw SizeError("two-sample test needs at least two points");
  const std::optional<double> scale = resolve_scale(options, data.dim());

  TestParameters params;
  params.k = options.k;
  params.lambda = scale.value_or(1.0);
  if (options.test == TestKind::mmd) params.bandwidth = scale;

  const PreparedTest test = prepare_test(data, options.test, params);
  const PermutationOutcome perm =
      permutation_test(test, data, options.permutations, options.seed, options.workers);

  TestReport report;
  report.test_name = std::string(test_name(options.test));
  report.statistic = perm.observed;
  report.p_permutation = perm.p_value;
  report.seed = options.seed;
  report.n1 = data.n1;
  report.n2 = data.n2;
  if (is_knn(options.test)) report.k = options.k;
  if (test.moments) {
    const double t = t_statistic(perm.observed, *test.moments);
    report.t_stat = t;
    report.p_normal = normal_pvalue(t);
    report.lambda = params.lambda;
  }
  return report;
}

TestReport run_test(const std::filesystem::path& first, const std::filesystem::path& second,
                    const TestOptions& options) {
  const PointSample x1 = read_points_csv(first);
  const PointSample x2 = read_points_csv(second);
  return run_two_sample_test(pool_samples(x1, x2), options);
}

nlohmann::ordered_json to_json(const TestReport& r) {
  nlohmann::ordered_json j;
  j["test_name"] = r.test_name;
  j["statistic"] = r.statistic;
  if (r.t_stat) j["t_stat"] = *r.t_stat;
  j["p_permutation"] = r.p_permutation;
  if (r.p_normal) j["p_normal"] = *r.p_normal;
  if (r.lambda) j["lambda"] = *r.lambda;
  if (r.k) j["k"] = *r.k;
  j["seed"] = r.seed;
  j["n1"] = r.n1;
  j["n2"] = r.n2;
  return j;
}

Interval wilson_interval(long successes, long trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

void validate(const PowerConfig& cfg) {
  if (cfg.trials < 1) throw ParameterError("trials must be >= 1");
  if (cfg.dims.empty()) throw ParameterError("dims must be nonempty");
  for (Index d : cfg.dims)
    if (d < 1) throw ParameterError("dimensions must be positive");
  for (double g : cfg.gammas)
    if (!(g >= 0.0 && g <= 1.0)) throw ParameterError("gammas must lie in [0, 1]");
  if (cfg.n < 2) throw ParameterError("sample size must be >= 2");
  if (cfg.tests.empty()) throw ParameterError("no tests selected");
  if (!(cfg.alpha_level > 0.0 && cfg.alpha_level < 1.0))
    throw ParameterError("alpha must lie in (0, 1)");
  if (cfg.permutations < 1) throw ParameterError("permutation count must be positive");
  if (!(cfg.sigma_scale > 0.0)) throw ParameterError("sigma scale must be positive");
}

namespace {

struct CellSpec {
  TestKind test;
  std::optional<double> gamma;
};

std::vector<CellSpec> cell_specs(const PowerConfig& cfg) {
  std::vector<CellSpec> specs;
  for (TestKind t : cfg.tests) {
    if (is_smoothed(t)) {
      for (double g : cfg.gammas) specs.push_back({t, g});
    } else if (t == TestKind::mmd) {
      specs.push_back({t, std::nullopt});
      for (double g : cfg.gammas) specs.push_back({t, g});
    } else {
      specs.push_back({t, std::nullopt});
    }
  }
  return specs;
}

}  // namespace

std::vector<PowerCell> power_experiment(const PowerConfig& cfg) {
  validate(cfg);
  const std::vector<CellSpec> specs = cell_specs(cfg);
  std::vector<PowerCell> cells;
  for (std::size_t di = 0; di < cfg.dims.size(); ++di) {
    const Index dim = cfg.dims[di];
    std::vector<std::vector<char>> rejected(static_cast<std::size_t>(cfg.trials),
                                            std::vector<char>(specs.size(), 0));
    parallel_for(rejected.size(), cfg.workers, [&](std::size_t trial) {
      Engine rng = make_engine(cfg.seed, {di, trial, 0});
      const Matrix x1 = standard_normal(cfg.n, dim, rng);
      const Matrix x2 = shifted_scaled_normal(cfg.n, dim, cfg.mu_shift, cfg.sigma_scale, rng);
      const PooledData data = pool_samples(PointSample(x1), PointSample(x2));
      const EdgeSystem undirected = pairwise_distances(data.points, GraphMode::undirected);
      const EdgeSystem directed = undirected.with_mode(GraphMode::directed);
      for (std::size_t c = 0; c < specs.size(); ++c) {
        TestParameters params;
        params.k = cfg.k;
        if (specs[c].gamma) {
          const double scale = std::pow(static_cast<double>(dim), *specs[c].gamma);
          params.lambda = scale;
          if (specs[c].test == TestKind::mmd) params.bandwidth = scale;
        }
        const PreparedTest test = prepare_test(data, undirected, directed, specs[c].test, params);
        const auto outcome = permutation_test(test, data, cfg.permutations,
                                              derive_seed(cfg.seed, {di, trial, 1 + c}));
        rejected[trial][c] = outcome.p_value <= cfg.alpha_level;
      }
    });
    for (std::size_t c = 0; c < specs.size(); ++c) {
      PowerCell cell;
      cell.dim = dim;
      cell.test = specs[c].test;
      cell.gamma = specs[c].gamma;
      cell.trials = cfg.trials;
      for (const auto& row : rejected) cell.rejections += row[c];
      cell.power = static_cast<double>(cell.rejections) / static_cast<double>(cell.trials);
      cell.interval = wilson_interval(cell.rejections, cell.trials);
      cells.push_back(cell);
    }
  }
  return cells;
}

CsvTable power_table(const std::vector<PowerCell>& cells) {
  CsvTable table;
  table.header = {"dim", "test", "gamma", "rejections", "trials", "power", "wilson_low",
                  "wilson_high"};
  for (const auto& c : cells) {
    std::string gamma;
    if (c.gamma) gamma = format_number(*c.gamma);
    else if (c.test == TestKind::mmd) gamma = "median";
    table.rows.push_back({std::to_string(c.dim), std::string(test_name(c.test)), gamma,
                          std::to_string(c.rejections), std::to_string(c.trials),
                          format_number(c.power), format_number(c.interval.low),
                          format_number(c.interval.high)});
  }
  return table;
}

double ks_distance_to_normal(std::vector<double> values) {
  if (values.empty()) throw SizeError("KS distance of an empty sample");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

DiagnosticsResult null_diagnostics(const DiagnosticsConfig& cfg) {
  if (!is_smoothed(cfg.test)) throw ParameterError("diagnostics need a smoothed test");
  if (cfg.lambdas.empty()) throw ParameterError("no temperatures given");
  if (cfg.permutations < 1000) throw ParameterError("diagnostics need >= 1000 permutations");
  if (cfg.probes < 0) throw ParameterError("probe count must be nonnegative");
  if (cfg.n < 2) throw ParameterError("sample size must be >= 2");

  Engine rng = make_engine(cfg.seed, {0});
  const Matrix x1 = make_moons(cfg.n, cfg.noise, rng);
  const Matrix x2 = make_moons(cfg.n, cfg.noise, rng);
  const PooledData data = pool_samples(PointSample(x1), PointSample(x2));
  const EdgeSystem undirected = pairwise_distances(data.points, GraphMode::undirected);
  const EdgeSystem directed = undirected.with_mode(GraphMode::directed);

  DiagnosticsResult result;
  for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
    TestParameters params;
    params.k = cfg.k;
    params.lambda = cfg.lambdas[li];
    const PreparedTest test = prepare_test(data, undirected, directed, cfg.test, params);
    const auto outcome = permutation_test(test, data, cfg.permutations,
                                          derive_seed(cfg.seed, {1, li}), cfg.workers);
    const double sd = std::sqrt(test.moments->variance);
    std::vector<double> z;
    z.reserve(outcome.null.size());
    for (double v : outcome.null) z.push_back((v - test.moments->mean) / sd);
    DiagnosticsRow row;
    row.lambda = params.lambda;
    row.ks_distance = ks_distance_to_normal(z);
    double mean = 0.0;
    for (double v : z) mean += v;
    mean /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z) var += (v - mean) * (v - mean);
    row.null_mean = mean;
    row.null_variance = var / static_cast<double>(z.size() - 1);
    result.rows.push_back(row);
  }

  std::vector<ScatterRow> scatter(static_cast<std::size_t>(cfg.probes) * cfg.lambdas.size());
  parallel_for(static_cast<std::size_t>(cfg.probes), cfg.workers, [&](std::size_t probe) {
    const double shift = cfg.probes > 1 ? cfg.max_shift * static_cast<double>(probe) /
                                              static_cast<double>(cfg.probes - 1)
                                        : 0.0;
    Engine probe_rng = make_engine(cfg.seed, {2, probe});
    const Matrix p1 = make_moons(cfg.n, cfg.noise, probe_rng);
    Matrix p2 = make_moons(cfg.n, cfg.noise, probe_rng);
    p2.col(0).array() += shift;
    const PooledData probe_data = pool_samples(PointSample(p1), PointSample(p2));
    const EdgeSystem pu = pairwise_distances(probe_data.points, GraphMode::undirected);
    const EdgeSystem pd = pu.with_mode(GraphMode::directed);
    for (std::size_t li = 0; li < cfg.lambdas.size(); ++li) {
      TestParameters params;
      params.k = cfg.k;
      params.lambda = cfg.lambdas[li];
      const PreparedTest test = prepare_test(probe_data, pu, pd, cfg.test, params);
      const auto outcome = permutation_test(test, probe_data, cfg.permutations,
                                            derive_seed(cfg.seed, {3, probe, li}));
      ScatterRow& row = scatter[li * static_cast<std::size_t>(cfg.probes) + probe];
      row.lambda = params.lambda;
      row.probe = static_cast<int>(probe);
      row.shift = shift;
      row.p_normal = normal_pvalue(t_statistic(outcome.observed, *test.moments));
      row.p_permutation = outcome.p_value;
    }
  });
  result.scatter = std::move(scatter);
  return result;
}

CsvTable diagnostics_table(const DiagnosticsResult& result) {
  CsvTable table;
  table.header = {"lambda", "ks_distance", "null_mean", "null_variance"};
  for (const auto& r : result.rows)
    table.rows.push_back({format_number(r.lambda), format_number(r.ks_distance),
                          format_number(r.null_mean), format_number(r.null_variance)});
  return table;
}

CsvTable scatter_table(const DiagnosticsResult& result) {
  CsvTable table;
  table.header = {"lambda", "probe", "shift", "p_normal", "p_permutation"};
  for (const auto& r : result.scatter)
    table.rows.push_back({format_number(r.lambda), std::to_string(r.probe),
                          format_number(r.shift), format_number(r.p_normal),
                          format_number(r.p_permutation)});
  return table;
}

Objective smooth_t_objective(const PooledData& data, TestKind kind, int k, double lambda) {
  if (!is_smoothed(kind)) throw ParameterError("the learning objective needs a smoothed test");
  const Index n = data.size();
  const GraphMode mode = kind == TestKind::knn_smooth ? GraphMode::directed : GraphMode::undirected;
  const EdgeSystem es = pairwise_distances(data.points, mode);
  const Vector delta = crossing_indicator(es, data.labels);
  const Index m = edge_budget(kind, n, k);

  Objective out;
  auto finish = [&](const Vector& mu, auto&& vjp) {
    const NullMoments moments = null_moments(mu, es, data.n1, data.n2, m);
    out.statistic = delta.dot(mu);
    out.t_stat = t_statistic(out.statistic, moments);
    const double sd = std::sqrt(moments.variance);
    // dt/dmu = delta / sd - (T - mean) / (2 sd^3) * dvar/dmu
    const Vector cot = delta / sd - (out.statistic - moments.mean) / (2.0 * sd * sd * sd) *
                                        null_variance_gradient(mu, es, data.n1, data.n2);
    out.grad_points = distance_backward(es, data.points, vjp(cot));
  };
  if (kind == TestKind::knn_smooth) {
    const MarginalVector mu = knn_marginals(es, lambda, k);
    finish(mu.values, [&](const Vector& cot) { return knn_marginals_vjp(es, lambda, k, cot); });
  } else {
    const SpanningTreeModel model(es, lambda);
    finish(model.marginals(), [&](const Vector& cot) { return model.marginals_vjp(cot); });
  }
  return out;
}

void validate(const LearnConfig& cfg) {
  if (!is_smoothed(cfg.test)) throw ParameterError("learning needs knn-smooth or fr-smooth");
  if (!(cfg.lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (cfg.batch < 2) throw ParameterError("batch must be >= 2");
  if (cfg.steps < 0) throw ParameterError("steps must be nonnegative");
  if (cfg.eval_batches < 1) throw ParameterError("eval batches must be >= 1");
  if (cfg.test == TestKind::knn_smooth && (cfg.k < 1 || cfg.k > 2 * cfg.batch - 1))
    throw ParameterError("k must lie in [1, n-1]");
  if (!(cfg.adam.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
}

GeneratorParams initial_generator(const LearnConfig& cfg) {
  GeneratorParams params = cfg.architecture == Architecture::affine
                               ? GeneratorParams::affine(cfg.noise_dim, 2)
                               : GeneratorParams::tanh_mlp(cfg.noise_dim, cfg.width, 2);
  Engine rng = make_engine(cfg.seed, {0});
  params.initialize(rng);
  return params;
}

namespace {

PooledData draw_batch(const GeneratorParams& gen, const LearnConfig& cfg, Engine& rng,
                      Matrix* noise_out) {
  const Matrix target = make_moons(cfg.batch, cfg.moons_noise, rng);
  Matrix z = standard_normal(cfg.batch, cfg.noise_dim, rng);
  PooledData data = pool_samples(PointSample(target), PointSample(gen.forward(z)));
  if (noise_out) *noise_out = std::move(z);
  return data;
}

}  // namespace

LearnResult learn_toy(const LearnConfig& cfg) {
  validate(cfg);
  LearnResult result{initial_generator(cfg), initial_generator(cfg), Matrix(), {}};
  GeneratorParams& gen = result.final_params;
  Adam adam(gen.values().size(), cfg.adam);
  for (int step = 0; step < cfg.steps; ++step) {
    Engine rng = make_engine(cfg.seed, {1, static_cast<std::uint64_t>(step)});
    Matrix z;
    const PooledData data = draw_batch(gen, cfg, rng, &z);
    Objective obj;
    try {
      obj = smooth_t_objective(data, cfg.test, cfg.k, cfg.lambda);
    } catch (const DegenerateNullError& e) {
      throw NumericalError("objective undefined at step " + std::to_string(step) + ": " + e.what());
    }
    if (!std::isfinite(obj.t_stat) || !obj.grad_points.allFinite())
      throw NumericalError("non-finite objective at step " + std::to_string(step));
    result.trace.push_back({step, obj.t_stat, obj.statistic});
    // Ascent on t: minimise -t.
    const Vector grad = -gen.backward(z, obj.grad_points.bottomRows(cfg.batch));
    adam.step(gen.values(), grad);
    if (!gen.values().allFinite())
      throw NumericalError("non-finite generator parameters at step " + std::to_string(step));
  }
  Engine rng = make_engine(cfg.seed, {2});
  result.samples = gen.forward(standard_normal(cfg.batch, cfg.noise_dim, rng));
  return result;
}

double mean_t_statistic(const GeneratorParams& params, const LearnConfig& cfg,
                        std::uint64_t eval_seed) {
  double total = 0.0;
  for (int b = 0; b < cfg.eval_batches; ++b) {
    Engine rng = make_engine(eval_seed, {static_cast<std::uint64_t>(b)});
    const PooledData data = draw_batch(params, cfg, rng, nullptr);
    total += smooth_t_objective(data, cfg.test, cfg.k, cfg.lambda).t_stat;
  }
  return total / static_cast<double>(cfg.eval_batches);
}

CsvTable trace_table(const std::vector<TraceRow>& trace) {
  CsvTable table;
  table.header = {"step", "t_stat", "statistic"};
  for (const auto& r : trace)
    table.rows.push_back({std::to_string(r.step), format_number(r.t_stat), format_number(r.statistic)});
  return table;
}

}  // namespace graphtest
