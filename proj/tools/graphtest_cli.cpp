#include "graphtest/errors.hpp"
#include "graphtest/experiments.hpp"
#include "graphtest/datasets.hpp"
#include "graphtest/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace graphtest;

namespace {

const std::map<std::string, TestKind> kTestMap{
    {"fr", TestKind::fr},     {"knn", TestKind::knn}, {"fr-smooth", TestKind::fr_smooth},
    {"knn-smooth", TestKind::knn_smooth}, {"mmd", TestKind::mmd}, {"energy", TestKind::energy},
};

const std::map<std::string, TestKind> kSmoothMap{
    {"fr-smooth", TestKind::fr_smooth}, {"knn-smooth", TestKind::knn_smooth}};

void emit(const CsvTable& table, const std::optional<fs::path>& path) {
  if (path) table.save(*path);
  else table.write(std::cout);
}

nlohmann::ordered_json params_json(const GeneratorParams& p) {
  nlohmann::ordered_json j;
  j["architecture"] = p.architecture() == Architecture::affine ? "affine" : "tanh_mlp";
  j["noise_dim"] = p.noise_dim();
  if (p.architecture() == Architecture::tanh_mlp) j["width"] = p.width();
  j["out_dim"] = p.out_dim();
  j["values"] = std::vector<double>(p.values().data(), p.values().data() + p.values().size());
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Smoothed graph two-sample tests"};
  app.require_subcommand(1);

  // test
  auto* test_cmd = app.add_subcommand("test", "Run one two-sample test on two CSV files");
  TestOptions topt;
  std::string first, second;
  std::optional<double> lambda, gamma;
  test_cmd->add_option("file1", first, "First sample (CSV, one point per row)")->required();
  test_cmd->add_option("file2", second, "Second sample")->required();
  test_cmd->add_option("--test", topt.test, "Test statistic")
      ->transform(CLI::CheckedTransformer(kTestMap, CLI::ignore_case))
      ->default_str("fr-smooth");
  test_cmd->add_option("--k", topt.k, "Neighbours for knn tests")->default_val(3);
  auto* lam = test_cmd->add_option("--lambda", lambda,
                                   "Temperature (smoothed tests) or bandwidth (mmd)");
  test_cmd->add_option("--gamma", gamma, "Sets lambda = d^gamma")->excludes(lam);
  test_cmd->add_option("--permutations", topt.permutations)->default_val(1000);
  test_cmd->add_option("--seed", topt.seed)->default_val(0);
  test_cmd->add_option("--alpha", topt.alpha)->default_val(0.05);
  test_cmd->add_option("--threads", topt.workers, "Worker threads")->default_val(1);

  // power
  auto* power_cmd = app.add_subcommand("power", "Power as a function of dimension and gamma");
  PowerConfig pcfg;
  std::vector<std::string> power_tests;
  std::optional<fs::path> power_out;
  power_cmd->add_option("--dims", pcfg.dims)->delimiter(',')->default_str("2");
  power_cmd->add_option("--n", pcfg.n, "Points per sample")->default_val(128);
  power_cmd->add_option("--trials", pcfg.trials)->default_val(100);
  power_cmd->add_option("--alpha", pcfg.alpha_level)->default_val(0.05);
  power_cmd->add_option("--mu-shift", pcfg.mu_shift)->default_val(0.0);
  power_cmd->add_option("--sigma-scale", pcfg.sigma_scale)->default_val(1.0);
  power_cmd->add_option("--gammas", pcfg.gammas)->delimiter(',')->default_str("0,0.25,0.5,0.75,1");
  power_cmd->add_option("--k", pcfg.k)->default_val(3);
  power_cmd->add_option("--tests", power_tests)
      ->delimiter(',')
      ->check(CLI::IsMember(kTestMap))
      ->default_str("fr,fr-smooth,knn,knn-smooth,mmd,energy");
  power_cmd->add_option("--seed", pcfg.seed)->default_val(0);
  power_cmd->add_option("--permutations", pcfg.permutations)->default_val(1000);
  power_cmd->add_option("--threads", pcfg.workers)->default_val(1);
  power_cmd->add_option("--output", power_out, "CSV path (stdout if omitted)");

  // diagnostics
  auto* diag_cmd = app.add_subcommand("diagnostics", "Normality of the smoothed permutation null");
  DiagnosticsConfig dcfg;
  std::optional<fs::path> diag_out, scatter_out;
  diag_cmd->add_option("--lambdas", dcfg.lambdas)->delimiter(',')->default_str("10,1,0.05");
  diag_cmd->add_option("--n", dcfg.n, "Points per sample")->default_val(128);
  diag_cmd->add_option("--test", dcfg.test)
      ->transform(CLI::CheckedTransformer(kSmoothMap, CLI::ignore_case))
      ->default_str("knn-smooth");
  diag_cmd->add_option("--k", dcfg.k)->default_val(1);
  diag_cmd->add_option("--permutations", dcfg.permutations)->default_val(1000);
  diag_cmd->add_option("--probes", dcfg.probes)->default_val(10);
  diag_cmd->add_option("--max-shift", dcfg.max_shift)->default_val(0.3);
  diag_cmd->add_option("--noise", dcfg.noise)->default_val(0.05);
  diag_cmd->add_option("--seed", dcfg.seed)->default_val(0);
  diag_cmd->add_option("--threads", dcfg.workers)->default_val(1);
  diag_cmd->add_option("--output", diag_out, "KS table CSV (stdout if omitted)");
  diag_cmd->add_option("--scatter-output", scatter_out, "p-value scatter CSV");

  // learn
  auto* learn_cmd = app.add_subcommand("learn", "Fit a generator to two moons");
  LearnConfig lcfg;
  std::string arch = "affine";
  fs::path out_dir = ".";
  learn_cmd->add_option("--test", lcfg.test)
      ->transform(CLI::CheckedTransformer(kSmoothMap, CLI::ignore_case))
      ->default_str("knn-smooth");
  learn_cmd->add_option("--k", lcfg.k)->default_val(1);
  learn_cmd->add_option("--lambda", lcfg.lambda)->default_val(1.0);
  learn_cmd->add_option("--batch", lcfg.batch, "Points per sample")->default_val(256);
  learn_cmd->add_option("--steps", lcfg.steps)->default_val(500);
  learn_cmd->add_option("--lr", lcfg.adam.learning_rate)->default_val(1e-4);
  learn_cmd->add_option("--beta1", lcfg.adam.beta1)->default_val(0.9);
  learn_cmd->add_option("--beta2", lcfg.adam.beta2)->default_val(0.999);
  learn_cmd->add_option("--eps", lcfg.adam.epsilon)->default_val(1e-8);
  learn_cmd->add_option("--architecture", arch)
      ->check(CLI::IsMember({"affine", "tanh"}))
      ->default_val("affine");
  learn_cmd->add_option("--width", lcfg.width)->default_val(32);
  learn_cmd->add_option("--noise-dim", lcfg.noise_dim)->default_val(10);
  learn_cmd->add_option("--eval-batches", lcfg.eval_batches)->default_val(20);
  learn_cmd->add_option("--seed", lcfg.seed)->default_val(0);
  learn_cmd->add_option("--out-dir", out_dir, "Directory for params, samples, trace and plot")
      ->default_val(".");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*test_cmd) {
      topt.lambda = lambda;
      topt.gamma = gamma;
      std::cout << to_json(run_test(first, second, topt)).dump(2) << '\n';
    } else if (*power_cmd) {
      if (!power_tests.empty()) {
        pcfg.tests.clear();
        for (const auto& t : power_tests) pcfg.tests.push_back(kTestMap.at(t));
      }
      emit(power_table(power_experiment(pcfg)), power_out);
    } else if (*diag_cmd) {
      const DiagnosticsResult result = null_diagnostics(dcfg);
      emit(diagnostics_table(result), diag_out);
      if (scatter_out) scatter_table(result).save(*scatter_out);
    } else if (*learn_cmd) {
      lcfg.architecture = arch == "affine" ? Architecture::affine : Architecture::tanh_mlp;
      validate(lcfg);
      fs::create_directories(out_dir);
      const LearnResult result = learn_toy(lcfg);
      const std::uint64_t eval_seed = lcfg.seed ^ 0x5eedULL;
      const double t_initial = mean_t_statistic(result.initial, lcfg, eval_seed);
      const double t_final = mean_t_statistic(result.final_params, lcfg, eval_seed);

      save_text(out_dir / "params.json", params_json(result.final_params).dump(2) + "\n");
      {
        std::ostringstream csv;
        write_points_csv(csv, result.samples);
        save_text(out_dir / "samples.csv", csv.str());
      }
      trace_table(result.trace).save(out_dir / "trace.csv");
      Engine rng = make_engine(lcfg.seed, {3});
      const Matrix target = make_moons(lcfg.batch, lcfg.moons_noise, rng);
      save_text(out_dir / "samples.svg",
                svg_scatter({{target, "#1f77b4", "two moons"},
                             {result.samples, "#d62728", "generated"}},
                            "generated vs target"));
      std::vector<double> ts;
      for (const auto& r : result.trace) ts.push_back(r.t_stat);
      if (!ts.empty()) save_text(out_dir / "trace.svg", svg_polyline(ts, "t statistic per step"));

      nlohmann::ordered_json summary;
      summary["test_name"] = std::string(test_name(lcfg.test));
      summary["steps"] = lcfg.steps;
      summary["seed"] = lcfg.seed;
      summary["mean_t_initial"] = t_initial;
      summary["mean_t_final"] = t_final;
      std::cout << summary.dump(2) << '\n';
    }
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const ConditioningError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const DegenerateNullError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
