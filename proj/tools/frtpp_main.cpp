// frtpp command line: generate synthetic experiments, run a single test,
// run simulation grids, and render results as tables and SVG charts.
// Exit codes: 0 success, 1 validation/usage error, 2 runtime failure.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "frtpp/dgp.hpp"
#include "frtpp/frt.hpp"
#include "frtpp/io.hpp"
#include "frtpp/report.hpp"
#include "frtpp/sim.hpp"

namespace {

struct GenerateArgs {
  std::string out;
  std::string truth_out;
  std::uint64_t seed = 0;
  std::string pred = "none";
  double eta_c0 = 0.0;
  double eta_n = 0.0;
  double tau = 0.0;
  std::size_t n = 500;
  std::size_t n_t = 250;
};

int cmd_generate(const GenerateArgs& a) {
  frtpp::ScenarioConfig cfg;
  cfg.n = a.n;
  cfg.n_t = a.n_t;
  cfg.alpha = frtpp::predictiveness_alpha(a.pred);
  cfg.eta_n = a.eta_n;
  cfg.eta_c0 = a.eta_c0;
  cfg.tau = a.tau;

  auto stream = frtpp::derive_stream(a.seed, "generate");
  const auto experiment = frtpp::generate(cfg, stream);
  frtpp::write_text_file(a.out, frtpp::write_dataset_csv(experiment.data));

  std::string truth_path = a.truth_out;
  if (truth_path.empty()) {
    truth_path = a.out;
    const auto dot = truth_path.rfind(".csv");
    if (dot != std::string::npos && dot == truth_path.size() - 4)
      truth_path.replace(dot, 4, ".truth.csv");
    else
      truth_path += ".truth.csv";
  }
  frtpp::write_text_file(truth_path, frtpp::write_truth_csv(experiment.truth));
  std::cout << a.out << "\n" << truth_path << "\n";
  return 0;
}

struct TestArgs {
  std::string data;
  std::string method;
  std::string kind;
  std::size_t iterations = 2000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  bool misspecified = false;
  bool two_sided = false;
  std::string trace_path;
  frtpp::Priors priors;
};

int cmd_test(const TestArgs& a) {
  const auto dataset = frtpp::parse_dataset_csv(frtpp::read_text_file(a.data));

  frtpp::ImputationPosture posture;
  bool model_based = false;
  if (a.method == "model") {
    posture = frtpp::ImputationPosture::for_method(2, a.misspecified);
    model_based = true;
  } else if (a.method == "model_x") {
    posture = frtpp::ImputationPosture::for_method(4, a.misspecified);
    model_based = true;
  } else if (a.method.size() == 2 && a.method[0] == 'm' && a.method[1] >= '1' &&
             a.method[1] <= '4') {
    posture = frtpp::ImputationPosture::for_method(a.method[1] - '0', a.misspecified);
  } else {
    throw frtpp::ValidationError("--method must be m1..m4, model or model_x");
  }

  frtpp::TestKind kind;
  if (model_based) {
    if (!a.kind.empty() && a.kind != "model")
      throw frtpp::ValidationError("method '" + a.method + "' implies --kind model");
    kind = frtpp::TestKind::model_based;
  } else {
    if (a.kind != "stat" && a.kind != "disc")
      throw frtpp::ValidationError("--kind must be stat or disc for methods m1..m4");
    kind = frtpp::parse_kind(a.kind);
  }
  if (!(a.alpha > 0.0 && a.alpha < 1.0))
    throw frtpp::ValidationError("--alpha must lie in (0,1)");

  const frtpp::ChainConfig chain{a.iterations, a.burn_in, a.seed};
  auto stream = frtpp::derive_stream(a.seed, "test");
  const auto tail = a.two_sided ? frtpp::TailConvention::two_sided
                                : frtpp::TailConvention::upper_one_sided;

  if (!a.trace_path.empty()) {
    std::string trace{frtpp::kTraceHeader};
    auto trace_stream = frtpp::derive_stream(a.seed, "test-trace");
    frtpp::run_chain(dataset, posture, a.priors, chain, trace_stream,
                     [&](const frtpp::ChainState& s) { trace += frtpp::trace_row(s, dataset); });
    frtpp::write_text_file(a.trace_path, trace);
  }

  const auto result = frtpp::frt_pp_pvalue(dataset, posture, kind, a.priors, chain, stream, tail);
  std::cout << frtpp::format_double(result.p_value) << "," << frtpp::kind_tag(result.kind)
            << "," << a.method << "," << result.degenerate_draws << "\n";
  return 0;
}

struct SimulateArgs {
  std::string grid_path;
  std::uint64_t seed = 0;
  std::string out;
  unsigned workers = 0;
  std::string checkpoint;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto grid = frtpp::parse_grid_file(a.grid_path);
  const auto rows = frtpp::run_grid(grid, a.seed, a.workers, a.checkpoint);
  frtpp::write_text_file(a.out, frtpp::write_results_csv(rows));
  std::cout << a.out << "\n";
  return 0;
}

struct ReportArgs {
  std::string in;
  std::string figure;
  bool misspecified = false;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  const auto rows = frtpp::parse_results_csv(frtpp::read_text_file(a.in));
  const auto spec = frtpp::figure_spec(a.figure, a.misspecified);
  const auto output = frtpp::make_report(rows, spec);
  frtpp::write_text_file(a.out, output.svg);
  std::cout << output.table;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Randomization tests for experiments with one-sided noncompliance:\n"
      "posterior-predictive p-values over Gibbs-imputed compliance statuses,\n"
      "plus a simulation harness and figure renderer."};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV and its truth sidecar");
  generate->add_option("--out", gen.out, "Dataset CSV path")->required();
  generate->add_option("--truth-out", gen.truth_out,
                       "Truth sidecar path (default: <out>.truth.csv)");
  generate->add_option("--seed", gen.seed, "Base RNG seed")->required();
  generate->add_option("--pred", gen.pred,
                       "Covariate predictiveness of compliance: none|medium|high");
  generate->add_option("--eta-c0", gen.eta_c0, "Control-complier outcome mean");
  generate->add_option("--eta-n", gen.eta_n, "Never-taker outcome mean");
  generate->add_option("--tau", gen.tau, "Complier effect (0 under H0, 0.5 under H1)");
  generate->add_option("--n", gen.n, "Units");
  generate->add_option("--n-t", gen.n_t, "Treated units");

  TestArgs test;
  auto* test_cmd = app.add_subcommand("test", "Run one test on a dataset CSV; prints p_value,kind,method,degenerate_draws");
  test_cmd->add_option("--data", test.data, "Dataset CSV path")->required();
  test_cmd->add_option("--method", test.method,
                       "m1..m4 (imputation postures), model or model_x")->required();
  test_cmd->add_option("--kind", test.kind, "stat|disc (required for m1..m4)");
  test_cmd->add_option("--iterations", test.iterations, "Total chain iterations");
  test_cmd->add_option("--burn-in", test.burn_in, "Discarded iterations");
  test_cmd->add_option("--seed", test.seed, "Base RNG seed")->required();
  test_cmd->add_option("--alpha", test.alpha, "Significance level");
  test_cmd->add_flag("--misspecified", test.misspecified,
                     "Tie the treated-complier mean to the never-taker mean when imputing");
  test_cmd->add_flag("--two-sided", test.two_sided,
                     "Fold both exceedance tails instead of the upper one-sided default");
  test_cmd->add_option("--trace", test.trace_path, "Write a chain-trace CSV here");
  test_cmd->add_option("--prior-variance", test.priors.mean_prior_variance,
                       "Variance of the zero-centered normal prior on means");
  test_cmd->add_option("--ig-shape", test.priors.ig_shape, "Inverse-gamma prior shape");
  test_cmd->add_option("--ig-rate", test.priors.ig_rate, "Inverse-gamma prior rate");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a rejection-rate grid and write the results CSV");
  simulate->add_option("--grid", sim.grid_path, "Grid spec file (key = value lines)")->required();
  simulate->add_option("--seed", sim.seed, "Base RNG seed (results are a pure function of grid+seed)")
      ->required();
  simulate->add_option("--out", sim.out, "Results CSV path")->required();
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = hardware)");
  simulate->add_option("--checkpoint", sim.checkpoint,
                       "Cell checkpoint file; reruns resume and skip finished cells");

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "Render a results CSV as a text table and an SVG chart");
  report->add_option("--in", rep.in, "Results CSV path")->required();
  report->add_option("--figure", rep.figure,
                     "fig1|fig2|fig3 (stat+disc by predictiveness), fig4|fig5|fig6 (disc+model)")
      ->required();
  report->add_flag("--misspecified", rep.misspecified,
                   "Read the misspecified rows instead of the correctly specified ones");
  report->add_option("--out", rep.out, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*test_cmd) return cmd_test(test);
    if (*simulate) return cmd_simulate(sim);
    if (*report) return cmd_report(rep);
  } catch (const frtpp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
