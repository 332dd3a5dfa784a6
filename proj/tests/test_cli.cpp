// End-to-end checks of the installed command line: generate -> test -> simulate
// -> report round trips, plus exit-code behavior. Takes the binary path as
// argv[1] (wired up by CMake).

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "frtpp/io.hpp"

namespace {

int g_failures = 0;
std::string g_cli;

void check(bool ok, const std::string& what) {
  if (ok) {
    std::cout << "[ok] " << what << "\n";
  } else {
    ++g_failures;
    std::cout << "[FAIL] " << what << "\n";
  }
}

int run(const std::string& args) {
  const std::string cmd = g_cli + " " + args;
  const int status = std::system(cmd.c_str());
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -2;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() : path(std::filesystem::current_path() / "cli_test_tmp") {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <path-to-frtpp-binary>\n";
    return 2;
  }
  g_cli = argv[1];
  TempDir tmp;

  // generate writes the dataset and the truth sidecar
  const auto data_csv = tmp.file("data.csv");
  const auto truth_csv = tmp.file("data.truth.csv");
  check(run("generate --out " + data_csv + " --seed 5 --pred medium --eta-c0 1 --tau 0.5 "
            "--n 80 --n-t 40 > /dev/null") == 0,
        "generate exits 0");
  check(std::filesystem::exists(data_csv), "dataset file exists");
  check(std::filesystem::exists(truth_csv), "truth sidecar exists");
  {
    const auto text = frtpp::read_text_file(data_csv);
    check(text.rfind("z,d,y,x\n", 0) == 0, "dataset carries the covariate header");
  }

  // a generated dataset is accepted by test without modification
  const auto result_txt = tmp.file("result.txt");
  check(run("test --data " + data_csv +
            " --method m2 --kind disc --iterations 200 --burn-in 100 --seed 9 > " +
            result_txt) == 0,
        "test exits 0 on a generated dataset");
  {
    const auto line = frtpp::read_text_file(result_txt);
    const auto fields = frtpp::split(frtpp::trim(line), ',');
    check(fields.size() == 4, "test prints a four-field record");
    if (fields.size() == 4) {
      const double p = frtpp::parse_double(fields[0]);
      check(p >= 0.0 && p <= 1.0, "p_value within [0,1]");
      check(fields[1] == "disc" && fields[2] == "m2", "record names kind and method");
    }
  }

  // identical seeds replay the identical record
  const auto result2_txt = tmp.file("result2.txt");
  run("test --data " + data_csv +
      " --method m2 --kind disc --iterations 200 --burn-in 100 --seed 9 > " + result2_txt);
  check(frtpp::read_text_file(result_txt) == frtpp::read_text_file(result2_txt),
        "test output is deterministic in the seed");

  // model-based method needs no kind; trace file gets written
  const auto trace_csv = tmp.file("trace.csv");
  check(run("test --data " + data_csv + " --method model --iterations 200 --burn-in 100 "
            "--seed 9 --trace " + trace_csv + " > /dev/null") == 0,
        "model-based test exits 0");
  check(std::filesystem::exists(trace_csv), "trace CSV exists");
  {
    const auto trace = frtpp::read_text_file(trace_csv);
    check(trace.rfind("iteration,eta_c", 0) == 0, "trace header in place");
  }

  // simulate: same seed, different worker counts, byte-identical output
  const auto grid_cfg = tmp.file("grid.cfg");
  frtpp::write_text_file(grid_cfg,
                         "predictiveness = none\n"
                         "eta_c0 = -1, 1\n"
                         "hypotheses = H0, H1\n"
                         "methods = m1-stat, m1-disc, m2-disc, model\n"
                         "replications = 3\n"
                         "iterations = 60\n"
                         "burn_in = 30\n"
                         "n = 40\n"
                         "n_t = 20\n");
  const auto res1 = tmp.file("r1.csv");
  const auto res2 = tmp.file("r2.csv");
  check(run("simulate --grid " + grid_cfg + " --seed 42 --out " + res1 +
            " --workers 1 > /dev/null") == 0,
        "simulate (1 worker) exits 0");
  check(run("simulate --grid " + grid_cfg + " --seed 42 --out " + res2 +
            " --workers 3 > /dev/null") == 0,
        "simulate (3 workers) exits 0");
  check(frtpp::read_text_file(res1) == frtpp::read_text_file(res2),
        "results CSV byte-identical across worker counts");

  // checkpointed rerun leaves the table unchanged
  const auto ckpt = tmp.file("ckpt.txt");
  const auto res3 = tmp.file("r3.csv");
  check(run("simulate --grid " + grid_cfg + " --seed 42 --out " + res3 + " --checkpoint " +
            ckpt + " > /dev/null") == 0 &&
            frtpp::read_text_file(res3) == frtpp::read_text_file(res1),
        "checkpointed run matches");
  check(run("simulate --grid " + grid_cfg + " --seed 43 --out " + res3 + " --checkpoint " +
            ckpt + " > /dev/null") == 1,
        "checkpoint under a different seed exits 1");

  // report renders the simulated table
  const auto svg = tmp.file("fig.svg");
  const auto table_txt = tmp.file("table.txt");
  check(run("report --in " + res1 + " --figure fig1 --out " + svg + " > " + table_txt) == 0,
        "report exits 0");
  check(std::filesystem::exists(svg), "SVG file exists");
  {
    const auto text = frtpp::read_text_file(svg);
    check(text.rfind("<svg", 0) == 0, "SVG document emitted");
    check(!frtpp::read_text_file(table_txt).empty(), "table printed to stdout");
  }

  // error paths
  check(run("frobnicate 2> /dev/null") == 1, "unknown subcommand exits 1");
  check(run("simulate --grid " + grid_cfg + " --out x.csv 2> /dev/null") == 1,
        "simulate without --seed exits 1");
  frtpp::write_text_file(tmp.file("bad.csv"), "z,d,y\n0,1,0.5\n1,0,0.2\n");
  check(run("test --data " + tmp.file("bad.csv") +
            " --method m1 --kind stat --seed 1 2> /dev/null") == 1,
        "one-sided violation exits 1");
  check(run("test --data " + data_csv + " --method m7 --kind stat --seed 1 2> /dev/null") ==
            1,
        "unknown method exits 1");
  check(run("report --in " + grid_cfg + " --figure fig1 --out x.svg 2> /dev/null") == 1,
        "schema mismatch exits 1");

  if (g_failures == 0) {
    std::cout << "all cli checks passed\n";
    return 0;
  }
  std::cout << g_failures << " cli check(s) failed\n";
  return 1;
}
