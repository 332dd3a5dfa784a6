#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "frtpp/dgp.hpp"
#include "frtpp/sim.hpp"

using namespace frtpp;

namespace {

GridSpec tiny_grid() {
  GridSpec grid;
  grid.predictiveness = {"none"};
  grid.eta_c0_values = {-1.0, 1.0};
  grid.taus = {0.0, 0.5};
  grid.methods = {"m1-stat", "m1-disc", "m2-disc", "model"};
  grid.replications = 4;
  grid.n = 60;
  grid.n_t = 30;
  grid.chain = {80, 40, 0};
  return grid;
}

struct TempPath {
  std::string path;
  explicit TempPath(std::string p) : path(std::move(p)) { std::remove(path.c_str()); }
  ~TempPath() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("grid file parsing with defaults, comments and errors") {
  const auto grid = parse_grid(
      "# comment line\n"
      "predictiveness = high, none\n"
      "eta_c0 = 1, -0.5\n"
      "hypotheses = H1\n"
      "methods = m2-disc, model_x\n"
      "misspecified = true\n"
      "replications = 7\n"
      "iterations = 50\n"
      "burn_in = 20\n"
      "n = 40\n"
      "n_t = 10\n"
      "eta_n = 0.25\n"
      "alpha_level = 0.1\n");
  CHECK(grid.predictiveness == std::vector<std::string>{"none", "high"});
  CHECK(grid.eta_c0_values == std::vector<double>{-0.5, 1.0});
  CHECK(grid.taus == std::vector<double>{0.5});
  CHECK(grid.methods == std::vector<std::string>{"m2-disc", "model_x"});
  CHECK(grid.misspecified);
  CHECK(grid.replications == 7);
  CHECK(grid.chain.total_iterations == 50);
  CHECK(grid.chain.burn_in == 20);
  CHECK(grid.eta_n == 0.25);
  CHECK(grid.alpha_level == 0.1);

  const auto defaults = parse_grid("replications = 2\n");
  CHECK(defaults.methods.size() == 10);
  CHECK(defaults.eta_c0_values.size() == 9);
  CHECK(defaults.chain.total_iterations == 1000);
  CHECK(defaults.chain.burn_in == 500);

  CHECK_THROWS_AS(parse_grid("unknown_key = 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("methods = m9-disc\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("hypotheses = H2\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("replications = 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("eta_c0 =\n"), ValidationError);
  CHECK_THROWS_AS(parse_grid("misspecified = maybe\n"), ValidationError);
}

TEST_CASE("checksum is stable under normalization and sensitive to content") {
  auto a = tiny_grid();
  GridSpec b = a;
  std::swap(b.eta_c0_values[0], b.eta_c0_values[1]);  // same grid, different order
  CHECK(grid_checksum(a, 42) == grid_checksum(b, 42));
  CHECK(grid_checksum(a, 42) != grid_checksum(a, 43));
  GridSpec c = a;
  c.replications = 5;
  CHECK(grid_checksum(a, 42) != grid_checksum(c, 42));
}

TEST_CASE("every method sees the identical dataset for a replication") {
  const auto grid = tiny_grid();
  const auto scenario = make_scenario(grid, "none", 1.0, 0.5);
  auto s1 = derive_stream(42, scenario.data_key + "/rep2/data");
  auto s2 = derive_stream(42, scenario.data_key + "/rep2/data");
  const auto a = generate(scenario.cfg, s1);
  const auto b = generate(scenario.cfg, s2);
  CHECK(a.data.y == b.data.y);
  CHECK(a.data.z == b.data.z);
  CHECK(a.data.d == b.data.d);
}

TEST_CASE("misspecified grids reuse the correctly specified datasets") {
  auto grid = tiny_grid();
  const auto plain = make_scenario(grid, "none", 1.0, 0.0);
  grid.misspecified = true;
  const auto mis = make_scenario(grid, "none", 1.0, 0.0);
  CHECK(plain.data_key == mis.data_key);
  CHECK(plain.id != mis.id);
  CHECK(mis.id == plain.id + "_mis");
}

TEST_CASE("run_replication is deterministic and matches the grid table") {
  const auto grid = tiny_grid();
  const auto scenario = make_scenario(grid, "none", 1.0, 0.5);

  const auto once = run_replication(scenario, "m2-disc", 1, 42);
  const auto twice = run_replication(scenario, "m2-disc", 1, 42);
  REQUIRE(once.p_value.has_value());
  CHECK(*once.p_value == *twice.p_value);
  CHECK(once.reject == twice.reject);

  // the aggregated rate equals the share of per-rep rejections
  const auto rows = run_grid(grid, 42, 2);
  for (const auto& row : rows) {
    if (row.scenario_id != scenario.id || row.method != "m2" || row.kind != "disc") continue;
    std::size_t rejected = 0, valid = 0;
    for (std::size_t rep = 0; rep < grid.replications; ++rep) {
      const auto r = run_replication(scenario, "m2-disc", rep, 42);
      if (!r.p_value) continue;
      ++valid;
      rejected += r.reject ? 1 : 0;
    }
    REQUIRE(valid == row.replications);
    CHECK(row.rejection_rate ==
          doctest::Approx(static_cast<double>(rejected) / valid).epsilon(1e-12));
  }
}

TEST_CASE("grid results are identical for any worker count") {
  const auto grid = tiny_grid();
  const auto csv1 = write_results_csv(run_grid(grid, 7, 1));
  const auto csv2 = write_results_csv(run_grid(grid, 7, 2));
  const auto csv3 = write_results_csv(run_grid(grid, 7, 3));
  CHECK(csv1 == csv2);
  CHECK(csv1 == csv3);
}

TEST_CASE("summary table shape, ordering and error columns") {
  const auto grid = tiny_grid();
  const auto rows = run_grid(grid, 7, 2);
  // 1 predictiveness x 2 eta x 2 hypotheses x 4 methods
  REQUIRE(rows.size() == 16);
  for (const auto& row : rows) {
    CHECK(row.rejection_rate >= 0.0);
    CHECK(row.rejection_rate <= 1.0);
    CHECK(row.mc_standard_error ==
          doctest::Approx(std::sqrt(row.rejection_rate * (1.0 - row.rejection_rate) /
                                    static_cast<double>(row.replications)))
              .epsilon(1e-12));
  }
  // canonical ordering: scenarios in declared order, methods in token order
  CHECK(rows[0].scenario_id == "none_h0_-1");
  CHECK(rows[0].method == "m1");
  CHECK(rows[0].kind == "stat");
  CHECK(rows[1].method == "m1");
  CHECK(rows[1].kind == "disc");
  CHECK(rows[3].method == "model");
  CHECK(rows[4].scenario_id == "none_h0_1");
  CHECK(rows[8].scenario_id == "none_h1_-1");

  // single replication: rate is 0 or 1
  auto single = grid;
  single.replications = 1;
  single.eta_c0_values = {0.0};
  single.taus = {0.5};
  single.methods = {"m1-disc"};
  const auto one = run_grid(single, 9, 1);
  REQUIRE(one.size() == 1);
  CHECK((one[0].rejection_rate == 0.0 || one[0].rejection_rate == 1.0));
}

TEST_CASE("results CSV round-trips") {
  const auto grid = tiny_grid();
  const auto rows = run_grid(grid, 3, 2);
  const auto text = write_results_csv(rows);
  const auto back = parse_results_csv(text);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].scenario_id == rows[i].scenario_id);
    CHECK(back[i].method == rows[i].method);
    CHECK(back[i].kind == rows[i].kind);
    CHECK(back[i].rejection_rate == rows[i].rejection_rate);
    CHECK(back[i].mc_standard_error == rows[i].mc_standard_error);
    CHECK(back[i].eta_c0 == rows[i].eta_c0);
  }
  CHECK_THROWS_AS(parse_results_csv("wrong,header\n"), ValidationError);
}

TEST_CASE("checkpoint: resume reproduces the uninterrupted table") {
  const auto grid = tiny_grid();
  TempPath ckpt("sim_test_checkpoint.txt");

  const auto full = write_results_csv(run_grid(grid, 11, 2, ckpt.path));
  REQUIRE(std::filesystem::exists(ckpt.path));

  // Truncate the checkpoint to half its cell lines to fake an interruption.
  {
    const auto text = read_text_file(ckpt.path);
    const auto lines = split(text, '\n');
    REQUIRE(lines.size() > 6);
    std::string half;
    const std::size_t keep = 2 + (lines.size() - 2) / 2;
    for (std::size_t i = 0; i < keep; ++i) half += lines[i] + "\n";
    write_text_file(ckpt.path, half);
  }
  const auto resumed = write_results_csv(run_grid(grid, 11, 2, ckpt.path));
  CHECK(resumed == full);

  // a fresh empty checkpoint file means a full run
  TempPath ckpt2("sim_test_checkpoint2.txt");
  const auto fresh = write_results_csv(run_grid(grid, 11, 2, ckpt2.path));
  CHECK(fresh == full);

  // altered grid or seed: checksum mismatch
  auto other = grid;
  other.replications = 3;
  CHECK_THROWS_AS(run_grid(other, 11, 2, ckpt2.path), ValidationError);
  CHECK_THROWS_AS(run_grid(grid, 12, 2, ckpt2.path), ValidationError);
}
