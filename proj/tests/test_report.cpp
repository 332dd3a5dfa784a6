#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "frtpp/report.hpp"
#include "frtpp/sim.hpp"

using namespace frtpp;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0, pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

RejectionSummary row(const std::string& pred, double eta, double tau, bool mis,
                     const std::string& method, const std::string& kind, double rate) {
  RejectionSummary r;
  r.scenario_id = pred + (tau == 0.0 ? "_h0_" : "_h1_") + format_double(eta) +
                  (mis ? "_mis" : "");
  r.predictiveness = pred;
  r.eta_c0 = eta;
  r.tau = tau;
  r.misspecified = mis;
  r.method = method;
  r.kind = kind;
  r.replications = 200;
  r.rejection_rate = rate;
  r.mc_standard_error = 0.01;
  return r;
}

std::vector<RejectionSummary> fig1_rows() {
  std::vector<RejectionSummary> rows;
  const std::vector<std::pair<std::string, std::string>> methods = {
      {"m1", "stat"}, {"m1", "disc"}, {"m2", "stat"}, {"m2", "disc"},
      {"m3", "stat"}, {"m3", "disc"}, {"m4", "stat"}, {"m4", "disc"}};
  for (const double tau : {0.0, 0.5})
    for (const double eta : {-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0})
      for (const auto& [m, k] : methods)
        rows.push_back(row("none", eta, tau, false, m, k, tau == 0.0 ? 0.05 : 0.5));
  return rows;
}

}  // namespace

TEST_CASE("built-in figure specs") {
  CHECK(figure_spec("fig1").predictiveness == "none");
  CHECK(figure_spec("fig1").series.size() == 8);
  CHECK(figure_spec("fig3").predictiveness == "high");
  CHECK(figure_spec("fig4").series.size() == 6);
  CHECK(figure_spec("fig6", true).misspecified);
  CHECK_THROWS_AS(figure_spec("fig7"), ValidationError);
}

TEST_CASE("empty or absent series selections are rejected") {
  FigureSpec empty;
  empty.name = "custom";
  empty.predictiveness = "none";
  CHECK_THROWS_AS(make_report(fig1_rows(), empty), ValidationError);

  const auto spec = figure_spec("fig2");  // medium rows do not exist here
  CHECK_THROWS_AS(make_report(fig1_rows(), spec), ValidationError);
}

TEST_CASE("single row renders a single point marker") {
  std::vector<RejectionSummary> rows = {row("none", 0.0, 0.0, false, "m2", "disc", 0.3)};
  FigureSpec spec;
  spec.name = "custom";
  spec.predictiveness = "none";
  spec.series = {"m2-disc"};
  const auto out = make_report(rows, spec);
  CHECK(count_occurrences(out.svg, "<circle") == 1);
  CHECK(count_occurrences(out.svg, "<polyline") == 0);
  CHECK(count_occurrences(out.svg, "class=\"panel\"") == 1);
  CHECK(count_occurrences(out.table, "0.300") == 1);
}

TEST_CASE("fig1 analog renders two panels, eight series and the alpha line") {
  const auto out = make_report(fig1_rows(), figure_spec("fig1"));
  CHECK(count_occurrences(out.svg, "class=\"panel\"") == 2);
  CHECK(count_occurrences(out.svg, "<polyline") == 16);  // 8 series x 2 panels
  CHECK(count_occurrences(out.svg, "class=\"alpha-ref\"") == 2);
  CHECK(out.svg.find("eta_c0 - eta_n") != std::string::npos);
  // legend carries every series token once
  for (const auto& token : figure_spec("fig1").series)
    CHECK(out.svg.find(">" + token + "<") != std::string::npos);
  // table: one block per hypothesis with all nine x values
  CHECK(out.table.find("tau=0 (H0)") != std::string::npos);
  CHECK(out.table.find("tau=0.5 (H1)") != std::string::npos);
  CHECK(count_occurrences(out.table, "\n    -3") == 2);
}

TEST_CASE("report output is byte-stable") {
  const auto rows = fig1_rows();
  const auto a = make_report(rows, figure_spec("fig1"));
  const auto b = make_report(rows, figure_spec("fig1"));
  CHECK(a.svg == b.svg);
  CHECK(a.table == b.table);
}

TEST_CASE("misspecified filter separates rows") {
  std::vector<RejectionSummary> rows = {
      row("none", 0.0, 0.0, false, "m2", "disc", 0.10),
      row("none", 0.0, 0.0, true, "m2", "disc", 0.90),
  };
  FigureSpec spec;
  spec.name = "custom";
  spec.predictiveness = "none";
  spec.series = {"m2-disc"};
  const auto plain = make_report(rows, spec);
  CHECK(plain.table.find("0.100") != std::string::npos);
  CHECK(plain.table.find("0.900") == std::string::npos);
  spec.misspecified = true;
  const auto mis = make_report(rows, spec);
  CHECK(mis.table.find("0.900") != std::string::npos);
}
