#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "frtpp/io.hpp"

namespace frtpp {

/// One randomized experiment with one-sided noncompliance, as the analyst
/// sees it: assignment z, treatment receipt d, outcome y and an optional
/// covariate x. Control units can never receive treatment, so d_i = 0
/// whenever z_i = 0. Immutable value object once validated.
struct ObservedDataset {
  std::vector<std::uint8_t> z;
  std::vector<std::uint8_t> d;
  std::vector<double> y;
  std::optional<std::vector<double>> x;
  std::size_t n = 0;
  std::size_t n_t = 0;

  bool has_covariate() const { return x.has_value(); }
};

/// Checks lengths, binary codes, finiteness, 0 < n_t < n and the one-sided
/// noncompliance constraint. Throws ValidationError naming the first
/// offending unit.
ObservedDataset validate_dataset(std::vector<std::uint8_t> z,
                                 std::vector<std::uint8_t> d,
                                 std::vector<double> y,
                                 std::optional<std::vector<double>> x = std::nullopt);

/// Per-unit compliance labels: 0 = never-taker, 1 = complier. Treated units
/// reveal their type (c_i = d_i); control labels are imputed elsewhere.
struct ComplianceVector {
  std::vector<std::uint8_t> c;
};

/// Labels with the treated arm revealed and all control labels set to 0.
ComplianceVector known_compliance(const ObservedDataset& data);

/// Outcome-model state. eta_c is the pooled complier mean and is only
/// meaningful when the null is imposed (NaN otherwise); under the
/// treated-mean misspecification eta_c1 is tied to eta_n.
struct OutcomeParams {
  double eta_c = 0.0;
  double eta_c0 = 0.0;
  double eta_c1 = 0.0;
  double eta_n = 0.0;
  double sigma2_c = 1.0;
  double sigma2_n = 1.0;
};

struct ProbitParams {
  double alpha_0 = 0.0;
  double alpha_x = 0.0;  // pinned to 0 when the posture excludes covariates
};

/// Which compliance-imputation model the sampler uses.
///   m1: impose the null, no covariates      m2: unconstrained, no covariates
///   m3: impose the null, with covariates    m4: unconstrained, with covariates
/// `misspecified` additionally ties the treated-complier outcome mean to the
/// never-taker mean during estimation.
struct ImputationPosture {
  bool impose_null = true;
  bool use_covariates = false;
  bool misspecified = false;

  static ImputationPosture for_method(int m, bool misspecified = false);
  int method_number() const;      // 1..4
  std::string method_tag() const; // "m1".."m4"
};

struct Priors {
  double mean_prior_variance = 10.0;  // zero-centered normal on every mean and probit coefficient
  double ig_shape = 0.1;
  double ig_rate = 0.1;
};

struct ChainConfig {
  std::size_t total_iterations = 2000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;  // base seed callers use to derive streams
};

/// One simulation scenario: data-generating parameters plus the chain and
/// testing settings used on each replication.
struct ScenarioConfig {
  std::size_t n = 500;
  std::size_t n_t = 250;
  std::array<double, 2> alpha{-0.8, 0.0};  // probit {intercept, covariate slope}
  double eta_n = 0.0;
  double eta_c0 = 0.0;
  double tau = 0.0;  // complier effect: 0 under H0, 0.5 under H1
  std::size_t replications = 200;
  ChainConfig chain;
  double alpha_level = 0.05;
};

void validate_scenario(const ScenarioConfig& cfg);
void validate_chain(const ChainConfig& cfg);

/// Covariate-predictiveness levels: none {-0.8, 0}, medium {-1.4, 2},
/// high {-2.8, 5}.
std::array<double, 2> predictiveness_alpha(std::string_view level);
extern const std::array<std::string_view, 3> kPredictivenessLevels;

enum class TestKind { statistic, discrepancy, model_based };

std::string_view kind_tag(TestKind kind);  // "stat" | "disc" | "model"
TestKind parse_kind(std::string_view tag);

struct TestResult {
  double p_value = 1.0;
  TestKind kind = TestKind::statistic;
  std::size_t retained_iterations = 0;  // total - burn_in
  std::size_t degenerate_draws = 0;     // iterations with an undefined value
};

/// One aggregated row of a simulation run.
struct RejectionSummary {
  std::string scenario_id;
  std::string predictiveness;
  double eta_c0 = 0.0;
  double tau = 0.0;
  bool misspecified = false;
  std::string method;  // "m1".."m4" | "model" | "model_x"
  std::string kind;    // "stat" | "disc" | "model"
  std::size_t replications = 0;
  double rejection_rate = 0.0;
  double mc_standard_error = 0.0;  // sqrt(r(1-r)/replications)
  double mean_degenerate_draws = 0.0;
};

// Dataset CSV: header "z,d,y" or "z,d,y,x", one unit per row, LF endings,
// '.' decimals. Serialization uses shortest round-trip formatting, so
// serialize -> parse reproduces every field bit for bit.
std::string write_dataset_csv(const ObservedDataset& data);
ObservedDataset parse_dataset_csv(std::string_view text);

}  // namespace frtpp
