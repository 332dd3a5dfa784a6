#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "frtpp/model.hpp"

namespace frtpp {

/// A rejection-rate experiment: the cross product of predictiveness levels,
/// complier-mean values, hypotheses (tau 0 / 0.5) and testing methods, each
/// run for `replications` independent datasets.
struct GridSpec {
  std::vector<std::string> predictiveness = {"none"};
  std::vector<double> eta_c0_values = {-3, -2, -1, -0.5, 0, 0.5, 1, 2, 3};
  std::vector<double> taus = {0.0, 0.5};
  std::vector<std::string> methods;  // defaults to every known token
  bool misspecified = false;
  std::size_t replications = 200;
  std::size_t n = 500;
  std::size_t n_t = 250;
  double eta_n = 0.0;
  ChainConfig chain{1000, 500, 0};
  double alpha_level = 0.05;
  Priors priors;
};

/// Stable method identifiers used in grid files and results CSVs.
/// "m#-stat" / "m#-disc" pair an imputation posture with a test quantity;
/// "model" / "model_x" are the posterior-credible tests without / with
/// covariates in the compliance model.
extern const std::array<std::string_view, 10> kMethodTokens;
bool is_method_token(std::string_view token);

/// Parses the flat key=value grid format ('#' comment lines, blank lines
/// ignored). Keys: predictiveness, eta_c0, hypotheses (H0,H1), methods,
/// misspecified, replications, iterations, burn_in, n, n_t, eta_n,
/// alpha_level, mean_prior_variance, ig_shape, ig_rate. Missing keys keep
/// the desk-scale defaults above.
GridSpec parse_grid(std::string_view text);
GridSpec parse_grid_file(const std::string& path);

/// Sorted, deduplicated copy with methods in canonical order; validates.
GridSpec normalize_grid(const GridSpec& grid);

/// FNV-1a of the normalized grid plus the base seed; guards checkpoints
/// against being resumed under a different grid.
std::uint64_t grid_checksum(const GridSpec& grid, std::uint64_t base_seed);

struct Scenario {
  ScenarioConfig cfg;
  Priors priors;
  std::string predictiveness;
  bool misspecified = false;
  std::string id;        // "none_h0_-0.5", "high_h1_2_mis", ...
  std::string data_key;  // id without the _mis suffix: misspecification is an
                         // analysis choice, so those grids reuse the same data
};

Scenario make_scenario(const GridSpec& grid, const std::string& predictiveness,
                       double eta_c0, double tau);

struct ReplicationOutcome {
  std::optional<double> p_value;  // nullopt: every retained draw degenerate
  bool reject = false;
  std::size_t degenerate_draws = 0;
};

/// Computes one (scenario, method, replication) cell. Streams are derived as
/// (base_seed, "<data_key>/rep<r>/data") for the dataset and
/// (base_seed, "<data_key>/rep<r>/chain/<m#>[-mis]") for the chain, so every
/// method sees the identical dataset for a given replication and methods
/// sharing a posture share one chain.
ReplicationOutcome run_replication(const Scenario& scenario,
                                   const std::string& method_token,
                                   std::size_t rep_index, std::uint64_t base_seed);

/// Runs the whole grid across `worker_count` threads (0 = hardware
/// concurrency). The result table is a pure function of (grid, base_seed):
/// cells own disjoint output slots and every random stream is derived from
/// stable labels, so scheduling cannot perturb anything. When
/// checkpoint_path is non-empty, finished cells are appended there and a
/// resumed run skips them, reproducing the uninterrupted table exactly.
std::vector<RejectionSummary> run_grid(const GridSpec& grid, std::uint64_t base_seed,
                                       unsigned worker_count,
                                       const std::string& checkpoint_path = {});

inline constexpr std::string_view kResultsHeader =
    "scenario_id,predictiveness,eta_c0,tau,misspecified,method,kind,"
    "replications,rejection_rate,mc_se,mean_degenerate_draws\n";

std::string write_results_csv(const std::vector<RejectionSummary>& rows);
std::vector<RejectionSummary> parse_results_csv(std::string_view text);

}  // namespace frtpp
