#pragma once

#include <optional>
#include <span>

#include "frtpp/gibbs.hpp"
#include "frtpp/model.hpp"
#include "frtpp/rng.hpp"

namespace frtpp {

/// Every retained iteration produced an undefined value (or the observed
/// statistic itself was undefined), so no p-value exists.
struct AllDrawsDegenerate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// IV estimator of the complier effect: (Ybar_1 - Ybar_0) / (Dbar_1 - Dbar_0)
/// with per-arm means. Returns nullopt when the denominator is exactly zero
/// (no identifiable compliers under this assignment).
std::optional<double> iv_statistic(std::span<const double> y,
                                   std::span<const std::uint8_t> d,
                                   std::span<const std::uint8_t> z);

/// Difference in mean outcomes between treated and control compliers, taking
/// the labels as known. Returns nullopt when either arm holds no complier.
std::optional<double> discrepancy(std::span<const double> y, const ComplianceVector& c,
                                  std::span<const std::uint8_t> z);

/// All test outputs obtainable from one chain under one posture. The chain is
/// run once; each retained iteration draws a single permuted assignment and
/// contributes one exceedance indicator per test quantity:
///   stat   T_k = T(y, c~ * z~, z~) vs T_obs (computed once from observed data)
///   disc   D_k = D(y, c~, z~)      vs D(y, c~, z_obs), both recomputed per
///          iteration since they move with the imputed labels
///   model  indicator of eta_c1 - eta_c0 <= 0 (unconstrained postures only)
/// Ties count as exceedance. Iterations where a quantity is undefined are
/// excluded from that quantity's numerator and denominator and counted in
/// degenerate_draws. A field is nullopt when every retained iteration was
/// degenerate for it (stat/disc) or the posture does not support it (model).
/// *_lower carry the opposite-tail rates used by the two-sided fold.
struct PostureResults {
  std::optional<TestResult> stat;
  std::optional<TestResult> disc;
  std::optional<TestResult> model;
  double stat_lower = 0.0;
  double disc_lower = 0.0;
  double model_lower = 0.0;
};

PostureResults run_posture_tests(const ObservedDataset& data,
                                 const ImputationPosture& posture,
                                 const Priors& priors, const ChainConfig& cfg,
                                 RngStream& stream);

enum class TailConvention { upper_one_sided, two_sided };

/// Randomization-test p-value with posterior-predictive compliance
/// imputation, for one test quantity. Thin wrapper over run_posture_tests so
/// every caller consumes the identical draw sequence for a given stream.
/// Throws AllDrawsDegenerate when no retained iteration yielded a value.
TestResult frt_pp_pvalue(const ObservedDataset& data, const ImputationPosture& posture,
                         TestKind kind, const Priors& priors, const ChainConfig& cfg,
                         RngStream& stream,
                         TailConvention tail = TailConvention::upper_one_sided);

/// Posterior-credible test read straight off the unconstrained chain:
/// p = Pr(eta_c1 - eta_c0 <= 0 | data), small values rejecting the positive
/// alternative. Requires posture.impose_null == false.
TestResult model_based_pvalue(const ObservedDataset& data,
                              const ImputationPosture& posture, const Priors& priors,
                              const ChainConfig& cfg, RngStream& stream,
                              TailConvention tail = TailConvention::upper_one_sided);

/// Folds upper/lower one-sided exceedance rates into a two-sided p-value,
/// counting ties on both sides.
double two_sided_pvalue(double p_upper, double p_lower);

/// Exact conditional p-value with the compliance labels held fixed: complete
/// enumeration over all C(n, n_t) assignments, exceedance with ties,
/// degenerate assignments excluded from both counts. Oracle for the Monte
/// Carlo inner loop; requires C(n, n_t) <= 1e6.
double enumerate_frt_pvalue(std::span<const double> y, const ComplianceVector& c,
                            std::span<const std::uint8_t> z, TestKind kind);

}  // namespace frtpp
