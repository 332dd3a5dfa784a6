#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "frtpp/model.hpp"
#include "frtpp/rng.hpp"

namespace frtpp {

/// One iterate of the two-stage data-augmentation chain.
struct ChainState {
  OutcomeParams outcome;
  ProbitParams probit;
  ComplianceVector c;
  std::size_t iteration = 0;
};

/// Test fixtures: hold the probit coefficients and/or the outcome variances
/// at known values so chain marginals can be compared with exactly
/// enumerated posteriors. Production callers leave this empty.
struct GibbsOverrides {
  std::optional<ProbitParams> fixed_probit;
  std::optional<std::pair<double, double>> fixed_variances;  // sigma2_c, sigma2_n
};

/// Draws the outcome-model parameters from their full conditionals given the
/// compliance labels. Variances first (given the previous means), then each
/// group mean given the fresh variances, N(0, v0) prior on every mean.
///
/// Mean pooling by posture:
///   impose_null            compliers in both arms share eta_c
///   unconstrained          control compliers -> eta_c0, treated -> eta_c1
///   misspecified           treated compliers share a mean with all
///                          never-takers; eta_c1 is set to that shared value
///   impose_null + misspec  the constraints chain together: every unit
///                          shares a single mean
/// Variances always split by compliance type (sigma2_c over compliers,
/// sigma2_n over never-takers), so a misspecified pooled mean group is
/// updated with heteroskedastic weights. An empty group falls back to a
/// prior draw; the conjugate formulas do this on their own.
OutcomeParams sample_outcome_params(const ObservedDataset& data,
                                    const ComplianceVector& c,
                                    const ImputationPosture& posture,
                                    const Priors& priors, RngStream& stream,
                                    const OutcomeParams& current,
                                    const GibbsOverrides& overrides = {});

/// One latent-utility augmentation sweep for the compliance probit: draws
/// u_i truncated to the side dictated by c_i around the current linear
/// predictor, then the coefficients from the conjugate normal update with
/// prior N(0, v0) per coordinate. Without covariates the design is the
/// intercept alone and alpha_x stays exactly 0.
ProbitParams sample_probit_params(const ComplianceVector& c,
                                  const std::optional<std::vector<double>>& x,
                                  const ImputationPosture& posture,
                                  const Priors& priors, RngStream& stream,
                                  const ProbitParams& current);

/// Posterior probability that a control unit with outcome y and covariate x
/// is a complier, given parameter values: the two-component normal mixture
/// responsibility with mixing weight Phi(alpha_0 + alpha_x x). The complier
/// likelihood mean is eta_c when the null is imposed, eta_c0 otherwise.
/// Evaluated in log space so extreme outcomes cannot produce 0/0.
double complier_probability(double y, double x, const OutcomeParams& outcome,
                            const ProbitParams& probit,
                            const ImputationPosture& posture);

/// Imputes control-arm labels as independent Bernoulli draws of the above;
/// treated labels are pinned to d. The in-place overload reuses storage.
void impute_compliance(const ObservedDataset& data, const OutcomeParams& outcome,
                       const ProbitParams& probit, const ImputationPosture& posture,
                       RngStream& stream, ComplianceVector& c);
ComplianceVector impute_compliance(const ObservedDataset& data,
                                   const OutcomeParams& outcome,
                                   const ProbitParams& probit,
                                   const ImputationPosture& posture,
                                   RngStream& stream);

using ChainObserver = std::function<void(const ChainState&)>;

/// Runs the full chain. Control labels start as independent Bernoulli(p_c)
/// draws with p_c the treated-arm receipt share; each iteration then updates
/// outcome params, probit params and the imputed labels in that fixed order
/// and hands the state to the observer (every iteration, including burn-in;
/// observers decide what to retain). The observer may draw from the same
/// stream; everything is sequential.
void run_chain(const ObservedDataset& data, const ImputationPosture& posture,
               const Priors& priors, const ChainConfig& cfg, RngStream& stream,
               const ChainObserver& observer, const GibbsOverrides& overrides = {});

// Chain-trace CSV for diagnostics.
inline constexpr std::string_view kTraceHeader =
    "iteration,eta_c,eta_c0,eta_c1,eta_n,sigma2_c,sigma2_n,alpha_0,alpha_x,"
    "n_imputed_compliers\n";
std::string trace_row(const ChainState& state, const ObservedDataset& data);

}  // namespace frtpp
