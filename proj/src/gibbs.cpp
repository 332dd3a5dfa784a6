#include "frtpp/gibbs.hpp"

#include <cmath>
#include <limits>

namespace frtpp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean-group layout per posture. Groups are indexed 0..2; kNone marks a
// slot the posture does not use.
struct MeanLayout {
  int n_groups = 0;
  // group index for: control compliers, treated compliers, never-takers
  int control_compliers = -1;
  int treated_compliers = -1;
  int never_takers = -1;
};

MeanLayout mean_layout(const ImputationPosture& p) {
  if (p.impose_null && p.misspecified) return {1, 0, 0, 0};
  if (p.impose_null) return {2, 0, 0, 1};
  if (p.misspecified) return {2, 0, 1, 1};
  return {3, 0, 1, 2};
}

int unit_mean_group(const MeanLayout& layout, bool complier, bool treated) {
  if (!complier) return layout.never_takers;
  return treated ? layout.treated_compliers : layout.control_compliers;
}

// Previous-iteration mean of a unit's group, for the variance update.
double unit_prev_mean(const ImputationPosture& p, const OutcomeParams& prev,
                      bool complier, bool treated) {
  if (p.impose_null && p.misspecified) return prev.eta_n;
  if (p.impose_null) return complier ? prev.eta_c : prev.eta_n;
  if (!complier) return prev.eta_n;
  if (!treated) return prev.eta_c0;
  return p.misspecified ? prev.eta_n : prev.eta_c1;
}

}  // namespace

OutcomeParams sample_outcome_params(const ObservedDataset& data,
                                    const ComplianceVector& c,
                                    const ImputationPosture& posture,
                                    const Priors& priors, RngStream& stream,
                                    const OutcomeParams& current,
                                    const GibbsOverrides& overrides) {
  const MeanLayout layout = mean_layout(posture);

  // Variance full conditionals: residual sums around the current group means,
  // split by compliance type.
  double ss_c = 0.0, ss_n = 0.0;
  std::size_t n_c = 0, n_n = 0;
  for (std::size_t i = 0; i < data.n; ++i) {
    const bool complier = c.c[i] != 0;
    const double r = data.y[i] - unit_prev_mean(posture, current, complier, data.z[i] != 0);
    if (complier) {
      ss_c += r * r;
      ++n_c;
    } else {
      ss_n += r * r;
      ++n_n;
    }
  }

  double sigma2_c, sigma2_n;
  if (overrides.fixed_variances) {
    sigma2_c = overrides.fixed_variances->first;
    sigma2_n = overrides.fixed_variances->second;
  } else {
    sigma2_c = sample_inverse_gamma(stream, priors.ig_shape + 0.5 * static_cast<double>(n_c),
                                    priors.ig_rate + 0.5 * ss_c);
    sigma2_n = sample_inverse_gamma(stream, priors.ig_shape + 0.5 * static_cast<double>(n_n),
                                    priors.ig_rate + 0.5 * ss_n);
  }

  // Mean full conditionals with the fresh variances. Precision-weighted so a
  // pooled group mixing both compliance types is handled exactly; an empty
  // group reduces to N(0, v0), the prior.
  double weight[3] = {0.0, 0.0, 0.0};
  double weighted_sum[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < data.n; ++i) {
    const bool complier = c.c[i] != 0;
    const int g = unit_mean_group(layout, complier, data.z[i] != 0);
    const double w = 1.0 / (complier ? sigma2_c : sigma2_n);
    weight[g] += w;
    weighted_sum[g] += w * data.y[i];
  }

  double mu[3] = {0.0, 0.0, 0.0};
  for (int g = 0; g < layout.n_groups; ++g) {
    const double precision = weight[g] + 1.0 / priors.mean_prior_variance;
    mu[g] = sample_normal(stream, weighted_sum[g] / precision, 1.0 / precision);
  }

  OutcomeParams out;
  out.sigma2_c = sigma2_c;
  out.sigma2_n = sigma2_n;
  out.eta_c0 = mu[layout.control_compliers];
  out.eta_c1 = mu[layout.treated_compliers];
  out.eta_n = mu[layout.never_takers];
  out.eta_c = posture.impose_null ? mu[layout.control_compliers] : kNaN;
  return out;
}

ProbitParams sample_probit_params(const ComplianceVector& c,
                                  const std::optional<std::vector<double>>& x,
                                  const ImputationPosture& posture,
                                  const Priors& priors, RngStream& stream,
                                  const ProbitParams& current) {
  const std::size_t n = c.c.size();
  const double prior_precision = 1.0 / priors.mean_prior_variance;

  if (!posture.use_covariates) {
    double sum_u = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto side = c.c[i] ? TruncationSide::above_zero : TruncationSide::below_zero;
      sum_u += sample_truncated_normal(stream, current.alpha_0, 1.0, side);
    }
    const double precision = static_cast<double>(n) + prior_precision;
    const double alpha_0 = sample_normal(stream, sum_u / precision, 1.0 / precision);
    return {alpha_0, 0.0};
  }

  if (!x) throw ValidationError("posture uses covariates but the dataset has none");

  double sum_u = 0.0, sum_xu = 0.0, sum_x = 0.0, sum_xx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = (*x)[i];
    const auto side = c.c[i] ? TruncationSide::above_zero : TruncationSide::below_zero;
    const double u = sample_truncated_normal(stream, current.alpha_0 + current.alpha_x * xi,
                                             1.0, side);
    sum_u += u;
    sum_xu += xi * u;
    sum_x += xi;
    sum_xx += xi * xi;
  }

  // Posterior precision P = W'W + I/v0, mean m = P^{-1} W'u; draw via the
  // 2x2 Cholesky P = L L', alpha = m + L^{-T} zeta.
  const double p00 = static_cast<double>(n) + prior_precision;
  const double p01 = sum_x;
  const double p11 = sum_xx + prior_precision;
  const double l00 = std::sqrt(p00);
  const double l10 = p01 / l00;
  const double l11 = std::sqrt(p11 - l10 * l10);

  // Solve P m = b: forward substitution with L, back substitution with L'.
  const double t0 = sum_u / l00;
  const double t1 = (sum_xu - l10 * t0) / l11;
  const double m1 = t1 / l11;
  const double m0 = (t0 - l10 * m1) / l00;

  const double z0 = sample_normal(stream, 0.0, 1.0);
  const double z1 = sample_normal(stream, 0.0, 1.0);
  const double a1 = z1 / l11;
  const double a0 = (z0 - l10 * a1) / l00;
  return {m0 + a0, m1 + a1};
}

namespace {

double complier_probability_from_logits(double y, double log_weight_c,
                                        double log_weight_n, const OutcomeParams& o,
                                        bool impose_null) {
  const double mu_c = impose_null ? o.eta_c : o.eta_c0;
  const double lp_c = log_weight_c + normal_logpdf(y, mu_c, o.sigma2_c);
  const double lp_n = log_weight_n + normal_logpdf(y, o.eta_n, o.sigma2_n);
  const double m = std::max(lp_c, lp_n);
  const double wc = std::exp(lp_c - m);
  const double wn = std::exp(lp_n - m);
  return wc / (wc + wn);
}

}  // namespace

double complier_probability(double y, double x, const OutcomeParams& outcome,
                            const ProbitParams& probit,
                            const ImputationPosture& posture) {
  const double xb = probit.alpha_0 + probit.alpha_x * x;
  return complier_probability_from_logits(y, normal_logcdf(xb), normal_logcdf(-xb),
                                          outcome, posture.impose_null);
}

void impute_compliance(const ObservedDataset& data, const OutcomeParams& outcome,
                       const ProbitParams& probit, const ImputationPosture& posture,
                       RngStream& stream, ComplianceVector& c) {
  c.c.resize(data.n);
  const bool constant_weight = !posture.use_covariates || probit.alpha_x == 0.0;
  const double lw_c0 = constant_weight ? normal_logcdf(probit.alpha_0) : 0.0;
  const double lw_n0 = constant_weight ? normal_logcdf(-probit.alpha_0) : 0.0;
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.z[i]) {
      c.c[i] = data.d[i];
      continue;
    }
    double lw_c = lw_c0, lw_n = lw_n0;
    if (!constant_weight) {
      const double xb = probit.alpha_0 + probit.alpha_x * (*data.x)[i];
      lw_c = normal_logcdf(xb);
      lw_n = normal_logcdf(-xb);
    }
    const double p =
        complier_probability_from_logits(data.y[i], lw_c, lw_n, outcome, posture.impose_null);
    c.c[i] = (stream.next_double() < p) ? 1 : 0;
  }
}

ComplianceVector impute_compliance(const ObservedDataset& data,
                                   const OutcomeParams& outcome,
                                   const ProbitParams& probit,
                                   const ImputationPosture& posture,
                                   RngStream& stream) {
  ComplianceVector c;
  impute_compliance(data, outcome, probit, posture, stream, c);
  return c;
}

void run_chain(const ObservedDataset& data, const ImputationPosture& posture,
               const Priors& priors, const ChainConfig& cfg, RngStream& stream,
               const ChainObserver& observer, const GibbsOverrides& overrides) {
  validate_chain(cfg);
  if (posture.use_covariates && !data.x && !overrides.fixed_probit)
    throw ValidationError("posture uses covariates but the dataset has none");

  ChainState state;
  state.c.c.resize(data.n);

  // Initialize control labels at the treated-arm receipt share, which is an
  // unbiased estimate of the complier proportion under randomization.
  std::size_t treated_receipts = 0;
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.z[i] && data.d[i]) ++treated_receipts;
  const double p_hat_c = static_cast<double>(treated_receipts) / static_cast<double>(data.n_t);
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.z[i])
      state.c.c[i] = data.d[i];
    else
      state.c.c[i] = (stream.next_double() < p_hat_c) ? 1 : 0;
  }

  state.outcome = OutcomeParams{};
  if (!posture.impose_null) state.outcome.eta_c = std::numeric_limits<double>::quiet_NaN();
  state.probit = overrides.fixed_probit.value_or(ProbitParams{});

  for (std::size_t k = 0; k < cfg.total_iterations; ++k) {
    state.outcome =
        sample_outcome_params(data, state.c, posture, priors, stream, state.outcome, overrides);
    if (!overrides.fixed_probit)
      state.probit = sample_probit_params(state.c, data.x, posture, priors, stream, state.probit);
    impute_compliance(data, state.outcome, state.probit, posture, stream, state.c);
    state.iteration = k;
    observer(state);
  }
}

std::string trace_row(const ChainState& state, const ObservedDataset& data) {
  std::size_t imputed = 0;
  for (std::size_t i = 0; i < data.n; ++i)
    if (!data.z[i] && state.c.c[i]) ++imputed;
  std::string row = std::to_string(state.iteration);
  const double fields[] = {state.outcome.eta_c,    state.outcome.eta_c0,
                           state.outcome.eta_c1,   state.outcome.eta_n,
                           state.outcome.sigma2_c, state.outcome.sigma2_n,
                           state.probit.alpha_0,   state.probit.alpha_x};
  for (const double f : fields) {
    row += ',';
    row += format_double(f);
  }
  row += ',';
  row += std::to_string(imputed);
  row += '\n';
  return row;
}

}  // namespace frtpp
