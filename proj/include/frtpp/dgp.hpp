#pragma once

#include "frtpp/model.hpp"
#include "frtpp/rng.hpp"

namespace frtpp {

/// Ground truth behind a synthetic experiment: true compliance labels and
/// both potential outcomes. Never-takers have y1 == y0 (exclusion
/// restriction); compliers have y1 == y0 + tau.
struct TruthRecord {
  ComplianceVector c_true;
  std::vector<double> y0;
  std::vector<double> y1;
};

struct GeneratedExperiment {
  ObservedDataset data;
  TruthRecord truth;
};

/// Draws one experiment:
///   x_i ~ N(0,1);  c_i = 1{alpha_0 + alpha_x x_i + eps_i > 0}, eps ~ N(0,1);
///   y0 ~ N(eta_n, 1) for never-takers, N(eta_c0, 1) for compliers;
///   y1 per the exclusion restriction and tau;
///   z: completely randomized with exactly n_t treated;  d = c * z.
/// Draw order is fixed (x's, then eps's, then y0's, then the assignment) so
/// a stream replays the identical experiment.
GeneratedExperiment generate(const ScenarioConfig& cfg, RngStream& stream);

/// Marginal complier share implied by the probit compliance model with
/// x ~ N(0,1): Phi(alpha_0 / sqrt(1 + alpha_x^2)).
double marginal_complier_rate(const std::array<double, 2>& alpha);

// Truth sidecar CSV (header "c_true,y0,y1"), written next to generated
// datasets for oracle tests.
std::string write_truth_csv(const TruthRecord& truth);
TruthRecord parse_truth_csv(std::string_view text);

}  // namespace frtpp
