#include "frtpp/frt.hpp"

#include <algorithm>
#include <cmath>

namespace frtpp {

std::optional<double> iv_statistic(std::span<const double> y,
                                   std::span<const std::uint8_t> d,
                                   std::span<const std::uint8_t> z) {
  double sum_y1 = 0.0, sum_y0 = 0.0, sum_d1 = 0.0, sum_d0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (z[i]) {
      sum_y1 += y[i];
      sum_d1 += d[i];
      ++n1;
    } else {
      sum_y0 += y[i];
      sum_d0 += d[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) return std::nullopt;
  const double denom = sum_d1 / static_cast<double>(n1) - sum_d0 / static_cast<double>(n0);
  if (denom == 0.0) return std::nullopt;
  return (sum_y1 / static_cast<double>(n1) - sum_y0 / static_cast<double>(n0)) / denom;
}

std::optional<double> discrepancy(std::span<const double> y, const ComplianceVector& c,
                                  std::span<const std::uint8_t> z) {
  double sum1 = 0.0, sum0 = 0.0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!c.c[i]) continue;
    if (z[i]) {
      sum1 += y[i];
      ++n1;
    } else {
      sum0 += y[i];
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) return std::nullopt;
  return sum1 / static_cast<double>(n1) - sum0 / static_cast<double>(n0);
}

namespace {

struct Tally {
  std::size_t upper = 0;  // replicate >= observed
  std::size_t lower = 0;  // replicate <= observed
  std::size_t valid = 0;
  std::size_t degenerate = 0;

  void add(double replicate, double observed) {
    ++valid;
    if (replicate >= observed) ++upper;
    if (replicate <= observed) ++lower;
  }
};

std::optional<TestResult> finish(const Tally& t, TestKind kind, std::size_t retained,
                                 double* lower_rate) {
  if (t.valid == 0) return std::nullopt;
  *lower_rate = static_cast<double>(t.lower) / static_cast<double>(t.valid);
  return TestResult{static_cast<double>(t.upper) / static_cast<double>(t.valid), kind,
                    retained, t.degenerate};
}

}  // namespace

PostureResults run_posture_tests(const ObservedDataset& data,
                                 const ImputationPosture& posture,
                                 const Priors& priors, const ChainConfig& cfg,
                                 RngStream& stream) {
  const std::size_t retained = cfg.total_iterations - cfg.burn_in;
  const auto t_obs = iv_statistic(data.y, data.d, data.z);

  Tally stat, disc, model;
  std::vector<std::uint8_t> z_perm, d_perm(data.n);

  run_chain(
      data, posture, priors, cfg, stream,
      [&](const ChainState& state) {
        if (state.iteration < cfg.burn_in) return;
        sample_permutation(stream, data.n, data.n_t, z_perm);

        if (t_obs) {
          for (std::size_t i = 0; i < data.n; ++i)
            d_perm[i] = static_cast<std::uint8_t>(state.c.c[i] & z_perm[i]);
          if (const auto t_k = iv_statistic(data.y, d_perm, z_perm))
            stat.add(*t_k, *t_obs);
          else
            ++stat.degenerate;
        } else {
          ++stat.degenerate;
        }

        const auto d_obs = discrepancy(data.y, state.c, data.z);
        const auto d_k = discrepancy(data.y, state.c, z_perm);
        if (d_obs && d_k)
          disc.add(*d_k, *d_obs);
        else
          ++disc.degenerate;

        if (!posture.impose_null)
          model.add(0.0, state.outcome.eta_c1 - state.outcome.eta_c0);
      });

  PostureResults out;
  out.stat = finish(stat, TestKind::statistic, retained, &out.stat_lower);
  out.disc = finish(disc, TestKind::discrepancy, retained, &out.disc_lower);
  if (!posture.impose_null) {
    // Upper tally counted 0 >= diff, i.e. Pr(eta_c1 - eta_c0 <= 0); the lower
    // counted the opposite tail.
    out.model = finish(model, TestKind::model_based, retained, &out.model_lower);
  }
  return out;
}

namespace {

TestResult fold(const TestResult& r, double lower, TailConvention tail) {
  if (tail == TailConvention::upper_one_sided) return r;
  TestResult out = r;
  out.p_value = two_sided_pvalue(r.p_value, lower);
  return out;
}

}  // namespace

TestResult frt_pp_pvalue(const ObservedDataset& data, const ImputationPosture& posture,
                         TestKind kind, const Priors& priors, const ChainConfig& cfg,
                         RngStream& stream, TailConvention tail) {
  auto results = run_posture_tests(data, posture, priors, cfg, stream);
  switch (kind) {
    case TestKind::statistic:
      if (!results.stat)
        throw AllDrawsDegenerate("iv statistic undefined in every retained iteration");
      return fold(*results.stat, results.stat_lower, tail);
    case TestKind::discrepancy:
      if (!results.disc)
        throw AllDrawsDegenerate("discrepancy undefined in every retained iteration");
      return fold(*results.disc, results.disc_lower, tail);
    case TestKind::model_based:
      if (!results.model)
        throw ValidationError("model-based p-value requires an unconstrained posture");
      return fold(*results.model, results.model_lower, tail);
  }
  throw std::logic_error("unreachable test kind");
}

TestResult model_based_pvalue(const ObservedDataset& data,
                              const ImputationPosture& posture, const Priors& priors,
                              const ChainConfig& cfg, RngStream& stream,
                              TailConvention tail) {
  if (posture.impose_null)
    throw ValidationError("model-based p-value requires an unconstrained posture");
  return frt_pp_pvalue(data, posture, TestKind::model_based, priors, cfg, stream, tail);
}

double two_sided_pvalue(double p_upper, double p_lower) {
  return std::min(1.0, 2.0 * std::min(p_upper, p_lower));
}

double enumerate_frt_pvalue(std::span<const double> y, const ComplianceVector& c,
                            std::span<const std::uint8_t> z, TestKind kind) {
  if (kind == TestKind::model_based)
    throw ValidationError("enumeration is defined for stat and disc kinds only");
  const std::size_t n = y.size();
  std::size_t n_t = 0;
  for (const auto zi : z) n_t += zi;
  if (n_t == 0 || n_t >= n) throw ValidationError("need 0 < n_t < n");

  // C(n, n_t), bailing out early past the supported bound.
  constexpr double kMaxCombinations = 1e6;
  double combos = 1.0;
  for (std::size_t i = 1; i <= n_t; ++i) {
    combos *= static_cast<double>(n - n_t + i) / static_cast<double>(i);
    if (combos > kMaxCombinations * 1.0001)
      throw ValidationError("C(n, n_t) exceeds the 1e6 enumeration bound");
  }

  std::vector<std::uint8_t> d_obs(n), z_try(n), d_try(n);
  for (std::size_t i = 0; i < n; ++i) d_obs[i] = static_cast<std::uint8_t>(c.c[i] & z[i]);

  double observed;
  if (kind == TestKind::statistic) {
    const auto t = iv_statistic(y, d_obs, z);
    if (!t) throw AllDrawsDegenerate("observed iv statistic undefined");
    observed = *t;
  } else {
    const auto d = discrepancy(y, c, z);
    if (!d) throw AllDrawsDegenerate("observed discrepancy undefined");
    observed = *d;
  }

  // Enumerate treated-index subsets in lexicographic order.
  std::vector<std::size_t> idx(n_t);
  for (std::size_t i = 0; i < n_t; ++i) idx[i] = i;
  std::size_t exceed = 0, valid = 0;
  for (;;) {
    std::fill(z_try.begin(), z_try.end(), 0);
    for (const auto i : idx) z_try[i] = 1;

    std::optional<double> replicate;
    if (kind == TestKind::statistic) {
      for (std::size_t i = 0; i < n; ++i)
        d_try[i] = static_cast<std::uint8_t>(c.c[i] & z_try[i]);
      replicate = iv_statistic(y, d_try, z_try);
    } else {
      replicate = discrepancy(y, c, z_try);
    }
    if (replicate) {
      ++valid;
      if (*replicate >= observed) ++exceed;
    }

    // next combination
    std::size_t k = n_t;
    while (k > 0 && idx[k - 1] == n - n_t + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < n_t; ++j) idx[j] = idx[j - 1] + 1;
  }
  if (valid == 0) throw AllDrawsDegenerate("every assignment is degenerate");
  return static_cast<double>(exceed) / static_cast<double>(valid);
}

}  // namespace frtpp
