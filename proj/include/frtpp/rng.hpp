#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace frtpp {

/// Deterministic, seedable random stream.
///
/// The generator is xoshiro256++ (small state, explicit transition). A stream
/// is derived from a 64-bit base seed and a textual label: the label is hashed
/// with FNV-1a, mixed into the seed, and the four state words are expanded
/// with splitmix64. Identical (seed, label) pairs replay the exact same draw
/// sequence; distinct labels give statistically independent streams. That is
/// the whole reproducibility contract of the project: every consumer names
/// its stream, nothing ever shares one across tasks.
///
/// Streams are single-owner mutable objects. Parallel code derives one stream
/// per task instead of locking a shared generator.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::string_view label);

  std::uint64_t next_u64();
  /// Uniform on [0, 1), 53-bit resolution.
  double next_double();
  /// Uniform on (0, 1), never returns an exact endpoint. Safe to feed into
  /// quantile functions.
  double next_double_open();
  /// Unbiased uniform integer in [0, bound); bound must be positive.
  std::uint64_t next_below(std::uint64_t bound);

  std::uint64_t base_seed() const { return base_seed_; }
  const std::string& label() const { return label_; }

 private:
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t base_seed_ = 0;
  std::string label_;
};

RngStream derive_stream(std::uint64_t base_seed, std::string_view label);

enum class TruncationSide { above_zero, below_zero };

/// N(mean, variance); variance must be strictly positive.
double sample_normal(RngStream& stream, double mean, double variance);

/// Gamma(shape, rate) via Marsaglia-Tsang, with the shape<1 boost.
double sample_gamma(RngStream& stream, double shape, double rate);

/// Inverse gamma with shape/rate parameterization: mean = rate/(shape-1)
/// for shape > 1. Always strictly positive.
double sample_inverse_gamma(RngStream& stream, double shape, double rate);

/// Normal truncated to one side of zero. Uses plain rejection when the
/// truncation point sits below the mode and Robert's shifted-exponential
/// rejection in the tail, so it stays exact for |mean| up to 10 and beyond.
double sample_truncated_normal(RngStream& stream, double mean, double variance,
                               TruncationSide side);

/// Completely randomized assignment: exactly n_t ones among n entries,
/// uniform over all C(n, n_t) arrangements (Fisher-Yates on the multiset).
/// Requires 0 < n_t < n.
std::vector<std::uint8_t> sample_permutation(RngStream& stream, std::size_t n,
                                             std::size_t n_t);
void sample_permutation(RngStream& stream, std::size_t n, std::size_t n_t,
                        std::vector<std::uint8_t>& out);

/// Standard normal CDF / quantile and normal density helpers.
/// normal_quantile is Wichura's AS 241 (double precision throughout);
/// normal_logcdf switches to an asymptotic tail expansion below -37 where
/// the direct CDF underflows.
double normal_cdf(double u);
double normal_logcdf(double u);
double normal_quantile(double p);
double normal_pdf(double y, double mean, double variance);
double normal_logpdf(double y, double mean, double variance);

}  // namespace frtpp
