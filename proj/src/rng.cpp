#include "frtpp/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace frtpp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::string_view label)
    : base_seed_(base_seed), label_(label) {
  // Documented derivation: seed' = base_seed XOR (fnv1a(label) * golden),
  // then the state words are the first four splitmix64 outputs of seed'.
  std::uint64_t s = base_seed ^ (fnv1a64(label) * 0x9E3779B97F4A7C15ull);
  for (auto& w : state_) w = splitmix64(s);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream derive_stream(std::uint64_t base_seed, std::string_view label) {
  return RngStream(base_seed, label);
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++ transition (Blackman & Vigna).
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_double_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  // Rejection over the largest multiple of bound, so the result is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

double normal_cdf(double u) { return 0.5 * std::erfc(-u * kInvSqrt2); }

double normal_logcdf(double u) {
  if (u > -37.0) return std::log(normal_cdf(u));
  // Deep lower tail: log Phi(u) via the Mills-ratio expansion
  // Phi(u) ~ phi(u)/(-u) * (1 - 1/u^2 + 3/u^4 - ...).
  const double u2 = u * u;
  return -0.5 * u2 - 0.5 * std::log(2.0 * kPi) - std::log(-u) +
         std::log1p(-1.0 / u2 + 3.0 / (u2 * u2));
}

double normal_pdf(double y, double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("normal_pdf: variance must be > 0");
  const double d = y - mean;
  return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * kPi * variance);
}

double normal_logpdf(double y, double mean, double variance) {
  const double d = y - mean;
  return -0.5 * d * d / variance - 0.5 * std::log(2.0 * kPi * variance);
}

double normal_quantile(double p) {
  // Wichura (1988), algorithm AS 241, PPND16. Relative accuracy ~1e-16.
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must lie strictly in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r +
                4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r +
              1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r +
            3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r +
                2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r +
              6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r +
            1.0);
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r +
                 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r +
               5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r +
             1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r +
                 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r +
               1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r +
             1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r +
                 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r +
               1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r +
             6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r +
                 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r +
               1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r +
             1.0);
  }
  return (q < 0.0) ? -value : value;
}

double sample_normal(RngStream& stream, double mean, double variance) {
  if (!(variance > 0.0))
    throw std::invalid_argument("sample_normal: variance must be > 0");
  return mean + std::sqrt(variance) * normal_quantile(stream.next_double_open());
}

double sample_gamma(RngStream& stream, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("sample_gamma: shape and rate must be > 0");
  if (shape < 1.0) {
    // Boost a Gamma(shape+1) draw down: G_a = G_{a+1} * U^{1/a}.
    const double g = sample_gamma(stream, shape + 1.0, 1.0);
    const double u = stream.next_double_open();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  // Marsaglia & Tsang (2000) squeeze method.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double z = normal_quantile(stream.next_double_open());
    double v = 1.0 + c * z;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = stream.next_double_open();
    if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v / rate;
  }
}

double sample_inverse_gamma(RngStream& stream, double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw std::invalid_argument("sample_inverse_gamma: shape and rate must be > 0");
  const double g = sample_gamma(stream, shape, 1.0);
  return rate / std::max(g, std::numeric_limits<double>::min());
}

namespace {

// Standard normal truncated to [a, inf).
double lower_truncated_std_normal(RngStream& stream, double a) {
  if (a <= 0.0) {
    // Mode is inside the region; plain rejection accepts at least half.
    for (;;) {
      const double x = normal_quantile(stream.next_double_open());
      if (x >= a) return x;
    }
  }
  // Robert (1995): shifted exponential proposal with optimal rate.
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(stream.next_double_open()) / lambda;
    const double diff = x - lambda;
    if (std::log(stream.next_double_open()) <= -0.5 * diff * diff) return x;
  }
}

}  // namespace

double sample_truncated_normal(RngStream& stream, double mean, double variance,
                               TruncationSide side) {
  if (!(variance > 0.0))
    throw std::invalid_argument("sample_truncated_normal: variance must be > 0");
  const double sd = std::sqrt(variance);
  if (side == TruncationSide::above_zero)
    return mean + sd * lower_truncated_std_normal(stream, -mean / sd);
  // X | X < 0 is the mirror image of (-X) | (-X) > 0 with -X ~ N(-mean, var).
  return -(-mean + sd * lower_truncated_std_normal(stream, mean / sd));
}

void sample_permutation(RngStream& stream, std::size_t n, std::size_t n_t,
                        std::vector<std::uint8_t>& out) {
  if (n_t == 0 || n_t >= n)
    throw std::invalid_argument("sample_permutation: need 0 < n_t < n");
  out.assign(n, 0);
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(n_t), 1);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(stream.next_below(i + 1));
    std::swap(out[i], out[j]);
  }
}

std::vector<std::uint8_t> sample_permutation(RngStream& stream, std::size_t n,
                                             std::size_t n_t) {
  std::vector<std::uint8_t> out;
  sample_permutation(stream, n, n_t, out);
  return out;
}

}  // namespace frtpp
