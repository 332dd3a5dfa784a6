#include "frtpp/dgp.hpp"

#include <cmath>

namespace frtpp {

GeneratedExperiment generate(const ScenarioConfig& cfg, RngStream& stream) {
  validate_scenario(cfg);
  const std::size_t n = cfg.n;

  std::vector<double> x(n);
  for (auto& v : x) v = sample_normal(stream, 0.0, 1.0);

  ComplianceVector c_true;
  c_true.c.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eps = sample_normal(stream, 0.0, 1.0);
    c_true.c[i] = (cfg.alpha[0] + cfg.alpha[1] * x[i] + eps > 0.0) ? 1 : 0;
  }

  std::vector<double> y0(n), y1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double mean = c_true.c[i] ? cfg.eta_c0 : cfg.eta_n;
    y0[i] = sample_normal(stream, mean, 1.0);
    y1[i] = c_true.c[i] ? y0[i] + cfg.tau : y0[i];
  }

  const auto z = sample_permutation(stream, n, cfg.n_t);

  std::vector<std::uint8_t> d(n);
  std::vector<double> y_obs(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = static_cast<std::uint8_t>(c_true.c[i] & z[i]);
    y_obs[i] = z[i] ? y1[i] : y0[i];
  }

  GeneratedExperiment out;
  out.data = validate_dataset(z, std::move(d), std::move(y_obs), std::move(x));
  out.truth = TruthRecord{std::move(c_true), std::move(y0), std::move(y1)};
  return out;
}

double marginal_complier_rate(const std::array<double, 2>& alpha) {
  return normal_cdf(alpha[0] / std::sqrt(1.0 + alpha[1] * alpha[1]));
}

std::string write_truth_csv(const TruthRecord& truth) {
  std::string out = "c_true,y0,y1\n";
  for (std::size_t i = 0; i < truth.c_true.c.size(); ++i) {
    out += truth.c_true.c[i] ? '1' : '0';
    out += ',';
    out += format_double(truth.y0[i]);
    out += ',';
    out += format_double(truth.y1[i]);
    out += '\n';
  }
  return out;
}

TruthRecord parse_truth_csv(std::string_view text) {
  TruthRecord truth;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    std::string_view line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    start = pos + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "c_true,y0,y1")
        throw ValidationError("truth CSV header must be 'c_true,y0,y1'");
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3)
      throw ValidationError("truth CSV line " + std::to_string(line_no) +
                            ": expected 3 fields");
    if (fields[0] != "0" && fields[0] != "1")
      throw ValidationError("truth CSV line " + std::to_string(line_no) +
                            ": c_true must be 0 or 1");
    truth.c_true.c.push_back(fields[0] == "1" ? 1 : 0);
    truth.y0.push_back(parse_double(fields[1]));
    truth.y1.push_back(parse_double(fields[2]));
  }
  if (truth.c_true.c.empty()) throw ValidationError("truth CSV has no rows");
  return truth;
}

}  // namespace frtpp
