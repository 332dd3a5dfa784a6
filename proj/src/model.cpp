#include "frtpp/model.hpp"

#include <cmath>

namespace frtpp {

const std::array<std::string_view, 3> kPredictivenessLevels = {"none", "medium", "high"};

ObservedDataset validate_dataset(std::vector<std::uint8_t> z,
                                 std::vector<std::uint8_t> d,
                                 std::vector<double> y,
                                 std::optional<std::vector<double>> x) {
  const std::size_t n = z.size();
  if (d.size() != n || y.size() != n)
    throw ValidationError("array length mismatch: z=" + std::to_string(n) +
                          " d=" + std::to_string(d.size()) +
                          " y=" + std::to_string(y.size()));
  if (x && x->size() != n)
    throw ValidationError("array length mismatch: x=" + std::to_string(x->size()) +
                          " vs n=" + std::to_string(n));
  std::size_t n_t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] > 1)
      throw ValidationError("unit " + std::to_string(i) + ": z must be 0 or 1");
    if (d[i] > 1)
      throw ValidationError("unit " + std::to_string(i) + ": d must be 0 or 1");
    if (z[i] == 0 && d[i] == 1)
      throw ValidationError("unit " + std::to_string(i) +
                            ": d=1 with z=0 violates one-sided noncompliance");
    if (!std::isfinite(y[i]))
      throw ValidationError("unit " + std::to_string(i) + ": y is not finite");
    if (x && !std::isfinite((*x)[i]))
      throw ValidationError("unit " + std::to_string(i) + ": x is not finite");
    n_t += z[i];
  }
  if (n_t == 0 || n_t == n)
    throw ValidationError("need both arms non-empty: n=" + std::to_string(n) +
                          " n_t=" + std::to_string(n_t));
  ObservedDataset data;
  data.z = std::move(z);
  data.d = std::move(d);
  data.y = std::move(y);
  data.x = std::move(x);
  data.n = n;
  data.n_t = n_t;
  return data;
}

ComplianceVector known_compliance(const ObservedDataset& data) {
  ComplianceVector cv;
  cv.c.assign(data.n, 0);
  for (std::size_t i = 0; i < data.n; ++i)
    if (data.z[i] == 1) cv.c[i] = data.d[i];
  return cv;
}

ImputationPosture ImputationPosture::for_method(int m, bool misspecified) {
  switch (m) {
    case 1: return {true, false, misspecified};
    case 2: return {false, false, misspecified};
    case 3: return {true, true, misspecified};
    case 4: return {false, true, misspecified};
    default: throw ValidationError("imputation method must be 1..4");
  }
}

int ImputationPosture::method_number() const {
  if (impose_null) return use_covariates ? 3 : 1;
  return use_covariates ? 4 : 2;
}

std::string ImputationPosture::method_tag() const {
  return "m" + std::to_string(method_number());
}

std::array<double, 2> predictiveness_alpha(std::string_view level) {
  if (level == "none") return {-0.8, 0.0};
  if (level == "medium") return {-1.4, 2.0};
  if (level == "high") return {-2.8, 5.0};
  throw ValidationError("unknown predictiveness level: '" + std::string(level) +
                        "' (expected none|medium|high)");
}

void validate_chain(const ChainConfig& cfg) {
  if (cfg.burn_in >= cfg.total_iterations)
    throw ValidationError("chain burn_in must be smaller than total_iterations");
}

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.n_t == 0 || cfg.n_t >= cfg.n)
    throw ValidationError("scenario needs 0 < n_t < n");
  if (cfg.replications < 1) throw ValidationError("replications must be >= 1");
  if (!(cfg.alpha_level > 0.0 && cfg.alpha_level < 1.0))
    throw ValidationError("alpha_level must lie in (0,1)");
  validate_chain(cfg.chain);
}

std::string_view kind_tag(TestKind kind) {
  switch (kind) {
    case TestKind::statistic: return "stat";
    case TestKind::discrepancy: return "disc";
    case TestKind::model_based: return "model";
  }
  return "stat";
}

TestKind parse_kind(std::string_view tag) {
  if (tag == "stat") return TestKind::statistic;
  if (tag == "disc") return TestKind::discrepancy;
  if (tag == "model") return TestKind::model_based;
  throw ValidationError("unknown test kind: '" + std::string(tag) +
                        "' (expected stat|disc|model)");
}

std::string write_dataset_csv(const ObservedDataset& data) {
  std::string out;
  out.reserve(data.n * 24 + 8);
  out += data.x ? "z,d,y,x\n" : "z,d,y\n";
  for (std::size_t i = 0; i < data.n; ++i) {
    out += data.z[i] ? '1' : '0';
    out += ',';
    out += data.d[i] ? '1' : '0';
    out += ',';
    out += format_double(data.y[i]);
    if (data.x) {
      out += ',';
      out += format_double((*data.x)[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

std::uint8_t parse_binary(const std::string& token, std::size_t line, const char* name) {
  if (token == "0") return 0;
  if (token == "1") return 1;
  throw ValidationError("line " + std::to_string(line) + ": " + name +
                        " must be 0 or 1, got '" + token + "'");
}

}  // namespace

ObservedDataset parse_dataset_csv(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::size_t start = 0;
    while (start < text.size()) {
      auto pos = text.find('\n', start);
      if (pos == std::string_view::npos) pos = text.size();
      auto line = text.substr(start, pos - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.emplace_back(line);
      start = pos + 1;
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ValidationError("dataset CSV is empty");

  bool with_x = false;
  if (lines[0] == "z,d,y,x")
    with_x = true;
  else if (lines[0] != "z,d,y")
    throw ValidationError("dataset CSV header must be 'z,d,y' or 'z,d,y,x', got '" +
                          lines[0] + "'");

  std::vector<std::uint8_t> z, d;
  std::vector<double> y, x;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto fields = split(lines[li], ',');
    const std::size_t expected = with_x ? 4 : 3;
    if (fields.size() != expected)
      throw ValidationError("line " + std::to_string(li + 1) + ": expected " +
                            std::to_string(expected) + " fields, got " +
                            std::to_string(fields.size()));
    z.push_back(parse_binary(fields[0], li + 1, "z"));
    d.push_back(parse_binary(fields[1], li + 1, "d"));
    y.push_back(parse_double(fields[2]));
    if (with_x) x.push_back(parse_double(fields[3]));
  }
  return validate_dataset(std::move(z), std::move(d), std::move(y),
                          with_x ? std::optional(std::move(x)) : std::nullopt);
}

}  // namespace frtpp
