#include "frtpp/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "frtpp/dgp.hpp"
#include "frtpp/frt.hpp"

namespace frtpp {

const std::array<std::string_view, 10> kMethodTokens = {
    "m1-stat", "m1-disc", "m2-stat", "m2-disc", "m3-stat",
    "m3-disc", "m4-stat", "m4-disc", "model",   "model_x"};

bool is_method_token(std::string_view token) {
  return std::find(kMethodTokens.begin(), kMethodTokens.end(), token) !=
         kMethodTokens.end();
}

namespace {

// Posture group (0..3 for m1..m4) whose chain serves a method. The
// posterior-credible tests read the unconstrained chains: "model" shares m2,
// "model_x" shares m4.
int token_group(std::string_view token) {
  if (token == "model") return 1;
  if (token == "model_x") return 3;
  return token[1] - '1';
}

std::pair<std::string, std::string> token_parts(std::string_view token) {
  if (token == "model") return {"model", "model"};
  if (token == "model_x") return {"model_x", "model"};
  return {std::string(token.substr(0, 2)), std::string(token.substr(3))};
}

std::string hypothesis_tag(double tau) { return tau == 0.0 ? "h0" : "h1"; }

}  // namespace

Scenario make_scenario(const GridSpec& grid, const std::string& predictiveness,
                       double eta_c0, double tau) {
  Scenario s;
  s.cfg.n = grid.n;
  s.cfg.n_t = grid.n_t;
  s.cfg.alpha = predictiveness_alpha(predictiveness);
  s.cfg.eta_n = grid.eta_n;
  s.cfg.eta_c0 = eta_c0;
  s.cfg.tau = tau;
  s.cfg.replications = grid.replications;
  s.cfg.chain = grid.chain;
  s.cfg.alpha_level = grid.alpha_level;
  s.priors = grid.priors;
  s.predictiveness = predictiveness;
  s.misspecified = grid.misspecified;
  s.data_key = predictiveness + "_" + hypothesis_tag(tau) + "_" + format_double(eta_c0);
  s.id = s.data_key + (grid.misspecified ? "_mis" : "");
  return s;
}

GridSpec normalize_grid(const GridSpec& grid) {
  GridSpec out = grid;

  std::vector<std::string> preds;
  for (const auto level : kPredictivenessLevels) {
    if (std::find(grid.predictiveness.begin(), grid.predictiveness.end(), level) !=
        grid.predictiveness.end())
      preds.emplace_back(level);
  }
  if (preds.size() != grid.predictiveness.size()) {
    for (const auto& p : grid.predictiveness) predictiveness_alpha(p);  // throws on bad level
    // duplicates collapse silently
  }
  out.predictiveness = std::move(preds);

  std::sort(out.eta_c0_values.begin(), out.eta_c0_values.end());
  out.eta_c0_values.erase(std::unique(out.eta_c0_values.begin(), out.eta_c0_values.end()),
                          out.eta_c0_values.end());
  std::sort(out.taus.begin(), out.taus.end());
  out.taus.erase(std::unique(out.taus.begin(), out.taus.end()), out.taus.end());

  std::vector<std::string> methods;
  const auto& requested = grid.methods.empty()
                              ? [] {
                                  std::vector<std::string> all;
                                  for (auto t : kMethodTokens) all.emplace_back(t);
                                  return all;
                                }()
                              : grid.methods;
  for (const auto token : kMethodTokens) {
    if (std::find(requested.begin(), requested.end(), token) != requested.end())
      methods.emplace_back(token);
  }
  for (const auto& m : requested)
    if (!is_method_token(m)) throw ValidationError("unknown method token: '" + m + "'");
  out.methods = std::move(methods);

  if (out.predictiveness.empty() || out.eta_c0_values.empty() || out.taus.empty() ||
      out.methods.empty())
    throw ValidationError("grid has an empty dimension");
  if (out.replications < 1) throw ValidationError("replications must be >= 1");
  for (const double tau : out.taus)
    if (tau != 0.0 && tau != 0.5)
      throw ValidationError("hypotheses pin tau to 0 (H0) or 0.5 (H1)");
  if (out.n_t == 0 || out.n_t >= out.n) throw ValidationError("grid needs 0 < n_t < n");
  if (!(out.alpha_level > 0.0 && out.alpha_level < 1.0))
    throw ValidationError("alpha_level must lie in (0,1)");
  validate_chain(out.chain);
  return out;
}

GridSpec parse_grid(std::string_view text) {
  GridSpec grid;
  std::size_t start = 0, line_no = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto raw = trim(text.substr(start, pos - start));
    start = pos + 1;
    ++line_no;
    if (pos == text.size() && raw.empty()) break;
    if (raw.empty() || raw.front() == '#') continue;

    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("grid line " + std::to_string(line_no) +
                            ": expected key = value");
    const std::string key{trim(raw.substr(0, eq))};
    const std::string value{trim(raw.substr(eq + 1))};
    if (value.empty())
      throw ValidationError("grid key '" + key + "' has an empty value");

    if (key == "predictiveness") {
      grid.predictiveness = split(value, ',');
    } else if (key == "eta_c0") {
      grid.eta_c0_values.clear();
      for (const auto& tok : split(value, ',')) grid.eta_c0_values.push_back(parse_double(tok));
    } else if (key == "hypotheses") {
      grid.taus.clear();
      for (const auto& tok : split(value, ',')) {
        if (tok == "H0")
          grid.taus.push_back(0.0);
        else if (tok == "H1")
          grid.taus.push_back(0.5);
        else
          throw ValidationError("hypotheses must be H0 and/or H1, got '" + tok + "'");
      }
    } else if (key == "methods") {
      grid.methods = split(value, ',');
    } else if (key == "misspecified") {
      if (value == "true" || value == "1")
        grid.misspecified = true;
      else if (value == "false" || value == "0")
        grid.misspecified = false;
      else
        throw ValidationError("misspecified must be true/false");
    } else if (key == "replications") {
      grid.replications = static_cast<std::size_t>(parse_int(value));
    } else if (key == "iterations") {
      grid.chain.total_iterations = static_cast<std::size_t>(parse_int(value));
    } else if (key == "burn_in") {
      grid.chain.burn_in = static_cast<std::size_t>(parse_int(value));
    } else if (key == "n") {
      grid.n = static_cast<std::size_t>(parse_int(value));
    } else if (key == "n_t") {
      grid.n_t = static_cast<std::size_t>(parse_int(value));
    } else if (key == "eta_n") {
      grid.eta_n = parse_double(value);
    } else if (key == "alpha_level") {
      grid.alpha_level = parse_double(value);
    } else if (key == "mean_prior_variance") {
      grid.priors.mean_prior_variance = parse_double(value);
    } else if (key == "ig_shape") {
      grid.priors.ig_shape = parse_double(value);
    } else if (key == "ig_rate") {
      grid.priors.ig_rate = parse_double(value);
    } else {
      throw ValidationError("unknown grid key: '" + key + "'");
    }
  }
  return normalize_grid(grid);
}

GridSpec parse_grid_file(const std::string& path) {
  return parse_grid(read_text_file(path));
}

namespace {

std::string canonical_grid_string(const GridSpec& g) {
  std::string s = "pred=";
  for (const auto& p : g.predictiveness) s += p + ";";
  s += "|eta=";
  for (const double e : g.eta_c0_values) s += format_double(e) + ";";
  s += "|tau=";
  for (const double t : g.taus) s += format_double(t) + ";";
  s += "|methods=";
  for (const auto& m : g.methods) s += m + ";";
  s += "|mis=" + std::string(g.misspecified ? "1" : "0");
  s += "|reps=" + std::to_string(g.replications);
  s += "|n=" + std::to_string(g.n) + "|n_t=" + std::to_string(g.n_t);
  s += "|eta_n=" + format_double(g.eta_n);
  s += "|iters=" + std::to_string(g.chain.total_iterations);
  s += "|burn=" + std::to_string(g.chain.burn_in);
  s += "|alpha=" + format_double(g.alpha_level);
  s += "|v0=" + format_double(g.priors.mean_prior_variance);
  s += "|ig=" + format_double(g.priors.ig_shape) + "," + format_double(g.priors.ig_rate);
  return s;
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// One chain's worth of per-replication outputs.
struct CellValues {
  bool computed = false;
  std::optional<double> stat_p, disc_p, model_p;
  std::uint32_t stat_deg = 0, disc_deg = 0;
};

CellValues compute_cell(const Scenario& sc, int group, std::size_t rep,
                        std::uint64_t base_seed) {
  const std::string rep_key = sc.data_key + "/rep" + std::to_string(rep);
  auto data_stream = derive_stream(base_seed, rep_key + "/data");
  const auto experiment = generate(sc.cfg, data_stream);

  const auto posture = ImputationPosture::for_method(group + 1, sc.misspecified);
  auto chain_stream = derive_stream(
      base_seed,
      rep_key + "/chain/" + posture.method_tag() + (sc.misspecified ? "-mis" : ""));
  const auto results =
      run_posture_tests(experiment.data, posture, sc.priors, sc.cfg.chain, chain_stream);

  CellValues cell;
  cell.computed = true;
  if (results.stat) {
    cell.stat_p = results.stat->p_value;
    cell.stat_deg = static_cast<std::uint32_t>(results.stat->degenerate_draws);
  } else {
    cell.stat_deg = static_cast<std::uint32_t>(sc.cfg.chain.total_iterations -
                                               sc.cfg.chain.burn_in);
  }
  if (results.disc) {
    cell.disc_p = results.disc->p_value;
    cell.disc_deg = static_cast<std::uint32_t>(results.disc->degenerate_draws);
  } else {
    cell.disc_deg = static_cast<std::uint32_t>(sc.cfg.chain.total_iterations -
                                               sc.cfg.chain.burn_in);
  }
  if (results.model) cell.model_p = results.model->p_value;
  return cell;
}

std::string format_optional_p(const std::optional<double>& p) {
  return p ? format_double(*p) : "NA";
}

std::optional<double> parse_optional_p(const std::string& tok) {
  if (tok == "NA") return std::nullopt;
  return parse_double(tok);
}

std::string cell_line(const std::string& scenario_id, std::size_t rep, int group,
                      const CellValues& cell) {
  std::string line = "cell " + scenario_id + " " + std::to_string(rep) + " m" +
                     std::to_string(group + 1);
  line += " stat=" + format_optional_p(cell.stat_p) + ":" + std::to_string(cell.stat_deg);
  line += " disc=" + format_optional_p(cell.disc_p) + ":" + std::to_string(cell.disc_deg);
  line += " model=" + format_optional_p(cell.model_p);
  line += '\n';
  return line;
}

struct ParsedCellLine {
  std::string scenario_id;
  std::size_t rep = 0;
  int group = 0;
  CellValues values;
};

ParsedCellLine parse_cell_line(const std::string& line) {
  const auto fields = split(line, ' ');
  if (fields.size() != 7 || fields[0] != "cell")
    throw ValidationError("malformed checkpoint line: '" + line + "'");
  ParsedCellLine out;
  out.scenario_id = fields[1];
  out.rep = static_cast<std::size_t>(parse_int(fields[2]));
  if (fields[3].size() != 2 || fields[3][0] != 'm' || fields[3][1] < '1' || fields[3][1] > '4')
    throw ValidationError("malformed checkpoint group: '" + fields[3] + "'");
  out.group = fields[3][1] - '1';
  out.values.computed = true;

  auto parse_kv = [&](const std::string& field, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (field.rfind(prefix, 0) != 0)
      throw ValidationError("malformed checkpoint field: '" + field + "'");
    return field.substr(prefix.size());
  };
  const auto stat = parse_kv(fields[4], "stat");
  const auto disc = parse_kv(fields[5], "disc");
  const auto model = parse_kv(fields[6], "model");

  auto parse_p_deg = [](const std::string& tok, std::optional<double>* p, std::uint32_t* deg) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos)
      throw ValidationError("malformed checkpoint value: '" + tok + "'");
    *p = parse_optional_p(tok.substr(0, colon));
    *deg = static_cast<std::uint32_t>(parse_int(tok.substr(colon + 1)));
  };
  parse_p_deg(stat, &out.values.stat_p, &out.values.stat_deg);
  parse_p_deg(disc, &out.values.disc_p, &out.values.disc_deg);
  out.values.model_p = parse_optional_p(model);
  return out;
}

}  // namespace

std::uint64_t grid_checksum(const GridSpec& grid, std::uint64_t base_seed) {
  const GridSpec g = normalize_grid(grid);
  return fnv1a64(canonical_grid_string(g) + "|seed=" + std::to_string(base_seed));
}

ReplicationOutcome run_replication(const Scenario& scenario,
                                   const std::string& method_token,
                                   std::size_t rep_index, std::uint64_t base_seed) {
  if (!is_method_token(method_token))
    throw ValidationError("unknown method token: '" + method_token + "'");
  const int group = token_group(method_token);
  const CellValues cell = compute_cell(scenario, group, rep_index, base_seed);
  const auto kind = token_parts(method_token).second;

  ReplicationOutcome out;
  if (kind == "stat") {
    out.p_value = cell.stat_p;
    out.degenerate_draws = cell.stat_deg;
  } else if (kind == "disc") {
    out.p_value = cell.disc_p;
    out.degenerate_draws = cell.disc_deg;
  } else {
    out.p_value = cell.model_p;
  }
  out.reject = out.p_value && *out.p_value <= scenario.cfg.alpha_level;
  return out;
}

std::vector<RejectionSummary> run_grid(const GridSpec& grid_in, std::uint64_t base_seed,
                                       unsigned worker_count,
                                       const std::string& checkpoint_path) {
  const GridSpec grid = normalize_grid(grid_in);
  const std::size_t reps = grid.replications;

  std::vector<Scenario> scenarios;
  for (const auto& pred : grid.predictiveness)
    for (const double tau : grid.taus)
      for (const double eta : grid.eta_c0_values)
        scenarios.push_back(make_scenario(grid, pred, eta, tau));

  // Posture groups actually needed.
  std::array<bool, 4> group_needed{};
  for (const auto& m : grid.methods) group_needed[static_cast<std::size_t>(token_group(m))] = true;

  struct CellRef {
    std::size_t scenario;
    std::size_t rep;
    int group;
  };
  std::vector<CellRef> work;
  auto slot_index = [&](std::size_t s, std::size_t rep, int g) {
    return (s * reps + rep) * 4 + static_cast<std::size_t>(g);
  };
  std::vector<CellValues> slots(scenarios.size() * reps * 4);
  for (std::size_t s = 0; s < scenarios.size(); ++s)
    for (std::size_t r = 0; r < reps; ++r)
      for (int g = 0; g < 4; ++g)
        if (group_needed[static_cast<std::size_t>(g)]) work.push_back({s, r, g});

  // Checkpoint: load prior cells, then append new ones as they finish.
  const std::string checksum_line = "checksum " + hex16(grid_checksum(grid, base_seed));
  std::ofstream checkpoint_out;
  std::mutex checkpoint_mutex;
  if (!checkpoint_path.empty()) {
    std::map<std::string, std::size_t> scenario_index;
    for (std::size_t s = 0; s < scenarios.size(); ++s) scenario_index[scenarios[s].id] = s;

    if (std::filesystem::exists(checkpoint_path)) {
      const auto text = read_text_file(checkpoint_path);
      const auto lines = split(text, '\n');
      if (lines.size() < 2 || lines[0] != "frtpp-checkpoint v1")
        throw ValidationError("unrecognized checkpoint file: " + checkpoint_path);
      if (lines[1] != checksum_line)
        throw ValidationError("checkpoint was written for a different grid or seed");
      for (std::size_t li = 2; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto parsed = parse_cell_line(lines[li]);
        const auto it = scenario_index.find(parsed.scenario_id);
        if (it == scenario_index.end())
          throw ValidationError("checkpoint scenario not in grid: " + parsed.scenario_id);
        if (parsed.rep >= reps) throw ValidationError("checkpoint replication out of range");
        slots[slot_index(it->second, parsed.rep, parsed.group)] = parsed.values;
      }
      checkpoint_out.open(checkpoint_path, std::ios::app | std::ios::binary);
    } else {
      checkpoint_out.open(checkpoint_path, std::ios::binary);
      checkpoint_out << "frtpp-checkpoint v1\n" << checksum_line << "\n";
      checkpoint_out.flush();
    }
    if (!checkpoint_out) throw std::runtime_error("cannot write checkpoint: " + checkpoint_path);
  }

  unsigned workers = worker_count ? worker_count : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(work.size(), 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker_loop = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size() || failed.load()) return;
      const auto [s, rep, g] = work[i];
      auto& slot = slots[slot_index(s, rep, g)];
      if (slot.computed) continue;  // preloaded from the checkpoint
      try {
        slot = compute_cell(scenarios[s], g, rep, base_seed);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failure_message = e.what();
        failed.store(true);
        return;
      }
      if (checkpoint_out.is_open()) {
        std::lock_guard lock(checkpoint_mutex);
        checkpoint_out << cell_line(scenarios[s].id, rep, g, slot);
        checkpoint_out.flush();
      }
    }
  };

  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker_loop);
  worker_loop();
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("grid cell failed: " + failure_message);

  // Aggregate in canonical (scenario, method) order.
  std::vector<RejectionSummary> rows;
  rows.reserve(scenarios.size() * grid.methods.size());
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const auto& sc = scenarios[s];
    for (const auto& token : grid.methods) {
      const int g = token_group(token);
      const auto [method, kind] = token_parts(token);
      std::size_t with_value = 0, rejected = 0, completed = 0;
      double deg_sum = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& cell = slots[slot_index(s, r, g)];
        if (!cell.computed) continue;
        ++completed;
        std::optional<double> p;
        if (kind == "stat") {
          p = cell.stat_p;
          deg_sum += cell.stat_deg;
        } else if (kind == "disc") {
          p = cell.disc_p;
          deg_sum += cell.disc_deg;
        } else {
          p = cell.model_p;
        }
        if (p) {
          ++with_value;
          if (*p <= grid.alpha_level) ++rejected;
        }
      }
      RejectionSummary row;
      row.scenario_id = sc.id;
      row.predictiveness = sc.predictiveness;
      row.eta_c0 = sc.cfg.eta_c0;
      row.tau = sc.cfg.tau;
      row.misspecified = sc.misspecified;
      row.method = method;
      row.kind = kind;
      row.replications = with_value;
      const double r_hat = with_value
                               ? static_cast<double>(rejected) / static_cast<double>(with_value)
                               : 0.0;
      row.rejection_rate = r_hat;
      row.mc_standard_error =
          with_value ? std::sqrt(r_hat * (1.0 - r_hat) / static_cast<double>(with_value)) : 0.0;
      row.mean_degenerate_draws = completed ? deg_sum / static_cast<double>(completed) : 0.0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string write_results_csv(const std::vector<RejectionSummary>& rows) {
  std::string out{kResultsHeader};
  for (const auto& r : rows) {
    out += r.scenario_id;
    out += ',';
    out += r.predictiveness;
    out += ',';
    out += format_double(r.eta_c0);
    out += ',';
    out += format_double(r.tau);
    out += ',';
    out += r.misspecified ? '1' : '0';
    out += ',';
    out += r.method;
    out += ',';
    out += r.kind;
    out += ',';
    out += std::to_string(r.replications);
    out += ',';
    out += format_double(r.rejection_rate);
    out += ',';
    out += format_double(r.mc_standard_error);
    out += ',';
    out += format_double(r.mean_degenerate_draws);
    out += '\n';
  }
  return out;
}

std::vector<RejectionSummary> parse_results_csv(std::string_view text) {
  const auto lines = split(text, '\n');
  if (lines.empty() || lines[0] + "\n" != kResultsHeader)
    throw ValidationError("results CSV schema mismatch: expected header '" +
                          std::string(trim(kResultsHeader)) + "'");
  std::vector<RejectionSummary> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto f = split(lines[li], ',');
    if (f.size() != 11)
      throw ValidationError("results CSV line " + std::to_string(li + 1) +
                            ": expected 11 fields");
    RejectionSummary r;
    r.scenario_id = f[0];
    r.predictiveness = f[1];
    r.eta_c0 = parse_double(f[2]);
    r.tau = parse_double(f[3]);
    if (f[4] == "0")
      r.misspecified = false;
    else if (f[4] == "1")
      r.misspecified = true;
    else
      throw ValidationError("results CSV: misspecified must be 0 or 1");
    r.method = f[5];
    r.kind = f[6];
    r.replications = static_cast<std::size_t>(parse_int(f[7]));
    r.rejection_rate = parse_double(f[8]);
    r.mc_standard_error = parse_double(f[9]);
    r.mean_degenerate_draws = parse_double(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace frtpp
