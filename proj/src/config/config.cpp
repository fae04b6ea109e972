// Copyright 2026 The concave-match Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "config/config.hpp"

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <map>

#include "core/error.hpp"
#include "json.hpp"

namespace cmatch {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) {
  fail(ErrorKind::kConfiguration, msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) config_error(where + " must be a JSON object");
  std::string unknown;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (ok) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += it.key();
  }
  if (!unknown.empty()) {
    config_error("unknown key(s) in " + where + ": " + unknown);
  }
}

double get_number(const json& v, const std::string& name) {
  if (!v.is_number()) config_error(name + " must be a number");
  return v.get<double>();
}

std::uint64_t get_count(const json& v, const std::string& name) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  }
  config_error(name + " must be a non-negative integer");
}

bool get_bool(const json& v, const std::string& name) {
  if (!v.is_boolean()) config_error(name + " must be true or false");
  return v.get<bool>();
}

std::string get_string(const json& v, const std::string& name) {
  if (!v.is_string()) config_error(name + " must be a string");
  return v.get<std::string>();
}

Interval get_interval(const json& v, const std::string& name) {
  if (!v.is_array() || v.size() != 2) {
    config_error(name + " must be a two-element array [lo, hi]");
  }
  return {get_number(v[0], name + "[0]"), get_number(v[1], name + "[1]")};
}

UtilityFn parse_utility(const json& v, const std::string& where) {
  check_keys(v, where, {"power", "log", "scaled_power"});
  if (v.size() != 1) {
    config_error(where + " must name exactly one of power, log, scaled_power");
  }
  if (v.contains("power")) return Power{get_number(v["power"], where + ".power")};
  if (v.contains("log")) {
    if (!get_bool(v["log"], where + ".log")) {
      config_error(where + ".log must be true when present");
    }
    return Log{};
  }
  const json& sp = v["scaled_power"];
  check_keys(sp, where + ".scaled_power", {"a", "p"});
  if (!sp.contains("a") || !sp.contains("p")) {
    config_error(where + ".scaled_power needs both a and p");
  }
  return ScaledPower{get_number(sp["a"], where + ".scaled_power.a"),
                     get_number(sp["p"], where + ".scaled_power.p")};
}

json utility_json(const UtilityFn& fn) {
  json out = json::object();
  if (const auto* p = std::get_if<Power>(&fn)) {
    out["power"] = p->p;
  } else if (std::holds_alternative<Log>(fn)) {
    out["log"] = true;
  } else {
    const auto& s = std::get<ScaledPower>(fn);
    out["scaled_power"] = {{"a", s.a}, {"p", s.p}};
  }
  return out;
}

GeneratorConfig parse_generator_cfg(const json& v) {
  check_keys(v, "generator",
             {"kind", "m", "n", "k", "zero_prob", "base_range", "jitter",
              "jitter_scope", "param_scope"});
  if (!v.contains("kind")) config_error("missing generator.kind");
  GeneratorConfig g;
  g.kind = parse_generator(get_string(v["kind"], "generator.kind"));
  if (v.contains("m")) g.m = get_count(v["m"], "generator.m");
  if (v.contains("n")) g.n = get_count(v["n"], "generator.n");
  if (v.contains("k")) g.categories = get_count(v["k"], "generator.k");
  if (v.contains("zero_prob")) {
    g.zero_prob = get_number(v["zero_prob"], "generator.zero_prob");
  }
  if (v.contains("base_range")) {
    g.base_range = get_interval(v["base_range"], "generator.base_range");
  }
  if (v.contains("jitter")) g.jitter = get_interval(v["jitter"], "generator.jitter");
  if (v.contains("jitter_scope")) {
    g.jitter_scope = parse_jitter_scope(
        get_string(v["jitter_scope"], "generator.jitter_scope"));
  }
  if (v.contains("param_scope")) {
    g.param_scope = parse_param_scope(
        get_string(v["param_scope"], "generator.param_scope"));
  }
  return g;
}

UtilityDescriptor parse_spec(const json& v) {
  check_keys(v, "spec", {"power", "log", "scaled_power", "per_bidder"});
  UtilityDescriptor d;
  if (v.contains("per_bidder")) {
    if (v.size() != 1) {
      config_error("spec.per_bidder cannot be combined with a shared family");
    }
    const json& list = v["per_bidder"];
    if (!list.is_array() || list.empty()) {
      config_error("spec.per_bidder must be a non-empty array");
    }
    d.shared.reset();
    for (std::size_t i = 0; i < list.size(); ++i) {
      d.per_bidder.push_back(
          parse_utility(list[i], "spec.per_bidder[" + std::to_string(i) + "]"));
    }
    return d;
  }
  d.shared = parse_utility(v, "spec");
  return d;
}

PolicyEntry parse_policy_entry(const json& v, std::size_t index) {
  const std::string where = "policies[" + std::to_string(index) + "]";
  check_keys(v, where, {"id", "epsilon", "warmup", "perturb"});
  if (!v.contains("id")) config_error("missing " + where + ".id");
  PolicyEntry e;
  e.id = parse_policy(get_string(v["id"], where + ".id"));
  if (v.contains("epsilon")) {
    e.cfg.epsilon = get_number(v["epsilon"], where + ".epsilon");
  }
  if (v.contains("warmup")) {
    e.cfg.warmup_allocation = get_bool(v["warmup"], where + ".warmup");
  }
  if (v.contains("perturb") && !v["perturb"].is_null()) {
    e.cfg.perturb = get_number(v["perturb"], where + ".perturb");
  }
  return e;
}

SolverConfig parse_solver(const json& v) {
  check_keys(v, "solver", {"rel_tol", "max_iters", "init"});
  SolverConfig s;
  if (v.contains("rel_tol")) s.rel_tol = get_number(v["rel_tol"], "solver.rel_tol");
  if (v.contains("max_iters")) {
    const auto it = get_count(v["max_iters"], "solver.max_iters");
    if (it > 1000000000ULL) config_error("solver.max_iters is too large");
    s.max_iters = static_cast<int>(it);
  }
  if (v.contains("init")) {
    s.init = parse_init_rule(get_string(v["init"], "solver.init"));
  }
  return s;
}

ExperimentConfig from_json(const json& doc) {
  check_keys(doc, "config",
             {"generator", "spec", "policies", "runs", "resample",
              "base_seed", "solver"});
  if (!doc.contains("generator")) config_error("missing generator.kind");
  ExperimentConfig cfg;
  cfg.generator = parse_generator_cfg(doc["generator"]);
  if (doc.contains("spec")) cfg.spec = parse_spec(doc["spec"]);
  if (doc.contains("policies")) {
    const json& list = doc["policies"];
    if (!list.is_array()) config_error("policies must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      cfg.policies.push_back(parse_policy_entry(list[i], i));
    }
  } else {
    cfg.policies.push_back(PolicyEntry{});
  }
  if (doc.contains("runs")) {
    const auto runs = get_count(doc["runs"], "runs");
    if (runs > 100000000ULL) config_error("runs is too large");
    cfg.runs = static_cast<int>(runs);
  }
  if (doc.contains("resample")) {
    cfg.resample = parse_resample(get_string(doc["resample"], "resample"));
  }
  if (doc.contains("base_seed")) {
    cfg.base_seed = get_count(doc["base_seed"], "base_seed");
  }
  if (doc.contains("solver")) cfg.solver = parse_solver(doc["solver"]);
  cfg.generator.seed = cfg.base_seed;
  return cfg;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string csv_field(const CsvValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  const auto& s = std::get<std::string>(v);
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string_view init_rule_name(InitRule rule) {
  return rule == InitRule::kUniform ? "uniform" : "myopic";
}

InitRule parse_init_rule(std::string_view name) {
  if (name == "uniform") return InitRule::kUniform;
  if (name == "myopic") return InitRule::kMyopic;
  config_error("unknown solver init '" + std::string(name) +
               "' (expected uniform or myopic)");
}

UtilityDescriptor parse_spec_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  return parse_spec(doc);
}

ExperimentConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  try {
    ExperimentConfig cfg = from_json(doc);
    cfg.validate();
    return cfg;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfiguration) throw;
    config_error(e.what());
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

std::string render_config(const ExperimentConfig& cfg) {
  json doc;
  const GeneratorConfig& g = cfg.generator;
  doc["generator"] = {
      {"kind", generator_name(g.kind)},
      {"m", g.m},
      {"n", g.n},
      {"k", g.categories},
      {"zero_prob", g.zero_prob},
      {"base_range", {g.base_range.lo, g.base_range.hi}},
      {"jitter", {g.jitter.lo, g.jitter.hi}},
      {"jitter_scope", jitter_scope_name(g.jitter_scope)},
      {"param_scope", param_scope_name(g.param_scope)},
  };
  if (cfg.spec.shared) {
    doc["spec"] = utility_json(*cfg.spec.shared);
  } else {
    json list = json::array();
    for (const auto& f : cfg.spec.per_bidder) list.push_back(utility_json(f));
    doc["spec"] = {{"per_bidder", list}};
  }
  json policies = json::array();
  for (const auto& p : cfg.policies) {
    json e = {{"id", policy_name(p.id)},
              {"epsilon", p.cfg.epsilon},
              {"warmup", p.cfg.warmup_allocation}};
    if (p.cfg.perturb) e["perturb"] = *p.cfg.perturb;
    policies.push_back(e);
  }
  doc["policies"] = policies;
  doc["runs"] = cfg.runs;
  doc["resample"] = resample_name(cfg.resample);
  doc["base_seed"] = cfg.base_seed;
  doc["solver"] = {{"rel_tol", cfg.solver.rel_tol},
                   {"max_iters", cfg.solver.max_iters},
                   {"init", init_rule_name(cfg.solver.init)}};
  return doc.dump(2) + "\n";
}

std::string emit_csv(const std::vector<std::string>& header,
                     const std::vector<std::vector<CsvValue>>& rows) {
  std::string out;
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out += ',';
    out += csv_field(header[k]);
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += csv_field(row[k]);
    }
    out += '\n';
  }
  return out;
}

std::string policy_label(const ExperimentConfig& cfg, std::size_t index) {
  const PolicyEntry& e = cfg.policies.at(index);
  std::string label(policy_name(e.id));
  std::size_t same = 0;
  for (const auto& p : cfg.policies) same += p.id == e.id ? 1 : 0;
  if (same > 1) label += "@" + format_double(e.cfg.epsilon);
  return label;
}

std::vector<std::string> summary_header() {
  return {"policy", "epsilon",      "n",          "m",
          "p",      "runs",         "mean_rl",    "std_rl",
          "mean_revenue", "mean_opt"};
}

std::vector<std::vector<CsvValue>> summary_rows(const ExperimentConfig& cfg,
                                                const SummaryStats& stats) {
  std::vector<std::vector<CsvValue>> rows;
  const auto p = cfg.spec.power();
  for (std::size_t k = 0; k < stats.policies.size(); ++k) {
    const PolicyStats& s = stats.policies[k];
    const bool learns = s.policy == PolicyId::kOla || s.policy == PolicyId::kDla;
    rows.push_back({
        policy_label(cfg, k),
        learns ? CsvValue{s.cfg.epsilon} : CsvValue{std::string()},
        static_cast<std::int64_t>(cfg.generator.n),
        static_cast<std::int64_t>(cfg.generator.m),
        p ? CsvValue{*p} : CsvValue{std::string()},
        static_cast<std::int64_t>(s.runs),
        s.mean_rl,
        s.std_rl,
        s.mean_revenue,
        s.mean_opt,
    });
  }
  return rows;
}

std::string summary_csv(const ExperimentConfig& cfg,
                        const SummaryStats& stats) {
  return emit_csv(summary_header(), summary_rows(cfg, stats));
}

std::string sweep_csv(const std::vector<SweepCell>& cells) {
  std::vector<std::vector<CsvValue>> rows;
  for (const auto& cell : cells) {
    auto part = summary_rows(cell.config, cell.summary);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return emit_csv(summary_header(), rows);
}

std::string plot_csv(const std::vector<SweepCell>& cells) {
  std::vector<std::vector<CsvValue>> rows;
  for (const auto& cell : cells) {
    for (std::size_t k = 0; k < cell.summary.policies.size(); ++k) {
      const PolicyStats& s = cell.summary.policies[k];
      rows.push_back({cell.value, policy_label(cell.config, k), s.mean_rl,
                      s.std_rl});
    }
  }
  return emit_csv({"x", "series", "mean", "std"}, rows);
}

std::string run_record_json(const RunRecord& r, bool with_decisions) {
  json out;
  out["policy"] = policy_name(r.policy);
  out["replication"] = r.replication;
  out["seed"] = r.seed;
  out["epsilon"] = r.epsilon;
  out["revenue"] = r.revenue;
  if (r.perturbed_revenue) out["perturbed_revenue"] = *r.perturbed_revenue;
  out["opt"] = r.opt;
  out["rl"] = r.rl;
  out["warmup_used"] = r.warmup_used;
  json resolves = json::array();
  for (const auto& s : r.resolves) {
    resolves.push_back({{"l", s.prefix_len},
                        {"u_hat", s.u_hat},
                        {"gap_certificate", s.gap_certificate},
                        {"hit_iteration_cap", s.hit_iteration_cap}});
  }
  out["resolves"] = resolves;
  if (with_decisions) out["decisions"] = r.decisions;
  return out.dump();
}

std::string run_result_json(const RunResult& run) {
  json out;
  out["policy"] = policy_name(run.policy);
  out["seed"] = run.seed;
  out["epsilon"] = run.epsilon;
  out["revenue"] = run.revenue;
  if (run.perturbed_revenue) out["perturbed_revenue"] = *run.perturbed_revenue;
  out["warmup_used"] = run.warmup_used;
  out["u_final"] = run.u_final;
  out["decisions"] = run.decisions;
  json resolves = json::array();
  for (const auto& s : run.resolves) {
    resolves.push_back({{"l", s.prefix_len},
                        {"u_hat", s.u_hat},
                        {"objective", s.objective},
                        {"gap_certificate", s.gap_certificate},
                        {"iterations", s.iterations},
                        {"hit_iteration_cap", s.hit_iteration_cap}});
  }
  out["resolves"] = resolves;
  json segments = json::array();
  for (const auto& s : run.segments) {
    segments.push_back({{"begin", s.begin},
                        {"end", s.end},
                        {"resolve", s.resolve},
                        {"u", s.u}});
  }
  out["segments"] = segments;
  return out.dump();
}

std::string run_records_jsonl(const SummaryStats& stats, bool with_decisions) {
  std::string out;
  for (const auto& r : stats.records) {
    out += run_record_json(r, with_decisions);
    out += '\n';
  }
  return out;
}

}  // namespace cmatch
