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

// cmatch: command-line front end over the concave_match C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "concave_match/concave_match.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Failure : std::runtime_error {
  Failure(int code, const std::string& msg)
      : std::runtime_error(msg), code(code) {}
  int code;
};

[[noreturn]] void config_fail(const std::string& msg) {
  throw Failure(kExitConfig, msg);
}

void check(cm_status st) {
  if (st == CM_OK) return;
  const int code = st == CM_ERR_CONFIG ? kExitConfig : kExitRuntime;
  throw Failure(code, std::string(cm_status_name(st)) + ": " + cm_last_error());
}

struct CString {
  char* p = nullptr;
  ~CString() { cm_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Instance = Handle<cm_instance, cm_instance_free>;
using Utility = Handle<cm_utility, cm_utility_free>;
using Experiment = Handle<cm_experiment, cm_experiment_free>;
using Summary = Handle<cm_summary, cm_summary_free>;
using Sweep = Handle<cm_sweep, cm_sweep_free>;

// Collects outputs and writes them together; anything written before a
// failure is removed again.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string payload) {
    files_.emplace_back(name, std::move(payload));
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void commit() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Failure(kExitRuntime, "cannot create " + dir_.string());
    try {
      for (const auto& [name, payload] : files_) {
        const fs::path target = dir_ / name;
        std::ofstream os(target, std::ios::binary | std::ios::trunc);
        if (!os) throw Failure(kExitRuntime, "cannot write " + target.string());
        written_.push_back(target);
        os.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        os.close();
        if (!os) throw Failure(kExitRuntime, "failed writing " + target.string());
      }
    } catch (...) {
      rollback();
      throw;
    }
  }

  // Records a file produced outside commit() so a later failure removes it.
  void track(const fs::path& p) { written_.push_back(p); }

  void rollback() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<fs::path> written_;
};

struct Options {
  std::string config_path;
  std::string algo;
  std::optional<double> epsilon;
  std::optional<long long> n;
  std::optional<long long> m;
  std::optional<double> power;
  std::string generator;
  std::optional<long long> runs;
  std::optional<unsigned long long> seed;
  std::string sweep;
  std::optional<double> perturb;
  bool warmup = false;
  std::string param_scope;
  bool emit_decisions = false;
  std::string out = "cmatch_out";
  std::string instance_path;
  // gen
  long long replication = 0;
  bool binary = false;
  // oracle
  double grid_step = 0.01;
  // report
  bool diagnostics = false;
};

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) config_fail("cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    config_fail("bad number '" + s + "' in " + what);
  }
}

// Config document: the --config file (or the base-problem defaults),
// then every flag given on the command line on top.
json build_config(const Options& o) {
  json doc;
  if (!o.config_path.empty()) {
    try {
      doc = json::parse(read_file(o.config_path));
    } catch (const json::exception& e) {
      config_fail(std::string("invalid JSON in config: ") + e.what());
    }
    if (!doc.is_object()) config_fail("config must be a JSON object");
  } else {
    doc = {{"generator", {{"kind", "category"}, {"m", 50}, {"n", 10000}}},
           {"spec", {{"power", 0.9}}},
           {"policies", json::array({{{"id", "dla"}, {"epsilon", 0.001}}})},
           {"runs", 1},
           {"base_seed", 0}};
  }
  if (!doc.contains("generator") || !doc["generator"].is_object()) {
    doc["generator"] = json::object();
  }
  json& gen = doc["generator"];
  if (!o.generator.empty()) gen["kind"] = o.generator;
  if (o.m) gen["m"] = *o.m;
  if (o.n) gen["n"] = *o.n;
  if (!o.param_scope.empty()) gen["param_scope"] = o.param_scope;
  if (o.power) doc["spec"] = {{"power", *o.power}};
  if (o.runs) doc["runs"] = *o.runs;
  if (o.seed) doc["base_seed"] = *o.seed;
  if (!o.algo.empty()) {
    json list = json::array();
    for (const auto& id : split(o.algo, ',')) list.push_back({{"id", id}});
    doc["policies"] = list;
  }
  if (doc.contains("policies") && doc["policies"].is_array()) {
    for (auto& p : doc["policies"]) {
      if (!p.is_object()) continue;
      if (o.epsilon) p["epsilon"] = *o.epsilon;
      if (o.perturb) p["perturb"] = *o.perturb;
      if (o.warmup) p["warmup"] = true;
    }
  }
  return doc;
}

void parse_experiment(const Options& o, Experiment& exp) {
  check(cm_experiment_parse(build_config(o).dump().c_str(), &exp.p));
}

std::string rendered(const Experiment& exp) {
  CString s;
  check(cm_experiment_render(exp.p, &s.p));
  return s.str();
}

void load_fixed(const Options& o, Instance& inst) {
  if (o.instance_path.empty()) return;
  check(cm_instance_load(o.instance_path.c_str(), &inst.p));
}

// The utility spec of the experiment, sized for `m` bidders.
void utility_for(const Experiment& exp, std::size_t m, Utility& u) {
  const json doc = json::parse(rendered(exp));
  check(cm_utility_from_json(doc["spec"].dump().c_str(), m, &u.p));
}

double first_epsilon(const Experiment& exp) {
  const json doc = json::parse(rendered(exp));
  for (const auto& p : doc["policies"]) {
    const std::string id = p["id"];
    if (id == "ola" || id == "dla") return p["epsilon"].get<double>();
  }
  return doc["policies"][0]["epsilon"].get<double>();
}

int cmd_run(const Options& o) {
  Experiment exp;
  parse_experiment(o, exp);
  Instance fixed;
  load_fixed(o, fixed);
  Summary summary;
  check(cm_experiment_run(exp.p, fixed.p, 0, o.emit_decisions ? 1 : 0,
                          &summary.p));
  CString csv, jsonl;
  check(cm_summary_csv(summary.p, &csv.p));
  check(cm_summary_records_jsonl(summary.p, o.emit_decisions ? 1 : 0,
                                 &jsonl.p));
  OutputSet out(o.out);
  out.add("config.json", rendered(exp));
  out.add("summary.csv", csv.str());
  out.add("runs.jsonl", jsonl.str());
  out.commit();
  std::cout << csv.str();
  return kExitOk;
}

int cmd_sweep(const Options& o) {
  if (o.sweep.empty()) config_fail("sweep needs --sweep axis=v1,v2,...");
  const auto eq = o.sweep.find('=');
  if (eq == std::string::npos) config_fail("--sweep expects axis=v1,v2,...");
  const std::string axis = o.sweep.substr(0, eq);
  std::vector<double> values;
  for (const auto& v : split(o.sweep.substr(eq + 1), ',')) {
    values.push_back(parse_double(v, "--sweep"));
  }
  if (values.empty()) config_fail("--sweep lists no values");
  Experiment exp;
  parse_experiment(o, exp);
  Instance fixed;
  load_fixed(o, fixed);
  Sweep sweep;
  check(cm_experiment_sweep(exp.p, axis.c_str(), values.data(), values.size(),
                            fixed.p, 0, &sweep.p));
  CString csv, plot;
  check(cm_sweep_csv(sweep.p, &csv.p));
  check(cm_sweep_plot_csv(sweep.p, &plot.p));
  OutputSet out(o.out);
  out.add("config.json", rendered(exp));
  out.add("sweep.csv", csv.str());
  out.add("plot.csv", plot.str());
  out.commit();
  std::cout << csv.str();
  return kExitOk;
}

int cmd_gen(const Options& o) {
  if (o.replication < 0) config_fail("--replication must be >= 0");
  Experiment exp;
  parse_experiment(o, exp);
  Instance inst;
  check(cm_instance_generate(exp.p, static_cast<size_t>(o.replication),
                             &inst.p));
  OutputSet out(o.out);
  const std::string name = o.binary ? "instance.cmb" : "instance.csv";
  out.add("config.json", rendered(exp));
  out.commit();
  const fs::path target = out.path(name);
  out.track(target);
  const cm_status st = cm_instance_save(inst.p, target.string().c_str());
  if (st != CM_OK) {
    out.rollback();
    check(st);
  }
  std::cout << target.string() << "\n";
  return kExitOk;
}

int cmd_oracle(const Options& o) {
  Experiment exp;
  parse_experiment(o, exp);
  Instance inst;
  if (!o.instance_path.empty()) {
    load_fixed(o, inst);
  } else {
    check(cm_instance_generate(exp.p, 0, &inst.p));
  }
  Utility u;
  utility_for(exp, cm_instance_bidders(inst.p), u);
  double oracle = 0.0, solver = 0.0;
  check(cm_oracle(inst.p, u.p, o.grid_step, &oracle));
  const cm_solver_options opts = cm_solver_options_default();
  check(cm_offline(inst.p, u.p, &opts, &solver));
  json result = {{"m", cm_instance_bidders(inst.p)},
                 {"n", cm_instance_arrivals(inst.p)},
                 {"grid_step", o.grid_step},
                 {"oracle", oracle},
                 {"solver", solver},
                 {"difference", solver - oracle}};
  OutputSet out(o.out);
  out.add("oracle.json", result.dump(2) + "\n");
  out.commit();
  std::cout << result.dump(2) << "\n";
  return kExitOk;
}

int cmd_report(const Options& o) {
  Experiment exp;
  parse_experiment(o, exp);
  Instance inst;
  if (!o.instance_path.empty()) {
    load_fixed(o, inst);
  } else {
    check(cm_instance_generate(exp.p, 0, &inst.p));
  }
  Utility u;
  utility_for(exp, cm_instance_bidders(inst.p), u);
  const double eps = o.epsilon ? *o.epsilon : first_epsilon(exp);
  const json doc = json::parse(rendered(exp));
  const std::uint64_t seed = doc["base_seed"].get<std::uint64_t>();
  const cm_solver_options opts = cm_solver_options_default();
  const char* algo = nullptr;
  if (o.algo == "ola" || o.algo == "dla") {
    algo = o.algo.c_str();
  } else if (!o.algo.empty()) {
    config_fail("report runs only --algo ola or --algo dla");
  }
  CString report;
  check(cm_condition_report(inst.p, u.p, eps, algo, seed, &opts, &report.p));
  OutputSet out(o.out);
  const std::string pretty = json::parse(report.str()).dump(2) + "\n";
  out.add("report.json", pretty);
  if (o.diagnostics) {
    CString csv;
    double seg = 0.0, full = 0.0;
    check(cm_concentration_diagnostics(inst.p, u.p, eps, seed, &opts, &csv.p,
                                       &seg, &full));
    out.add("concentration.csv", csv.str());
    std::cerr << "envelope violations: segment " << seg << ", full horizon "
              << full << "\n";
  }
  out.commit();
  std::cout << pretty;
  return kExitOk;
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path, "JSON experiment config");
  cmd->add_option("--algo", o.algo,
                  "Policies, comma separated: ola, dla, myopic, offline");
  cmd->add_option("--epsilon", o.epsilon, "Learning fraction in (0, 0.5)");
  cmd->add_option("--n", o.n, "Number of arrivals");
  cmd->add_option("--m", o.m, "Number of bidders");
  cmd->add_option("--power", o.power, "Shared utility M(x) = x^p");
  cmd->add_option("--generator", o.generator,
                  "category, truncated_normal, beta or mixed");
  cmd->add_option("--runs", o.runs, "Replications");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--perturb", o.perturb, "General-position perturbation size");
  cmd->add_flag("--warmup", o.warmup, "Allocate the learning prefix myopically");
  cmd->add_option("--param-scope", o.param_scope, "bidder or entry");
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--instance", o.instance_path,
                  "Run on this instance file instead of generating");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online matching with concave returns"};
  app.require_subcommand(1, 1);
  Options o;

  auto* run = app.add_subcommand("run", "Monte-Carlo evaluation of policies");
  add_common(run, o);
  run->add_flag("--emit-decisions", o.emit_decisions,
                "Include per-arrival decisions in runs.jsonl");

  auto* sweep = app.add_subcommand("sweep", "Evaluate over a parameter grid");
  add_common(sweep, o);
  sweep->add_option("--sweep", o.sweep, "axis=v1,v2,... with axis epsilon, n or power")
      ->required();

  auto* gen = app.add_subcommand("gen", "Write a generated instance");
  add_common(gen, o);
  gen->add_option("--replication", o.replication, "Replication index");
  gen->add_flag("--binary", o.binary, "Binary format instead of CSV");

  auto* oracle = app.add_subcommand("oracle", "Brute-force check on a small instance");
  add_common(oracle, o);
  oracle->add_option("--grid", o.grid_step, "Refinement grid step")
      ->capture_default_str();

  auto* report = app.add_subcommand("report", "Sufficient-condition report");
  add_common(report, o);
  report->add_flag("--diagnostics", o.diagnostics,
                   "Also write the concentration envelope table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (gen->parsed()) return cmd_gen(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (report->parsed()) return cmd_report(o);
  } catch (const Failure& f) {
    std::cerr << "cmatch: " << f.what() << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "cmatch: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
