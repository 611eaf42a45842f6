// Copyright 2026 The gfmx Authors.
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

// gfmx: generate | pretrain | attack | report.
//
// Exit codes: 0 ok, 1 internal, 2 config, 3 missing data, 4 budget,
// 5 empty aggregate.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gfmx/attacks.hpp"
#include "gfmx/experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gfmx;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitBudget = 4;
constexpr int kExitEmpty = 5;

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  bool verbose = false;
};

struct DefenseFlags {
  std::optional<double> noise_std;
  std::optional<std::size_t> truncate_dim;
  std::optional<unsigned> quantize_bits;
  std::optional<std::size_t> rate_limit;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingData, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << bytes;
}

// Parse errors keep nlohmann's "at line L, column C" anchor.
json load_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, path.string() + ": " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kTooSmall: return kExitConfig;
    case ErrorKind::kMissingData:
    case ErrorKind::kIo: return kExitMissing;
    case ErrorKind::kBudget:
    case ErrorKind::kThrottle: return kExitBudget;
    default: return kExitInternal;
  }
}

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------- generate

int cmd_generate(const GlobalFlags& g) {
  CorpusConfig cfg = g.config.empty() ? default_corpus_config() : corpus_config_from_json(load_json(g.config));
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  if (g.out.empty()) throw Error(ErrorKind::kConfig, "--out: output directory required");
  const Corpus corpus = generate_corpus(cfg);
  write_corpus(corpus, g.out);
  write_file(fs::path(g.out) / "corpus_config.json", dump(corpus_config_to_json(cfg)));

  std::printf("%-22s %-9s %-10s %6s %6s %7s %9s\n", "graph", "role", "domain", "nodes", "edges", "classes", "homophily");
  for (const auto& gr : corpus.graphs)
    std::printf("%-22s %-9s %-10s %6zu %6zu %7zu %9s\n", gr.graph_id.c_str(), to_string(gr.role), gr.domain.c_str(),
                gr.node_count, gr.edges.size(), gr.label_sentences.size(), fixed(edge_homophily(gr)).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- pretrain

int cmd_pretrain(const GlobalFlags& g, const std::string& corpus_dir) {
  VictimSetup setup = g.config.empty() ? desk_victim_setup() : VictimSetup::from_json(load_json(g.config));
  if (g.seed) {
    setup.encoder.init_seed = *g.seed;
    setup.train.seed = *g.seed;
  }
  if (g.out.empty()) throw Error(ErrorKind::kConfig, "--out: checkpoint path required");
  const FrozenTextEncoder text(setup.text);
  Corpus corpus = read_corpus(corpus_dir);
  attach_corpus_features(corpus, text);

  TrainLog log;
  const Encoder victim = pretrain_victim(corpus, text, setup.encoder, setup.train, setup.sampler, &log);
  const fs::path out(g.out);
  json extra = setup.to_json();
  extra["role"] = "victim";
  extra["train_log"] = log.to_csv(false);
  save_checkpoint(out, victim, extra);
  write_file(out.string() + ".log.csv", log.to_csv(true));
  write_file(out.string() + ".timing.json",
             dump({{"victim_train_seconds", log.total_seconds}, {"epochs", log.epochs.size()}}));
  std::printf("victim %s params=%zu hash=%s epochs=%zu final_loss=%s seconds=%s\n", to_string(setup.encoder.family),
              count_parameters(victim), victim.parameter_hash_hex().c_str(), log.epochs.size(),
              fixed(log.epochs.empty() ? 0.0 : log.epochs.back().mean_loss, 6).c_str(), fixed(log.total_seconds, 2).c_str());
  return kExitOk;
}

// ---------------------------------------------------------------- attack

std::uint64_t corpus_fingerprint(const Corpus& corpus) {
  std::uint64_t h = fnv1a64("corpus");
  for (const auto& gr : corpus.graphs) h = mix64(h ^ fnv1a64(graph_to_json(gr)));
  return h;
}

int cmd_attack(const GlobalFlags& g, const DefenseFlags& d, const std::string& victim_path,
               const std::string& corpus_dir) {
  json doc = g.config.empty() ? desk_scenario(ScenarioKind::kFullModel).to_json() : load_json(g.config);
  if (!doc.is_object()) throw Error(ErrorKind::kConfig, "scenario config must be a JSON object");
  DefenseConfig defense = doc.contains("defense") ? DefenseConfig::from_json(doc["defense"]) : DefenseConfig{};
  std::optional<std::size_t> victim_budget;
  if (doc.contains("victim_budget") && !doc["victim_budget"].is_null())
    victim_budget = doc["victim_budget"].get<std::size_t>();
  doc.erase("defense");
  doc.erase("victim_budget");
  ScenarioConfig scenario = ScenarioConfig::from_json(doc);
  if (g.seed) scenario.seed = *g.seed;
  if (d.noise_std) defense.noise_std = *d.noise_std;
  if (d.truncate_dim) defense.truncate_dim = *d.truncate_dim;
  if (d.quantize_bits) defense.quantize_bits = *d.quantize_bits;
  if (d.rate_limit) defense.rate_limit = *d.rate_limit;
  if (g.out.empty()) throw Error(ErrorKind::kConfig, "--out: output directory required");

  LoadedCheckpoint victim = load_checkpoint(victim_path);
  if (!victim.extra.contains("text_encoder") || !victim.extra.contains("sampler"))
    throw Error(ErrorKind::kMissingData, victim_path + ": checkpoint lacks text encoder / sampler metadata");
  defense.validate(victim.encoder.config().output_dim);
  const FrozenTextEncoder text(text_encoder_spec_from_json(victim.extra["text_encoder"]));
  const SamplerConfig sampler = sampler_config_from_json(victim.extra["sampler"]);
  const std::string victim_hash = victim.encoder.parameter_hash_hex();

  Corpus corpus = read_corpus(corpus_dir);
  attach_corpus_features(corpus, text);

  // The evaluator keeps its own copy of the victim for ground-truth labels.
  const Encoder oracle = victim.encoder;
  const EmbedFn victim_oracle = [&oracle](const Subgraph& s) { return oracle.encode(s); };
  VictimHandle handle(std::move(victim.encoder), victim_budget, defense);
  const fs::path out(g.out);
  ScenarioResult result = [&] {
    try {
      return run_scenario(scenario, corpus, handle, text, sampler, victim_oracle);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kBudget || e.kind() == ErrorKind::kThrottle) {
        std::fprintf(stderr, "query budget exhausted: %zu queries spent\n", handle.spent());
        std::string t;
        for (const auto& line : handle.transcript()) t += line + "\n";
        write_file(out / "transcript.jsonl", t);
      }
      throw;
    }
  }();

  double victim_seconds = 0.0;
  if (fs::exists(victim_path + ".timing.json"))
    victim_seconds = load_json(victim_path + ".timing.json").value("victim_train_seconds", 0.0);
  result.report.victim_train_seconds = victim_seconds;

  const json scenario_json = scenario.to_json();
  const std::string run_id = hex64(mix64(fnv1a64(scenario_json.dump()) ^ mix64(fnv1a64(defense.to_json().dump())) ^
                                         mix64(fnv1a64(victim_hash) + corpus_fingerprint(corpus))));

  write_file(out / "report.csv", result.report.to_csv());
  write_file(out / "report.json", dump(result.report.to_json(g.verbose)));
  save_checkpoint(out / "attacker.ckpt", result.attacker,
                  {{"role", "attacker"}, {"run_id", run_id}, {"train_log", result.log.to_csv(false)}});
  std::string transcript;
  for (const auto& line : handle.transcript()) transcript += line + "\n";
  write_file(out / "transcript.jsonl", transcript);
  json run = {{"run_id", run_id},
              {"scenario", scenario_json},
              {"defense", defense.to_json()},
              {"victim_budget", victim_budget ? json(*victim_budget) : json(nullptr)},
              {"victim_hash", victim_hash},
              {"attacker_hash", result.attacker.parameter_hash_hex()},
              {"query_count", result.report.query_count},
              {"queries_spent", handle.spent()}};
  write_file(out / "run.json", dump(run));
  const double ratio = victim_seconds > 0.0 ? result.log.total_seconds / victim_seconds : 0.0;
  write_file(out / "timing.json", dump({{"attacker_train_seconds", result.log.total_seconds},
                                        {"victim_train_seconds", victim_seconds},
                                        {"attacker_over_victim", ratio}}));

  std::printf("%-22s %8s %8s %8s %6s %10s\n", "graph", "att_acc", "vic_acc", "fidelity", "n", "bound_ok");
  for (const auto& r : result.report.graphs)
    std::printf("%-22s %8s %8s %8s %6zu %10s\n", r.graph_id.c_str(), fixed(r.attacker_acc).c_str(),
                fixed(r.victim_acc).c_str(), fixed(r.fidelity).c_str(), r.n_test,
                fixed(r.bound.fraction_bound_holds).c_str());
  std::printf("run %s: %s queries=%zu mean_fidelity=%s bound_violations=%zu\n", run_id.c_str(), scenario.name.c_str(),
              result.report.query_count, fixed(result.report.mean_fidelity()).c_str(),
              result.report.bound_violations());
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct RunRow {
  std::string run_id, scenario, kind;
  std::optional<std::size_t> budget;
  std::uint64_t seed = 0;
  double noise_std = 0.0;
  std::size_t queries = 0;
  double attacker_acc = 0.0, victim_acc = 0.0, fidelity = 0.0;
};

int cmd_report(const GlobalFlags& g, const std::vector<std::string>& run_dirs) {
  std::vector<RunRow> rows;
  std::set<std::string> seen;
  for (const auto& dir : run_dirs) {
    const fs::path run_path = fs::path(dir) / "run.json";
    const fs::path report_path = fs::path(dir) / "report.json";
    if (!fs::exists(run_path) || !fs::exists(report_path)) {
      std::fprintf(stderr, "skipping %s: no run.json/report.json\n", dir.c_str());
      continue;
    }
    const json run = load_json(run_path);
    const json rep = load_json(report_path);
    RunRow r;
    r.run_id = run.at("run_id").get<std::string>();
    if (!seen.insert(r.run_id).second) continue;
    const json& sc = run.at("scenario");
    r.scenario = sc.value("name", std::string());
    r.kind = sc.value("kind", std::string());
    if (sc.contains("budget") && !sc["budget"].is_null()) r.budget = sc["budget"].get<std::size_t>();
    r.seed = sc.value("seed", std::uint64_t{0});
    r.noise_std = run.at("defense").value("noise_std", 0.0);
    r.queries = rep.value("query_count", std::size_t{0});
    r.attacker_acc = rep.at("mean_attacker_acc").get<double>();
    r.victim_acc = rep.at("mean_victim_acc").get<double>();
    r.fidelity = rep.at("mean_fidelity").get<double>();
    rows.push_back(r);
  }
  if (rows.empty()) {
    std::fprintf(stderr, "no reports found\n");
    return kExitEmpty;
  }
  std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
    return std::tie(a.scenario, a.budget, a.noise_std, a.seed, a.run_id) <
           std::tie(b.scenario, b.budget, b.noise_std, b.seed, b.run_id);
  });

  std::string agg = "run_id,scenario,kind,budget,seed,noise_std,query_count,attacker_acc,victim_acc,fidelity\n";
  double sa = 0, sv = 0, sf = 0;
  for (const auto& r : rows) {
    agg += r.run_id + "," + r.scenario + "," + r.kind + "," + (r.budget ? std::to_string(*r.budget) : "") + "," +
           std::to_string(r.seed) + "," + fixed(r.noise_std, 6) + "," + std::to_string(r.queries) + "," +
           fixed(r.attacker_acc, 6) + "," + fixed(r.victim_acc, 6) + "," + fixed(r.fidelity, 6) + "\n";
    sa += r.attacker_acc;
    sv += r.victim_acc;
    sf += r.fidelity;
  }
  const double n = static_cast<double>(rows.size());
  agg += "mean,,,,,,," + fixed(sa / n, 6) + "," + fixed(sv / n, 6) + "," + fixed(sf / n, 6) + "\n";

  // Budget series: one row per distinct B, averaged over seeds.
  std::map<std::size_t, std::vector<const RunRow*>> by_budget;
  for (const auto& r : rows)
    if (r.budget) by_budget[*r.budget].push_back(&r);
  std::string series = "budget,runs,mean_attacker_acc,mean_victim_acc,mean_fidelity\n";
  for (const auto& [b, rs] : by_budget) {
    double a = 0, v = 0, f = 0;
    for (const auto* r : rs) {
      a += r->attacker_acc;
      v += r->victim_acc;
      f += r->fidelity;
    }
    const double k = static_cast<double>(rs.size());
    series += std::to_string(b) + "," + std::to_string(rs.size()) + "," + fixed(a / k, 6) + "," + fixed(v / k, 6) + "," +
              fixed(f / k, 6) + "\n";
  }

  const fs::path out = g.out.empty() ? fs::path(".") : fs::path(g.out);
  write_file(out / "aggregate.csv", agg);
  write_file(out / "budget_series.csv", series);
  std::fputs(agg.c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfmx: graph foundation model extraction experiments"};
  app.require_subcommand(1);
  GlobalFlags g;
  DefenseFlags d;
  std::string corpus_dir, victim_path;
  std::vector<std::string> run_dirs;

  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--seed", g.seed, "global seed override");
    sub->add_option("--config", g.config, "JSON config file");
    sub->add_option("--out", g.out, "output path");
    sub->add_flag("--verbose", g.verbose, "per-node diagnostics in JSON reports");
  };

  auto* gen = app.add_subcommand("generate", "generate the synthetic corpus");
  add_globals(gen);

  auto* pre = app.add_subcommand("pretrain", "contrastively pretrain the victim encoder");
  add_globals(pre);
  pre->add_option("--corpus", corpus_dir, "corpus directory")->required();

  auto* att = app.add_subcommand("attack", "run one extraction scenario against a victim checkpoint");
  add_globals(att);
  att->add_option("--victim", victim_path, "victim checkpoint")->required();
  att->add_option("--corpus", corpus_dir, "corpus directory")->required();
  att->add_option("--noise-std", d.noise_std, "defense: Gaussian noise std");
  att->add_option("--truncate-dim", d.truncate_dim, "defense: projection dimension");
  att->add_option("--quantize-bits", d.quantize_bits, "defense: quantization bits");
  att->add_option("--rate-limit", d.rate_limit, "defense: queries per session");

  auto* rep = app.add_subcommand("report", "aggregate run directories");
  add_globals(rep);
  rep->add_option("runs", run_dirs, "run directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*gen) return cmd_generate(g);
    if (*pre) return cmd_pretrain(g, corpus_dir);
    if (*att) return cmd_attack(g, d, victim_path, corpus_dir);
    if (*rep) return cmd_report(g, run_dirs);
  } catch (const Error& e) {
    std::fprintf(stderr, "gfmx: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    std::fprintf(stderr, "gfmx: config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "gfmx: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
