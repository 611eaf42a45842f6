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

// End-to-end acceptance run at desk scale. Prints one PASS/FAIL line per
// criterion and exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gfmx/attacks.hpp"
#include "gfmx/evaluation.hpp"
#include "gfmx/experiment.hpp"
#include "test_util.hpp"

using namespace gfmx;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;
std::string summary;  // also written to acceptance.txt; ctest hides passing output

void verdict(int id, bool ok, const std::string& title, const std::string& detail) {
  char line[512];
  std::snprintf(line, sizeof line, "%s %2d %-28s %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fputs(line, stdout);
  std::fflush(stdout);
  summary += line;
  failures += ok ? 0 : 1;
}

// A pretrained victim together with the corpus it was trained on.
struct World {
  FrozenTextEncoder text;
  SamplerConfig sampler;
  Corpus corpus;
  Encoder victim;
  double victim_seconds = 0.0;

  explicit World(const CorpusConfig& cfg) : corpus(build_corpus(cfg, text)), victim(default_victim_config()) {
    const VictimSetup setup = desk_victim_setup();
    sampler = setup.sampler;
    TrainLog log;
    victim = pretrain_victim(corpus, text, setup.encoder, setup.train, sampler, &log);
    victim_seconds = log.total_seconds;
  }
};

// Bookkeeping shared by every attack run.
std::size_t total_runs = 0, total_violations = 0, self_fidelity_failures = 0;

ScenarioResult attack(const World& w, const ScenarioConfig& cfg, const DefenseConfig& defense = {}) {
  VictimHandle handle(w.victim, std::nullopt, defense);
  const Encoder& oracle = w.victim;
  const EmbedFn victim_fn = [&oracle](const Subgraph& s) { return oracle.encode(s); };
  ScenarioResult r = run_scenario(cfg, w.corpus, handle, w.text, w.sampler, victim_fn);
  ++total_runs;
  total_violations += r.report.bound_violations();
  const auto evals = resolve_eval_graphs(cfg, w.corpus);
  const ScenarioReport self = evaluate_pair(victim_fn, victim_fn, evals, w.text, w.sampler);
  for (const auto& g : self.graphs) self_fidelity_failures += g.fidelity != 1.0;
  return r;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Mean of 1/K over the evaluation graphs: fidelity of a random guesser.
double chance_fidelity(const ScenarioReport& r) {
  std::vector<double> c;
  for (const auto& g : r.graphs) c.push_back(1.0 / static_cast<double>(g.class_count));
  return mean(c);
}

// ---------------------------------------------------------------- 1, 2, 12

void gradient_criterion() {
  const auto t0 = Clock::now();
  double worst_gcn = 0.0, worst_gat = 0.0;
  for (auto family : {EncoderFamily::kGcn, EncoderFamily::kGat}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      Rng rng(seed);
      EncoderConfig cfg = default_attacker_config(family);
      cfg.init_seed = seed;
      const Encoder enc(cfg);
      std::vector<Subgraph> subs;
      for (int i = 0; i < 3; ++i) subs.push_back(gfmx::testing::random_subgraph(6, 32, 4, rng));
      Matrix texts = gfmx::testing::random_matrix(3, 32, rng);
      for (std::size_t r = 0; r < texts.rows(); ++r) {
        const double n = gfmx::testing::norm(texts.row_span(r));
        for (double& x : texts.row_span(r)) x /= n;
      }
      auto embed = [&](Tape& t, std::span<const Var> p) {
        std::vector<Var> rows;
        for (const auto& s : subs) rows.push_back(enc.forward(t, p, s));
        return gfmx::testing::stack_rows(t, rows);
      };
      const auto rc = gradient_check(
          [&](Tape& t, std::span<const Var> p) { return contrastive_loss(embed(t, p), t.constant(texts), 0.5); },
          enc.parameters(), 1e-5, 1e-4);
      const auto rm = gradient_check(
          [&](Tape& t, std::span<const Var> p) { return mse_regression_loss(embed(t, p), texts); }, enc.parameters(),
          1e-5, 1e-4);
      double& worst = family == EncoderFamily::kGcn ? worst_gcn : worst_gat;
      worst = std::max({worst, rc.max_rel_error, rm.max_rel_error});
    }
  }
  const double secs = seconds_since(t0);
  verdict(1, worst_gcn < 1e-4 && worst_gat < 1e-4 && secs < 30.0, "gradient correctness",
          "max rel err gcn=" + fmt("%.2e", worst_gcn) + " gat=" + fmt("%.2e", worst_gat) + " time=" + fmt("%.1fs", secs));
}

void loss_oracle_criterion() {
  const Matrix eye = Matrix::identity(2);
  const double c1 = contrastive_loss(eye, eye, 1.0), c2 = contrastive_loss(eye, eye, 0.5);
  const double e1 = std::abs(c1 - std::log1p(std::exp(-1.0))), e2 = std::abs(c2 - std::log1p(std::exp(-2.0)));
  const bool single = contrastive_loss(Matrix{{0.6, 0.8}}, Matrix{{0.0, 1.0}}, 0.07) == 0.0;
  const bool mse = mse_regression_loss(Matrix{{1, 0}}, Matrix{{0, 1}}) == 2.0 &&
                   mse_regression_loss(Matrix{{1, 0}}, Matrix{{-1, 0}}) == 4.0 &&
                   mse_regression_loss(Matrix{{0.6, 0.8}}, Matrix{{0.6, 0.8}}) == 0.0;
  verdict(2, e1 < 1e-9 && e2 < 1e-9 && single && mse, "loss oracles",
          "|err| tau=1 " + fmt("%.1e", e1) + ", tau=0.5 " + fmt("%.1e", e2) + ", N=1 " + (single ? "0" : "nonzero") +
              ", mse " + (mse ? "exact" : "wrong"));
}

bool metric_hand_cases() {
  const std::vector<int> a{0, 1, 2, 1}, b{0, 1, 2, 0};
  return accuracy(a, b) == 0.75 && fidelity(a, b) == 0.75 && fidelity(b, a) == 0.75 && fidelity(a, a) == 1.0 &&
         accuracy(std::vector<int>{1, 1}, std::vector<int>{0, 0}) == 0.0;
}

}  // namespace

int main() {
  const auto start = Clock::now();
  gradient_criterion();
  loss_oracle_criterion();

  // Shared victim on the default corpus.
  const auto t_default = Clock::now();
  const World world(default_corpus_config());
  std::printf("     victim pretrained in %.1fs (%zu params)\n", world.victim_seconds, count_parameters(world.victim));

  // Full-model extraction, 3 seeds.
  std::vector<ScenarioResult> full;
  std::vector<double> full_fid, full_gap, full_secs;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    full.push_back(attack(world, desk_scenario(ScenarioKind::kFullModel, seed)));
    const auto& r = full.back().report;
    full_fid.push_back(r.mean_fidelity());
    full_gap.push_back(std::abs(r.mean_attacker_acc() - r.mean_victim_acc()));
    full_secs.push_back(full.back().log.total_seconds);
  }
  const double full_total = seconds_since(t_default);
  const double f1 = mean(full_fid);

  // Domain-specific extraction.
  std::vector<double> in_dom, out_dom;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ScenarioConfig cfg = desk_scenario(ScenarioKind::kDomainSpecific, seed);
    const auto r = attack(world, cfg);
    std::vector<double> in, out;
    for (const auto& g : r.report.graphs) (g.domain == *cfg.target_domain ? in : out).push_back(g.fidelity);
    in_dom.push_back(mean(in));
    out_dom.push_back(mean(out));
  }

  // Partial-visibility synthesis.
  bool bit_exact = true;
  {
    ScenarioConfig syn = desk_scenario(ScenarioKind::kSyntheticGraphs, 1);
    syn.visibility_fraction = 1.0;
    const auto r = attack(world, syn);
    const auto& ref = full.front().records;
    bit_exact = r.records.size() == ref.size();
    for (std::size_t i = 0; bit_exact && i < ref.size(); ++i)
      bit_exact = r.records[i].graph_id == ref[i].graph_id && r.records[i].subgraph.center == ref[i].subgraph.center &&
                  r.records[i].embedding == ref[i].embedding;
  }
  std::vector<double> syn_fid;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    syn_fid.push_back(attack(world, desk_scenario(ScenarioKind::kSyntheticGraphs, seed)).report.mean_fidelity());

  // Extraction from public graphs the victim never saw.
  std::vector<double> free_fid;
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    free_fid.push_back(attack(world, desk_scenario(ScenarioKind::kDataFree, seed)).report.mean_fidelity());

  // Noise defense sweep.
  std::map<double, double> noise_fid{{0.0, f1}};
  for (double sigma : {0.1, 0.3, 0.5}) {
    DefenseConfig d;
    d.noise_std = sigma;
    std::vector<double> f;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
      f.push_back(attack(world, desk_scenario(ScenarioKind::kFullModel, seed), d).report.mean_fidelity());
    noise_fid[sigma] = mean(f);
  }

  // Rerun determinism.
  bool deterministic = true;
  {
    const auto again = attack(world, desk_scenario(ScenarioKind::kFullModel, 1));
    deterministic = again.report.to_json(true).dump() == full.front().report.to_json(true).dump() &&
                    again.report.to_csv() == full.front().report.to_csv() &&
                    again.attacker.parameter_hash() == full.front().attacker.parameter_hash();
    const Corpus regenerated = generate_corpus(default_corpus_config());
    for (std::size_t i = 0; i < regenerated.graphs.size(); ++i)
      deterministic &= graph_to_json(regenerated.graphs[i]) == graph_to_json(world.corpus.graphs[i]);
    const Encoder victim_copy = checkpoint_from_bytes(checkpoint_bytes(world.victim)).encoder;
    deterministic &= victim_copy.parameter_hash() == world.victim.parameter_hash();
  }

  // Budget sweep on a corpus large enough for B = 1000.
  const World budget_world(budget_corpus_config());
  std::printf("     budget victim pretrained in %.1fs\n", budget_world.victim_seconds);
  const std::vector<std::size_t> budgets{100, 250, 500, 1000};
  std::vector<double> budget_fid;
  for (std::size_t b : budgets) {
    std::vector<double> f;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ScenarioConfig cfg = desk_scenario(ScenarioKind::kBudgetConstrained, seed);
      cfg.budget = b;
      cfg.train.epochs = desk_epochs(cfg.kind, b);
      f.push_back(attack(budget_world, cfg).report.mean_fidelity());
    }
    budget_fid.push_back(mean(f));
  }

  // ---------------------------------------------------------------- verdicts
  verdict(3, total_violations == 0, "alignment bound exactness",
          std::to_string(total_violations) + " violations over " + std::to_string(total_runs) + " runs");

  const double gap = mean(full_gap);
  verdict(4, f1 >= 0.80 && gap <= 0.10 && full_total < 600.0, "full-model extraction",
          "fidelity=" + fmt("%.3f", f1) + " |acc gap|=" + fmt("%.3f", gap) + " time=" + fmt("%.1fs", full_total));

  bool trend = true;
  std::string series;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    series += (i ? " " : "") + std::to_string(budgets[i]) + ":" + fmt("%.3f", budget_fid[i]);
    if (i && budget_fid[i] < budget_fid[i - 1] - 0.02) trend = false;
  }
  verdict(5, trend, "budget trend", series);

  const double sel = mean(in_dom) - mean(out_dom);
  verdict(6, sel >= 0.05, "domain selectivity",
          "in=" + fmt("%.3f", mean(in_dom)) + " out=" + fmt("%.3f", mean(out_dom)) + " diff=" + fmt("%.3f", sel));

  const double chance = chance_fidelity(full.front().report);
  const double retained = (mean(syn_fid) - chance) / (f1 - chance);
  verdict(7, bit_exact && retained >= 0.70, "partial-visibility synthesis",
          std::string("vis=1 ") + (bit_exact ? "bit-exact" : "DIFFERS") + ", vis=0.1 fidelity=" +
              fmt("%.3f", mean(syn_fid)) + " chance=" + fmt("%.3f", chance) + " retained=" + fmt("%.2f", retained));

  const double df = mean(free_fid);
  verdict(8, std::abs(df - f1) <= 0.15, "public-graph extraction",
          "fidelity=" + fmt("%.3f", df) + " vs full-model " + fmt("%.3f", f1));

  bool monotone = true;
  std::string noise;
  double prev = 2.0;
  for (const auto& [sigma, f] : noise_fid) {
    noise += (noise.empty() ? "" : " ") + fmt("%.1f", sigma) + ":" + fmt("%.3f", f);
    if (f > prev + 0.02) monotone = false;
    prev = f;
  }
  verdict(9, monotone, "noise defense", noise);

  const std::size_t vp = count_parameters(default_victim_config());
  bool capacity = true;
  for (auto family : {EncoderFamily::kGcn, EncoderFamily::kGat})
    capacity &= vp > 4 * count_parameters(default_attacker_config(family));
  const double ratio = mean(full_secs) / world.victim_seconds;
  verdict(10, capacity && ratio < 0.10, "capacity and cost",
          "victim " + std::to_string(vp) + " params vs attackers " +
              std::to_string(count_parameters(default_attacker_config(EncoderFamily::kGcn))) + "/" +
              std::to_string(count_parameters(default_attacker_config(EncoderFamily::kGat))) +
              ", attacker/victim time=" + fmt("%.4f", ratio));

  verdict(11, deterministic, "determinism", deterministic ? "reruns byte-identical" : "reruns differ");

  const bool hand = metric_hand_cases();
  verdict(12, hand && self_fidelity_failures == 0, "metric oracles",
          std::string("hand cases ") + (hand ? "exact" : "wrong") + ", fidelity(V,V)!=1 on " +
              std::to_string(self_fidelity_failures) + " graphs");

  std::printf("     total %.1fs, %d failing\n", seconds_since(start), failures);
  std::ofstream("acceptance.txt") << summary;
  return failures == 0 ? 0 : 1;
}
