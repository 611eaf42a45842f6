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

#include "gfmx/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "gfmx/kernels.hpp"
#include "gfmx/rng.hpp"

namespace gfmx {

using nlohmann::json;

const char* to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kFullModel: return "full_model";
    case ScenarioKind::kDomainSpecific: return "domain_specific";
    case ScenarioKind::kBudgetConstrained: return "budget_constrained";
    case ScenarioKind::kGraphSpecific: return "graph_specific";
    case ScenarioKind::kSyntheticGraphs: return "synthetic_graphs";
    case ScenarioKind::kDataFree: return "data_free";
  }
  return "?";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  for (auto k : {ScenarioKind::kFullModel, ScenarioKind::kDomainSpecific, ScenarioKind::kBudgetConstrained,
                 ScenarioKind::kGraphSpecific, ScenarioKind::kSyntheticGraphs, ScenarioKind::kDataFree})
    if (s == to_string(k)) return k;
  throw Error(ErrorKind::kConfig, "kind: unknown scenario kind \"" + s + "\"");
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kConfig, m); };
  if (kind == ScenarioKind::kBudgetConstrained && !budget) fail("budget: required for budget_constrained");
  if (budget && *budget < 1) fail("budget: must be >= 1");
  if (kind == ScenarioKind::kDomainSpecific && !target_domain) fail("target_domain: required for domain_specific");
  if (kind == ScenarioKind::kGraphSpecific && !target_graph) fail("target_graph: required for graph_specific");
  if (kind == ScenarioKind::kSyntheticGraphs) {
    if (!(visibility_fraction > 0.0 && visibility_fraction <= 1.0)) fail("visibility_fraction: must be in (0,1]");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha: must be in [0,1]");
  }
  if (!mix_weights.empty()) {
    double s = 0.0;
    for (double w : mix_weights) {
      if (!(w >= 0.0)) fail("mix_weights: must be non-negative");
      s += w;
    }
    if (std::abs(s - 1.0) > 1e-9) fail("mix_weights: must sum to 1");
    if (mix_weights.size() != query_sources.size()) fail("mix_weights: need one weight per query source");
  }
  attacker.validate();
  train.validate();
}

std::size_t default_epochs(ScenarioKind kind, std::optional<std::size_t> budget) {
  switch (kind) {
    case ScenarioKind::kFullModel: return 2;
    case ScenarioKind::kDomainSpecific: return 8;
    case ScenarioKind::kBudgetConstrained: {
      const std::size_t b = budget.value_or(1000);
      if (b >= 1000) return 30;
      if (b >= 500) return 60;
      if (b >= 250) return 120;
      return 200;
    }
    case ScenarioKind::kGraphSpecific: return 60;
    case ScenarioKind::kSyntheticGraphs: return 2;
    case ScenarioKind::kDataFree: return 4;
  }
  return 2;
}

json ScenarioConfig::to_json() const {
  json j;
  j["name"] = name;
  j["kind"] = to_string(kind);
  j["query_sources"] = query_sources;
  if (target_domain) j["target_domain"] = *target_domain;
  if (target_graph) j["target_graph"] = *target_graph;
  if (budget) j["budget"] = *budget;
  if (!mix_weights.empty()) j["mix_weights"] = mix_weights;
  j["visibility_fraction"] = visibility_fraction;
  j["alpha"] = alpha;
  j["attacker"] = attacker.to_json();
  j["train"] = train.to_json();
  j["seed"] = seed;
  return j;
}

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  ScenarioConfig c;
  c.name = j.value("name", std::string());
  c.kind = scenario_kind_from_string(j.value("kind", std::string("full_model")));
  if (c.name.empty()) c.name = to_string(c.kind);
  c.query_sources = j.value("query_sources", std::vector<std::string>{});
  if (j.contains("target_domain")) c.target_domain = j["target_domain"].get<std::string>();
  if (j.contains("target_graph")) c.target_graph = j["target_graph"].get<std::string>();
  if (j.contains("budget") && !j["budget"].is_null()) c.budget = j["budget"].get<std::size_t>();
  c.mix_weights = j.value("mix_weights", std::vector<double>{});
  c.visibility_fraction = j.value("visibility_fraction", c.visibility_fraction);
  c.alpha = j.value("alpha", c.alpha);
  if (j.contains("attacker")) c.attacker = EncoderConfig::from_json(j["attacker"]);
  TrainConfig defaults;
  defaults.epochs = default_epochs(c.kind, c.budget);
  c.train = j.contains("train") ? TrainConfig::from_json(j["train"], defaults) : defaults;
  c.seed = j.value("seed", c.seed);
  c.validate();
  return c;
}

// ---------------------------------------------------------------- sources

namespace {

std::vector<const TextAttributedGraph*> select(const Corpus& corpus, const std::string& selector) {
  std::vector<const TextAttributedGraph*> out;
  if (selector.rfind("domain:", 0) == 0) {
    const std::string d = selector.substr(7);
    for (const auto& g : corpus.graphs)
      if (g.domain == d && g.role != GraphRole::kEval) out.push_back(&g);
  } else if (selector.rfind("role:", 0) == 0) {
    const GraphRole r = graph_role_from_string(selector.substr(5));
    for (const auto& g : corpus.graphs)
      if (g.role == r) out.push_back(&g);
  } else {
    out.push_back(&corpus.find(selector));
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "query source \"" + selector + "\" matches no graph");
  return out;
}

void sort_unique(std::vector<const TextAttributedGraph*>& graphs) {
  std::sort(graphs.begin(), graphs.end(), [](auto* a, auto* b) { return a->graph_id < b->graph_id; });
  graphs.erase(std::unique(graphs.begin(), graphs.end()), graphs.end());
}

std::vector<NodeId> train_centers(const TextAttributedGraph& g, const SamplerConfig& sampler) {
  return split_nodes(g, graph_split_seed(g, sampler.split_seed)).train_ids;
}

std::vector<NodeId> sample_centers(std::vector<NodeId> pool, std::size_t count, Rng rng) {
  if (count > pool.size())
    throw Error(ErrorKind::kConfig, "budget " + std::to_string(count) + " exceeds " + std::to_string(pool.size()) +
                                        " available centers");
  rng.shuffle(pool);
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

std::vector<const TextAttributedGraph*> resolve_query_sources(const ScenarioConfig& config, const Corpus& corpus) {
  std::vector<const TextAttributedGraph*> out;
  if (!config.query_sources.empty()) {
    // Order of explicit sources matters for mix weights, so keep it.
    for (const auto& s : config.query_sources)
      for (const auto* g : select(corpus, s)) out.push_back(g);
    return out;
  }
  switch (config.kind) {
    case ScenarioKind::kFullModel:
    case ScenarioKind::kSyntheticGraphs:
      out = corpus.with_role(GraphRole::kPretrain);
      break;
    case ScenarioKind::kDomainSpecific:
      for (const auto* g : corpus.with_role(GraphRole::kPretrain))
        if (g->domain == *config.target_domain) out.push_back(g);
      break;
    case ScenarioKind::kBudgetConstrained:
      out = corpus.with_role(GraphRole::kPretrain);
      if (config.target_domain)
        std::erase_if(out, [&](auto* g) { return g->domain != *config.target_domain; });
      break;
    case ScenarioKind::kGraphSpecific:
      out.push_back(&corpus.find(*config.target_graph));
      break;
    case ScenarioKind::kDataFree:
      out = corpus.with_role(GraphRole::kExtra);
      break;
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, std::string(to_string(config.kind)) + ": no source graphs in corpus");
  sort_unique(out);
  return out;
}

std::vector<const TextAttributedGraph*> resolve_eval_graphs(const ScenarioConfig& config, const Corpus& corpus) {
  if (config.kind == ScenarioKind::kGraphSpecific) return {&corpus.find(*config.target_graph)};
  auto out = corpus.with_role(GraphRole::kEval);
  if (config.kind == ScenarioKind::kBudgetConstrained && config.target_domain)
    std::erase_if(out, [&](auto* g) { return g->domain != *config.target_domain; });
  if (out.empty()) throw Error(ErrorKind::kConfig, "no evaluation graphs for scenario " + config.name);
  sort_unique(out);
  return out;
}

std::vector<std::size_t> allocate_budget(std::size_t budget, const std::vector<double>& weights) {
  if (weights.empty()) throw Error(ErrorKind::kConfig, "mix_weights: empty");
  std::vector<std::size_t> counts(weights.size(), 0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    // The epsilon absorbs products like 0.3 * 1000 = 299.99999999999997.
    counts[i] = static_cast<std::size_t>(std::floor(static_cast<double>(budget) * weights[i] + 1e-9));
    assigned += counts[i];
  }
  if (assigned > budget) throw Error(ErrorKind::kConfig, "mix_weights: allocation exceeds budget");
  counts.back() = budget - assigned;
  return counts;
}

namespace {

struct CenterPlan {
  const TextAttributedGraph* graph;
  std::vector<NodeId> centers;
};

std::vector<QueryRecord> query_plan(std::vector<CenterPlan> plan, VictimHandle& handle, const SamplerConfig& sampler) {
  std::sort(plan.begin(), plan.end(), [](const auto& a, const auto& b) { return a.graph->graph_id < b.graph->graph_id; });
  std::vector<QueryRecord> records;
  for (auto& p : plan) {
    std::sort(p.centers.begin(), p.centers.end());
    std::vector<Subgraph> subs(p.centers.size());
    kernels::parallel_for(p.centers.size(), [&](std::size_t i) { subs[i] = sample_subgraph(*p.graph, p.centers[i], sampler); });
    constexpr std::size_t kChunk = 64;
    for (std::size_t start = 0; start < subs.size(); start += kChunk) {
      const std::size_t end = std::min(subs.size(), start + kChunk);
      std::vector<Subgraph> chunk(std::make_move_iterator(subs.begin() + static_cast<std::ptrdiff_t>(start)),
                                  std::make_move_iterator(subs.begin() + static_cast<std::ptrdiff_t>(end)));
      auto got = handle.query_batch(std::move(chunk), std::vector<std::string>(end - start, p.graph->graph_id));
      for (auto& r : got) records.push_back(std::move(r));
    }
  }
  return records;
}

}  // namespace

std::vector<QueryRecord> build_query_set(const ScenarioConfig& config, const Corpus& corpus, VictimHandle& handle,
                                         const SamplerConfig& sampler) {
  config.validate();
  const auto sources = resolve_query_sources(config, corpus);
  const Rng rng = Rng(config.seed).split("query-centers");
  std::vector<CenterPlan> plan;

  if (config.kind == ScenarioKind::kSyntheticGraphs)
    throw Error(ErrorKind::kContract, "synthetic_graphs queries are built by run_scenario from synthetic graphs");

  if (config.budget && (config.kind == ScenarioKind::kBudgetConstrained || config.kind == ScenarioKind::kGraphSpecific)) {
    if (sources.size() == 1) {
      plan.push_back({sources[0], sample_centers(train_centers(*sources[0], sampler), *config.budget,
                                                 rng.split(sources[0]->graph_id))});
    } else {
      std::vector<double> weights = config.mix_weights;
      if (weights.empty()) weights.assign(sources.size(), 1.0 / static_cast<double>(sources.size()));
      if (weights.size() != sources.size())
        throw Error(ErrorKind::kConfig, "mix_weights: need one weight per resolved source");
      const auto counts = allocate_budget(*config.budget, weights);
      for (std::size_t i = 0; i < sources.size(); ++i)
        plan.push_back({sources[i], sample_centers(train_centers(*sources[i], sampler), counts[i],
                                                   rng.split(sources[i]->graph_id))});
    }
  } else {
    for (const auto* g : sources) plan.push_back({g, train_centers(*g, sampler)});
  }
  for (const auto& p : plan)
    if (p.centers.empty() && config.kind != ScenarioKind::kBudgetConstrained)
      throw Error(ErrorKind::kConfig, "source " + p.graph->graph_id + " has no training centers");
  return query_plan(std::move(plan), handle, sampler);
}

// ---------------------------------------------------------------- partial-knowledge graphs

std::size_t PartialGraphView::visible_count() const {
  return static_cast<std::size_t>(std::count(visible.begin(), visible.end(), true));
}

PartialGraphView make_partial_view(const TextAttributedGraph& graph, const std::vector<NodeId>& visible_ids) {
  PartialGraphView view;
  view.parent_graph_id = graph.graph_id;
  view.node_count = graph.node_count;
  view.visible.assign(graph.node_count, false);
  for (NodeId v : visible_ids) {
    if (v >= graph.node_count) throw Error(ErrorKind::kContract, "visible id out of range");
    view.visible[v] = true;
    if (graph.features.size() == 0) throw Error(ErrorKind::kMissingData, graph.graph_id + " has no features attached");
    view.visible_features[v] = graph.features.row_vector(v);
  }
  std::vector<bool> near(graph.node_count, false);  // visible or adjacent to visible
  for (NodeId v = 0; v < graph.node_count; ++v) {
    if (!view.visible[v]) continue;
    near[v] = true;
    for (NodeId u : graph.neighbors()[v]) near[u] = true;
  }
  view.known_neighbors.assign(graph.node_count, {});
  for (const auto& [u, v] : graph.edges) {
    if (!near[u] && !near[v]) continue;
    view.known_edges.emplace_back(u, v);
    view.known_neighbors[u].push_back(v);
    view.known_neighbors[v].push_back(u);
  }
  for (auto& nb : view.known_neighbors) std::sort(nb.begin(), nb.end());
  return view;
}

std::vector<double> synthesize_attributes(const PartialGraphView& view, NodeId target, double alpha) {
  if (target >= view.node_count) throw Error(ErrorKind::kContract, "target out of range");
  std::set<NodeId> hop1(view.known_neighbors[target].begin(), view.known_neighbors[target].end());
  std::set<NodeId> hop2;
  for (NodeId u : hop1)
    for (NodeId w : view.known_neighbors[u])
      if (w != target && !hop1.count(w)) hop2.insert(w);

  auto visible_mean = [&](const std::set<NodeId>& nodes, std::vector<double>& out) {
    std::size_t count = 0;
    for (NodeId u : nodes) {
      if (!view.visible[u]) continue;
      const auto& f = view.visible_features.at(u);
      if (out.empty()) out.assign(f.size(), 0.0);
      for (std::size_t c = 0; c < f.size(); ++c) out[c] += f[c];
      ++count;
    }
    for (auto& v : out) v /= static_cast<double>(std::max<std::size_t>(count, 1));
    return count;
  };
  std::vector<double> m1, m2;
  const std::size_t n1 = visible_mean(hop1, m1);
  const std::size_t n2 = visible_mean(hop2, m2);
  if (n1 == 0 && n2 == 0)
    throw Error(ErrorKind::kUnsynthesizable, view.parent_graph_id + ": node " + std::to_string(target) +
                                                 " has no visible node within 2 hops");
  if (n1 == 0) return m2;
  if (n2 == 0) return m1;
  std::vector<double> out(m1.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = alpha * m1[c] + (1.0 - alpha) * m2[c];
  return out;
}

std::vector<SyntheticGraph> build_synthetic_query_graphs(const Corpus& corpus, double visibility_fraction, double alpha,
                                                         std::uint64_t seed) {
  if (!(visibility_fraction > 0.0 && visibility_fraction <= 1.0))
    throw Error(ErrorKind::kConfig, "visibility_fraction: must be in (0,1]");
  std::vector<SyntheticGraph> out;
  const Rng root = Rng(seed).split("visibility");
  for (const auto* gp : corpus.with_role(GraphRole::kPretrain)) {
    const auto& g = *gp;
    SyntheticGraph s;
    std::vector<NodeId> ids(g.node_count);
    std::iota(ids.begin(), ids.end(), NodeId{0});
    Rng rng = root.split(g.graph_id);
    rng.shuffle(ids);
    const auto keep = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(visibility_fraction * static_cast<double>(g.node_count))), 1, g.node_count);
    ids.resize(keep);
    std::sort(ids.begin(), ids.end());
    s.visible_ids = ids;
    const PartialGraphView view = make_partial_view(g, ids);

    s.graph = g;
    s.included.assign(g.node_count, false);
    for (NodeId v = 0; v < g.node_count; ++v) {
      if (view.visible[v]) {
        s.included[v] = true;
        continue;
      }
      try {
        const auto f = synthesize_attributes(view, v, alpha);
        std::copy(f.begin(), f.end(), s.graph.features.row_span(v).begin());
        s.included[v] = true;
        ++s.imputed;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kUnsynthesizable) throw;
        std::fill(s.graph.features.row_span(v).begin(), s.graph.features.row_span(v).end(), 0.0);
      }
    }
    s.synthesizable = s.visible_ids.size() + s.imputed;
    s.graph.edges.clear();
    for (const auto& [u, v] : view.known_edges)
      if (s.included[u] && s.included[v]) s.graph.edges.emplace_back(u, v);
    s.graph.finalize();
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------- runner

ScenarioResult run_scenario(const ScenarioConfig& config, const Corpus& corpus, VictimHandle& handle,
                            const FrozenTextEncoder& text_encoder, const SamplerConfig& sampler,
                            const EmbedFn& victim_oracle) {
  config.validate();
  std::vector<QueryRecord> records;
  if (config.kind == ScenarioKind::kSyntheticGraphs) {
    const auto synthetic = build_synthetic_query_graphs(corpus, config.visibility_fraction, config.alpha, config.seed);
    std::vector<CenterPlan> plan;
    for (const auto& s : synthetic) {
      std::vector<NodeId> centers;
      for (NodeId v : train_centers(s.graph, sampler))
        if (std::binary_search(s.visible_ids.begin(), s.visible_ids.end(), v)) centers.push_back(v);
      plan.push_back({&s.graph, std::move(centers)});
    }
    records = query_plan(std::move(plan), handle, sampler);
  } else {
    records = build_query_set(config, corpus, handle, sampler);
  }
  if (records.empty()) throw Error(ErrorKind::kMissingData, config.name + ": no queries could be built");

  EncoderConfig attacker_cfg = config.attacker;
  attacker_cfg.init_seed = mix64(config.seed ^ mix64(config.attacker.init_seed));
  TrainConfig train_cfg = config.train;
  train_cfg.seed = mix64(config.seed ^ mix64(config.train.seed + 1));

  TrainLog log;
  Encoder attacker = train_attacker(records, attacker_cfg, train_cfg, &log);

  std::vector<Subgraph> query_subs;
  query_subs.reserve(records.size());
  for (const auto& r : records) query_subs.push_back(r.subgraph);
  const std::size_t dim = text_encoder.dim();
  const EmbedFn attack_fn = [&attacker](const Subgraph& s) { return attacker.encode(s); };
  BoundQueries bound{embed_subgraphs(attack_fn, query_subs, dim), embed_subgraphs(victim_oracle, query_subs, dim)};

  const auto eval_graphs = resolve_eval_graphs(config, corpus);
  ScenarioReport report = evaluate_pair(attack_fn, victim_oracle, eval_graphs, text_encoder, sampler, &bound);
  report.scenario = config.name;
  report.kind = to_string(config.kind);
  report.seed = config.seed;
  report.query_count = records.size();
  report.attacker_params = count_parameters(attacker);
  report.victim_params = handle.parameter_count();
  report.attacker_train_seconds = log.total_seconds;
  return {std::move(attacker), std::move(report), std::move(log), std::move(records)};
}

}  // namespace gfmx
