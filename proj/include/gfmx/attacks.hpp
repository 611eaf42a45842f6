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

// Extraction scenarios. Everything here talks to the victim through
// VictimHandle only.

#ifndef GFMX_ATTACKS_HPP
#define GFMX_ATTACKS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/encoders.hpp"
#include "gfmx/evaluation.hpp"
#include "gfmx/tag.hpp"
#include "gfmx/training.hpp"
#include "gfmx/victim_api.hpp"

namespace gfmx {

enum class ScenarioKind {
  kFullModel,
  kDomainSpecific,
  kBudgetConstrained,
  kGraphSpecific,
  kSyntheticGraphs,
  kDataFree,
};

const char* to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ScenarioConfig {
  std::string name;
  ScenarioKind kind = ScenarioKind::kFullModel;
  /// Graph ids, "domain:<name>" or "role:<pretrain|eval|extra>". Empty means
  /// the kind's default sources.
  std::vector<std::string> query_sources;
  std::optional<std::string> target_domain;
  std::optional<std::string> target_graph;
  std::optional<std::size_t> budget;
  std::vector<double> mix_weights;
  double visibility_fraction = 0.1;
  double alpha = 0.5;
  EncoderConfig attacker = default_attacker_config(EncoderFamily::kGcn);
  TrainConfig train;
  std::uint64_t seed = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static ScenarioConfig from_json(const nlohmann::json& j);
};

/// Epoch count used for each scenario when the config does not set one:
/// 2 / 8 / {30, 60, 120, 200} by budget / 60 / 2 / 4.
std::size_t default_epochs(ScenarioKind kind, std::optional<std::size_t> budget);

/// Graphs a scenario queries, in graph-id order.
std::vector<const TextAttributedGraph*> resolve_query_sources(const ScenarioConfig& config, const Corpus& corpus);
/// Graphs a scenario is evaluated on.
std::vector<const TextAttributedGraph*> resolve_eval_graphs(const ScenarioConfig& config, const Corpus& corpus);

/// Floor allocation of `budget` by weights; the last source takes the rest.
std::vector<std::size_t> allocate_budget(std::size_t budget, const std::vector<double>& weights);

/// Queries the handle and returns records ordered by (graph id, center).
std::vector<QueryRecord> build_query_set(const ScenarioConfig& config, const Corpus& corpus, VictimHandle& handle,
                                         const SamplerConfig& sampler);

// ---------------------------------------------------------------- partial-knowledge graphs

struct PartialGraphView {
  std::string parent_graph_id;
  std::size_t node_count = 0;
  std::vector<bool> visible;
  std::map<NodeId, std::vector<double>> visible_features;
  /// Parent edges with an endpoint that is visible or adjacent to a visible
  /// node: the 2-hop structure around the visible set.
  std::vector<Edge> known_edges;
  std::vector<std::vector<NodeId>> known_neighbors;

  std::size_t visible_count() const;
};

PartialGraphView make_partial_view(const TextAttributedGraph& graph, const std::vector<NodeId>& visible_ids);

/// alpha * mean(visible 1-hop features) + (1 - alpha) * mean(visible 2-hop
/// features), reassigning the weight of an empty hop set to the other.
/// Throws kUnsynthesizable when neither hop set has a visible node.
std::vector<double> synthesize_attributes(const PartialGraphView& view, NodeId target, double alpha);

struct SyntheticGraph {
  TextAttributedGraph graph;  // same ids as the parent; excluded nodes isolated
  std::vector<NodeId> visible_ids;
  std::vector<bool> included;
  std::size_t imputed = 0;
  std::size_t synthesizable = 0;  // visible + imputed
};

std::vector<SyntheticGraph> build_synthetic_query_graphs(const Corpus& corpus, double visibility_fraction, double alpha,
                                                         std::uint64_t seed);

// ---------------------------------------------------------------- runner

struct ScenarioResult {
  Encoder attacker;
  ScenarioReport report;
  TrainLog log;
  std::vector<QueryRecord> records;
};

/// Build queries, train the surrogate by embedding regression, evaluate.
/// The attack side sees the victim only through `handle`; `victim_oracle`
/// (clean victim embeddings) is the evaluator's ground truth and is used
/// for scoring only. The corpus must have features attached.
ScenarioResult run_scenario(const ScenarioConfig& config, const Corpus& corpus, VictimHandle& handle,
                            const FrozenTextEncoder& text_encoder, const SamplerConfig& sampler,
                            const EmbedFn& victim_oracle);

}  // namespace gfmx

#endif  // GFMX_ATTACKS_HPP
