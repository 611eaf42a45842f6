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

// Text-attributed graphs: data model, synthetic planted-partition corpora,
// node splits, subgraph samplers, random-walk positional encodings and
// adjacency normalization.

#ifndef GFMX_TAG_HPP
#define GFMX_TAG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gfmx/tensor.hpp"

namespace gfmx {

class FrozenTextEncoder;

using NodeId = std::size_t;
using Edge = std::pair<NodeId, NodeId>;

/// Which part of the corpus a graph belongs to. `kExtra` graphs are public
/// graphs that the victim never saw during pretraining.
enum class GraphRole { kPretrain, kEval, kExtra };

const char* to_string(GraphRole role);
GraphRole graph_role_from_string(const std::string& s);

struct TextAttributedGraph {
  std::string graph_id;
  std::string domain;
  GraphRole role = GraphRole::kPretrain;
  std::size_t node_count = 0;
  std::vector<Edge> edges;  // u < v, sorted, unique
  std::vector<std::string> texts;
  Matrix features;  // node_count x d_in, filled by attach_features
  std::vector<int> labels;
  std::vector<std::string> label_sentences;

  std::size_t class_count() const { return label_sentences.size(); }
  /// Sorted neighbor lists; rebuilt by finalize().
  const std::vector<std::vector<NodeId>>& neighbors() const { return neighbors_; }
  std::size_t degree(NodeId v) const { return neighbors_[v].size(); }

  /// Sorts/dedups edges, builds neighbor lists, then validates.
  void finalize();
  /// Throws kContract when an invariant is broken.
  void validate() const;

 private:
  std::vector<std::vector<NodeId>> neighbors_;
};

/// Sets graph.features = text embeddings of graph.texts.
void attach_features(TextAttributedGraph& graph, const FrozenTextEncoder& encoder);

/// Fraction of edges joining same-label nodes (NaN when edgeless).
double edge_homophily(const TextAttributedGraph& graph);

struct Subgraph {
  NodeId center = 0;
  std::vector<NodeId> node_ids;  // node_ids[0] == center
  Matrix features;               // |V_sub| x d_in
  Matrix adjacency;              // |V_sub| x |V_sub|, binary, symmetric
  Matrix positional;             // |V_sub| x r

  std::size_t size() const { return node_ids.size(); }
  std::size_t center_index() const;
  std::size_t edge_count() const;
};

/// [features | positional], the encoder input.
Matrix encoder_input(const Subgraph& sub);

// ---------------------------------------------------------------- corpus

struct GraphSpec {
  std::size_t node_count = 200;
  double edge_density = 0.03;
  double homophily = 0.9;
  /// Probability that each topic word of a node is swapped for a topic word
  /// of a different class.
  double feature_noise = 0.1;
  GraphRole role = GraphRole::kPretrain;
};

struct DomainSpec {
  std::string name;
  std::size_t class_count = 4;
  std::size_t topic_vocab = 6;  // topic words per class
  std::vector<GraphSpec> graphs;
};

struct CorpusConfig {
  std::vector<DomainSpec> domains;
  std::uint64_t seed = 1;
  std::size_t topic_words_per_node = 3;
  std::size_t noise_tokens_per_node = 3;
  std::size_t noise_vocab = 64;

  /// Throws kConfig naming the offending field.
  void validate() const;
};

/// Desk-scale default: academic/social/ecommerce with two pretraining graphs
/// and one evaluation graph each, plus four extra domains of public graphs.
CorpusConfig default_corpus_config();

struct Corpus {
  std::vector<TextAttributedGraph> graphs;
  std::map<std::string, std::vector<std::string>> summaries;  // graph_id -> per-node

  std::vector<const TextAttributedGraph*> with_role(GraphRole role) const;
  const TextAttributedGraph& find(const std::string& graph_id) const;
  TextAttributedGraph& find(const std::string& graph_id);
};

Corpus generate_corpus(const CorpusConfig& config);

/// Topic words of class `c` in `domain` (deterministic in corpus seed).
std::vector<std::string> topic_words(const CorpusConfig& config, const std::string& domain, std::size_t c);

// Corpus on disk:
//   pretrain/<domain>/<graph_id>.json, eval/<domain>/<graph_id>.json,
//   extra/<domain>/<graph_id>.json, summaries/<graph_id>.json
std::string graph_to_json(const TextAttributedGraph& graph);
TextAttributedGraph graph_from_json(const std::string& text, GraphRole role);
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Features are not stored; call attach_features after loading.
Corpus read_corpus(const std::filesystem::path& dir);

// ---------------------------------------------------------------- splits

struct NodeSplit {
  std::vector<NodeId> train_ids, val_ids, test_ids;  // each sorted
};

/// 60/10/30 with floor for val/test and the remainder to train.
NodeSplit split_nodes(const TextAttributedGraph& graph, std::uint64_t seed);
/// Per-graph split seed derived from a global seed and the graph id.
std::uint64_t graph_split_seed(const TextAttributedGraph& graph, std::uint64_t global_seed);

// ---------------------------------------------------------------- sampling

enum class SamplerMethod { kKHop, kRandomWalk };

struct SamplerConfig {
  SamplerMethod method = SamplerMethod::kRandomWalk;
  std::size_t k = 2;
  std::size_t max_nodes = 32;
  std::size_t walk_len = 16;
  std::size_t n_walks = 4;
  double restart_p = 0.2;
  std::size_t pe_dim = 4;
  std::uint64_t seed = 11;        // walk seed, mixed with (graph id, center)
  std::uint64_t split_seed = 0;   // global seed for split_nodes
};

/// Depth-k BFS; truncated to max_nodes by (depth, node id).
Subgraph extract_khop_subgraph(const TextAttributedGraph& graph, NodeId v, std::size_t k,
                               std::size_t max_nodes, std::size_t pe_dim = 4);

/// Union of nodes visited by restart walks from v, in first-visit order and
/// capped at max_nodes.
Subgraph sample_rw_subgraph(const TextAttributedGraph& graph, NodeId v, std::size_t walk_len,
                            std::size_t n_walks, double restart_p, std::uint64_t seed,
                            std::size_t max_nodes = 32, std::size_t pe_dim = 4);

/// Dispatches on config.method. Deterministic in (config, graph id, v).
Subgraph sample_subgraph(const TextAttributedGraph& graph, NodeId v, const SamplerConfig& config);

/// Induced subgraph on an ordered node list (first entry is the center).
Subgraph induce_subgraph(const TextAttributedGraph& graph, std::vector<NodeId> node_ids, std::size_t pe_dim);

/// Column t-1 holds diag((D^-1 A)^t) for t = 1..r; isolated nodes get zeros.
Matrix compute_positional_encodings(const Matrix& adjacency, std::size_t r);

/// D~^-1/2 (A + I) D~^-1/2.
Matrix normalize_adjacency(const Matrix& adjacency);

}  // namespace gfmx

#endif  // GFMX_TAG_HPP
