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

// Zero-shot node classification, accuracy/fidelity, and the per-node
// verifier for the surrogate/victim alignment bound
//
//   delta = <a, Z_ca> - <a, Z_cv>  <  3 * kappa * eps,
//   kappa = ||Z_ca - Z_cv||,  eps = max(||b - b~||, ||a - a~||, ||a~ - b~||)
//
// where a/b are attacker/victim embeddings of a test node and a~/b~ those
// of its nearest queried node.

#ifndef GFMX_EVALUATION_HPP
#define GFMX_EVALUATION_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/tag.hpp"
#include "gfmx/tensor.hpp"
#include "gfmx/text_encoder.hpp"

namespace gfmx {

struct ZeroShotResult {
  int cls = 0;
  std::vector<double> similarities;
};

/// argmax_k <embedding, Z_k>, lowest index on ties.
ZeroShotResult zero_shot_predict(std::span<const double> embedding, const Matrix& label_matrix);

struct PredictionSet {
  std::vector<NodeId> node_ids;
  std::vector<int> predictions;
  Matrix similarities;  // |nodes| x K
};

double accuracy(std::span<const int> predictions, std::span<const int> labels);
double fidelity(std::span<const int> attacker_predictions, std::span<const int> victim_predictions);

struct BoundNode {
  std::size_t nearest_query = 0;
  double leg_victim = 0.0;  // ||b - b~||
  double leg_attack = 0.0;  // ||a - a~||
  double leg_cross = 0.0;   // ||a~ - b~||
  double epsilon = 0.0;
  double kappa = 0.0;
  double delta = 0.0;
  int c_attack = 0;
  int c_victim = 0;
  bool bound_holds = true;
};

/// Bound check for one node at a given epsilon (no nearest-neighbor search).
BoundNode bound_node_check(std::span<const double> a, std::span<const double> b, double epsilon,
                           const Matrix& label_matrix);

struct BoundDiagnostics {
  std::vector<BoundNode> nodes;
  /// Nodes with delta > 0 and delta >= 3 kappa eps_measured. The bound is a
  /// guarantee once eps is measured this way, so any count > 0 is a bug.
  std::size_t violations = 0;
  double fraction_bound_holds = 1.0;
  double max_delta = 0.0;
};

/// Rows are unit embeddings: test nodes under attacker/victim, queried
/// nodes under attacker/victim.
BoundDiagnostics verify_alignment_bound(const Matrix& test_attack, const Matrix& test_victim, const Matrix& query_attack,
                                        const Matrix& query_victim, const Matrix& label_matrix);

struct GraphReport {
  std::string graph_id;
  std::string domain;
  std::size_t n_test = 0;
  std::size_t class_count = 0;
  double attacker_acc = 0.0;
  double victim_acc = 0.0;
  double fidelity = 0.0;
  double majority_rate = 0.0;
  BoundDiagnostics bound;
};

struct ScenarioReport {
  std::string scenario;
  std::string kind;
  std::uint64_t seed = 0;
  std::vector<GraphReport> graphs;
  std::size_t query_count = 0;
  std::size_t attacker_params = 0;
  std::size_t victim_params = 0;
  double attacker_train_seconds = 0.0;
  double victim_train_seconds = 0.0;

  double mean_fidelity() const;
  double mean_attacker_acc() const;
  double mean_victim_acc() const;
  std::size_t bound_violations() const;
  double bound_fraction_holds() const;
  double bound_max_delta() const;

  /// graph_id,attacker_acc,victim_acc,fidelity,n_test,frac_bound_holds,max_delta
  std::string to_csv() const;
  /// Deterministic document (no wall times); per-node bound data when verbose.
  nlohmann::json to_json(bool verbose = false) const;
};

using EmbedFn = std::function<std::vector<double>(const Subgraph&)>;

/// Encodes every subgraph (in parallel) into a row matrix.
Matrix embed_subgraphs(const EmbedFn& fn, std::span<const Subgraph> subgraphs, std::size_t dim);

struct BoundQueries {
  Matrix attack;  // attacker embeddings of the queried subgraphs
  Matrix victim;  // victim embeddings of the same subgraphs
};

/// Zero-shot evaluation of both encoders on each graph's test split against
/// that graph's label sentences; bound diagnostics when queries are given.
ScenarioReport evaluate_pair(const EmbedFn& attacker, const EmbedFn& victim,
                             std::span<const TextAttributedGraph* const> eval_graphs,
                             const FrozenTextEncoder& text_encoder, const SamplerConfig& sampler,
                             const BoundQueries* queries = nullptr);

}  // namespace gfmx

#endif  // GFMX_EVALUATION_HPP
