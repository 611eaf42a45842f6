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

#ifndef GFMX_TRAINING_HPP
#define GFMX_TRAINING_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/encoders.hpp"
#include "gfmx/tag.hpp"
#include "gfmx/tensor.hpp"
#include "gfmx/text_encoder.hpp"
#include "gfmx/victim_api.hpp"

namespace gfmx {

struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  std::size_t batch_size = 32;
  std::size_t epochs = 2;
  double temperature = 0.07;
  double lambda_mse = 1.0;
  double lambda_contrast = 0.0;
  std::uint64_t seed = 1;
  /// Attacker side: re-normalize returned embeddings before regression.
  bool normalize_targets = true;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
  static TrainConfig from_json(const nlohmann::json& j, TrainConfig defaults);
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double wall_seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::string final_hash;
  double total_seconds = 0.0;

  /// epoch,mean_loss,wall_seconds
  std::string to_csv(bool include_wall = true) const;
};

// ---------------------------------------------------------------- losses

/// -(1/N) sum_i log softmax_j(<g_i, z_j> / tau)[i], graph -> text only.
/// Rows must be unit norm within 1e-6.
Var contrastive_loss(Var graph_embs, Var text_embs, double tau);
double contrastive_loss(const Matrix& graph_embs, const Matrix& text_embs, double tau);

/// sum_i ||a_i - b_i||^2; `victim_embs` is treated as a constant.
Var mse_regression_loss(Var attacker_embs, const Matrix& victim_embs);
double mse_regression_loss(const Matrix& attacker_embs, const Matrix& victim_embs);

/// lambda_mse * mse + lambda_contrast * contrastive(attacker, text).
Var combined_loss(Var attacker_embs, const Matrix& victim_embs, const Matrix* text_embs, double tau,
                  double lambda_mse, double lambda_contrast);
double combined_loss(const Matrix& attacker_embs, const Matrix& victim_embs, const Matrix* text_embs, double tau,
                     double lambda_mse, double lambda_contrast);

// ---------------------------------------------------------------- optimizer

struct AdamWConfig {
  double lr = 1e-4;
  double weight_decay = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamWState {
  std::vector<Matrix> m, v;
  std::size_t step = 0;
};

/// Decoupled weight decay then a bias-corrected Adam step. Throws
/// kOptimizer naming the first parameter with a non-finite gradient.
void adamw_step(std::vector<Matrix>& params, std::span<const Matrix> grads, AdamWState& state, const AdamWConfig& config,
                std::span<const std::string> names = {});

// ---------------------------------------------------------------- loops

/// Batch loss over stacked unit embeddings (B x d) for the given item ids.
using BatchLossFn = std::function<Var(Tape&, Var embeddings, std::span<const std::size_t> items)>;
using SubgraphFn = std::function<const Subgraph&(std::size_t item, std::size_t epoch)>;

/// Generic minibatch trainer. Each item's subgraph is encoded on its own
/// tape (in parallel), the batch loss is differentiated on a separate tape,
/// and per-item gradients are summed in item order, so results do not
/// depend on thread count. A trailing batch of size 1 is merged into the
/// previous batch. The logged epoch loss is a per-item mean: batch losses
/// that are sums over items (kSum) are divided by the item count, per-batch
/// means (kMean) are weighted by batch size.
enum class LossReduction { kSum, kMean };
TrainLog train_encoder(Encoder& encoder, std::size_t item_count, const SubgraphFn& subgraph_of,
                       const BatchLossFn& batch_loss, const TrainConfig& config, LossReduction reduction);

struct PretrainData {
  std::vector<const TextAttributedGraph*> graphs;
  std::vector<std::pair<std::size_t, NodeId>> centers;  // (graph index, node)
  Matrix summary_embeddings;                             // one row per center
};

/// Every training-split node of every pretraining graph, with the text
/// embedding of its summary.
PretrainData collect_pretrain_data(const Corpus& corpus, const FrozenTextEncoder& text_encoder,
                                   const SamplerConfig& sampler);

/// Contrastive graph-text pretraining; the text encoder is never updated.
Encoder pretrain_victim(const Corpus& corpus, const FrozenTextEncoder& text_encoder, const EncoderConfig& encoder_config,
                        const TrainConfig& train_config, const SamplerConfig& sampler, TrainLog* log = nullptr);

/// Regression onto returned victim embeddings.
Encoder train_attacker(std::span<const QueryRecord> records, const EncoderConfig& attacker_config,
                       const TrainConfig& train_config, TrainLog* log = nullptr);

}  // namespace gfmx

#endif  // GFMX_TRAINING_HPP
