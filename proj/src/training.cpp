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

#include "gfmx/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

#include "gfmx/kernels.hpp"
#include "gfmx/rng.hpp"

namespace gfmx {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::kConfig, "learning_rate: must be > 0");
  if (!(weight_decay >= 0.0)) throw Error(ErrorKind::kConfig, "weight_decay: must be >= 0");
  if (batch_size < 1) throw Error(ErrorKind::kConfig, "batch_size: must be >= 1");
  if (!(temperature > 0.0)) throw Error(ErrorKind::kConfig, "temperature: must be > 0");
  if (!(lambda_mse >= 0.0) || !(lambda_contrast >= 0.0)) throw Error(ErrorKind::kConfig, "loss_weights: must be >= 0");
}

json TrainConfig::to_json() const {
  json j;
  j["learning_rate"] = learning_rate;
  j["weight_decay"] = weight_decay;
  j["batch_size"] = batch_size;
  j["epochs"] = epochs;
  j["temperature"] = temperature;
  j["lambda_mse"] = lambda_mse;
  j["lambda_contrast"] = lambda_contrast;
  j["seed"] = seed;
  j["normalize_targets"] = normalize_targets;
  return j;
}

TrainConfig TrainConfig::from_json(const json& j) { return from_json(j, TrainConfig{}); }

TrainConfig TrainConfig::from_json(const json& j, TrainConfig c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.epochs = j.value("epochs", c.epochs);
  c.temperature = j.value("temperature", c.temperature);
  c.lambda_mse = j.value("lambda_mse", c.lambda_mse);
  c.lambda_contrast = j.value("lambda_contrast", c.lambda_contrast);
  c.seed = j.value("seed", c.seed);
  c.normalize_targets = j.value("normalize_targets", c.normalize_targets);
  c.validate();
  return c;
}

std::string TrainLog::to_csv(bool include_wall) const {
  std::ostringstream os;
  os << (include_wall ? "epoch,mean_loss,wall_seconds\n" : "epoch,mean_loss\n");
  char buf[96];
  for (const auto& e : epochs) {
    if (include_wall)
      std::snprintf(buf, sizeof buf, "%zu,%.10g,%.6f\n", e.epoch, e.mean_loss, e.wall_seconds);
    else
      std::snprintf(buf, sizeof buf, "%zu,%.10g\n", e.epoch, e.mean_loss);
    os << buf;
  }
  return os.str();
}

// ---------------------------------------------------------------- losses

namespace {

void require_unit_rows(const Matrix& m, const char* what) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double s = 0.0;
    for (double v : m.row_span(r)) s += v * v;
    if (std::abs(std::sqrt(s) - 1.0) > 1e-6)
      throw Error(ErrorKind::kContract, std::string(what) + " row " + std::to_string(r) + " is not unit norm");
  }
}

}  // namespace

Var contrastive_loss(Var graph_embs, Var text_embs, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::kContract, "temperature must be > 0");
  const Matrix& g = graph_embs.value();
  const Matrix& z = text_embs.value();
  if (g.rows() < 1 || !g.same_shape(z))
    throw Error(ErrorKind::kDimension, "contrastive_loss " + g.shape_string() + " vs " + z.shape_string());
  require_unit_rows(g, "graph embedding");
  require_unit_rows(z, "text embedding");
  const std::size_t n = g.rows();
  Tape& tape = *graph_embs.tape();
  Var logits = ops::scale(ops::matmul(graph_embs, ops::transpose(text_embs)), 1.0 / tau);
  Var log_probs = ops::log_softmax_rows(logits);
  Var diag = ops::sum(ops::mul(log_probs, tape.constant(Matrix::identity(n))));
  return ops::scale(diag, -1.0 / static_cast<double>(n));
}

double contrastive_loss(const Matrix& graph_embs, const Matrix& text_embs, double tau) {
  Tape tape;
  return contrastive_loss(tape.constant(graph_embs), tape.constant(text_embs), tau).value()[0];
}

Var mse_regression_loss(Var attacker_embs, const Matrix& victim_embs) {
  if (!attacker_embs.value().same_shape(victim_embs))
    throw Error(ErrorKind::kDimension, "mse_regression_loss " + attacker_embs.value().shape_string() + " vs " +
                                           victim_embs.shape_string());
  Var diff = ops::sub(attacker_embs, attacker_embs.tape()->constant(victim_embs));
  return ops::sum(ops::mul(diff, diff));
}

double mse_regression_loss(const Matrix& attacker_embs, const Matrix& victim_embs) {
  Tape tape;
  return mse_regression_loss(tape.constant(attacker_embs), victim_embs).value()[0];
}

Var combined_loss(Var attacker_embs, const Matrix& victim_embs, const Matrix* text_embs, double tau, double lambda_mse,
                  double lambda_contrast) {
  Var total = ops::scale(mse_regression_loss(attacker_embs, victim_embs), lambda_mse);
  if (lambda_contrast > 0.0) {
    if (!text_embs) throw Error(ErrorKind::kMissingData, "lambda_contrast > 0 requires text embeddings");
    Var c = contrastive_loss(attacker_embs, attacker_embs.tape()->constant(*text_embs), tau);
    total = ops::add(total, ops::scale(c, lambda_contrast));
  }
  return total;
}

double combined_loss(const Matrix& attacker_embs, const Matrix& victim_embs, const Matrix* text_embs, double tau,
                     double lambda_mse, double lambda_contrast) {
  Tape tape;
  return combined_loss(tape.constant(attacker_embs), victim_embs, text_embs, tau, lambda_mse, lambda_contrast).value()[0];
}

// ---------------------------------------------------------------- AdamW

void adamw_step(std::vector<Matrix>& params, std::span<const Matrix> grads, AdamWState& state, const AdamWConfig& cfg,
                std::span<const std::string> names) {
  if (grads.size() != params.size()) throw Error(ErrorKind::kContract, "adamw_step: grads/params count mismatch");
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (!grads[p].same_shape(params[p])) throw Error(ErrorKind::kDimension, "adamw_step: grad shape mismatch");
    if (!grads[p].all_finite()) {
      const std::string name = p < names.size() ? names[p] : "param" + std::to_string(p);
      throw Error(ErrorKind::kOptimizer, "non-finite gradient in " + name);
    }
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.rows(), p.cols());
      state.v.emplace_back(p.rows(), p.cols());
    }
  }
  if (state.m.size() != params.size()) throw Error(ErrorKind::kContract, "adamw_step: state does not match params");
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params[p].data();
    auto g = grads[p].data();
    auto m = state.m[p].data();
    auto v = state.v[p].data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] -= cfg.lr * cfg.weight_decay * w[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

// ---------------------------------------------------------------- loops

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> order, std::size_t batch_size) {
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size)
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  if (batches.size() > 1 && batches.back().size() == 1) {
    batches[batches.size() - 2].push_back(batches.back().front());
    batches.pop_back();
  }
  return batches;
}

}  // namespace

TrainLog train_encoder(Encoder& encoder, std::size_t item_count, const SubgraphFn& subgraph_of,
                       const BatchLossFn& batch_loss, const TrainConfig& config, LossReduction reduction) {
  config.validate();
  if (item_count == 0) throw Error(ErrorKind::kContract, "training needs at least one item");
  TrainLog log;
  const auto start = Clock::now();
  const AdamWConfig opt{config.learning_rate, config.weight_decay};
  AdamWState state;
  const auto names = encoder.parameter_names();
  const std::size_t dim = encoder.config().output_dim;
  const Rng root = Rng(config.seed).split("train-shuffle");

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    std::vector<std::size_t> order(item_count);
    for (std::size_t i = 0; i < item_count; ++i) order[i] = i;
    Rng rng = root.split(static_cast<std::uint64_t>(epoch));
    rng.shuffle(order);
    double loss_total = 0.0;

    for (const auto& batch : make_batches(std::move(order), config.batch_size)) {
      const std::size_t b = batch.size();
      std::vector<std::unique_ptr<Tape>> tapes(b);
      std::vector<std::vector<Var>> param_vars(b);
      std::vector<Var> outputs(b);
      Matrix stacked(b, dim);
      kernels::parallel_for(b, [&](std::size_t i) {
        tapes[i] = std::make_unique<Tape>();
        for (const auto& p : encoder.parameters()) param_vars[i].push_back(tapes[i]->leaf(p, true));
        outputs[i] = encoder.forward(*tapes[i], param_vars[i], subgraph_of(batch[i], epoch));
        const auto row = outputs[i].value().row_span(0);
        std::copy(row.begin(), row.end(), stacked.row_span(i).begin());
      });

      Tape loss_tape;
      Var emb = loss_tape.leaf(stacked, true);
      Var loss = batch_loss(loss_tape, emb, batch);
      loss_tape.backward(loss);
      const Matrix d_emb = emb.grad();
      loss_total += reduction == LossReduction::kSum ? loss.value()[0] : loss.value()[0] * static_cast<double>(b);

      std::vector<std::vector<Matrix>> item_grads(b);
      kernels::parallel_for(b, [&](std::size_t i) {
        tapes[i]->backward(outputs[i], Matrix::row(d_emb.row_span(i)));
        for (const auto& v : param_vars[i]) item_grads[i].push_back(v.grad());
        tapes[i].reset();
      });
      std::vector<Matrix> grads = std::move(item_grads[0]);
      for (std::size_t i = 1; i < b; ++i)
        for (std::size_t p = 0; p < grads.size(); ++p)
          for (std::size_t k = 0; k < grads[p].size(); ++k) grads[p][k] += item_grads[i][p][k];
      adamw_step(encoder.parameters(), grads, state, opt, names);
    }
    const double wall = std::chrono::duration<double>(Clock::now() - epoch_start).count();
    log.epochs.push_back({epoch + 1, loss_total / static_cast<double>(item_count), wall});
  }
  log.total_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  log.final_hash = encoder.parameter_hash_hex();
  return log;
}

PretrainData collect_pretrain_data(const Corpus& corpus, const FrozenTextEncoder& text_encoder,
                                   const SamplerConfig& sampler) {
  PretrainData data;
  data.graphs = corpus.with_role(GraphRole::kPretrain);
  if (data.graphs.empty()) throw Error(ErrorKind::kMissingData, "corpus has no pretraining graphs");
  std::vector<std::string> texts;
  for (std::size_t gi = 0; gi < data.graphs.size(); ++gi) {
    const auto& g = *data.graphs[gi];
    const auto it = corpus.summaries.find(g.graph_id);
    if (it == corpus.summaries.end() || it->second.size() != g.node_count)
      throw Error(ErrorKind::kMissingData, "summaries missing for " + g.graph_id);
    for (NodeId v : split_nodes(g, graph_split_seed(g, sampler.split_seed)).train_ids) {
      data.centers.emplace_back(gi, v);
      texts.push_back(it->second[v]);
    }
  }
  data.summary_embeddings = text_encoder.embed_all(texts);
  return data;
}

Encoder pretrain_victim(const Corpus& corpus, const FrozenTextEncoder& text_encoder, const EncoderConfig& encoder_config,
                        const TrainConfig& train_config, const SamplerConfig& sampler, TrainLog* log) {
  const PretrainData data = collect_pretrain_data(corpus, text_encoder, sampler);
  for (const auto* g : data.graphs)
    if (g->features.size() == 0) throw Error(ErrorKind::kMissingData, g->graph_id + " has no features attached");
  Encoder encoder(encoder_config);

  // Fresh walks every epoch; each epoch's subgraphs are materialized lazily
  // into a per-epoch cache so concurrent items never share state.
  std::vector<Subgraph> cache(data.centers.size());
  std::vector<std::size_t> cached_epoch(data.centers.size(), SIZE_MAX);
  auto subgraph_of = [&](std::size_t item, std::size_t epoch) -> const Subgraph& {
    if (cached_epoch[item] != epoch) {
      SamplerConfig s = sampler;
      s.seed = mix64(sampler.seed + 0x9E3779B97F4A7C15ULL * (epoch + 1));
      const auto& [gi, v] = data.centers[item];
      cache[item] = sample_subgraph(*data.graphs[gi], v, s);
      cached_epoch[item] = epoch;
    }
    return cache[item];
  };
  auto batch_loss = [&](Tape& tape, Var emb, std::span<const std::size_t> items) {
    Matrix text(items.size(), data.summary_embeddings.cols());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto src = data.summary_embeddings.row_span(items[i]);
      std::copy(src.begin(), src.end(), text.row_span(i).begin());
    }
    return contrastive_loss(emb, tape.constant(std::move(text)), train_config.temperature);
  };
  TrainLog l = train_encoder(encoder, data.centers.size(), subgraph_of, batch_loss, train_config, LossReduction::kMean);
  if (log) *log = std::move(l);
  return encoder;
}

Encoder train_attacker(std::span<const QueryRecord> records, const EncoderConfig& attacker_config,
                       const TrainConfig& train_config, TrainLog* log) {
  if (records.empty()) throw Error(ErrorKind::kContract, "train_attacker needs at least one query record");
  const std::size_t dim = attacker_config.output_dim;
  Matrix targets(records.size(), dim);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& e = records[i].embedding;
    if (e.size() != dim)
      throw Error(ErrorKind::kDimension, "returned embedding width " + std::to_string(e.size()) +
                                             " != attacker output_dim " + std::to_string(dim));
    double norm = 0.0;
    for (double v : e) norm += v * v;
    norm = std::sqrt(norm);
    const double s = train_config.normalize_targets && norm > 1e-12 ? 1.0 / norm : 1.0;
    for (std::size_t c = 0; c < dim; ++c) targets(i, c) = e[c] * s;
  }
  Encoder encoder(attacker_config);
  auto subgraph_of = [&](std::size_t item, std::size_t) -> const Subgraph& { return records[item].subgraph; };
  auto batch_loss = [&](Tape&, Var emb, std::span<const std::size_t> items) {
    Matrix t(items.size(), dim);
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto src = targets.row_span(items[i]);
      std::copy(src.begin(), src.end(), t.row_span(i).begin());
    }
    return mse_regression_loss(emb, t);
  };
  TrainLog l = train_encoder(encoder, records.size(), subgraph_of, batch_loss, train_config, LossReduction::kSum);
  if (log) *log = std::move(l);
  return encoder;
}

}  // namespace gfmx
