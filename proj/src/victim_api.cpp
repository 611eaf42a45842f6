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

#include "gfmx/victim_api.hpp"

#include <algorithm>
#include <cmath>

#include "gfmx/kernels.hpp"

namespace gfmx {

using nlohmann::json;

void DefenseConfig::validate(std::size_t dim) const {
  if (!(noise_std >= 0.0)) throw Error(ErrorKind::kConfig, "noise_std: must be >= 0");
  if (truncate_dim && (*truncate_dim < 1 || *truncate_dim > dim))
    throw Error(ErrorKind::kConfig, "truncate_dim: must be in [1, " + std::to_string(dim) + "]");
  if (quantize_bits && (*quantize_bits < 1 || *quantize_bits > 30))
    throw Error(ErrorKind::kConfig, "quantize_bits: must be in [1, 30]");
  if (truncate_dim && quantize_bits)
    throw Error(ErrorKind::kConfig, "truncate_dim and quantize_bits cannot both be set");
  if (rate_limit && *rate_limit < 1) throw Error(ErrorKind::kConfig, "rate_limit: must be >= 1");
}

json DefenseConfig::to_json() const {
  json j;
  j["noise_std"] = noise_std;
  j["truncate_dim"] = truncate_dim ? json(*truncate_dim) : json(nullptr);
  j["quantize_bits"] = quantize_bits ? json(*quantize_bits) : json(nullptr);
  j["rate_limit"] = rate_limit ? json(*rate_limit) : json(nullptr);
  j["seed"] = seed;
  return j;
}

DefenseConfig DefenseConfig::from_json(const json& j) {
  DefenseConfig d;
  d.noise_std = j.value("noise_std", 0.0);
  if (j.contains("truncate_dim") && !j["truncate_dim"].is_null()) d.truncate_dim = j["truncate_dim"].get<std::size_t>();
  if (j.contains("quantize_bits") && !j["quantize_bits"].is_null()) d.quantize_bits = j["quantize_bits"].get<unsigned>();
  if (j.contains("rate_limit") && !j["rate_limit"].is_null()) d.rate_limit = j["rate_limit"].get<std::size_t>();
  d.seed = j.value("seed", d.seed);
  return d;
}

Matrix random_orthonormal_basis(std::size_t dim, std::uint64_t seed) {
  Rng rng = Rng(seed).split("defense-basis");
  Matrix q(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (;;) {
      auto row = q.row_span(i);
      for (auto& v : row) v = rng.normal();
      // Modified Gram-Schmidt, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < i; ++j) {
          double dot = 0.0;
          for (std::size_t c = 0; c < dim; ++c) dot += row[c] * q(j, c);
          for (std::size_t c = 0; c < dim; ++c) row[c] -= dot * q(j, c);
        }
      double norm = 0.0;
      for (double v : row) norm += v * v;
      norm = std::sqrt(norm);
      if (norm > 1e-8) {
        for (auto& v : row) v /= norm;
        break;
      }
    }
  }
  return q;
}

std::vector<double> apply_defense(std::span<const double> embedding, const DefenseConfig& defense, Rng& rng,
                                  const Matrix* basis) {
  std::vector<double> out(embedding.begin(), embedding.end());
  const std::size_t d = out.size();
  if (defense.truncate_dim) {
    Matrix local;
    if (!basis) {
      local = random_orthonormal_basis(d, defense.seed);
      basis = &local;
    }
    std::vector<double> proj(d, 0.0);
    for (std::size_t i = 0; i < *defense.truncate_dim; ++i) {
      double coef = 0.0;
      for (std::size_t c = 0; c < d; ++c) coef += (*basis)(i, c) * out[c];
      for (std::size_t c = 0; c < d; ++c) proj[c] += coef * (*basis)(i, c);
    }
    double norm = 0.0;
    for (double v : proj) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 1e-12)
      for (auto& v : proj) v /= norm;
    out = std::move(proj);
  }
  if (defense.quantize_bits) {
    const double levels = std::ldexp(1.0, static_cast<int>(*defense.quantize_bits));
    const double width = 2.0 / levels;
    for (auto& v : out) {
      double idx = std::floor((std::clamp(v, -1.0, 1.0) + 1.0) / width);
      idx = std::clamp(idx, 0.0, levels - 1.0);
      v = -1.0 + (idx + 0.5) * width;
    }
  }
  if (defense.noise_std > 0.0)
    for (auto& v : out) v += defense.noise_std * rng.normal();
  return out;
}

VictimHandle::VictimHandle(Encoder victim, std::optional<std::size_t> budget, DefenseConfig defense)
    : victim_(std::move(victim)), budget_(budget), defense_(defense) {
  defense_.validate(victim_.config().output_dim);
  if (defense_.truncate_dim) basis_ = random_orthonormal_basis(victim_.config().output_dim, defense_.seed);
}

std::size_t VictimHandle::spent() const {
  std::lock_guard lock(mu_);
  return spent_;
}

void VictimHandle::new_session() {
  std::lock_guard lock(mu_);
  session_spent_ = 0;
}

void VictimHandle::reserve(std::size_t count) {
  if (budget_ && spent_ + count > *budget_)
    throw Error(ErrorKind::kBudget, "query budget " + std::to_string(*budget_) + " exhausted (spent " +
                                        std::to_string(spent_) + ", requested " + std::to_string(count) + ")");
  if (defense_.rate_limit && session_spent_ + count > *defense_.rate_limit)
    throw Error(ErrorKind::kThrottle, "session limit " + std::to_string(*defense_.rate_limit) + " reached (session spent " +
                                          std::to_string(session_spent_) + ")");
}

std::vector<double> VictimHandle::defend(std::span<const double> clean, std::size_t query_index) const {
  if (!defense_.active()) return {clean.begin(), clean.end()};
  // Noise stream addressed by query index: identical regardless of thread
  // interleaving.
  Rng rng = Rng(defense_.seed).split(static_cast<std::uint64_t>(query_index));
  return apply_defense(clean, defense_, rng, defense_.truncate_dim ? &basis_ : nullptr);
}

QueryRecord VictimHandle::query(const Subgraph& subgraph, const std::string& graph_id) {
  std::vector<Subgraph> one{subgraph};
  return std::move(query_batch(std::move(one), {graph_id}).front());
}

std::vector<QueryRecord> VictimHandle::query_batch(std::vector<Subgraph> subgraphs, const std::vector<std::string>& graph_ids) {
  if (graph_ids.size() != subgraphs.size())
    throw Error(ErrorKind::kContract, "query_batch: graph_ids and subgraphs differ in length");
  std::size_t first_index = 0;
  {
    std::lock_guard lock(mu_);
    reserve(subgraphs.size());
    first_index = spent_;
    spent_ += subgraphs.size();
    session_spent_ += subgraphs.size();
  }
  std::vector<QueryRecord> records(subgraphs.size());
  try {
    kernels::parallel_for(subgraphs.size(), [&](std::size_t i) {
      QueryRecord& r = records[i];
      r.query_index = first_index + i;
      r.graph_id = graph_ids[i];
      r.embedding = defend(victim_.encode(subgraphs[i]), r.query_index);
      r.subgraph = std::move(subgraphs[i]);
    });
  } catch (...) {
    // Failed encodings are not charged.
    std::lock_guard lock(mu_);
    spent_ -= records.size();
    session_spent_ -= records.size();
    throw;
  }
  std::lock_guard lock(mu_);
  for (const auto& r : records) {
    json line;
    line["query_index"] = r.query_index;
    line["graph_id"] = r.graph_id;
    line["center"] = r.subgraph.center;
    line["node_count"] = r.subgraph.size();
    line["embedding"] = r.embedding;
    transcript_.push_back(line.dump());
  }
  return records;
}

}  // namespace gfmx
