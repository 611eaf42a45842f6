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

// Black-box access to a deployed graph encoder: subgraph in, embedding out,
// with query budgets, per-session rate limits and output-side defenses.

#ifndef GFMX_VICTIM_API_HPP
#define GFMX_VICTIM_API_HPP

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/encoders.hpp"
#include "gfmx/rng.hpp"
#include "gfmx/tag.hpp"

namespace gfmx {

struct DefenseConfig {
  double noise_std = 0.0;
  /// Project onto the span of the first t vectors of a fixed random
  /// orthonormal basis (expressed in the original coordinates), then
  /// re-normalize.
  std::optional<std::size_t> truncate_dim;
  /// Uniform symmetric quantization of each coordinate over [-1, 1].
  std::optional<unsigned> quantize_bits;
  /// Max successful queries per session.
  std::optional<std::size_t> rate_limit;
  std::uint64_t seed = 99;

  bool active() const { return noise_std > 0.0 || truncate_dim || quantize_bits; }
  void validate(std::size_t dim) const;
  nlohmann::json to_json() const;
  static DefenseConfig from_json(const nlohmann::json& j);
};

struct QueryRecord {
  std::string graph_id;
  Subgraph subgraph;
  std::vector<double> embedding;
  std::size_t query_index = 0;
};

/// d x d orthonormal basis (rows) from Gram-Schmidt on Gaussian draws.
Matrix random_orthonormal_basis(std::size_t dim, std::uint64_t seed);

/// truncate/project -> quantize -> add N(0, sigma^2) noise. The result is
/// not re-normalized after noise.
std::vector<double> apply_defense(std::span<const double> embedding, const DefenseConfig& defense, Rng& rng,
                                  const Matrix* basis = nullptr);

class VictimHandle {
 public:
  VictimHandle(Encoder victim, std::optional<std::size_t> budget = std::nullopt, DefenseConfig defense = {});

  VictimHandle(const VictimHandle&) = delete;
  VictimHandle& operator=(const VictimHandle&) = delete;

  /// Throws kBudget when the budget is spent and kThrottle when the session
  /// rate limit is reached; neither changes the counters.
  QueryRecord query(const Subgraph& subgraph, const std::string& graph_id = {});
  /// All-or-nothing: fails before encoding anything if the batch does not
  /// fit. Encoding runs in parallel; records come back in input order.
  std::vector<QueryRecord> query_batch(std::vector<Subgraph> subgraphs, const std::vector<std::string>& graph_ids);

  std::size_t spent() const;
  std::optional<std::size_t> budget() const { return budget_; }
  std::size_t output_dim() const { return victim_.config().output_dim; }
  std::size_t input_dim() const { return victim_.config().input_dim; }
  const DefenseConfig& defense() const { return defense_; }
  void new_session();

  /// Parameter count, published as model-card metadata.
  std::size_t parameter_count() const { return count_parameters(victim_); }

  /// Line-delimited JSON, one object per successful query.
  const std::vector<std::string>& transcript() const { return transcript_; }

 private:
  std::vector<double> defend(std::span<const double> clean, std::size_t query_index) const;
  void reserve(std::size_t count);

  Encoder victim_;
  std::optional<std::size_t> budget_;
  DefenseConfig defense_;
  Matrix basis_;
  mutable std::mutex mu_;
  std::size_t spent_ = 0;
  std::size_t session_spent_ = 0;
  std::vector<std::string> transcript_;
};

}  // namespace gfmx

#endif  // GFMX_VICTIM_API_HPP
