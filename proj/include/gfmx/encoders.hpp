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

#ifndef GFMX_ENCODERS_HPP
#define GFMX_ENCODERS_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/tag.hpp"
#include "gfmx/tensor.hpp"

namespace gfmx {

enum class EncoderFamily { kGcn, kGat };
enum class Readout { kMeanAll, kCenter };

const char* to_string(EncoderFamily f);
EncoderFamily encoder_family_from_string(const std::string& s);

struct EncoderConfig {
  EncoderFamily family = EncoderFamily::kGcn;
  std::size_t layers = 2;
  std::size_t hidden_dim = 24;
  std::size_t heads = 1;  // GAT only; hidden and output dims must divide evenly
  std::size_t input_dim = 36;
  std::size_t output_dim = 32;
  std::uint64_t init_seed = 1;
  Readout readout = Readout::kMeanAll;
  bool bias = false;

  void validate() const;
  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
};

/// Default victim: 3-layer, 2-head GAT with hidden width 64.
EncoderConfig default_victim_config(std::size_t input_dim = 36, std::size_t output_dim = 32);
/// Default attackers: 2-layer GCN / GAT with hidden width 24.
EncoderConfig default_attacker_config(EncoderFamily family, std::size_t input_dim = 36, std::size_t output_dim = 32);

/// H' = A~ H W, followed by ReLU unless `last`.
Var gcn_layer_forward(Var a_norm, Var h, Var w, bool last);

/// Single-head GAT: e_vu = LeakyReLU(a_src . Wh_v + a_dst . Wh_u) over
/// u in N(v) + {v}, alpha = softmax_u(e), h'_v = sum_u alpha_vu Wh_u, with
/// ReLU unless `last`. `attention` is (2 * out) x 1: [a_src; a_dst].
/// `mask` is A + I.
Var gat_head_forward(const Matrix& mask, Var h, Var w, Var attention, bool last);

class Encoder {
 public:
  explicit Encoder(EncoderConfig config);

  const EncoderConfig& config() const { return config_; }
  std::vector<Matrix>& parameters() { return params_; }
  const std::vector<Matrix>& parameters() const { return params_; }
  std::vector<std::string> parameter_names() const;

  /// Unit-norm 1 x d embedding recorded on `tape`, using `params` (leaf
  /// vars holding this encoder's parameters, in parameters() order).
  Var forward(Tape& tape, std::span<const Var> params, const Subgraph& sub) const;
  /// Inference-only embedding.
  std::vector<double> encode(const Subgraph& sub) const;

  std::uint64_t parameter_hash() const;
  std::string parameter_hash_hex() const;

 private:
  EncoderConfig config_;
  std::vector<Matrix> params_;
};

/// Closed-form scalar parameter count.
std::size_t count_parameters(const EncoderConfig& config);
std::size_t count_parameters(const Encoder& encoder);

/// Same as Encoder::encode, free-function spelling.
std::vector<double> encode_subgraph(const Encoder& encoder, const Subgraph& sub);

// Checkpoint: one line of JSON header, '\n', then the parameters as a flat
// little-endian f64 blob in parameters() order.
std::string checkpoint_bytes(const Encoder& encoder, const nlohmann::json& extra = nlohmann::json::object());
struct LoadedCheckpoint {
  Encoder encoder;
  nlohmann::json extra;
};
LoadedCheckpoint checkpoint_from_bytes(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const Encoder& encoder,
                     const nlohmann::json& extra = nlohmann::json::object());
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

std::string hex64(std::uint64_t v);

}  // namespace gfmx

#endif  // GFMX_ENCODERS_HPP
