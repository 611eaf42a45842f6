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

#include "gfmx/encoders.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gfmx/rng.hpp"

namespace gfmx {

static_assert(std::endian::native == std::endian::little, "checkpoint blobs assume a little-endian host");

using nlohmann::json;

const char* to_string(EncoderFamily f) { return f == EncoderFamily::kGcn ? "gcn" : "gat"; }

EncoderFamily encoder_family_from_string(const std::string& s) {
  if (s == "gcn") return EncoderFamily::kGcn;
  if (s == "gat") return EncoderFamily::kGat;
  throw Error(ErrorKind::kConfig, "family: unknown encoder family \"" + s + "\"");
}

void EncoderConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorKind::kConfig, m); };
  if (layers < 1) fail("layers: must be >= 1");
  if (input_dim < 1 || output_dim < 1) fail("input_dim/output_dim: must be >= 1");
  if (layers > 1 && hidden_dim < 1) fail("hidden_dim: must be >= 1");
  if (family == EncoderFamily::kGat) {
    if (heads < 1) fail("heads: must be >= 1");
    if (output_dim % heads != 0 || (layers > 1 && hidden_dim % heads != 0))
      fail("heads: hidden_dim and output_dim must be divisible by heads");
  }
}

json EncoderConfig::to_json() const {
  json j;
  j["family"] = to_string(family);
  j["layers"] = layers;
  j["hidden_dim"] = hidden_dim;
  j["heads"] = heads;
  j["input_dim"] = input_dim;
  j["output_dim"] = output_dim;
  j["init_seed"] = init_seed;
  j["readout"] = readout == Readout::kMeanAll ? "mean" : "center";
  j["bias"] = bias;
  return j;
}

EncoderConfig EncoderConfig::from_json(const json& j) {
  EncoderConfig c;
  c.family = encoder_family_from_string(j.value("family", std::string("gcn")));
  c.layers = j.value("layers", c.layers);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.heads = j.value("heads", c.heads);
  c.input_dim = j.value("input_dim", c.input_dim);
  c.output_dim = j.value("output_dim", c.output_dim);
  c.init_seed = j.value("init_seed", c.init_seed);
  const std::string readout = j.value("readout", std::string("mean"));
  if (readout != "mean" && readout != "center") throw Error(ErrorKind::kConfig, "readout: expected mean or center");
  c.readout = readout == "mean" ? Readout::kMeanAll : Readout::kCenter;
  c.bias = j.value("bias", c.bias);
  c.validate();
  return c;
}

EncoderConfig default_victim_config(std::size_t input_dim, std::size_t output_dim) {
  EncoderConfig c;
  c.family = EncoderFamily::kGat;
  c.layers = 3;
  c.hidden_dim = 64;
  c.heads = 2;
  c.input_dim = input_dim;
  c.output_dim = output_dim;
  c.init_seed = 101;
  return c;
}

EncoderConfig default_attacker_config(EncoderFamily family, std::size_t input_dim, std::size_t output_dim) {
  EncoderConfig c;
  c.family = family;
  c.layers = 2;
  c.hidden_dim = 24;
  c.heads = 1;
  c.input_dim = input_dim;
  c.output_dim = output_dim;
  c.init_seed = 202;
  return c;
}

// ---------------------------------------------------------------- layers

Var gcn_layer_forward(Var a_norm, Var h, Var w, bool last) {
  Var out = ops::matmul(a_norm, ops::matmul(h, w));
  return last ? out : ops::relu(out);
}

Var gat_head_forward(const Matrix& mask, Var h, Var w, Var attention, bool last) {
  Tape& tape = *h.tape();
  const std::size_t n = h.rows();
  const std::size_t out_dim = w.cols();
  if (attention.rows() != 2 * out_dim || attention.cols() != 1)
    throw Error(ErrorKind::kDimension, "attention vector must be " + std::to_string(2 * out_dim) + "x1");
  Var wh = ops::matmul(h, w);
  std::vector<std::size_t> src_rows(out_dim), dst_rows(out_dim);
  for (std::size_t i = 0; i < out_dim; ++i) {
    src_rows[i] = i;
    dst_rows[i] = out_dim + i;
  }
  Var f_src = ops::matmul(wh, ops::gather_rows(attention, src_rows));  // n x 1
  Var f_dst = ops::matmul(wh, ops::gather_rows(attention, dst_rows));  // n x 1
  Var ones_row = tape.constant(Matrix(1, n, 1.0));
  Var ones_col = tape.constant(Matrix(n, 1, 1.0));
  // scores(v, u) = f_src(v) + f_dst(u)
  Var scores = ops::add(ops::matmul(f_src, ones_row), ops::matmul(ones_col, ops::transpose(f_dst)));
  Var alpha = ops::masked_softmax_rows(ops::leaky_relu(scores, 0.2), mask);
  Var out = ops::matmul(alpha, wh);
  return last ? out : ops::relu(out);
}

// ---------------------------------------------------------------- encoder

namespace {

struct LayerShape {
  std::size_t in, out;
};

std::vector<LayerShape> layer_shapes(const EncoderConfig& c) {
  std::vector<LayerShape> shapes;
  for (std::size_t l = 0; l < c.layers; ++l)
    shapes.push_back({l == 0 ? c.input_dim : c.hidden_dim, l + 1 == c.layers ? c.output_dim : c.hidden_dim});
  return shapes;
}

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (auto& v : m.data()) v = rng.uniform(-a, a);
  return m;
}

}  // namespace

Encoder::Encoder(EncoderConfig config) : config_(config) {
  config_.validate();
  Rng rng = Rng(config_.init_seed).split("encoder-init");
  for (const auto& [in, out] : layer_shapes(config_)) {
    if (config_.family == EncoderFamily::kGcn) {
      params_.push_back(glorot(in, out, rng));
    } else {
      const std::size_t per_head = out / config_.heads;
      for (std::size_t h = 0; h < config_.heads; ++h) {
        params_.push_back(glorot(in, per_head, rng));
        params_.push_back(glorot(2 * per_head, 1, rng));
      }
    }
    if (config_.bias) params_.emplace_back(1, out, 0.0);
  }
}

std::vector<std::string> Encoder::parameter_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const std::string p = "layer" + std::to_string(l);
    if (config_.family == EncoderFamily::kGcn) {
      names.push_back(p + ".weight");
    } else {
      for (std::size_t h = 0; h < config_.heads; ++h) {
        names.push_back(p + ".head" + std::to_string(h) + ".weight");
        names.push_back(p + ".head" + std::to_string(h) + ".attention");
      }
    }
    if (config_.bias) names.push_back(p + ".bias");
  }
  return names;
}

Var Encoder::forward(Tape& tape, std::span<const Var> params, const Subgraph& sub) const {
  if (params.size() != params_.size())
    throw Error(ErrorKind::kContract, "expected " + std::to_string(params_.size()) + " parameter vars");
  if (sub.size() == 0) throw Error(ErrorKind::kContract, "empty subgraph");
  const Matrix input = encoder_input(sub);
  if (input.cols() != config_.input_dim)
    throw Error(ErrorKind::kDimension, "subgraph input width " + std::to_string(input.cols()) + " != encoder input_dim " +
                                           std::to_string(config_.input_dim));
  const std::size_t n = sub.size();
  Var h = tape.constant(input);
  Var a_norm;
  Matrix mask;
  if (config_.family == EncoderFamily::kGcn) {
    a_norm = tape.constant(normalize_adjacency(sub.adjacency));
  } else {
    mask = sub.adjacency;
    for (std::size_t i = 0; i < n; ++i) mask(i, i) = 1.0;
  }
  std::size_t p = 0;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const bool last = l + 1 == config_.layers;
    // Bias, when enabled, goes in before the nonlinearity, so layers are
    // built linear and activated here.
    Var out;
    if (config_.family == EncoderFamily::kGcn) {
      out = gcn_layer_forward(a_norm, h, params[p++], true);
    } else {
      for (std::size_t head = 0; head < config_.heads; ++head) {
        Var head_out = gat_head_forward(mask, h, params[p], params[p + 1], true);
        p += 2;
        out = head == 0 ? head_out : ops::concat_cols(out, head_out);
      }
    }
    if (config_.bias) out = ops::add(out, ops::matmul(tape.constant(Matrix(n, 1, 1.0)), params[p++]));
    h = last ? out : ops::relu(out);
  }
  Var pooled;
  if (config_.readout == Readout::kMeanAll) {
    pooled = ops::mean_rows(h);
  } else {
    const std::size_t c = sub.center_index();
    pooled = ops::gather_rows(h, std::span<const std::size_t>(&c, 1));
  }
  try {
    return ops::l2_normalize_rows(pooled);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kDegenerateInput)
      throw Error(ErrorKind::kDegenerateInput, "degenerate embedding: pooled representation is the zero vector");
    throw;
  }
}

std::vector<double> Encoder::encode(const Subgraph& sub) const {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(params_.size());
  for (const auto& p : params_) vars.push_back(tape.constant(p));
  return forward(tape, vars, sub).value().row_vector(0);
}

std::uint64_t Encoder::parameter_hash() const {
  std::uint64_t h = 14695981039346656037ULL;
  for (const auto& p : params_)
    for (double v : p.data()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  return h;
}

std::string hex64(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

std::string Encoder::parameter_hash_hex() const { return hex64(parameter_hash()); }

std::size_t count_parameters(const EncoderConfig& config) {
  config.validate();
  std::size_t total = 0;
  for (const auto& [in, out] : layer_shapes(config)) {
    total += in * out;
    if (config.family == EncoderFamily::kGat) total += 2 * out;  // heads * 2 * (out / heads)
    if (config.bias) total += out;
  }
  return total;
}

std::size_t count_parameters(const Encoder& encoder) {
  std::size_t total = 0;
  for (const auto& p : encoder.parameters()) total += p.size();
  return total;
}

std::vector<double> encode_subgraph(const Encoder& encoder, const Subgraph& sub) { return encoder.encode(sub); }

// ---------------------------------------------------------------- checkpoints

std::string checkpoint_bytes(const Encoder& encoder, const json& extra) {
  json header;
  header["format"] = "gfmx-encoder-v1";
  header["config"] = encoder.config().to_json();
  header["param_count"] = count_parameters(encoder);
  header["param_hash"] = encoder.parameter_hash_hex();
  header["extra"] = extra;
  std::string out = header.dump() + "\n";
  for (const auto& p : encoder.parameters())
    out.append(reinterpret_cast<const char*>(p.data().data()), p.size() * sizeof(double));
  return out;
}

LoadedCheckpoint checkpoint_from_bytes(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw Error(ErrorKind::kIo, "checkpoint header missing");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIo, std::string("checkpoint header: ") + e.what());
  }
  if (header.value("format", std::string()) != "gfmx-encoder-v1") throw Error(ErrorKind::kIo, "unknown checkpoint format");
  Encoder enc(EncoderConfig::from_json(header.at("config")));
  const std::size_t blob = bytes.size() - nl - 1;
  if (blob != count_parameters(enc) * sizeof(double))
    throw Error(ErrorKind::kIo, "checkpoint blob has " + std::to_string(blob) + " bytes, expected " +
                                    std::to_string(count_parameters(enc) * sizeof(double)));
  const char* src = bytes.data() + nl + 1;
  for (auto& p : enc.parameters()) {
    std::memcpy(p.data().data(), src, p.size() * sizeof(double));
    src += p.size() * sizeof(double);
  }
  if (header.contains("param_hash") && header["param_hash"] != enc.parameter_hash_hex())
    throw Error(ErrorKind::kIo, "checkpoint parameter hash mismatch");
  return {std::move(enc), header.value("extra", json::object())};
}

void save_checkpoint(const std::filesystem::path& path, const Encoder& encoder, const json& extra) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << checkpoint_bytes(encoder, extra);
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kMissingData, "cannot read checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_bytes(ss.str());
}

}  // namespace gfmx
