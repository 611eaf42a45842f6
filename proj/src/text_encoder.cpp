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

#include "gfmx/text_encoder.hpp"

#include <cmath>
#include <cstring>

#include "json.hpp"

#include "gfmx/rng.hpp"

namespace gfmx {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      cur.push_back(static_cast<char>(c));
    } else if (c >= 'A' && c <= 'Z') {
      cur.push_back(static_cast<char>(c - 'A' + 'a'));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

FrozenTextEncoder::FrozenTextEncoder(TextEncoderSpec spec) : spec_(spec) {
  if (spec_.vocab_buckets == 0 || spec_.embed_dim == 0)
    throw Error(ErrorKind::kConfig, "text encoder needs vocab_buckets > 0 and embed_dim > 0");
  projection_ = Matrix(spec_.vocab_buckets, spec_.embed_dim);
  Rng rng = Rng(spec_.seed).split("text-projection");
  for (auto& v : projection_.data()) v = rng.normal();
}

std::size_t FrozenTextEncoder::bucket(std::string_view token) const {
  return static_cast<std::size_t>(fnv1a64(token) % spec_.vocab_buckets);
}

std::vector<double> FrozenTextEncoder::embed_text(std::string_view text) const {
  const auto tokens = tokenize(text);
  if (tokens.empty()) throw Error(ErrorKind::kEmptyText, "no tokens in \"" + std::string(text) + "\"");
  std::vector<double> out(spec_.embed_dim, 0.0);
  for (const auto& tok : tokens) {
    const auto row = projection_.row_span(bucket(tok));
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[c];
  }
  double norm = 0.0;
  for (double v : out) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 1e-12)) throw Error(ErrorKind::kDegenerateInput, "text embedding has zero norm");
  for (auto& v : out) v /= norm;
  return out;
}

Matrix FrozenTextEncoder::embed_labels(std::span<const std::string> sentences) const {
  if (sentences.size() < 2) throw Error(ErrorKind::kContract, "need at least 2 label sentences");
  return embed_all(sentences);
}

Matrix FrozenTextEncoder::embed_all(std::span<const std::string> texts) const {
  Matrix out(texts.size(), spec_.embed_dim);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const auto e = embed_text(texts[i]);
    std::copy(e.begin(), e.end(), out.row_span(i).begin());
  }
  return out;
}

std::uint64_t FrozenTextEncoder::fingerprint() const {
  const auto data = projection_.data();
  return fnv1a64(std::string_view(reinterpret_cast<const char*>(data.data()), data.size() * sizeof(double)));
}

std::string FrozenTextEncoder::to_json() const {
  nlohmann::json j;
  j["seed"] = spec_.seed;
  j["vocab_buckets"] = spec_.vocab_buckets;
  j["embed_dim"] = spec_.embed_dim;
  j["hash"] = "fnv1a64";
  j["tokenizer"] = "lower+split";
  return j.dump();
}

FrozenTextEncoder FrozenTextEncoder::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  if (j.value("hash", "fnv1a64") != "fnv1a64" || j.value("tokenizer", "lower+split") != "lower+split")
    throw Error(ErrorKind::kConfig, "unsupported text encoder hash/tokenizer");
  TextEncoderSpec spec;
  spec.seed = j.value("seed", spec.seed);
  spec.vocab_buckets = j.value("vocab_buckets", spec.vocab_buckets);
  spec.embed_dim = j.value("embed_dim", spec.embed_dim);
  return FrozenTextEncoder(spec);
}

}  // namespace gfmx
