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

#ifndef GFMX_TEXT_ENCODER_HPP
#define GFMX_TEXT_ENCODER_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gfmx/tensor.hpp"

namespace gfmx {

struct TextEncoderSpec {
  std::uint64_t seed = 7;
  std::size_t vocab_buckets = 4096;
  std::size_t embed_dim = 32;
};

/// Lowercase, then split on anything that is not an ASCII letter or digit.
std::vector<std::string> tokenize(std::string_view text);

/// Frozen hashing bag-of-words encoder: each token is hashed (FNV-1a 64) to
/// one of V buckets, the matching rows of a fixed V x d Gaussian projection
/// are summed, and the sum is L2-normalized.
class FrozenTextEncoder {
 public:
  explicit FrozenTextEncoder(TextEncoderSpec spec = {});

  const TextEncoderSpec& spec() const { return spec_; }
  std::size_t dim() const { return spec_.embed_dim; }
  std::size_t bucket(std::string_view token) const;

  /// Unit-norm embedding; throws kEmptyText when no tokens survive.
  std::vector<double> embed_text(std::string_view text) const;
  /// K x d matrix of label-sentence embeddings (K >= 2).
  Matrix embed_labels(std::span<const std::string> sentences) const;
  /// n x d matrix, one row per text.
  Matrix embed_all(std::span<const std::string> texts) const;

  /// FNV-1a over the projection bytes; constant for the encoder's lifetime.
  std::uint64_t fingerprint() const;

  std::string to_json() const;
  static FrozenTextEncoder from_json(std::string_view json);

 private:
  TextEncoderSpec spec_;
  Matrix projection_;
};

}  // namespace gfmx

#endif  // GFMX_TEXT_ENCODER_HPP
