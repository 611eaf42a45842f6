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

#ifndef GFMX_RNG_HPP
#define GFMX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace gfmx {

/// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: draw i is mix64(key + (i + 1) * golden), i.e.
/// SplitMix64 addressed by position. Streams are split by hashing a label
/// into a fresh key, so sub-streams do not depend on how many values the
/// parent has produced. Distributions are implemented here rather than with
/// <random> so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), key_(mix64(seed ^ 0x6A09E667F3BCC908ULL)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  /// Standard normal via Box-Muller (one value per two uniforms).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent sub-stream identified by a label.
  Rng split(std::string_view label) const { return Rng(mix64(seed_ ^ fnv1a64(label))); }
  Rng split(std::uint64_t label) const { return Rng(mix64(seed_ ^ mix64(label + 0x243F6A8885A308D3ULL))); }

  /// Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace gfmx

#endif  // GFMX_RNG_HPP
