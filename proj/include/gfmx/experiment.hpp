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

// Config documents and the desk-scale experiment defaults shared by the CLI
// and the acceptance suite.

#ifndef GFMX_EXPERIMENT_HPP
#define GFMX_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "gfmx/attacks.hpp"
#include "gfmx/encoders.hpp"
#include "gfmx/tag.hpp"
#include "gfmx/text_encoder.hpp"
#include "gfmx/training.hpp"
#include "gfmx/victim_api.hpp"

namespace gfmx {

nlohmann::json corpus_config_to_json(const CorpusConfig& config);
/// Missing fields take defaults; the result is validated.
CorpusConfig corpus_config_from_json(const nlohmann::json& j);

nlohmann::json sampler_config_to_json(const SamplerConfig& config);
SamplerConfig sampler_config_from_json(const nlohmann::json& j);

nlohmann::json text_encoder_spec_to_json(const TextEncoderSpec& spec);
TextEncoderSpec text_encoder_spec_from_json(const nlohmann::json& j);

/// Everything needed to pretrain a victim.
struct VictimSetup {
  TextEncoderSpec text;
  SamplerConfig sampler;
  EncoderConfig encoder = default_victim_config();
  TrainConfig train;

  nlohmann::json to_json() const;
  static VictimSetup from_json(const nlohmann::json& j);
};

/// Desk-scale victim: default architecture, learning rate and epochs raised so
/// a few hundred centers per graph suffice.
VictimSetup desk_victim_setup();

/// Desk-scale scenario of the given kind against the default corpus.
ScenarioConfig desk_scenario(ScenarioKind kind, std::uint64_t seed = 1);

/// Desk-scale epoch schedule used by desk_scenario.
std::size_t desk_epochs(ScenarioKind kind, std::optional<std::size_t> budget);

/// Single-domain corpus with sources large enough for B = 1000 mixed
/// sampling (0.3/0.3/0.4 over three graphs).
CorpusConfig budget_corpus_config();

struct ExperimentSpec {
  CorpusConfig corpus = default_corpus_config();
  VictimSetup victim = desk_victim_setup();
  std::vector<ScenarioConfig> scenarios;
  DefenseConfig defense;
  std::filesystem::path output_dir = "runs";
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
  static ExperimentSpec from_json(const nlohmann::json& j);
};

ExperimentSpec desk_experiment_spec();

/// Generates the corpus and embeds every node text.
Corpus build_corpus(const CorpusConfig& config, const FrozenTextEncoder& text_encoder);
/// Embeds every node text of a corpus read from disk.
void attach_corpus_features(Corpus& corpus, const FrozenTextEncoder& text_encoder);

}  // namespace gfmx

#endif  // GFMX_EXPERIMENT_HPP
