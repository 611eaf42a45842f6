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

#include "gfmx/experiment.hpp"

#include "gfmx/kernels.hpp"

namespace gfmx {

using nlohmann::json;

namespace {

// Field access that reports the path of a mistyped value.
template <typename T>
T field(const json& j, const char* key, const T& fallback, const std::string& path) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::kConfig, path + key + ": wrong type");
  }
}

}  // namespace

json corpus_config_to_json(const CorpusConfig& c) {
  json domains = json::array();
  for (const auto& d : c.domains) {
    json graphs = json::array();
    for (const auto& g : d.graphs)
      graphs.push_back({{"role", to_string(g.role)},
                        {"node_count", g.node_count},
                        {"edge_density", g.edge_density},
                        {"homophily", g.homophily},
                        {"feature_noise", g.feature_noise}});
    domains.push_back({{"name", d.name}, {"class_count", d.class_count}, {"topic_vocab", d.topic_vocab}, {"graphs", graphs}});
  }
  return {{"seed", c.seed},
          {"topic_words_per_node", c.topic_words_per_node},
          {"noise_tokens_per_node", c.noise_tokens_per_node},
          {"noise_vocab", c.noise_vocab},
          {"domains", domains}};
}

CorpusConfig corpus_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "corpus config must be a JSON object");
  CorpusConfig c;
  c.seed = field(j, "seed", c.seed, "");
  c.topic_words_per_node = field(j, "topic_words_per_node", c.topic_words_per_node, "");
  c.noise_tokens_per_node = field(j, "noise_tokens_per_node", c.noise_tokens_per_node, "");
  c.noise_vocab = field(j, "noise_vocab", c.noise_vocab, "");
  if (!j.contains("domains")) {
    c.domains = default_corpus_config().domains;
  } else {
    const auto& ds = j.at("domains");
    if (!ds.is_array()) throw Error(ErrorKind::kConfig, "domains: must be an array");
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::string p = "domains[" + std::to_string(i) + "].";
      DomainSpec d;
      d.name = field(ds[i], "name", std::string(), p);
      d.class_count = field(ds[i], "class_count", d.class_count, p);
      d.topic_vocab = field(ds[i], "topic_vocab", d.topic_vocab, p);
      const json graphs = ds[i].value("graphs", json::array());
      for (std::size_t k = 0; k < graphs.size(); ++k) {
        const std::string gp = p + "graphs[" + std::to_string(k) + "].";
        GraphSpec g;
        try {
          g.role = graph_role_from_string(field(graphs[k], "role", std::string("pretrain"), gp));
        } catch (const Error&) {
          throw Error(ErrorKind::kConfig, gp + "role: must be pretrain, eval or extra");
        }
        g.node_count = field(graphs[k], "node_count", g.node_count, gp);
        g.edge_density = field(graphs[k], "edge_density", g.edge_density, gp);
        g.homophily = field(graphs[k], "homophily", g.homophily, gp);
        g.feature_noise = field(graphs[k], "feature_noise", g.feature_noise, gp);
        d.graphs.push_back(g);
      }
      c.domains.push_back(std::move(d));
    }
  }
  c.validate();
  return c;
}

json sampler_config_to_json(const SamplerConfig& s) {
  return {{"method", s.method == SamplerMethod::kKHop ? "khop" : "random_walk"},
          {"k", s.k},
          {"max_nodes", s.max_nodes},
          {"walk_len", s.walk_len},
          {"n_walks", s.n_walks},
          {"restart_p", s.restart_p},
          {"pe_dim", s.pe_dim},
          {"seed", s.seed},
          {"split_seed", s.split_seed}};
}

SamplerConfig sampler_config_from_json(const json& j) {
  SamplerConfig s;
  const std::string method = field(j, "method", std::string("random_walk"), "sampler.");
  if (method == "khop") s.method = SamplerMethod::kKHop;
  else if (method != "random_walk") throw Error(ErrorKind::kConfig, "sampler.method: must be khop or random_walk");
  s.k = field(j, "k", s.k, "sampler.");
  s.max_nodes = field(j, "max_nodes", s.max_nodes, "sampler.");
  s.walk_len = field(j, "walk_len", s.walk_len, "sampler.");
  s.n_walks = field(j, "n_walks", s.n_walks, "sampler.");
  s.restart_p = field(j, "restart_p", s.restart_p, "sampler.");
  s.pe_dim = field(j, "pe_dim", s.pe_dim, "sampler.");
  s.seed = field(j, "seed", s.seed, "sampler.");
  s.split_seed = field(j, "split_seed", s.split_seed, "sampler.");
  if (s.max_nodes < 1) throw Error(ErrorKind::kConfig, "sampler.max_nodes: must be >= 1");
  if (!(s.restart_p >= 0.0 && s.restart_p < 1.0)) throw Error(ErrorKind::kConfig, "sampler.restart_p: must be in [0,1)");
  return s;
}

json text_encoder_spec_to_json(const TextEncoderSpec& t) {
  return {{"seed", t.seed}, {"vocab_buckets", t.vocab_buckets}, {"embed_dim", t.embed_dim}};
}

TextEncoderSpec text_encoder_spec_from_json(const json& j) {
  TextEncoderSpec t;
  t.seed = field(j, "seed", t.seed, "text_encoder.");
  t.vocab_buckets = field(j, "vocab_buckets", t.vocab_buckets, "text_encoder.");
  t.embed_dim = field(j, "embed_dim", t.embed_dim, "text_encoder.");
  if (t.vocab_buckets < 1 || t.embed_dim < 1) throw Error(ErrorKind::kConfig, "text_encoder: dimensions must be >= 1");
  return t;
}

json VictimSetup::to_json() const {
  return {{"text_encoder", text_encoder_spec_to_json(text)},
          {"sampler", sampler_config_to_json(sampler)},
          {"encoder", encoder.to_json()},
          {"train", train.to_json()}};
}

VictimSetup VictimSetup::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "victim config must be a JSON object");
  VictimSetup v = desk_victim_setup();
  if (j.contains("text_encoder")) v.text = text_encoder_spec_from_json(j["text_encoder"]);
  if (j.contains("sampler")) v.sampler = sampler_config_from_json(j["sampler"]);
  if (j.contains("encoder")) v.encoder = EncoderConfig::from_json(j["encoder"]);
  if (j.contains("train")) v.train = TrainConfig::from_json(j["train"], v.train);
  if (v.encoder.input_dim != v.text.embed_dim + v.sampler.pe_dim)
    throw Error(ErrorKind::kConfig, "encoder.input_dim: must equal text_encoder.embed_dim + sampler.pe_dim");
  if (v.encoder.output_dim != v.text.embed_dim)
    throw Error(ErrorKind::kConfig, "encoder.output_dim: must equal text_encoder.embed_dim");
  return v;
}

VictimSetup desk_victim_setup() {
  VictimSetup v;
  v.train.learning_rate = 1e-2;
  v.train.epochs = 30;
  return v;
}

std::size_t desk_epochs(ScenarioKind kind, std::optional<std::size_t> budget) {
  switch (kind) {
    case ScenarioKind::kFullModel: return 10;
    case ScenarioKind::kDomainSpecific: return 30;
    case ScenarioKind::kBudgetConstrained: return default_epochs(kind, budget);
    case ScenarioKind::kGraphSpecific: return 60;
    case ScenarioKind::kSyntheticGraphs: return 60;
    case ScenarioKind::kDataFree: return 60;
  }
  return 10;
}

ScenarioConfig desk_scenario(ScenarioKind kind, std::uint64_t seed) {
  ScenarioConfig c;
  c.kind = kind;
  c.name = to_string(kind);
  c.seed = seed;
  c.train.learning_rate = 1e-2;
  switch (kind) {
    case ScenarioKind::kDomainSpecific: c.target_domain = "academic"; break;
    case ScenarioKind::kBudgetConstrained:
      c.budget = 1000;
      c.query_sources = {"academic-pretrain-0", "academic-pretrain-1", "academic-pretrain-2"};
      c.mix_weights = {0.3, 0.3, 0.4};
      break;
    case ScenarioKind::kGraphSpecific: c.target_graph = "academic-eval-0"; break;
    case ScenarioKind::kSyntheticGraphs:
      c.visibility_fraction = 0.1;
      c.alpha = 0.5;
      break;
    default: break;
  }
  c.train.epochs = desk_epochs(kind, c.budget);
  return c;
}

CorpusConfig budget_corpus_config() {
  CorpusConfig cfg;
  DomainSpec d;
  d.name = "academic";
  for (int i = 0; i < 3; ++i) {
    GraphSpec g;
    g.node_count = 700;  // 420 training centers each
    g.edge_density = 6.0 / 699.0;
    d.graphs.push_back(g);
  }
  for (int i = 0; i < 2; ++i) {
    GraphSpec g;
    g.role = GraphRole::kEval;
    d.graphs.push_back(g);
  }
  cfg.domains.push_back(d);
  return cfg;
}

json ExperimentSpec::to_json() const {
  json scen = json::array();
  for (const auto& s : scenarios) scen.push_back(s.to_json());
  return {{"corpus", corpus_config_to_json(corpus)},
          {"victim", victim.to_json()},
          {"scenarios", scen},
          {"defense", defense.to_json()},
          {"output_dir", output_dir.string()},
          {"seed", seed}};
}

ExperimentSpec ExperimentSpec::from_json(const json& j) {
  ExperimentSpec e;
  if (j.contains("corpus")) e.corpus = corpus_config_from_json(j["corpus"]);
  if (j.contains("victim")) e.victim = VictimSetup::from_json(j["victim"]);
  if (j.contains("scenarios"))
    for (const auto& s : j["scenarios"]) e.scenarios.push_back(ScenarioConfig::from_json(s));
  if (j.contains("defense")) e.defense = DefenseConfig::from_json(j["defense"]);
  e.output_dir = j.value("output_dir", e.output_dir.string());
  e.seed = j.value("seed", e.seed);
  e.defense.validate(e.victim.encoder.output_dim);
  return e;
}

ExperimentSpec desk_experiment_spec() {
  ExperimentSpec e;
  for (auto kind : {ScenarioKind::kFullModel, ScenarioKind::kDomainSpecific, ScenarioKind::kGraphSpecific,
                    ScenarioKind::kSyntheticGraphs, ScenarioKind::kDataFree})
    e.scenarios.push_back(desk_scenario(kind));
  return e;
}

void attach_corpus_features(Corpus& corpus, const FrozenTextEncoder& text_encoder) {
  kernels::parallel_for(corpus.graphs.size(), [&](std::size_t i) { attach_features(corpus.graphs[i], text_encoder); });
}

Corpus build_corpus(const CorpusConfig& config, const FrozenTextEncoder& text_encoder) {
  Corpus corpus = generate_corpus(config);
  attach_corpus_features(corpus, text_encoder);
  return corpus;
}

}  // namespace gfmx
