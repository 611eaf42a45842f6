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

#include "gfmx/tag.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

#include "gfmx/rng.hpp"
#include "gfmx/text_encoder.hpp"

namespace gfmx {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(GraphRole role) {
  switch (role) {
    case GraphRole::kPretrain: return "pretrain";
    case GraphRole::kEval: return "eval";
    case GraphRole::kExtra: return "extra";
  }
  return "?";
}

GraphRole graph_role_from_string(const std::string& s) {
  if (s == "pretrain") return GraphRole::kPretrain;
  if (s == "eval") return GraphRole::kEval;
  if (s == "extra") return GraphRole::kExtra;
  throw Error(ErrorKind::kConfig, "unknown graph role \"" + s + "\"");
}

// ---------------------------------------------------------------- graph

void TextAttributedGraph::finalize() {
  for (auto& [u, v] : edges)
    if (u > v) std::swap(u, v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  neighbors_.assign(node_count, {});
  for (const auto& [u, v] : edges) {
    if (u >= node_count || v >= node_count) throw Error(ErrorKind::kContract, graph_id + ": edge endpoint out of range");
    neighbors_[u].push_back(v);
    neighbors_[v].push_back(u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
  validate();
}

void TextAttributedGraph::validate() const {
  auto fail = [&](const std::string& msg) { throw Error(ErrorKind::kContract, graph_id + ": " + msg); };
  if (texts.size() != node_count) fail("texts length != node_count");
  if (labels.size() != node_count) fail("labels length != node_count");
  if (label_sentences.size() < 2) fail("need at least 2 classes");
  if (neighbors_.size() != node_count) fail("graph not finalized");
  for (const auto& t : texts)
    if (tokenize(t).empty()) fail("node with empty text");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= label_sentences.size()) fail("label out of range");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].first >= edges[i].second) fail("edge not stored as u < v (self-loop?)");
    if (i > 0 && !(edges[i - 1] < edges[i])) fail("edges not sorted/unique");
  }
  if (features.size() != 0 && features.rows() != node_count) fail("features row count != node_count");
}

void attach_features(TextAttributedGraph& graph, const FrozenTextEncoder& encoder) {
  graph.features = encoder.embed_all(graph.texts);
}

double edge_homophily(const TextAttributedGraph& graph) {
  if (graph.edges.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t same = 0;
  for (const auto& [u, v] : graph.edges) same += graph.labels[u] == graph.labels[v];
  return static_cast<double>(same) / static_cast<double>(graph.edges.size());
}

std::size_t Subgraph::center_index() const {
  const auto it = std::find(node_ids.begin(), node_ids.end(), center);
  if (it == node_ids.end()) throw Error(ErrorKind::kContract, "center not in subgraph");
  return static_cast<std::size_t>(it - node_ids.begin());
}

std::size_t Subgraph::edge_count() const {
  std::size_t e = 0;
  for (std::size_t i = 0; i < adjacency.rows(); ++i)
    for (std::size_t j = i + 1; j < adjacency.cols(); ++j) e += adjacency(i, j) != 0.0;
  return e;
}

Matrix encoder_input(const Subgraph& sub) {
  Matrix out(sub.size(), sub.features.cols() + sub.positional.cols());
  for (std::size_t r = 0; r < sub.size(); ++r) {
    auto dst = out.row_span(r);
    std::copy(sub.features.row_span(r).begin(), sub.features.row_span(r).end(), dst.begin());
    std::copy(sub.positional.row_span(r).begin(), sub.positional.row_span(r).end(),
              dst.begin() + static_cast<std::ptrdiff_t>(sub.features.cols()));
  }
  return out;
}

// ---------------------------------------------------------------- corpus

void CorpusConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& msg) {
    throw Error(ErrorKind::kConfig, field + ": " + msg);
  };
  if (domains.empty()) fail("domains", "at least one domain required");
  std::set<std::string> names;
  for (std::size_t d = 0; d < domains.size(); ++d) {
    const auto& dom = domains[d];
    const std::string prefix = "domains[" + std::to_string(d) + "]";
    if (dom.name.empty() || tokenize(dom.name).size() != 1 || tokenize(dom.name)[0] != dom.name)
      fail(prefix + ".name", "must be a single lowercase alphanumeric word");
    if (!names.insert(dom.name).second) fail(prefix + ".name", "duplicate domain \"" + dom.name + "\"");
    if (dom.class_count < 2) fail(prefix + ".class_count", "must be >= 2");
    if (dom.topic_vocab < 1) fail(prefix + ".topic_vocab", "must be >= 1");
    for (std::size_t g = 0; g < dom.graphs.size(); ++g) {
      const auto& gs = dom.graphs[g];
      const std::string gp = prefix + ".graphs[" + std::to_string(g) + "]";
      if (!(gs.homophily >= 0.0 && gs.homophily <= 1.0)) fail(gp + ".homophily", "must be in [0,1]");
      if (!(gs.edge_density >= 0.0 && gs.edge_density <= 1.0)) fail(gp + ".edge_density", "must be in [0,1]");
      if (!(gs.feature_noise >= 0.0 && gs.feature_noise <= 1.0)) fail(gp + ".feature_noise", "must be in [0,1]");
      if (gs.node_count < dom.class_count) fail(gp + ".node_count", "must be >= class_count");
    }
  }
  if (topic_words_per_node < 1) fail("topic_words_per_node", "must be >= 1");
  if (noise_vocab < 1 && noise_tokens_per_node > 0) fail("noise_vocab", "must be >= 1");
}

CorpusConfig default_corpus_config() {
  CorpusConfig cfg;
  auto domain = [](const std::string& name, std::vector<GraphRole> roles) {
    DomainSpec d;
    d.name = name;
    for (GraphRole r : roles) {
      GraphSpec g;
      g.role = r;
      d.graphs.push_back(g);
    }
    return d;
  };
  using R = GraphRole;
  cfg.domains.push_back(domain("academic", {R::kPretrain, R::kPretrain, R::kEval}));
  cfg.domains.push_back(domain("social", {R::kPretrain, R::kPretrain, R::kEval}));
  cfg.domains.push_back(domain("ecommerce", {R::kPretrain, R::kPretrain, R::kEval}));
  // Public graphs for data-free extraction: disjoint topics, same generator.
  for (const char* name : {"news", "wiki", "legal", "medical"}) {
    DomainSpec d = domain(name, {R::kExtra, R::kExtra});
    for (auto& g : d.graphs) {
      g.node_count = 300;
      g.edge_density = 0.02;
    }
    cfg.domains.push_back(d);
  }
  return cfg;
}

namespace {

// Pronounceable pseudo-words; consumers only need them to be distinct.
std::string pseudo_word(Rng& rng) {
  static constexpr std::string_view kOnset = "bdfgklmnprstvz";
  static constexpr std::string_view kVowel = "aeiou";
  std::string w;
  const std::size_t syllables = 2 + rng.below(2);
  for (std::size_t s = 0; s < syllables; ++s) {
    w.push_back(kOnset[rng.below(kOnset.size())]);
    w.push_back(kVowel[rng.below(kVowel.size())]);
  }
  return w;
}

const std::set<std::string>& template_words() {
  static const std::set<std::string> words = {"a", "item", "about"};
  return words;
}

struct Vocabulary {
  std::map<std::string, std::vector<std::vector<std::string>>> topics;  // domain -> class -> words
  std::vector<std::string> noise;
};

Vocabulary build_vocabulary(const CorpusConfig& config) {
  Vocabulary vocab;
  std::set<std::string> used = template_words();
  for (const auto& d : config.domains) used.insert(d.name);
  const Rng root(config.seed);
  for (const auto& d : config.domains) {
    Rng rng = root.split("topics/" + d.name);
    auto& classes = vocab.topics[d.name];
    classes.resize(d.class_count);
    for (auto& words : classes) {
      while (words.size() < d.topic_vocab) {
        std::string w = pseudo_word(rng);
        if (used.insert(w).second) words.push_back(std::move(w));
      }
    }
  }
  Rng rng = root.split("noise-vocab");
  while (vocab.noise.size() < config.noise_vocab) {
    std::string w = pseudo_word(rng);
    if (used.insert(w).second) vocab.noise.push_back(std::move(w));
  }
  return vocab;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

std::vector<std::string> topic_words(const CorpusConfig& config, const std::string& domain, std::size_t c) {
  const auto vocab = build_vocabulary(config);
  const auto it = vocab.topics.find(domain);
  if (it == vocab.topics.end() || c >= it->second.size()) throw Error(ErrorKind::kConfig, "unknown domain/class");
  return it->second[c];
}

Corpus generate_corpus(const CorpusConfig& config) {
  config.validate();
  const Vocabulary vocab = build_vocabulary(config);
  const Rng root(config.seed);
  Corpus corpus;

  for (const auto& dom : config.domains) {
    const auto& classes = vocab.topics.at(dom.name);
    std::vector<std::string> label_sentences;
    for (const auto& words : classes) label_sentences.push_back("a " + dom.name + " item about " + join(words));

    std::map<GraphRole, std::size_t> role_index;
    for (const auto& spec : dom.graphs) {
      TextAttributedGraph g;
      g.domain = dom.name;
      g.role = spec.role;
      g.graph_id = dom.name + "-" + to_string(spec.role) + "-" + std::to_string(role_index[spec.role]++);
      g.node_count = spec.node_count;
      g.label_sentences = label_sentences;
      Rng rng = root.split("graph/" + g.graph_id);

      const std::size_t n = spec.node_count;
      const std::size_t k = dom.class_count;
      g.labels.resize(n);
      std::vector<std::size_t> class_sizes(k, 0);
      for (auto& l : g.labels) {
        l = static_cast<int>(rng.below(k));
        ++class_sizes[static_cast<std::size_t>(l)];
      }

      // Planted partition calibrated so that E[edges] = density * pairs and
      // E[same-class edges] / E[edges] = homophily.
      const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
      double same_pairs = 0.0;
      for (std::size_t s : class_sizes) same_pairs += 0.5 * static_cast<double>(s) * static_cast<double>(s ? s - 1 : 0);
      const double diff_pairs = pairs - same_pairs;
      const double expected_edges = spec.edge_density * pairs;
      const double p_in = same_pairs > 0 ? spec.homophily * expected_edges / same_pairs
                                         : (spec.homophily > 0 && expected_edges > 0 ? 2.0 : 0.0);
      const double p_out = diff_pairs > 0 ? (1.0 - spec.homophily) * expected_edges / diff_pairs
                                          : ((1.0 - spec.homophily) > 0 && expected_edges > 0 ? 2.0 : 0.0);
      if (p_in > 1.0 || p_out > 1.0)
        throw Error(ErrorKind::kConfig, g.graph_id + ": edge_density " + std::to_string(spec.edge_density) +
                                            " with homophily " + std::to_string(spec.homophily) +
                                            " is unsatisfiable (p_in=" + std::to_string(p_in) +
                                            ", p_out=" + std::to_string(p_out) + ")");
      for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
          if (rng.bernoulli(g.labels[u] == g.labels[v] ? p_in : p_out)) g.edges.emplace_back(u, v);

      // Texts: template + class topic words (with corruption) + noise tokens.
      std::vector<std::vector<std::string>> node_topics(n);
      g.texts.resize(n);
      for (NodeId v = 0; v < n; ++v) {
        const auto& own = classes[static_cast<std::size_t>(g.labels[v])];
        std::vector<std::string> pool = own;
        rng.shuffle(pool);
        for (std::size_t t = 0; t < config.topic_words_per_node; ++t) {
          std::string w = pool[t % pool.size()];
          if (k > 1 && rng.bernoulli(spec.feature_noise)) {
            std::size_t other = rng.below(k - 1);
            if (other >= static_cast<std::size_t>(g.labels[v])) ++other;
            const auto& ow = classes[other];
            w = ow[rng.below(ow.size())];
          }
          node_topics[v].push_back(std::move(w));
        }
        std::vector<std::string> noise;
        for (std::size_t t = 0; t < config.noise_tokens_per_node; ++t) noise.push_back(vocab.noise[rng.below(vocab.noise.size())]);
        g.texts[v] = "a " + dom.name + " item about " + join(node_topics[v]) + (noise.empty() ? "" : " " + join(noise));
      }
      g.finalize();

      // Summaries: own text plus the topic words of up to 3 sampled neighbors.
      std::vector<std::string> summaries(n);
      for (NodeId v = 0; v < n; ++v) {
        std::vector<NodeId> nb = g.neighbors()[v];
        rng.shuffle(nb);
        std::string s = g.texts[v];
        for (std::size_t i = 0; i < std::min<std::size_t>(3, nb.size()); ++i) s += " " + join(node_topics[nb[i]]);
        summaries[v] = std::move(s);
      }
      corpus.summaries[g.graph_id] = std::move(summaries);
      corpus.graphs.push_back(std::move(g));
    }
  }
  return corpus;
}

std::vector<const TextAttributedGraph*> Corpus::with_role(GraphRole role) const {
  std::vector<const TextAttributedGraph*> out;
  for (const auto& g : graphs)
    if (g.role == role) out.push_back(&g);
  return out;
}

const TextAttributedGraph& Corpus::find(const std::string& graph_id) const {
  for (const auto& g : graphs)
    if (g.graph_id == graph_id) return g;
  throw Error(ErrorKind::kMissingData, "no graph \"" + graph_id + "\" in corpus");
}

TextAttributedGraph& Corpus::find(const std::string& graph_id) {
  return const_cast<TextAttributedGraph&>(std::as_const(*this).find(graph_id));
}

// ---------------------------------------------------------------- io

std::string graph_to_json(const TextAttributedGraph& graph) {
  json j;
  j["graph_id"] = graph.graph_id;
  j["domain"] = graph.domain;
  j["n"] = graph.node_count;
  json edges = json::array();
  for (const auto& [u, v] : graph.edges) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  j["texts"] = graph.texts;
  j["labels"] = graph.labels;
  j["label_sentences"] = graph.label_sentences;
  return j.dump() + "\n";
}

TextAttributedGraph graph_from_json(const std::string& text, GraphRole role) {
  const json j = json::parse(text);
  TextAttributedGraph g;
  g.graph_id = j.at("graph_id").get<std::string>();
  g.domain = j.at("domain").get<std::string>();
  g.role = role;
  g.node_count = j.at("n").get<std::size_t>();
  for (const auto& e : j.at("edges")) g.edges.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
  g.texts = j.at("texts").get<std::vector<std::string>>();
  g.labels = j.at("labels").get<std::vector<int>>();
  g.label_sentences = j.at("label_sentences").get<std::vector<std::string>>();
  g.finalize();
  return g;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << content;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void write_corpus(const Corpus& corpus, const fs::path& dir) {
  for (const auto& g : corpus.graphs) {
    write_file(dir / to_string(g.role) / g.domain / (g.graph_id + ".json"), graph_to_json(g));
    const auto it = corpus.summaries.find(g.graph_id);
    if (it != corpus.summaries.end())
      write_file(dir / "summaries" / (g.graph_id + ".json"), json(it->second).dump() + "\n");
  }
}

Corpus read_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::kMissingData, "corpus directory " + dir.string() + " not found");
  Corpus corpus;
  for (GraphRole role : {GraphRole::kPretrain, GraphRole::kEval, GraphRole::kExtra}) {
    const fs::path root = dir / to_string(role);
    if (!fs::is_directory(root)) continue;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root))
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) corpus.graphs.push_back(graph_from_json(read_file(f), role));
  }
  if (corpus.graphs.empty()) throw Error(ErrorKind::kMissingData, "no graphs under " + dir.string());
  const fs::path sdir = dir / "summaries";
  for (const auto& g : corpus.graphs) {
    const fs::path f = sdir / (g.graph_id + ".json");
    if (fs::exists(f)) corpus.summaries[g.graph_id] = json::parse(read_file(f)).get<std::vector<std::string>>();
  }
  return corpus;
}

// ---------------------------------------------------------------- splits

NodeSplit split_nodes(const TextAttributedGraph& graph, std::uint64_t seed) {
  const std::size_t n = graph.node_count;
  if (n < 10) throw Error(ErrorKind::kTooSmall, graph.graph_id + ": split needs n >= 10, got " + std::to_string(n));
  std::vector<NodeId> perm(n);
  for (NodeId i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  rng.shuffle(perm);
  const std::size_t n_val = n / 10;
  const std::size_t n_test = (3 * n) / 10;
  const std::size_t n_train = n - n_val - n_test;
  NodeSplit split;
  split.train_ids.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val_ids.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                       perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test_ids.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  for (auto* ids : {&split.train_ids, &split.val_ids, &split.test_ids}) std::sort(ids->begin(), ids->end());
  return split;
}

std::uint64_t graph_split_seed(const TextAttributedGraph& graph, std::uint64_t global_seed) {
  return mix64(global_seed ^ fnv1a64(graph.graph_id));
}

// ---------------------------------------------------------------- sampling

Subgraph induce_subgraph(const TextAttributedGraph& graph, std::vector<NodeId> node_ids, std::size_t pe_dim) {
  Subgraph sub;
  sub.center = node_ids.front();
  const std::size_t m = node_ids.size();
  std::map<NodeId, std::size_t> local;
  for (std::size_t i = 0; i < m; ++i) local[node_ids[i]] = i;
  sub.adjacency = Matrix(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (NodeId u : graph.neighbors()[node_ids[i]]) {
      const auto it = local.find(u);
      if (it != local.end()) sub.adjacency(i, it->second) = 1.0;
    }
  if (graph.features.size() != 0) {
    sub.features = Matrix(m, graph.features.cols());
    for (std::size_t i = 0; i < m; ++i) {
      const auto src = graph.features.row_span(node_ids[i]);
      std::copy(src.begin(), src.end(), sub.features.row_span(i).begin());
    }
  }
  sub.positional = compute_positional_encodings(sub.adjacency, pe_dim);
  sub.node_ids = std::move(node_ids);
  return sub;
}

Subgraph extract_khop_subgraph(const TextAttributedGraph& graph, NodeId v, std::size_t k, std::size_t max_nodes,
                               std::size_t pe_dim) {
  if (v >= graph.node_count) throw Error(ErrorKind::kContract, "center out of range");
  std::vector<std::size_t> depth(graph.node_count, std::numeric_limits<std::size_t>::max());
  std::vector<std::pair<std::size_t, NodeId>> found{{0, v}};
  std::queue<NodeId> frontier;
  depth[v] = 0;
  frontier.push(v);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    if (depth[u] == k) continue;
    for (NodeId w : graph.neighbors()[u]) {
      if (depth[w] != std::numeric_limits<std::size_t>::max()) continue;
      depth[w] = depth[u] + 1;
      found.emplace_back(depth[w], w);
      frontier.push(w);
    }
  }
  std::sort(found.begin(), found.end());
  if (max_nodes > 0 && found.size() > max_nodes) found.resize(max_nodes);
  std::vector<NodeId> ids;
  for (const auto& [d, u] : found) ids.push_back(u);
  return induce_subgraph(graph, std::move(ids), pe_dim);
}

Subgraph sample_rw_subgraph(const TextAttributedGraph& graph, NodeId v, std::size_t walk_len, std::size_t n_walks,
                            double restart_p, std::uint64_t seed, std::size_t max_nodes, std::size_t pe_dim) {
  if (v >= graph.node_count) throw Error(ErrorKind::kContract, "center out of range");
  if (walk_len < 1 || n_walks < 1 || !(restart_p >= 0.0 && restart_p < 1.0))
    throw Error(ErrorKind::kContract, "random walk needs walk_len >= 1, n_walks >= 1, restart_p in [0,1)");
  Rng rng(seed);
  std::vector<NodeId> order{v};
  std::set<NodeId> seen{v};
  for (std::size_t w = 0; w < n_walks; ++w) {
    NodeId cur = v;
    for (std::size_t s = 0; s < walk_len; ++s) {
      if (restart_p > 0.0 && rng.bernoulli(restart_p)) {
        cur = v;
        continue;
      }
      const auto& nb = graph.neighbors()[cur];
      if (nb.empty()) break;
      cur = nb[rng.below(nb.size())];
      if (seen.insert(cur).second) order.push_back(cur);
    }
  }
  if (max_nodes > 0 && order.size() > max_nodes) order.resize(max_nodes);
  return induce_subgraph(graph, std::move(order), pe_dim);
}

Subgraph sample_subgraph(const TextAttributedGraph& graph, NodeId v, const SamplerConfig& config) {
  if (config.method == SamplerMethod::kKHop)
    return extract_khop_subgraph(graph, v, config.k, config.max_nodes, config.pe_dim);
  const std::uint64_t seed = mix64(config.seed ^ fnv1a64(graph.graph_id) ^ mix64(v + 1));
  return sample_rw_subgraph(graph, v, config.walk_len, config.n_walks, config.restart_p, seed, config.max_nodes,
                            config.pe_dim);
}

Matrix compute_positional_encodings(const Matrix& adjacency, std::size_t r) {
  if (r < 1) throw Error(ErrorKind::kContract, "positional encoding needs r >= 1");
  const std::size_t m = adjacency.rows();
  Matrix transition(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < m; ++j) deg += adjacency(i, j);
    if (deg > 0.0)
      for (std::size_t j = 0; j < m; ++j) transition(i, j) = adjacency(i, j) / deg;
  }
  Matrix pe(m, r);
  Matrix power = transition;
  for (std::size_t t = 0; t < r; ++t) {
    for (std::size_t i = 0; i < m; ++i) pe(i, t) = power(i, i);
    if (t + 1 < r) {
      Matrix next(m, m);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k < m; ++k) {
          const double a = power(i, k);
          if (a == 0.0) continue;
          for (std::size_t j = 0; j < m; ++j) next(i, j) += a * transition(k, j);
        }
      power = std::move(next);
    }
  }
  return pe;
}

Matrix normalize_adjacency(const Matrix& adjacency) {
  const std::size_t m = adjacency.rows();
  if (adjacency.cols() != m) throw Error(ErrorKind::kDimension, "adjacency must be square");
  std::vector<double> inv_sqrt(m);
  for (std::size_t i = 0; i < m; ++i) {
    double deg = 1.0;
    for (std::size_t j = 0; j < m; ++j) deg += adjacency(i, j);
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double a = adjacency(i, j) + (i == j ? 1.0 : 0.0);
      if (a != 0.0) out(i, j) = inv_sqrt[i] * a * inv_sqrt[j];
    }
  return out;
}

}  // namespace gfmx
