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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "doctest.h"

#include "gfmx/experiment.hpp"
#include "gfmx/tag.hpp"
#include "gfmx/text_encoder.hpp"
#include "test_util.hpp"

using namespace gfmx;

namespace {

const FrozenTextEncoder& encoder() {
  static const FrozenTextEncoder e;
  return e;
}

TextAttributedGraph make_graph(std::size_t n, std::vector<Edge> edges) {
  TextAttributedGraph g;
  g.graph_id = "toy";
  g.domain = "toy";
  g.node_count = n;
  g.edges = std::move(edges);
  for (std::size_t i = 0; i < n; ++i) {
    g.texts.push_back("node number " + std::to_string(i));
    g.labels.push_back(static_cast<int>(i % 2));
  }
  g.label_sentences = {"even things", "odd things"};
  g.finalize();
  attach_features(g, encoder());
  return g;
}

std::set<NodeId> node_set(const Subgraph& s) { return {s.node_ids.begin(), s.node_ids.end()}; }

// Reference FNV-1a, written independently of the library's constexpr one.
std::uint64_t reference_fnv(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h = h ^ static_cast<std::uint8_t>(c);
    h = h * 0x100000001b3ULL;
  }
  return h;
}

Matrix dense_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k) out(i, j) += a(i, k) * b(k, j);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- text encoder

TEST_CASE("fnv1a64 matches published vectors and a reference implementation") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  for (const std::string tok : {"ai", "graph", "zz9", "x"}) CHECK(fnv1a64(tok) == reference_fnv(tok));
  CHECK(encoder().bucket("ai") == reference_fnv("ai") % 4096);
}

TEST_CASE("text embeddings are deterministic unit vectors") {
  const auto a = encoder().embed_text("graph");
  const auto b = encoder().embed_text("graph");
  CHECK(a == b);
  CHECK(a.size() == 32);
  for (const char* s : {"graph", "A Longer sentence, with punctuation!", "x y z 1 2 3"})
    CHECK(std::abs(gfmx::testing::norm(encoder().embed_text(s)) - 1.0) < 1e-12);
  // Case folding and punctuation splitting.
  CHECK(encoder().embed_text("Graph, NEURAL") == encoder().embed_text("graph neural"));
  CHECK(tokenize("Hello, World-42") == std::vector<std::string>{"hello", "world", "42"});
}

TEST_CASE("empty text is rejected") {
  try {
    encoder().embed_text(" ,.; ");
    FAIL("empty text accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kEmptyText);
  }
}

TEST_CASE("label matrices") {
  const std::vector<std::string> same{"one label", "one label"};
  const Matrix m = encoder().embed_labels(same);
  CHECK(std::vector<double>(m.row_span(0).begin(), m.row_span(0).end()) ==
        std::vector<double>(m.row_span(1).begin(), m.row_span(1).end()));

  const std::vector<std::string> one{"lonely"};
  CHECK_THROWS_AS(encoder().embed_labels(one), Error);

  // Distinct topic sentences stay distinguishable across encoder seeds.
  const std::vector<std::string> topics{"a academic item about gravo", "a academic item about lupeti",
                                        "a academic item about sodamu"};
  int separated = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const FrozenTextEncoder e(TextEncoderSpec{seed, 4096, 32});
    const Matrix z = e.embed_labels(topics);
    bool ok = true;
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(std::abs(gfmx::testing::norm(z.row_span(i)) - 1.0) < 1e-12);
      for (std::size_t j = i + 1; j < 3; ++j) {
        double cos = 0.0, dist = 0.0;
        for (std::size_t c = 0; c < 32; ++c) {
          cos += z(i, c) * z(j, c);
          dist += (z(i, c) - z(j, c)) * (z(i, c) - z(j, c));
        }
        ok &= cos < 1.0 - 1e-6;
        CHECK(std::sqrt(dist) <= 2.0 + 1e-12);
      }
    }
    separated += ok;
  }
  CHECK(separated == 100);
}

TEST_CASE("text encoder JSON round trip and fingerprint") {
  const FrozenTextEncoder e(TextEncoderSpec{3, 512, 16});
  const auto j = nlohmann::json::parse(e.to_json());
  CHECK(j["hash"] == "fnv1a64");
  CHECK(j["tokenizer"] == "lower+split");
  const FrozenTextEncoder back = FrozenTextEncoder::from_json(e.to_json());
  CHECK(back.fingerprint() == e.fingerprint());
  CHECK(back.embed_text("hello") == e.embed_text("hello"));
  CHECK(FrozenTextEncoder().fingerprint() != e.fingerprint());
}

// ---------------------------------------------------------------- corpus

TEST_CASE("corpus generation invariants and determinism") {
  CorpusConfig cfg;
  for (const char* name : {"alpha", "beta"}) {
    DomainSpec d;
    d.name = name;
    d.graphs.resize(2);
    d.graphs[1].role = GraphRole::kEval;
    cfg.domains.push_back(d);
  }
  const Corpus a = generate_corpus(cfg);
  const Corpus b = generate_corpus(cfg);
  REQUIRE(a.graphs.size() == 4);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < a.graphs.size(); ++i) {
    ids.insert(a.graphs[i].graph_id);
    a.graphs[i].validate();
    CHECK(graph_to_json(a.graphs[i]) == graph_to_json(b.graphs[i]));
    CHECK(a.summaries.at(a.graphs[i].graph_id).size() == a.graphs[i].node_count);
    for (std::size_t v = 0; v < a.graphs[i].node_count; ++v)
      CHECK(a.graphs[i].texts[v].rfind("a " + a.graphs[i].domain + " item about ", 0) == 0);
  }
  CHECK(ids.size() == 4);
  CHECK(a.summaries == b.summaries);
}

TEST_CASE("homophily one yields only same-class edges") {
  CorpusConfig cfg;
  DomainSpec d;
  d.name = "pure";
  GraphSpec g;
  g.homophily = 1.0;
  d.graphs.push_back(g);
  cfg.domains.push_back(d);
  const Corpus c = generate_corpus(cfg);
  REQUIRE(!c.graphs[0].edges.empty());
  for (const auto& [u, v] : c.graphs[0].edges) CHECK(c.graphs[0].labels[u] == c.graphs[0].labels[v]);
}

TEST_CASE("measured homophily tracks the knob") {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CorpusConfig cfg;
    cfg.seed = seed;
    DomainSpec d;
    d.name = "h";
    GraphSpec g;
    g.node_count = 300;
    g.homophily = 0.9;
    d.graphs.push_back(g);
    cfg.domains.push_back(d);
    total += edge_homophily(generate_corpus(cfg).graphs[0]);
  }
  const double mean = total / 10.0;
  CHECK(mean >= 0.85);
  CHECK(mean <= 0.95);
}

TEST_CASE("corpus config validation names the field") {
  CorpusConfig cfg = default_corpus_config();
  cfg.domains[0].graphs[1].homophily = 1.2;
  try {
    cfg.validate();
    FAIL("invalid homophily accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    CHECK(std::string(e.what()).find("domains[0].graphs[1].homophily") != std::string::npos);
  }
  cfg = default_corpus_config();
  cfg.domains[0].class_count = 1;
  CHECK_THROWS_AS(cfg.validate(), Error);
  // Density too high for the requested homophily cannot be realized.
  cfg = default_corpus_config();
  cfg.domains[0].graphs[0].edge_density = 0.9;
  cfg.domains[0].graphs[0].homophily = 1.0;
  CHECK_THROWS_AS(generate_corpus(cfg), Error);
}

TEST_CASE("corpus config JSON round trip") {
  const CorpusConfig cfg = default_corpus_config();
  const auto j = corpus_config_to_json(cfg);
  CHECK(corpus_config_to_json(corpus_config_from_json(j)) == j);
}

TEST_CASE("corpus IO round trip") {
  CorpusConfig cfg = default_corpus_config();
  cfg.domains.resize(4);  // keep one extra domain
  const Corpus c = generate_corpus(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "gfmx_test_corpus_io";
  std::filesystem::remove_all(dir);
  write_corpus(c, dir);
  CHECK(std::filesystem::exists(dir / "pretrain" / "academic" / "academic-pretrain-0.json"));
  CHECK(std::filesystem::exists(dir / "eval" / "social" / "social-eval-0.json"));
  CHECK(std::filesystem::exists(dir / "extra" / "news" / "news-extra-0.json"));
  CHECK(std::filesystem::exists(dir / "summaries" / "academic-pretrain-0.json"));
  const Corpus back = read_corpus(dir);
  REQUIRE(back.graphs.size() == c.graphs.size());
  for (const auto& g : c.graphs) {
    const auto& h = back.find(g.graph_id);
    CHECK(graph_to_json(h) == graph_to_json(g));
    CHECK(h.role == g.role);
    // Summary line recount oracle.
    const auto j = nlohmann::json::parse(graph_to_json(h));
    CHECK(j["n"].get<std::size_t>() == g.node_count);
    CHECK(j["edges"].size() == g.edges.size());
  }
  CHECK(back.summaries == c.summaries);
  std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------- splits

TEST_CASE("node splits") {
  const auto g10 = make_graph(10, {});
  const auto s = split_nodes(g10, 3);
  CHECK(s.train_ids.size() == 6);
  CHECK(s.val_ids.size() == 1);
  CHECK(s.test_ids.size() == 3);
  std::set<NodeId> all;
  for (const auto* part : {&s.train_ids, &s.val_ids, &s.test_ids}) all.insert(part->begin(), part->end());
  CHECK(all.size() == 10);
  const auto again = split_nodes(g10, 3);
  CHECK(again.train_ids == s.train_ids);
  CHECK(again.test_ids == s.test_ids);

  const auto g7 = make_graph(7, {});
  try {
    split_nodes(g7, 1);
    FAIL("n < 10 accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTooSmall);
  }

  const auto g203 = make_graph(203, {});
  const auto big = split_nodes(g203, 5);
  CHECK(big.val_ids.size() == 20);
  CHECK(big.test_ids.size() == 60);
  CHECK(big.train_ids.size() == 123);
}

// ---------------------------------------------------------------- subgraphs

TEST_CASE("k-hop extraction") {
  const auto path = make_graph(3, {{0, 1}, {1, 2}});
  const auto s = extract_khop_subgraph(path, 1, 1, 32);
  CHECK(node_set(s) == std::set<NodeId>{0, 1, 2});
  CHECK(s.node_ids[0] == 1);
  CHECK(s.edge_count() == 2);

  const auto k0 = extract_khop_subgraph(path, 1, 0, 32);
  CHECK(k0.size() == 1);
  CHECK(k0.edge_count() == 0);

  std::vector<Edge> star;
  for (NodeId leaf = 1; leaf <= 10; ++leaf) star.emplace_back(0, leaf);
  const auto sg = make_graph(11, star);
  const auto t = extract_khop_subgraph(sg, 0, 1, 5);
  CHECK(t.node_ids == std::vector<NodeId>{0, 1, 2, 3, 4});

  // Monotone in k on a random graph.
  CorpusConfig cfg = default_corpus_config();
  cfg.domains.resize(1);
  Corpus c = generate_corpus(cfg);
  attach_features(c.graphs[0], encoder());
  for (NodeId v : {0u, 17u, 123u}) {
    std::set<NodeId> prev;
    for (std::size_t k = 0; k <= 3; ++k) {
      const auto cur = node_set(extract_khop_subgraph(c.graphs[0], v, k, 10000));
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST_CASE("induced adjacency matches the parent graph") {
  CorpusConfig cfg = default_corpus_config();
  cfg.domains.resize(1);
  Corpus c = generate_corpus(cfg);
  auto& g = c.graphs[0];
  attach_features(g, encoder());
  SamplerConfig sc;
  for (NodeId v = 0; v < 20; ++v) {
    const Subgraph s = sample_subgraph(g, v, sc);
    CHECK(s.node_ids[0] == v);
    CHECK(s.size() <= sc.max_nodes);
    for (std::size_t i = 0; i < s.size(); ++i) {
      CHECK(s.features.row_vector(i) == g.features.row_vector(s.node_ids[i]));
      for (std::size_t j = 0; j < s.size(); ++j) {
        const auto& nb = g.neighbors()[s.node_ids[i]];
        const bool edge = std::binary_search(nb.begin(), nb.end(), s.node_ids[j]);
        CHECK(s.adjacency(i, j) == (edge ? 1.0 : 0.0));
      }
      for (std::size_t t = 0; t < s.positional.cols(); ++t) {
        CHECK(s.positional(i, t) >= 0.0);
        CHECK(s.positional(i, t) <= 1.0);
      }
    }
    const Subgraph again = sample_subgraph(g, v, sc);
    CHECK(again.node_ids == s.node_ids);
  }
}

TEST_CASE("random-walk subgraphs") {
  const auto isolated = make_graph(3, {{1, 2}});
  CHECK(sample_rw_subgraph(isolated, 0, 16, 4, 0.2, 1).node_ids == std::vector<NodeId>{0});

  const auto edge = make_graph(2, {{0, 1}});
  const auto s = sample_rw_subgraph(edge, 1, 1, 1, 0.0, 1);
  CHECK(node_set(s) == std::set<NodeId>{0, 1});

  const auto tri = make_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  int full = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto t = sample_rw_subgraph(tri, 0, 8, 4, 0.2, seed);
    full += t.size() == 3 && t.edge_count() == 3;
  }
  CHECK(full >= 99);
}

TEST_CASE("positional encodings") {
  CHECK(compute_positional_encodings(Matrix(1, 1), 3) == Matrix(1, 3));
  const Matrix two{{0, 1}, {1, 0}};
  CHECK(compute_positional_encodings(two, 2) == Matrix{{0, 1}, {0, 1}});
  const Matrix tri{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  const Matrix pe = compute_positional_encodings(tri, 1);
  for (std::size_t i = 0; i < 3; ++i) CHECK(pe(i, 0) == 0.0);

  // Column sums equal trace((D^-1 A)^t), by dense matrix powers.
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.bernoulli(0.4)) a(i, j) = a(j, i) = 1.0;
    Matrix p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      double deg = 0.0;
      for (std::size_t j = 0; j < n; ++j) deg += a(i, j);
      for (std::size_t j = 0; j < n; ++j) p(i, j) = deg > 0 ? a(i, j) / deg : 0.0;
    }
    const std::size_t r = 5;
    const Matrix enc = compute_positional_encodings(a, r);
    Matrix power = p;
    for (std::size_t t = 0; t < r; ++t) {
      double trace = 0.0, col = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        trace += power(i, i);
        col += enc(i, t);
        CHECK(enc(i, t) >= 0.0);
        CHECK(enc(i, t) <= 1.0 + 1e-12);
      }
      CHECK(std::abs(trace - col) < 1e-12);
      power = dense_matmul(power, p);
    }
  }
}

TEST_CASE("normalized adjacency") {
  CHECK(normalize_adjacency(Matrix(1, 1)) == Matrix{{1.0}});
  const Matrix two = normalize_adjacency(Matrix{{0, 1}, {1, 0}});
  CHECK(gfmx::testing::max_abs_diff(two, Matrix{{0.5, 0.5}, {0.5, 0.5}}) < 1e-15);

  // Isolated node keeps only its self-loop.
  const Matrix iso = normalize_adjacency(Matrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}});
  CHECK(iso(2, 2) == 1.0);
  CHECK(iso(2, 0) == 0.0);

  // Symmetric, spectral radius <= 1 by power iteration.
  Rng rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (rng.bernoulli(0.5)) a(i, j) = a(j, i) = 1.0;
    const Matrix t = normalize_adjacency(a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(t(i, j) - t(j, i)) < 1e-12);
    // Power iteration on T^2 (PSD) gives the squared spectral radius.
    const Matrix t2 = dense_matmul(t, t);
    Matrix x(n, 1);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = 1.0 + rng.uniform();
    double lambda = 0.0;
    for (int it = 0; it < 500; ++it) {
      Matrix y = dense_matmul(t2, x);
      double nn = 0.0;
      for (std::size_t i = 0; i < n; ++i) nn += y(i, 0) * y(i, 0);
      nn = std::sqrt(nn);
      for (std::size_t i = 0; i < n; ++i) y(i, 0) /= nn;
      double xn = 0.0;
      for (std::size_t i = 0; i < n; ++i) xn += x(i, 0) * x(i, 0);
      lambda = nn / std::sqrt(xn);
      x = y;
    }
    CHECK(std::sqrt(lambda) <= 1.0 + 1e-9);
  }
}
