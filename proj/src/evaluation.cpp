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

#include "gfmx/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gfmx/kernels.hpp"

namespace gfmx {

using nlohmann::json;

ZeroShotResult zero_shot_predict(std::span<const double> embedding, const Matrix& label_matrix) {
  if (label_matrix.rows() < 2) throw Error(ErrorKind::kContract, "zero-shot needs K >= 2 labels");
  if (embedding.size() != label_matrix.cols())
    throw Error(ErrorKind::kDimension, "embedding width " + std::to_string(embedding.size()) + " vs label width " +
                                           std::to_string(label_matrix.cols()));
  ZeroShotResult r;
  r.similarities.resize(label_matrix.rows());
  for (std::size_t k = 0; k < label_matrix.rows(); ++k) {
    double s = 0.0;
    for (std::size_t c = 0; c < embedding.size(); ++c) s += embedding[c] * label_matrix(k, c);
    r.similarities[k] = s;
    if (s > r.similarities[static_cast<std::size_t>(r.cls)]) r.cls = static_cast<int>(k);
  }
  return r;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw Error(ErrorKind::kUndefinedMetric, "accuracy of an empty set");
  if (predictions.size() != labels.size()) throw Error(ErrorKind::kDimension, "accuracy: length mismatch");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) hit += predictions[i] == labels[i];
  return static_cast<double>(hit) / static_cast<double>(predictions.size());
}

double fidelity(std::span<const int> attacker_predictions, std::span<const int> victim_predictions) {
  if (attacker_predictions.empty()) throw Error(ErrorKind::kUndefinedMetric, "fidelity of an empty set");
  if (attacker_predictions.size() != victim_predictions.size())
    throw Error(ErrorKind::kDimension, "fidelity: length mismatch");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < attacker_predictions.size(); ++i) agree += attacker_predictions[i] == victim_predictions[i];
  return static_cast<double>(agree) / static_cast<double>(attacker_predictions.size());
}

// ---------------------------------------------------------------- bound

namespace {

double distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return std::sqrt(s);
}

void fill_margin(BoundNode& node, std::span<const double> a, std::span<const double> b, const Matrix& labels) {
  const auto pa = zero_shot_predict(a, labels);
  const auto pb = zero_shot_predict(b, labels);
  node.c_attack = pa.cls;
  node.c_victim = pb.cls;
  node.kappa = distance(labels.row_span(static_cast<std::size_t>(pa.cls)), labels.row_span(static_cast<std::size_t>(pb.cls)));
  node.delta = pa.similarities[static_cast<std::size_t>(pa.cls)] - pa.similarities[static_cast<std::size_t>(pb.cls)];
  node.bound_holds = node.delta <= 0.0 || node.delta < 3.0 * node.kappa * node.epsilon;
}

}  // namespace

BoundNode bound_node_check(std::span<const double> a, std::span<const double> b, double epsilon,
                           const Matrix& label_matrix) {
  BoundNode node;
  node.epsilon = epsilon;
  fill_margin(node, a, b, label_matrix);
  return node;
}

BoundDiagnostics verify_alignment_bound(const Matrix& test_attack, const Matrix& test_victim, const Matrix& query_attack,
                                        const Matrix& query_victim, const Matrix& label_matrix) {
  if (query_victim.rows() == 0) throw Error(ErrorKind::kContract, "bound verification needs queried nodes");
  if (!test_attack.same_shape(test_victim) || !query_attack.same_shape(query_victim))
    throw Error(ErrorKind::kDimension, "bound verification: attacker/victim embedding shapes differ");
  BoundDiagnostics diag;
  diag.nodes.resize(test_attack.rows());
  const auto nearest = test_victim.rows() ? kernels::nearest_rows_omp(test_victim, query_victim) : std::vector<kernels::Neighbor>{};
  for (std::size_t i = 0; i < test_attack.rows(); ++i) {
    BoundNode& node = diag.nodes[i];
    const std::size_t q = nearest[i].index;
    const auto a = test_attack.row_span(i);
    const auto b = test_victim.row_span(i);
    node.nearest_query = q;
    node.leg_victim = distance(b, query_victim.row_span(q));
    node.leg_attack = distance(a, query_attack.row_span(q));
    node.leg_cross = distance(query_attack.row_span(q), query_victim.row_span(q));
    node.epsilon = std::max({node.leg_victim, node.leg_attack, node.leg_cross});
    fill_margin(node, a, b, label_matrix);
    if (!node.bound_holds) ++diag.violations;
    diag.max_delta = std::max(diag.max_delta, node.delta);
  }
  std::size_t holds = 0;
  for (const auto& n : diag.nodes) holds += n.bound_holds;
  diag.fraction_bound_holds = diag.nodes.empty() ? 1.0 : static_cast<double>(holds) / static_cast<double>(diag.nodes.size());
  return diag;
}

// ---------------------------------------------------------------- reports

namespace {

template <typename F>
double mean_over(const std::vector<GraphReport>& graphs, F f) {
  if (graphs.empty()) return 0.0;
  double s = 0.0;
  for (const auto& g : graphs) s += f(g);
  return s / static_cast<double>(graphs.size());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double ScenarioReport::mean_fidelity() const { return mean_over(graphs, [](const auto& g) { return g.fidelity; }); }
double ScenarioReport::mean_attacker_acc() const { return mean_over(graphs, [](const auto& g) { return g.attacker_acc; }); }
double ScenarioReport::mean_victim_acc() const { return mean_over(graphs, [](const auto& g) { return g.victim_acc; }); }

std::size_t ScenarioReport::bound_violations() const {
  std::size_t v = 0;
  for (const auto& g : graphs) v += g.bound.violations;
  return v;
}

double ScenarioReport::bound_fraction_holds() const {
  std::size_t holds = 0, total = 0;
  for (const auto& g : graphs)
    for (const auto& n : g.bound.nodes) {
      holds += n.bound_holds;
      ++total;
    }
  return total ? static_cast<double>(holds) / static_cast<double>(total) : 1.0;
}

double ScenarioReport::bound_max_delta() const {
  double m = 0.0;
  for (const auto& g : graphs) m = std::max(m, g.bound.max_delta);
  return m;
}

std::string ScenarioReport::to_csv() const {
  std::ostringstream os;
  os << "graph_id,attacker_acc,victim_acc,fidelity,n_test,frac_bound_holds,max_delta\n";
  for (const auto& g : graphs)
    os << g.graph_id << ',' << fmt(g.attacker_acc) << ',' << fmt(g.victim_acc) << ',' << fmt(g.fidelity) << ','
       << g.n_test << ',' << fmt(g.bound.fraction_bound_holds) << ',' << fmt(g.bound.max_delta) << '\n';
  return os.str();
}

json ScenarioReport::to_json(bool verbose) const {
  json j;
  j["scenario"] = scenario;
  j["kind"] = kind;
  j["seed"] = seed;
  j["query_count"] = query_count;
  j["attacker_params"] = attacker_params;
  j["victim_params"] = victim_params;
  j["mean_fidelity"] = mean_fidelity();
  j["mean_attacker_acc"] = mean_attacker_acc();
  j["mean_victim_acc"] = mean_victim_acc();
  j["alignment_bound"] = {{"violations", bound_violations()},
                {"fraction_bound_holds", bound_fraction_holds()},
                {"max_delta", bound_max_delta()}};
  json rows = json::array();
  for (const auto& g : graphs) {
    json r;
    r["graph_id"] = g.graph_id;
    r["domain"] = g.domain;
    r["n_test"] = g.n_test;
    r["class_count"] = g.class_count;
    r["attacker_acc"] = g.attacker_acc;
    r["victim_acc"] = g.victim_acc;
    r["fidelity"] = g.fidelity;
    r["majority_rate"] = g.majority_rate;
    r["frac_bound_holds"] = g.bound.fraction_bound_holds;
    r["max_delta"] = g.bound.max_delta;
    r["bound_violations"] = g.bound.violations;
    if (verbose) {
      json nodes = json::array();
      for (const auto& n : g.bound.nodes)
        nodes.push_back({{"nearest_query", n.nearest_query},
                         {"epsilon", n.epsilon},
                         {"legs", {n.leg_victim, n.leg_attack, n.leg_cross}},
                         {"kappa", n.kappa},
                         {"delta", n.delta},
                         {"c_attack", n.c_attack},
                         {"c_victim", n.c_victim},
                         {"bound_holds", n.bound_holds}});
      r["bound_nodes"] = std::move(nodes);
    }
    rows.push_back(std::move(r));
  }
  j["graphs"] = std::move(rows);
  return j;
}

// ---------------------------------------------------------------- evaluate

Matrix embed_subgraphs(const EmbedFn& fn, std::span<const Subgraph> subgraphs, std::size_t dim) {
  Matrix out(subgraphs.size(), dim);
  kernels::parallel_for(subgraphs.size(), [&](std::size_t i) {
    const auto e = fn(subgraphs[i]);
    if (e.size() != dim) throw Error(ErrorKind::kDimension, "embedding width mismatch");
    std::copy(e.begin(), e.end(), out.row_span(i).begin());
  });
  return out;
}

ScenarioReport evaluate_pair(const EmbedFn& attacker, const EmbedFn& victim,
                             std::span<const TextAttributedGraph* const> eval_graphs,
                             const FrozenTextEncoder& text_encoder, const SamplerConfig& sampler,
                             const BoundQueries* queries) {
  ScenarioReport report;
  const std::size_t dim = text_encoder.dim();
  for (const auto* gp : eval_graphs) {
    const auto& g = *gp;
    const Matrix labels = text_encoder.embed_labels(g.label_sentences);
    const auto test_ids = split_nodes(g, graph_split_seed(g, sampler.split_seed)).test_ids;
    std::vector<Subgraph> subs(test_ids.size());
    kernels::parallel_for(test_ids.size(), [&](std::size_t i) { subs[i] = sample_subgraph(g, test_ids[i], sampler); });
    const Matrix ea = embed_subgraphs(attacker, subs, dim);
    const Matrix ev = embed_subgraphs(victim, subs, dim);

    std::vector<int> pa(test_ids.size()), pv(test_ids.size()), truth(test_ids.size());
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
      pa[i] = zero_shot_predict(ea.row_span(i), labels).cls;
      pv[i] = zero_shot_predict(ev.row_span(i), labels).cls;
      truth[i] = g.labels[test_ids[i]];
    }
    GraphReport row;
    row.graph_id = g.graph_id;
    row.domain = g.domain;
    row.n_test = test_ids.size();
    row.class_count = g.class_count();
    row.attacker_acc = accuracy(pa, truth);
    row.victim_acc = accuracy(pv, truth);
    row.fidelity = fidelity(pa, pv);
    std::vector<std::size_t> hist(g.class_count(), 0);
    for (int t : truth) ++hist[static_cast<std::size_t>(t)];
    row.majority_rate = static_cast<double>(*std::max_element(hist.begin(), hist.end())) / static_cast<double>(truth.size());
    if (queries && queries->victim.rows() > 0) row.bound = verify_alignment_bound(ea, ev, queries->attack, queries->victim, labels);
    report.graphs.push_back(std::move(row));
  }
  return report;
}

}  // namespace gfmx
