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

// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include "gfmx/encoders.hpp"
#include "gfmx/kernels.hpp"
#include "gfmx/rng.hpp"

namespace {

using gfmx::Matrix;

Matrix random(std::size_t r, std::size_t c, std::uint64_t seed) {
  gfmx::Rng rng(seed);
  Matrix m(r, c);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = rng.normal();
  return m;
}

template <void (*Kernel)(const Matrix&, const Matrix&, Matrix&)>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix a = random(n, n, 1), b = random(n, n, 2);
  Matrix out(n, n);
  for (auto _ : state) {
    Kernel(a, b, out);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * n));
}
BENCHMARK_TEMPLATE(BM_Matmul, gfmx::kernels::matmul_serial)->Arg(64)->Arg(256);
BENCHMARK_TEMPLATE(BM_Matmul, gfmx::kernels::matmul_omp)->Arg(64)->Arg(256);

template <std::vector<gfmx::kernels::Neighbor> (*Kernel)(const Matrix&, const Matrix&)>
void BM_Nearest(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix q = random(n, 32, 3), refs = random(1000, 32, 4);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(q, refs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * 1000));
}
BENCHMARK_TEMPLATE(BM_Nearest, gfmx::kernels::nearest_rows_serial)->Arg(200)->Arg(1000);
BENCHMARK_TEMPLATE(BM_Nearest, gfmx::kernels::nearest_rows_omp)->Arg(200)->Arg(1000);

// Victim-sized encoder over a batch of 32-node subgraphs.
void BM_EncodeBatch(benchmark::State& state) {
  const bool parallel = state.range(0) != 0;
  const gfmx::Encoder enc(gfmx::default_victim_config());
  std::vector<gfmx::Subgraph> subs(64);
  gfmx::Rng rng(5);
  for (auto& s : subs) {
    const std::size_t n = 32;
    s.node_ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.node_ids[i] = i;
    s.features = random(n, 32, rng.next_u64());
    s.adjacency = Matrix(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) s.adjacency(i, i + 1) = s.adjacency(i + 1, i) = 1.0;
    s.positional = gfmx::compute_positional_encodings(s.adjacency, 4);
  }
  std::vector<std::vector<double>> out(subs.size());
  for (auto _ : state) {
    if (parallel)
      gfmx::kernels::parallel_for(subs.size(), [&](std::size_t i) { out[i] = enc.encode(subs[i]); });
    else
      for (std::size_t i = 0; i < subs.size(); ++i) out[i] = enc.encode(subs[i]);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(subs.size()));
  state.SetLabel(parallel ? "omp" : "serial");
}
BENCHMARK(BM_EncodeBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
