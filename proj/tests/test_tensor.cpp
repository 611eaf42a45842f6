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

#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"

#include "gfmx/kernels.hpp"
#include "gfmx/rng.hpp"
#include "gfmx/tensor.hpp"
#include "test_util.hpp"

using namespace gfmx;
using gfmx::testing::max_abs_diff;
using gfmx::testing::random_matrix;

TEST_CASE("elementwise forward examples") {
  Tape t;
  auto r = ops::relu(t.constant(Matrix{{-1, 0, 2}}));
  CHECK(r.value() == Matrix{{0, 0, 2}});

  auto n = ops::l2_normalize_rows(t.constant(Matrix{{3, 4}}));
  CHECK(n.value()(0, 0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(n.value()(0, 1) == doctest::Approx(0.8).epsilon(1e-15));

  auto s = ops::softmax_rows(t.constant(Matrix{{0, 0}}));
  CHECK(s.value() == Matrix{{0.5, 0.5}});
}

TEST_CASE("softmax rows sum to one and ignore row shifts") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix x = random_matrix(4, 7, rng, 5.0);
    Matrix shifted = x;
    for (std::size_t c = 0; c < 7; ++c) shifted(2, c) += 123.25;
    Tape t;
    const Matrix p = ops::softmax_rows(t.constant(x)).value();
    const Matrix q = ops::softmax_rows(t.constant(shifted)).value();
    for (std::size_t r = 0; r < 4; ++r) {
      double s = 0.0;
      for (double v : p.row_span(r)) s += v;
      CHECK(std::abs(s - 1.0) < 1e-12);
    }
    CHECK(max_abs_diff(p, q) < 1e-12);
  }
  // Stabilized: no overflow at extreme logits.
  Tape t;
  const Matrix big = ops::softmax_rows(t.constant(Matrix{{1000.0, 0.0}})).value();
  CHECK(big(0, 0) == 1.0);
}

TEST_CASE("degenerate and shape errors") {
  Tape t;
  auto zero = t.leaf(Matrix{{0.0, 0.0}});
  CHECK_THROWS_AS(ops::l2_normalize_rows(zero), Error);
  try {
    ops::l2_normalize_rows(zero);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDegenerateInput);
  }
  try {
    ops::matmul(t.leaf(Matrix(2, 3)), t.leaf(Matrix(2, 3)));
    FAIL("expected dimension error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimension);
  }
  CHECK_THROWS_AS(ops::add(t.leaf(Matrix(1, 2)), t.leaf(Matrix(2, 1))), Error);
  CHECK_THROWS_AS(ops::log(t.leaf(Matrix{{-1.0}})), Error);
}

TEST_CASE("backward examples") {
  {
    Tape t;
    auto x = t.leaf(Matrix{{1, 2, 3}});
    t.backward(ops::sum(x));
    CHECK(x.grad() == Matrix{{1, 1, 1}});
  }
  {
    Tape t;
    auto x = t.leaf(Matrix{{2}});
    t.backward(ops::sum(ops::mul(x, x)));
    CHECK(x.grad() == Matrix{{4}});
  }
  {
    // Unreachable leaves get zero gradient.
    Tape t;
    auto x = t.leaf(Matrix{{1, 2}});
    auto y = t.leaf(Matrix{{5, 6}});
    t.backward(ops::sum(x));
    CHECK(y.grad() == Matrix{{0, 0}});
  }
  {
    Tape t;
    auto x = t.leaf(Matrix{{1, 2}});
    try {
      t.backward(x);
      FAIL("non-scalar loss accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kContract);
    }
  }
}

TEST_CASE("mse of normalized vector matches finite differences") {
  const Matrix target{{1, 0}};
  auto f = [&](Tape& t, std::span<const Var> p) {
    auto d = ops::sub(ops::l2_normalize_rows(p[0]), t.constant(target));
    return ops::sum(ops::mul(d, d));
  };
  const auto r = gradient_check(f, {Matrix{{3, 4}}}, 1e-5, 1e-4);
  CHECK(r.passed);
  CHECK(r.max_rel_error < 1e-4);
}

TEST_CASE("gradient_check examples") {
  auto square = [](Tape&, std::span<const Var> p) { return ops::sum(ops::mul(p[0], p[0])); };
  CHECK(gradient_check(square, {Matrix{{3.0}}}).max_rel_error < 1e-6);

  // Dead ReLU: analytic 0, numeric 0.
  auto dead = [](Tape&, std::span<const Var> p) { return ops::sum(ops::relu(p[0])); };
  const auto r = gradient_check(dead, {Matrix{{-1.0}}});
  CHECK(r.max_rel_error == 0.0);
  CHECK(r.passed);

  // Full GCN layer on a 4-node path.
  Rng rng(8);
  Matrix a_hat(4, 4);
  const double deg[4] = {2, 3, 3, 2};
  for (int i = 0; i < 4; ++i) {
    a_hat(i, i) = 1.0 / deg[i];
    if (i + 1 < 4) a_hat(i, i + 1) = a_hat(i + 1, i) = 1.0 / std::sqrt(deg[i] * deg[i + 1]);
  }
  const Matrix h = random_matrix(4, 3, rng);
  auto gcn = [&](Tape& t, std::span<const Var> p) {
    auto z = ops::matmul(t.constant(a_hat), ops::matmul(t.constant(h), p[0]));
    return ops::sum(ops::mul(z, z));
  };
  CHECK(gradient_check(gcn, {random_matrix(3, 2, rng)}).max_rel_error < 1e-4);
}

namespace {

// Inputs for an op kind, nudged away from kinks and out of invalid domains.
std::vector<Matrix> inputs_for(OpKind kind, Rng& rng, OpArgs& args) {
  auto away_from_zero = [&](Matrix m) {
    for (std::size_t i = 0; i < m.size(); ++i)
      while (std::abs(m[i]) < 1e-3) m[i] = rng.normal();
    return m;
  };
  switch (kind) {
    case OpKind::kMatmul: return {random_matrix(3, 4, rng), random_matrix(4, 2, rng)};
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul: return {random_matrix(3, 4, rng), random_matrix(3, 4, rng)};
    case OpKind::kConcatCols: return {random_matrix(3, 2, rng), random_matrix(3, 3, rng)};
    case OpKind::kRelu:
    case OpKind::kLeakyRelu: return {away_from_zero(random_matrix(3, 4, rng))};
    case OpKind::kLog: {
      Matrix m = random_matrix(3, 4, rng);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = 0.5 + std::abs(m[i]);
      return {m};
    }
    case OpKind::kScale: args.scalar = -1.7; return {random_matrix(3, 4, rng)};
    case OpKind::kGatherRows: args.indices = {2, 0, 2, 1}; return {random_matrix(3, 4, rng)};
    case OpKind::kMaskedSoftmaxRows: {
      args.mask = Matrix{{1, 1, 0, 1}, {0, 1, 1, 0}, {1, 0, 1, 1}};
      return {random_matrix(3, 4, rng)};
    }
    default: return {random_matrix(3, 4, rng)};
  }
}

}  // namespace

TEST_CASE("every op kind matches central differences") {
  const OpKind kinds[] = {OpKind::kMatmul,       OpKind::kAdd,           OpKind::kSub,
                          OpKind::kMul,          OpKind::kRelu,          OpKind::kLeakyRelu,
                          OpKind::kExp,          OpKind::kLog,           OpKind::kSum,
                          OpKind::kMeanRows,     OpKind::kL2NormalizeRows, OpKind::kSoftmaxRows,
                          OpKind::kLogSoftmaxRows, OpKind::kMaskedSoftmaxRows, OpKind::kTranspose,
                          OpKind::kScale,        OpKind::kConcatCols,    OpKind::kGatherRows};
  for (OpKind kind : kinds) {
    Rng rng(fnv1a64(to_string(kind)));
    for (int trial = 0; trial < 10; ++trial) {
      OpArgs args;
      std::vector<Matrix> inputs = inputs_for(kind, rng, args);
      // Weighted sum with fixed random weights makes every output matter.
      Tape probe;
      std::vector<Var> probe_vars;
      for (const auto& m : inputs) probe_vars.push_back(probe.constant(m));
      const Matrix out = op_apply(kind, probe_vars, args).value();
      const Matrix weights = random_matrix(out.rows(), out.cols(), rng);
      auto f = [&](Tape& t, std::span<const Var> p) {
        return ops::sum(ops::mul(op_apply(kind, p, args), t.constant(weights)));
      };
      const auto r = gradient_check(f, inputs, 1e-5, 1e-4);
      INFO(to_string(kind), " trial ", trial, " err ", r.max_rel_error);
      CHECK(r.passed);
    }
  }
}

TEST_CASE("non-finite values are rejected") {
  Tape t;
  CHECK_THROWS_AS(ops::exp(t.leaf(Matrix{{1000.0}})), Error);
  try {
    ops::exp(t.leaf(Matrix{{1000.0}}));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
  }
}

TEST_CASE("rng streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  int differing_pairs = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng x(s), y(s + 1000);
    bool differ = false;
    for (int i = 0; i < 16; ++i) differ |= x.next_u64() != y.next_u64();
    differing_pairs += differ;
  }
  CHECK(differing_pairs == 100);

  // Known value pins the generator across platforms and refactors.
  Rng pinned(0);
  const std::uint64_t key = mix64(0 ^ 0x6A09E667F3BCC908ULL);
  CHECK(pinned.next_u64() == mix64(key + 0x9E3779B97F4A7C15ULL));

  Rng r(5);
  double sum = 0.0, sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.04);

  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto v = r.below(7);
    CHECK(v < 7);
    seen.insert(v);
  }
  CHECK(seen.size() == 7);
  CHECK(Rng(9).split("a").next_u64() != Rng(9).split("b").next_u64());
}

TEST_CASE("parallel kernels agree with serial references bit for bit") {
  Rng rng(17);
  const Matrix a = random_matrix(70, 50, rng);
  const Matrix b = random_matrix(50, 40, rng);
  Matrix s(70, 40), p(70, 40);
  kernels::matmul_serial(a, b, s);
  kernels::matmul_omp(a, b, p);
  CHECK(s == p);

  const Matrix c = random_matrix(70, 40, rng);
  Matrix tn_s(50, 40), tn_p(50, 40);
  kernels::matmul_tn_acc_serial(a, c, tn_s);
  kernels::matmul_tn_acc_omp(a, c, tn_p);
  CHECK(tn_s == tn_p);

  const Matrix d = random_matrix(60, 50, rng);
  Matrix nt_s(70, 60), nt_p(70, 60);
  kernels::matmul_nt_acc_serial(a, d, nt_s);
  kernels::matmul_nt_acc_omp(a, d, nt_p);
  CHECK(nt_s == nt_p);

  const Matrix q = random_matrix(200, 8, rng);
  const Matrix refs = random_matrix(300, 8, rng);
  const auto ns = kernels::nearest_rows_serial(q, refs);
  const auto np = kernels::nearest_rows_omp(q, refs);
  REQUIRE(ns.size() == np.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    CHECK(ns[i].index == np[i].index);
    CHECK(ns[i].distance == np[i].distance);
  }
}

TEST_CASE("nearest_rows breaks ties by lowest index") {
  const Matrix refs{{1, 0}, {0, 1}, {1, 0}};
  const auto n = kernels::nearest_rows_serial(Matrix{{1, 0}}, refs);
  CHECK(n[0].index == 0);
  CHECK(n[0].distance == 0.0);
}

TEST_CASE("parallel_for rethrows the first exception") {
  CHECK_THROWS_AS(kernels::parallel_for(100,
                                        [](std::size_t i) {
                                          if (i == 37) throw std::runtime_error("boom");
                                        }),
                  std::runtime_error);
}
