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

// Dense row-major f64 matrices and a small reverse-mode tape over them.
// Every tensor in the library is two-dimensional; vectors are 1 x n rows.

#ifndef GFMX_TENSOR_HPP
#define GFMX_TENSOR_HPP

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gfmx/error.hpp"

namespace gfmx {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix row(std::span<const double> values);
  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool same_shape(const Matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double> row_vector(std::size_t r) const;

  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; valid while the
/// tape is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  /// Gradient of the last backward pass; zeros when unreachable.
  Matrix grad() const;
  bool requires_grad() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records operations in creation order, which is a topological order, and
/// replays them backwards. Not thread-safe; use one tape per thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var leaf(Matrix value, bool requires_grad = true);

  /// Backward from a scalar (1 x 1) loss.
  void backward(Var loss);
  /// Backward from an arbitrary output seeded with dL/d(output).
  void backward(Var output, const Matrix& seed);

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t recorded_count() const;

  // Used by the op implementations.
  using Rule = std::function<void(Tape&, std::size_t self)>;
  Var record(Matrix value, std::vector<std::size_t> inputs, Rule rule);
  const Matrix& value_of(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad_of(std::size_t id) const { return nodes_[id].requires_grad; }
  const Matrix& grad_of(std::size_t id) const { return nodes_[id].grad; }
  /// Accumulation target; allocated on first use.
  Matrix& grad_ref(std::size_t id);
  Matrix grad_copy(std::size_t id) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    Rule rule;
  };
  std::vector<Node> nodes_;
};

namespace ops {

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var relu(Var x);
Var leaky_relu(Var x, double slope = 0.2);
Var exp(Var x);
Var log(Var x);
Var sum(Var x);
Var mean_rows(Var x);
Var l2_normalize_rows(Var x);
Var softmax_rows(Var x);
Var log_softmax_rows(Var x);
/// Softmax restricted to entries where mask != 0; masked entries are 0.
/// Every row must keep at least one entry.
Var masked_softmax_rows(Var x, const Matrix& mask);
Var transpose(Var x);
Var scale(Var x, double factor);
Var concat_cols(Var a, Var b);
Var gather_rows(Var x, std::span<const std::size_t> rows);

}  // namespace ops

enum class OpKind {
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kRelu,
  kLeakyRelu,
  kExp,
  kLog,
  kSum,
  kMeanRows,
  kL2NormalizeRows,
  kSoftmaxRows,
  kLogSoftmaxRows,
  kMaskedSoftmaxRows,
  kTranspose,
  kScale,
  kConcatCols,
  kGatherRows,
};

struct OpArgs {
  double scalar = 1.0;
  std::vector<std::size_t> indices;
  Matrix mask;
};

/// Generic dispatcher over the op kinds.
Var op_apply(OpKind kind, std::span<const Var> inputs, const OpArgs& args = {});
const char* to_string(OpKind kind);

struct GradCheckResult {
  double max_rel_error = 0.0;
  bool passed = false;
};

using ForwardFn = std::function<Var(Tape&, std::span<const Var> params)>;

/// Compares tape gradients to central differences for every parameter entry.
/// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
GradCheckResult gradient_check(const ForwardFn& forward_fn, std::vector<Matrix> params,
                               double h = 1e-5, double tol = 1e-4);

}  // namespace gfmx

#endif  // GFMX_TENSOR_HPP
