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

#include "gfmx/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gfmx/kernels.hpp"

namespace gfmx {

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw Error(ErrorKind::kDimension, "data length " + std::to_string(data_.size()) + " != " +
                                           std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw Error(ErrorKind::kDimension, "ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::row(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::row_vector(std::size_t r) const {
  auto s = row_span(r);
  return {s.begin(), s.end()};
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << '[' << rows_ << 'x' << cols_ << ']';
  return os.str();
}

// ---------------------------------------------------------------- Var/Tape

const Matrix& Var::value() const {
  if (!tape_) throw Error(ErrorKind::kContract, "unbound Var");
  return tape_->value_of(id_);
}

Matrix Var::grad() const {
  if (!tape_) throw Error(ErrorKind::kContract, "unbound Var");
  return tape_->grad_copy(id_);
}

bool Var::requires_grad() const { return tape_ && tape_->requires_grad_of(id_); }

Var Tape::constant(Matrix value) { return record(std::move(value), {}, nullptr); }

Var Tape::leaf(Matrix value, bool requires_grad) {
  Var v = record(std::move(value), {}, nullptr);
  nodes_[v.id_].requires_grad = requires_grad;
  return v;
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, Rule rule) {
  if (!value.all_finite()) throw Error(ErrorKind::kNumeric, "non-finite value produced " + value.shape_string());
  Node node;
  node.value = std::move(value);
  for (std::size_t in : inputs) node.requires_grad = node.requires_grad || nodes_[in].requires_grad;
  if (node.requires_grad) {
    node.inputs = std::move(inputs);
    node.rule = std::move(rule);
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

std::size_t Tape::recorded_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return bool(n.rule); }));
}

Matrix& Tape::grad_ref(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.grad.same_shape(n.value) || n.grad.size() != n.value.size()) n.grad = Matrix(n.value.rows(), n.value.cols());
  return n.grad;
}

Matrix Tape::grad_copy(std::size_t id) const {
  const Node& n = nodes_[id];
  if (n.grad.size() == n.value.size() && n.grad.same_shape(n.value)) return n.grad;
  return Matrix(n.value.rows(), n.value.cols());
}

void Tape::backward(Var loss) {
  if (loss.tape_ != this) throw Error(ErrorKind::kContract, "loss recorded on a different tape");
  const Matrix& v = value_of(loss.id_);
  if (v.rows() != 1 || v.cols() != 1)
    throw Error(ErrorKind::kContract, "backward needs a scalar loss, got " + v.shape_string());
  backward(loss, Matrix(1, 1, 1.0));
}

void Tape::backward(Var output, const Matrix& seed) {
  if (output.tape_ != this) throw Error(ErrorKind::kContract, "output recorded on a different tape");
  if (!seed.same_shape(value_of(output.id_)))
    throw Error(ErrorKind::kDimension, "seed " + seed.shape_string() + " vs output " + value_of(output.id_).shape_string());
  for (auto& n : nodes_) n.grad = Matrix();
  if (!nodes_[output.id_].requires_grad) return;
  grad_ref(output.id_) = seed;
  for (std::size_t i = output.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.rule || n.grad.size() == 0) continue;
    n.rule(*this, i);
  }
}

// ---------------------------------------------------------------- ops

namespace {

Tape* common_tape(Var a, Var b) {
  if (!a.tape() || a.tape() != b.tape()) throw Error(ErrorKind::kContract, "operands on different tapes");
  return a.tape();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw Error(ErrorKind::kDimension, std::string(op) + " " + a.shape_string() + " vs " + b.shape_string());
}

// Accumulate g into input `in` if it participates in the gradient.
template <typename Fn>
void accumulate(Tape& t, std::size_t in, Fn&& fn) {
  if (!t.requires_grad_of(in)) return;
  fn(t.grad_ref(in));
}

}  // namespace

namespace ops {

Var matmul(Var a, Var b) {
  Tape* t = common_tape(a, b);
  Matrix out = kernels::matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ia, [&](Matrix& ga) { kernels::matmul_nt_acc(g, tp.value_of(ib), ga); });
    accumulate(tp, ib, [&](Matrix& gb) { kernels::matmul_tn_acc(tp.value_of(ia), g, gb); });
  });
}

Var add(Var a, Var b) {
  Tape* t = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "add");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    for (std::size_t in : {ia, ib})
      accumulate(tp, in, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i]; });
  });
}

Var sub(Var a, Var b) {
  Tape* t = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "sub");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ia, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i]; });
    accumulate(tp, ib, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] -= g[i]; });
  });
}

Var mul(Var a, Var b) {
  Tape* t = common_tape(a, b);
  require_same_shape(a.value(), b.value(), "mul");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t->record(std::move(out), {ia, ib}, [ia, ib](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& av = tp.value_of(ia);
    const Matrix& bv = tp.value_of(ib);
    accumulate(tp, ia, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * bv[i]; });
    accumulate(tp, ib, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * av[i]; });
  });
}

Var relu(Var x) { return leaky_relu(x, 0.0); }

Var leaky_relu(Var x, double slope) {
  Matrix out = x.value();
  for (auto& v : out.data()) v = v > 0.0 ? v : slope * v;
  const std::size_t ix = x.id();
  // Subgradient at 0 is the negative-side slope (0 for plain ReLU).
  return x.tape()->record(std::move(out), {ix}, [ix, slope](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& xv = tp.value_of(ix);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t i = 0; i < g.size(); ++i) gi[i] += xv[i] > 0.0 ? g[i] : slope * g[i];
    });
  });
}

Var exp(Var x) {
  Matrix out = x.value();
  for (auto& v : out.data()) v = std::exp(v);
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& y = tp.value_of(self);
    accumulate(tp, ix, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] * y[i]; });
  });
}

Var log(Var x) {
  Matrix out = x.value();
  for (auto& v : out.data()) {
    if (!(v > 0.0)) throw Error(ErrorKind::kDegenerateInput, "log of non-positive value");
    v = std::log(v);
  }
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& xv = tp.value_of(ix);
    accumulate(tp, ix, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += g[i] / xv[i]; });
  });
}

Var sum(Var x) {
  double s = 0.0;
  for (double v : x.value().data()) s += v;
  const std::size_t ix = x.id();
  return x.tape()->record(Matrix(1, 1, s), {ix}, [ix](Tape& tp, std::size_t self) {
    const double g = tp.grad_of(self)[0];
    accumulate(tp, ix, [&](Matrix& gi) { for (auto& v : gi.data()) v += g; });
  });
}

Var mean_rows(Var x) {
  const Matrix& xv = x.value();
  if (xv.rows() == 0) throw Error(ErrorKind::kDimension, "mean_rows of empty matrix");
  Matrix out(1, xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c) out(0, c) += xv(r, c);
  const double inv = 1.0 / static_cast<double>(xv.rows());
  for (auto& v : out.data()) v *= inv;
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix, inv](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t r = 0; r < gi.rows(); ++r)
        for (std::size_t c = 0; c < gi.cols(); ++c) gi(r, c) += g(0, c) * inv;
    });
  });
}

Var l2_normalize_rows(Var x) {
  const Matrix& xv = x.value();
  Matrix out = xv;
  std::vector<double> norms(xv.rows());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double s = 0.0;
    for (double v : xv.row_span(r)) s += v * v;
    norms[r] = std::sqrt(s);
    if (!(norms[r] > 1e-12)) throw Error(ErrorKind::kDegenerateInput, "zero-norm row " + std::to_string(r) + " under normalization");
    for (auto& v : out.row_span(r)) v /= norms[r];
  }
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix, norms = std::move(norms)](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& y = tp.value_of(self);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += y(r, c) * g(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) gi(r, c) += (g(r, c) - y(r, c) * dot) / norms[r];
      }
    });
  });
}

namespace {

// Row-max-stabilized softmax over entries with mask != 0 (all when mask empty).
Matrix softmax_impl(const Matrix& x, const Matrix* mask) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < x.cols(); ++c)
      if (!mask || (*mask)(r, c) != 0.0) mx = std::max(mx, x(r, c));
    if (!std::isfinite(mx)) throw Error(ErrorKind::kDegenerateInput, "softmax row " + std::to_string(r) + " fully masked");
    double s = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask && (*mask)(r, c) == 0.0) continue;
      out(r, c) = std::exp(x(r, c) - mx);
      s += out(r, c);
    }
    for (auto& v : out.row_span(r)) v /= s;
  }
  return out;
}

Tape::Rule softmax_rule(std::size_t ix) {
  return [ix](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& y = tp.value_of(self);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) gi(r, c) += y(r, c) * (g(r, c) - dot);
      }
    });
  };
}

}  // namespace

Var softmax_rows(Var x) {
  const std::size_t ix = x.id();
  return x.tape()->record(softmax_impl(x.value(), nullptr), {ix}, softmax_rule(ix));
}

Var masked_softmax_rows(Var x, const Matrix& mask) {
  require_same_shape(x.value(), mask, "masked_softmax_rows");
  const std::size_t ix = x.id();
  // Masked outputs are exactly 0, so the shared rule leaves their grads at 0.
  return x.tape()->record(softmax_impl(x.value(), &mask), {ix}, softmax_rule(ix));
}

Var log_softmax_rows(Var x) {
  const Matrix& xv = x.value();
  Matrix out(xv.rows(), xv.cols());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : xv.row_span(r)) mx = std::max(mx, v);
    double s = 0.0;
    for (double v : xv.row_span(r)) s += std::exp(v - mx);
    const double lse = mx + std::log(s);
    for (std::size_t c = 0; c < xv.cols(); ++c) out(r, c) = xv(r, c) - lse;
  }
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& y = tp.value_of(self);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t r = 0; r < y.rows(); ++r) {
        double gs = 0.0;
        for (std::size_t c = 0; c < y.cols(); ++c) gs += g(r, c);
        for (std::size_t c = 0; c < y.cols(); ++c) gi(r, c) += g(r, c) - std::exp(y(r, c)) * gs;
      }
    });
  });
}

Var transpose(Var x) {
  const Matrix& xv = x.value();
  Matrix out(xv.cols(), xv.rows());
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < xv.cols(); ++c) out(c, r) = xv(r, c);
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ix, [&](Matrix& gi) {
      for (std::size_t r = 0; r < gi.rows(); ++r)
        for (std::size_t c = 0; c < gi.cols(); ++c) gi(r, c) += g(c, r);
    });
  });
}

Var scale(Var x, double factor) {
  Matrix out = x.value();
  for (auto& v : out.data()) v *= factor;
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix}, [ix, factor](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ix, [&](Matrix& gi) { for (std::size_t i = 0; i < g.size(); ++i) gi[i] += factor * g[i]; });
  });
}

Var concat_cols(Var a, Var b) {
  Tape* t = common_tape(a, b);
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  if (av.rows() != bv.rows())
    throw Error(ErrorKind::kDimension, "concat_cols " + av.shape_string() + " vs " + bv.shape_string());
  Matrix out(av.rows(), av.cols() + bv.cols());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::copy(av.row_span(r).begin(), av.row_span(r).end(), out.row_span(r).begin());
    std::copy(bv.row_span(r).begin(), bv.row_span(r).end(), out.row_span(r).begin() + static_cast<std::ptrdiff_t>(av.cols()));
  }
  const std::size_t ia = a.id(), ib = b.id();
  const std::size_t split = av.cols();
  return t->record(std::move(out), {ia, ib}, [ia, ib, split](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    accumulate(tp, ia, [&](Matrix& gi) {
      for (std::size_t r = 0; r < gi.rows(); ++r)
        for (std::size_t c = 0; c < gi.cols(); ++c) gi(r, c) += g(r, c);
    });
    accumulate(tp, ib, [&](Matrix& gi) {
      for (std::size_t r = 0; r < gi.rows(); ++r)
        for (std::size_t c = 0; c < gi.cols(); ++c) gi(r, c) += g(r, split + c);
    });
  });
}

Var gather_rows(Var x, std::span<const std::size_t> rows) {
  const Matrix& xv = x.value();
  Matrix out(rows.size(), xv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= xv.rows()) throw Error(ErrorKind::kDimension, "gather_rows index out of range");
    std::copy(xv.row_span(rows[i]).begin(), xv.row_span(rows[i]).end(), out.row_span(i).begin());
  }
  const std::size_t ix = x.id();
  return x.tape()->record(std::move(out), {ix},
                          [ix, idx = std::vector<std::size_t>(rows.begin(), rows.end())](Tape& tp, std::size_t self) {
                            const Matrix& g = tp.grad_of(self);
                            accumulate(tp, ix, [&](Matrix& gi) {
                              for (std::size_t i = 0; i < idx.size(); ++i)
                                for (std::size_t c = 0; c < gi.cols(); ++c) gi(idx[i], c) += g(i, c);
                            });
                          });
}

}  // namespace ops

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kMatmul: return "matmul";
    case OpKind::kAdd: return "add";
    case OpKind::kSub: return "sub";
    case OpKind::kMul: return "mul";
    case OpKind::kRelu: return "relu";
    case OpKind::kLeakyRelu: return "leaky_relu";
    case OpKind::kExp: return "exp";
    case OpKind::kLog: return "log";
    case OpKind::kSum: return "sum";
    case OpKind::kMeanRows: return "mean_rows";
    case OpKind::kL2NormalizeRows: return "l2_normalize_rows";
    case OpKind::kSoftmaxRows: return "softmax_rows";
    case OpKind::kLogSoftmaxRows: return "log_softmax_rows";
    case OpKind::kMaskedSoftmaxRows: return "masked_softmax_rows";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kScale: return "scale";
    case OpKind::kConcatCols: return "concat_cols";
    case OpKind::kGatherRows: return "gather_rows";
  }
  return "?";
}

Var op_apply(OpKind kind, std::span<const Var> in, const OpArgs& args) {
  auto need = [&](std::size_t n) {
    if (in.size() != n)
      throw Error(ErrorKind::kContract, std::string(to_string(kind)) + " expects " + std::to_string(n) + " inputs");
  };
  switch (kind) {
    case OpKind::kMatmul: need(2); return ops::matmul(in[0], in[1]);
    case OpKind::kAdd: need(2); return ops::add(in[0], in[1]);
    case OpKind::kSub: need(2); return ops::sub(in[0], in[1]);
    case OpKind::kMul: need(2); return ops::mul(in[0], in[1]);
    case OpKind::kRelu: need(1); return ops::relu(in[0]);
    case OpKind::kLeakyRelu: need(1); return ops::leaky_relu(in[0], args.scalar);
    case OpKind::kExp: need(1); return ops::exp(in[0]);
    case OpKind::kLog: need(1); return ops::log(in[0]);
    case OpKind::kSum: need(1); return ops::sum(in[0]);
    case OpKind::kMeanRows: need(1); return ops::mean_rows(in[0]);
    case OpKind::kL2NormalizeRows: need(1); return ops::l2_normalize_rows(in[0]);
    case OpKind::kSoftmaxRows: need(1); return ops::softmax_rows(in[0]);
    case OpKind::kLogSoftmaxRows: need(1); return ops::log_softmax_rows(in[0]);
    case OpKind::kMaskedSoftmaxRows: need(1); return ops::masked_softmax_rows(in[0], args.mask);
    case OpKind::kTranspose: need(1); return ops::transpose(in[0]);
    case OpKind::kScale: need(1); return ops::scale(in[0], args.scalar);
    case OpKind::kConcatCols: need(2); return ops::concat_cols(in[0], in[1]);
    case OpKind::kGatherRows: need(1); return ops::gather_rows(in[0], args.indices);
  }
  throw Error(ErrorKind::kContract, "unknown op kind");
}

// ---------------------------------------------------------------- grad check

// Entries below the floor are dominated by central-difference roundoff.
constexpr double kGradCheckFloor = 1e-6;

GradCheckResult gradient_check(const ForwardFn& forward_fn, std::vector<Matrix> params, double h, double tol) {
  auto evaluate = [&](const std::vector<Matrix>& ps) {
    Tape tape;
    std::vector<Var> vars;
    vars.reserve(ps.size());
    for (const auto& p : ps) vars.push_back(tape.leaf(p, false));
    Var out = forward_fn(tape, vars);
    const double v = out.value()[0];
    if (!std::isfinite(v)) throw Error(ErrorKind::kNumeric, "non-finite forward value");
    return v;
  };

  Tape tape;
  std::vector<Var> vars;
  for (const auto& p : params) vars.push_back(tape.leaf(p, true));
  Var loss = forward_fn(tape, vars);
  tape.backward(loss);

  GradCheckResult result;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const Matrix analytic = vars[p].grad();
    for (std::size_t i = 0; i < params[p].size(); ++i) {
      const double orig = params[p][i];
      params[p][i] = orig + h;
      const double fp = evaluate(params);
      params[p][i] = orig - h;
      const double fm = evaluate(params);
      params[p][i] = orig;
      const double numeric = (fp - fm) / (2.0 * h);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kGradCheckFloor});
      result.max_rel_error = std::max(result.max_rel_error, std::abs(analytic[i] - numeric) / denom);
    }
  }
  result.passed = result.max_rel_error < tol;
  return result;
}

}  // namespace gfmx
