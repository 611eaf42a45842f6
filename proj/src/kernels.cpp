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

#include "gfmx/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gfmx::kernels {
namespace {

// Below this many multiply-adds the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 1 << 16;

void check_mm(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw Error(ErrorKind::kDimension, "matmul " + a.shape_string() + " x " + b.shape_string());
}

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
  const std::size_t k_dim = a.cols();
  const std::size_t n = b.cols();
  double* o = out.row_span(i).data();
  for (std::size_t j = 0; j < n; ++j) o[j] = 0.0;
  for (std::size_t k = 0; k < k_dim; ++k) {
    const double aik = a(i, k);
    if (aik == 0.0) continue;
    const double* brow = b.row_span(k).data();
    for (std::size_t j = 0; j < n; ++j) o[j] += aik * brow[j];
  }
}

// Row i of out += a^T b: out(i, j) += sum_k a(k, i) b(k, j)
inline void matmul_tn_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
  const std::size_t n = b.cols();
  double* o = out.row_span(i).data();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double aki = a(k, i);
    if (aki == 0.0) continue;
    const double* brow = b.row_span(k).data();
    for (std::size_t j = 0; j < n; ++j) o[j] += aki * brow[j];
  }
}

// Row i of out += a b^T: out(i, j) += sum_k a(i, k) b(j, k)
inline void matmul_nt_row(const Matrix& a, const Matrix& b, Matrix& out, std::size_t i) {
  const double* arow = a.row_span(i).data();
  for (std::size_t j = 0; j < b.rows(); ++j) {
    const double* brow = b.row_span(j).data();
    double s = 0.0;
    for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
    out(i, j) += s;
  }
}

inline Neighbor nearest_one(const Matrix& queries, const Matrix& refs, std::size_t i) {
  Neighbor best{0, std::numeric_limits<double>::infinity()};
  const double* q = queries.row_span(i).data();
  for (std::size_t j = 0; j < refs.rows(); ++j) {
    const double* r = refs.row_span(j).data();
    double s = 0.0;
    for (std::size_t k = 0; k < refs.cols(); ++k) {
      const double d = q[k] - r[k];
      s += d * d;
    }
    if (s < best.distance) best = {j, s};
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

}  // namespace

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mm(a, b);
  out = Matrix(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, out, i);
}

void matmul_omp(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mm(a, b);
  out = Matrix(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) matmul_row(a, b, out, static_cast<std::size_t>(i));
}

void matmul_tn_acc_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  for (std::size_t i = 0; i < a.cols(); ++i) matmul_tn_row(a, b, out, i);
}

void matmul_tn_acc_omp(const Matrix& a, const Matrix& b, Matrix& out) {
  const auto rows = static_cast<std::ptrdiff_t>(a.cols());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) matmul_tn_row(a, b, out, static_cast<std::size_t>(i));
}

void matmul_nt_acc_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_nt_row(a, b, out, i);
}

void matmul_nt_acc_omp(const Matrix& a, const Matrix& b, Matrix& out) {
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i) matmul_nt_row(a, b, out, static_cast<std::size_t>(i));
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix out;
  if (a.rows() * a.cols() * b.cols() >= kParallelWork && max_threads() > 1)
    matmul_omp(a, b, out);
  else
    matmul_serial(a, b, out);
  return out;
}

void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols())
    throw Error(ErrorKind::kDimension, "matmul_tn " + a.shape_string() + " x " + b.shape_string());
  if (a.rows() * a.cols() * b.cols() >= kParallelWork && max_threads() > 1)
    matmul_tn_acc_omp(a, b, out);
  else
    matmul_tn_acc_serial(a, b, out);
}

void matmul_nt_acc(const Matrix& a, const Matrix& b, Matrix& out) {
  if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows())
    throw Error(ErrorKind::kDimension, "matmul_nt " + a.shape_string() + " x " + b.shape_string());
  if (a.rows() * a.cols() * b.rows() >= kParallelWork && max_threads() > 1)
    matmul_nt_acc_omp(a, b, out);
  else
    matmul_nt_acc_serial(a, b, out);
}

std::vector<Neighbor> nearest_rows_serial(const Matrix& queries, const Matrix& refs) {
  if (refs.rows() == 0 || queries.cols() != refs.cols())
    throw Error(ErrorKind::kDimension, "nearest_rows " + queries.shape_string() + " vs " + refs.shape_string());
  std::vector<Neighbor> out(queries.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i) out[i] = nearest_one(queries, refs, i);
  return out;
}

std::vector<Neighbor> nearest_rows_omp(const Matrix& queries, const Matrix& refs) {
  if (refs.rows() == 0 || queries.cols() != refs.cols())
    throw Error(ErrorKind::kDimension, "nearest_rows " + queries.shape_string() + " vs " + refs.shape_string());
  std::vector<Neighbor> out(queries.rows());
  const auto rows = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < rows; ++i)
    out[static_cast<std::size_t>(i)] = nearest_one(queries, refs, static_cast<std::size_t>(i));
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const auto count = static_cast<std::ptrdiff_t>(n);
  // Exceptions must not escape an OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(gfmx_parallel_for_error)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace gfmx::kernels
