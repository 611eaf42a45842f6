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

// Data-parallel kernels. Each has a serial reference kept for tests and the
// benchmark; the OpenMP variants split work by output row so every output
// element is computed by the same instruction sequence as the serial path
// and results are bit-identical regardless of thread count.

#ifndef GFMX_KERNELS_HPP
#define GFMX_KERNELS_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "gfmx/tensor.hpp"

namespace gfmx::kernels {

// out = a * b
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_omp(const Matrix& a, const Matrix& b, Matrix& out);
// out += a^T * b
void matmul_tn_acc_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn_acc_omp(const Matrix& a, const Matrix& b, Matrix& out);
// out += a * b^T
void matmul_nt_acc_serial(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt_acc_omp(const Matrix& a, const Matrix& b, Matrix& out);

/// Dispatchers used by the autodiff ops: OpenMP above a work threshold.
Matrix matmul(const Matrix& a, const Matrix& b);
void matmul_tn_acc(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt_acc(const Matrix& a, const Matrix& b, Matrix& out);

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;
};

/// For each row of `queries`, the row of `refs` at the smallest Euclidean
/// distance (lowest index on ties).
std::vector<Neighbor> nearest_rows_serial(const Matrix& queries, const Matrix& refs);
std::vector<Neighbor> nearest_rows_omp(const Matrix& queries, const Matrix& refs);

/// Runs fn(i) for i in [0, n). Iterations must write disjoint outputs.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// Number of threads parallel regions will use.
int max_threads();

}  // namespace gfmx::kernels

#endif  // GFMX_KERNELS_HPP
