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

#ifndef GFMX_ERROR_HPP
#define GFMX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gfmx {

enum class ErrorKind {
  kDimension,
  kDegenerateInput,
  kContract,
  kNumeric,
  kConfig,
  kTooSmall,
  kEmptyText,
  kMissingData,
  kOptimizer,
  kBudget,
  kThrottle,
  kUnsynthesizable,
  kUndefinedMetric,
  kIo,
};

const char* to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` lets callers (the CLI in
/// particular) map failures onto stable exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension error";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kTooSmall: return "too small";
    case ErrorKind::kEmptyText: return "empty text";
    case ErrorKind::kMissingData: return "missing data";
    case ErrorKind::kOptimizer: return "optimizer error";
    case ErrorKind::kBudget: return "budget exhausted";
    case ErrorKind::kThrottle: return "rate limit exceeded";
    case ErrorKind::kUnsynthesizable: return "unsynthesizable node";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

}  // namespace gfmx

#endif  // GFMX_ERROR_HPP
