// Copyright 2026 The Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace infoproj {

// Coarse failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNotPositiveDefinite,
  kInvalidSupport,
  kInfeasible,
  kObjectiveFailure,
  kEnumerationLimit,
  kDegenerate,
  kIo,
  kSchema,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kNotPositiveDefinite: return "not_positive_definite";
    case ErrorKind::kInvalidSupport: return "invalid_support";
    case ErrorKind::kInfeasible: return "infeasible";
    case ErrorKind::kObjectiveFailure: return "objective_failure";
    case ErrorKind::kEnumerationLimit: return "enumeration_limit";
    case ErrorKind::kDegenerate: return "degenerate";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSchema: return "schema";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace infoproj
