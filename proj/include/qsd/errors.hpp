// Copyright 2026 The qsd-lab Authors
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
#include <string_view>

namespace qsd {

enum class ErrorKind {
  NotHermitian,
  NoConvergence,
  NotPSD,
  NotSquare,
  NonFinite,
  DimensionMismatch,
  InvalidState,
  InvalidEnsemble,
  InvalidPovm,
  DegenerateMixture,
  NotNormalized,
  InvalidArgument,
  UnsupportedCombination,
  WindowOutOfRange,
  SchemeMismatch,
  BadPartition,
  SearchFailed,
  RankOutOfRange,
  NumericalFailure,
  ParseError,
  ValidationError,
};

// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorClass { Parse, Validation, Numerical };

std::string_view to_string(ErrorKind kind) noexcept;
ErrorClass classify(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qsd
