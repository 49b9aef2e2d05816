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

#include "qsd/errors.hpp"

namespace qsd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotSquare: return "NotSquare";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidState: return "InvalidState";
    case ErrorKind::InvalidEnsemble: return "InvalidEnsemble";
    case ErrorKind::InvalidPovm: return "InvalidPovm";
    case ErrorKind::DegenerateMixture: return "DegenerateMixture";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorKind::WindowOutOfRange: return "WindowOutOfRange";
    case ErrorKind::SchemeMismatch: return "SchemeMismatch";
    case ErrorKind::BadPartition: return "BadPartition";
    case ErrorKind::SearchFailed: return "SearchFailed";
    case ErrorKind::RankOutOfRange: return "RankOutOfRange";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

ErrorClass classify(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::ParseError:
      return ErrorClass::Parse;
    case ErrorKind::NoConvergence:
    case ErrorKind::NotPSD:
    case ErrorKind::DegenerateMixture:
    case ErrorKind::SearchFailed:
    case ErrorKind::NumericalFailure:
      return ErrorClass::Numerical;
    default:
      return ErrorClass::Validation;
  }
}

}  // namespace qsd
