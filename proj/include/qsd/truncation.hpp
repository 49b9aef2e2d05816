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

#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// Rank-d eigenbasis truncation of a state. The kept part is stored as a
/// factor X (dim × d) with ρ_d = X X†.
struct Truncation {
  Index rank = 0;
  ComplexMatrix factor;
  RealVector kept;  // descending
  double tail = 0.0;  // Σ of dropped eigenvalues = 1 - Tr ρ_d

  ComplexMatrix matrix() const { return factor * factor.adjoint(); }
  double alpha() const { return 1.0 - tail; }
};

/// Keeps the d largest eigenvalues; equal eigenvalues at the cut keep the
/// lower index. Throws RankOutOfRange unless 1 ≤ d ≤ dim.
Truncation truncate(const DensityOperator& rho, Index d);

/// Diagonal spectrum λ_k ∝ ratio^k (k = 1..dim) rotated into `basis`.
DensityOperator geometric_state(Index dim, double ratio, const ComplexMatrix& basis);

/// ‖√A √B‖₁ for A = XX†, B = YY†.
double root_fidelity_of_factors(const ComplexMatrix& x, const ComplexMatrix& y);

struct TruncationRow {
  Index d = 0;
  std::vector<double> tails;   // per state
  std::vector<double> alphas;  // per state, 1 - tail
  double tail = 0.0;           // Σ of the per-state tails
  double alpha = 1.0;          // smallest α
  double value = 0.0;          // root fidelity or KB at this rank
  double fidelity_dev = 0.0;   // fidelity study only
  double kb_dev = 0.0;         // KB study only
  double bound = 0.0;          // √tail_ρ + √tail_σ, or N Σ p_i tail_i
  double kb_unnormalized = 0.0;
  bool bound_holds = true;
};

struct TruncationStudy {
  enum class Kind { Fidelity, KnillBarnum };
  Kind kind = Kind::Fidelity;
  std::vector<TruncationRow> rows;
  double full_value = 0.0;
  double reference_value = 0.0;  // same quantity from the dense route
  bool monotone = true;          // deviation (or displacement) nonincreasing in d
  bool converged = true;         // deviation ≤ 1e-9 at full rank
  bool chain_holds = true;       // KB study: unnormalized ≤ max α · normalized
  bool pass() const;
};

/// Ranks must be ascending and within [1, dim]. Deviation of ‖√ρ_d √σ_d‖₁
/// from the full value against √tail_ρ + √tail_σ.
TruncationStudy fidelity_convergence_study(const DensityOperator& rho,
                                           const DensityOperator& sigma,
                                           const std::vector<Index>& ranks);

/// KB bound of the renormalized truncations α_{i,d}^{-1} ρ_{i,d} per rank,
/// with the min-error displacement bound N Σ p_i tail_i(d).
TruncationStudy kb_convergence_study(const Ensemble& ensemble, const std::vector<Index>& ranks);

}  // namespace qsd
