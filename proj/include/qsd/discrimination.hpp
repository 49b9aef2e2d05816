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

#include <optional>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

struct ErrorBreakdown {
  double error = 0.0;       // 1 - Σ p_i Tr{M_i ρ_i M_i†}
  double cross_term = 0.0;  // Σ_i Σ_{j≠i} p_i Tr{M_j ρ_i M_j†}
};

/// Outcome i of the POVM guesses member i; operators past the last member
/// only add to the error. Throws NumericalFailure when the two forms disagree
/// by more than 1e-9.
ErrorBreakdown error_probability(const Ensemble& ensemble, const Povm& povm);

struct HellstromResult {
  double error = 0.0;
  Povm povm;  // {P₊, P₋}; null directions of p1ρ1 - p2ρ2 go to outcome 1
};

HellstromResult hellstrom(double p1, const DensityOperator& rho1, double p2,
                          const DensityOperator& rho2);

/// Pairwise F(ρ_i, ρ_j), symmetric with unit diagonal.
RealMatrix pairwise_fidelity(const Ensemble& ensemble);

double qiu_lower(const Ensemble& ensemble);
double montanaro_lower(const Ensemble& ensemble);
double montanaro_lower(const Ensemble& ensemble, const RealMatrix& fidelities);
double knill_barnum_upper(const Ensemble& ensemble);
double knill_barnum_upper(const Ensemble& ensemble, const RealMatrix& fidelities);

/// Square-root measurement. Operator i is √(p_i ρ_i) S^{-1/2}, so its effect
/// is S^{-1/2} p_i ρ_i S^{-1/2}. A trailing failure projector covers the
/// kernel of S when S is rank deficient.
Povm pgm(const Ensemble& ensemble);

struct BoundsReport {
  double qiu_lower = 0.0;
  double montanaro_lower = 0.0;
  double kb_upper = 0.0;
  std::optional<double> pgm_error;
  std::optional<double> hellstrom_exact;

  /// Distance between the tightest available lower and upper estimates.
  double bracket_width() const;
};

BoundsReport bounds_report(const Ensemble& ensemble, bool with_pgm = true);

struct ChernoffPair {
  size_t i = 0;
  size_t j = 0;
  double exponent = 0.0;  // +inf for orthogonal supports
  double s_min = 0.5;
  double min_value = 1.0;
};

struct ChernoffReport {
  std::vector<ChernoffPair> pairs;  // i < j
  double ensemble_exponent = 0.0;
};

/// Tr{ρ^s σ^{1-s}} with 0^0 read as the support projector.
double chernoff_objective(const DensityOperator& rho, const DensityOperator& sigma,
                          double s);

ChernoffPair chernoff_pair(const DensityOperator& rho, const DensityOperator& sigma);
ChernoffReport chernoff(const Ensemble& ensemble);

struct TensorPowerRow {
  int n = 0;
  double p_error = 0.0;
  double rate = 0.0;  // -log(p_error)/n, +inf when p_error = 0
  std::optional<double> explicit_error;
};

struct TensorPowerStudy {
  double fidelity = 0.0;  // |⟨ψ1|ψ2⟩|²
  double xi = 0.0;        // Chernoff exponent of the pair
  std::vector<TensorPowerRow> rows;
  double max_explicit_deviation = 0.0;
};

/// Minimum error for ψ1^{⊗n} against ψ2^{⊗n}, n = 1..n_max (n_max ≤ 24).
/// For n ≤ explicit_n_cap (and at most 256 dimensions) the tensor powers are
/// built and solved directly; a mismatch above 1e-9 raises NumericalFailure.
TensorPowerStudy tensor_power_study(double p1, const ComplexVector& psi1, double p2,
                                    const ComplexVector& psi2, int n_max,
                                    int explicit_n_cap = 6);

}  // namespace qsd
