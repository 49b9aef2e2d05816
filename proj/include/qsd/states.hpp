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

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "qsd/linalg.hpp"

namespace qsd {

/// Hermitian, positive semidefinite, unit-trace matrix. A state built from a
/// ket remembers it; fidelity and evolution use it when available, and the
/// dense matrix is only formed on first request. Copies share storage.
class DensityOperator {
 public:
  /// Full validation: square, finite, Hermitian, |Tr - 1| <= trace_tol and
  /// eigenvalues >= -psd_clip_tol.
  static DensityOperator from_matrix(const ComplexMatrix& m);

  /// |ψ⟩⟨ψ|. Throws NotNormalized when |‖ψ‖ - 1| > trace_tol.
  static DensityOperator from_ket(const ComplexVector& psi);

  /// For matrices that are positive by construction (unitary conjugation,
  /// convex combination, Gram sums). Only the cheap checks run.
  static DensityOperator assume_valid(ComplexMatrix m);

  static DensityOperator maximally_mixed(Index dim);
  static DensityOperator basis_state(Index dim, Index k);

  const ComplexMatrix& matrix() const;
  Index dim() const { return data_->dim; }
  const std::optional<ComplexVector>& ket() const { return data_->ket; }

 private:
  struct Storage {
    Index dim = 0;
    ComplexMatrix matrix;
    std::optional<ComplexVector> ket;
    std::once_flag built;
  };

  explicit DensityOperator(std::shared_ptr<Storage> data) : data_(std::move(data)) {}
  static DensityOperator from_storage(ComplexMatrix m);

  std::shared_ptr<Storage> data_;
};

/// Runs the full DensityOperator validation on an arbitrary matrix.
void validate_density(const ComplexMatrix& m);

struct EnsembleMember {
  double weight = 0.0;
  DensityOperator state;
};

/// Weighted states {p_i, ρ_i}. Zero-weight members are dropped.
class Ensemble {
 public:
  Ensemble(std::vector<EnsembleMember> members);
  Ensemble(std::span<const double> weights,
           std::span<const DensityOperator> states);

  size_t size() const { return members_.size(); }
  Index dim() const { return members_.front().state.dim(); }
  const EnsembleMember& operator[](size_t i) const { return members_[i]; }
  const std::vector<EnsembleMember>& members() const { return members_; }
  double weight(size_t i) const { return members_[i].weight; }
  const DensityOperator& state(size_t i) const { return members_[i].state; }

 private:
  std::vector<EnsembleMember> members_;
};

/// Measurement operators M_l with Σ M_l† M_l = I within povm_tol.
class Povm {
 public:
  explicit Povm(std::vector<ComplexMatrix> operators);

  size_t size() const { return operators_.size(); }
  Index dim() const { return operators_.front().rows(); }
  const ComplexMatrix& operator[](size_t l) const { return operators_[l]; }
  const std::vector<ComplexMatrix>& operators() const { return operators_; }

  /// max |Σ M†M - I|
  double completeness_defect() const;

 private:
  std::vector<ComplexMatrix> operators_;
};

DensityOperator mix(const Ensemble& ensemble);

/// Σ M_l ρ M_l†
DensityOperator apply_measurement(const DensityOperator& rho, const Povm& povm);

/// ‖√ρ √σ‖₁², clamped to [0, 1].
double fidelity(const DensityOperator& rho, const DensityOperator& sigma);

/// F(AA†, BB†) = ‖A†B‖₁² for arbitrary factors A, B with unit-trace
/// products. Avoids any matrix square root.
double factor_fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tr{ρσ} + √((1 - Tr ρ²)(1 - Tr σ²))
double super_fidelity(const DensityOperator& rho, const DensityOperator& sigma);

double purity(const DensityOperator& rho);

/// Tr{ρσ}, real part.
double overlap(const DensityOperator& rho, const DensityOperator& sigma);

struct PurificationCheck {
  double max_overlap = 0.0;
  double fidelity = 0.0;
  int trials = 0;
  bool bound_holds = true;
};

/// Samples random purifications of σ (random ancilla unitaries) against a
/// fixed purification of ρ and records the largest |⟨ξ|χ⟩|². The maximum
/// can never exceed F(ρ, σ); a violation raises NumericalFailure.
PurificationCheck purification_fidelity_check(const DensityOperator& rho,
                                              const DensityOperator& sigma,
                                              int trials, std::uint64_t seed);

}  // namespace qsd
