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

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace qsd {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Numerical tolerances shared across the library.
namespace tol {
inline constexpr double eig = 1e-11;
inline constexpr double herm = 1e-10;
// Relative to the largest eigenvalue magnitude.
inline constexpr double psd_clip = 1e-10;
inline constexpr double trace = 1e-9;
inline constexpr double povm = 1e-8;
inline constexpr double quad = 1e-8;
}  // namespace tol

inline constexpr int kMaxJacobiSweeps = 100;

/// Spectral decomposition A = V diag(values) V† of a Hermitian matrix.
/// Eigenvalues are ascending; ties keep the order in which the solver
/// produced them.
struct HermEigen {
  RealVector values;
  ComplexMatrix vectors;
  int sweeps = 0;

  Index dim() const { return values.size(); }
  ComplexMatrix reconstruct() const;
};

/// Tagged real function applied to a Hermitian matrix through its spectrum.
struct SpectralFunction {
  enum class Kind { Sqrt, Power, Abs };
  Kind kind = Kind::Sqrt;
  double exponent = 0.5;

  static SpectralFunction sqrt() { return {Kind::Sqrt, 0.5}; }
  static SpectralFunction power(double s) { return {Kind::Power, s}; }
  static SpectralFunction abs() { return {Kind::Abs, 1.0}; }
};

double max_abs(const ComplexMatrix& a);
double hermiticity_defect(const ComplexMatrix& a);

/// Throws NotSquare / NonFinite. `what` names the caller in the message.
void require_square_finite(const ComplexMatrix& a, std::string_view what);

/// Throws NotHermitian if max |A - A†| exceeds herm_tol * max(1, max|A|).
void require_hermitian(const ComplexMatrix& a, std::string_view what);

/// Cyclic complex Jacobi eigensolver.
HermEigen herm_eig(const ComplexMatrix& a);

/// Largest |λ| treated as numerically zero when forming sqrt/power. This is
/// a round-off floor well below psd_clip.
double spectral_noise_floor(const HermEigen& e);

/// f(A) = V f(Λ) V†. For sqrt and power, eigenvalues in [-psd_clip, floor]
/// are mapped to zero (so power(0) yields the support projector); anything
/// more negative raises NotPSD.
ComplexMatrix herm_fn(const HermEigen& e, SpectralFunction f);
ComplexMatrix herm_fn(const ComplexMatrix& a, SpectralFunction f);

/// Sum of singular values. Hermitian inputs use Σ|λ_k|.
double trace_norm(const ComplexMatrix& a);
double trace_norm_hermitian(const ComplexMatrix& a);

/// Singular values via a bidiagonal SVD, descending.
RealVector singular_values(const ComplexMatrix& a);

/// exp(-i θ B) for Hermitian B.
ComplexMatrix unitary_exp(const ComplexMatrix& b, double theta);
ComplexMatrix unitary_exp(const HermEigen& b, double theta);

/// |ψ⟩⟨ψ|
ComplexMatrix outer(const ComplexVector& psi);

/// Kronecker product.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);

}  // namespace qsd
