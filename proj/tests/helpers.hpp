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

#include <cmath>
#include <numbers>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd::testing {

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

inline ComplexVector ket(std::initializer_list<Complex> amps) {
  ComplexVector v(static_cast<Index>(amps.size()));
  Index i = 0;
  for (auto a : amps) v(i++) = a;
  return v;
}

inline ComplexVector ket0() { return ket({1.0, 0.0}); }
inline ComplexVector ket1() { return ket({0.0, 1.0}); }
inline ComplexVector ket_plus() { return ket({M_SQRT1_2, M_SQRT1_2}); }

inline DensityOperator pure(const ComplexVector& v) {
  return DensityOperator::from_ket(v);
}

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(values.size()),
                                        static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

// Independent reference implementations built on Eigen's tridiagonal solver.
inline ComplexMatrix oracle_sqrt(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  const RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

// Nested form (Tr √(√ρ σ √ρ))².
inline double oracle_fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  const ComplexMatrix r = oracle_sqrt(rho);
  const ComplexMatrix inner = r * sigma * r;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (inner + inner.adjoint()));
  // Null directions carry round-off of either sign; drop them before the root.
  const double floor = 1e-14 * std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  double t = 0.0;
  for (Index k = 0; k < es.eigenvalues().size(); ++k) {
    if (es.eigenvalues()(k) > floor) t += std::sqrt(es.eigenvalues()(k));
  }
  return t * t;
}

inline double oracle_trace_norm(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  return es.eigenvalues().cwiseAbs().sum();
}

}  // namespace qsd::testing
