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

#include "qsd/random.hpp"

#include <cmath>
#include <numeric>

namespace qsd {

double Rng::uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine_);
}

double Rng::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

int Rng::integer(int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(engine_);
}

ComplexMatrix ginibre(Rng& rng, Index rows, Index cols) {
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.complex_normal();
  }
  return g;
}

ComplexMatrix random_unitary(Rng& rng, Index dim) {
  const ComplexMatrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  return q;
}

ComplexMatrix random_hermitian(Rng& rng, Index dim) {
  const ComplexMatrix g = ginibre(rng, dim, dim);
  return 0.5 * (g + g.adjoint());
}

ComplexVector random_ket(Rng& rng, Index dim) {
  ComplexVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.complex_normal();
  return v / v.norm();
}

DensityOperator random_density(Rng& rng, Index dim, Index rank) {
  if (rank == 1) return DensityOperator::from_ket(random_ket(rng, dim));
  const ComplexMatrix g = ginibre(rng, dim, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::assume_valid(0.5 * (rho + rho.adjoint()));
}

DensityOperator random_density(Rng& rng, Index dim) {
  return random_density(rng, dim, dim);
}

std::vector<double> random_simplex(Rng& rng, size_t n) {
  std::vector<double> w(n);
  for (auto& x : w) x = -std::log(1.0 - rng.uniform());
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& x : w) x /= total;
  return w;
}

Povm random_binary_projective(Rng& rng, Index dim) {
  const ComplexMatrix u = random_unitary(rng, dim);
  // Nonempty proper subset encoded as a bit mask.
  const int masks = (1 << dim) - 2;
  const int mask = rng.integer(1, masks);
  ComplexMatrix pi = ComplexMatrix::Zero(dim, dim);
  for (Index k = 0; k < dim; ++k) {
    if (mask & (1 << k)) pi += outer(u.col(k));
  }
  pi = 0.5 * (pi + pi.adjoint());
  ComplexMatrix rest = ComplexMatrix::Identity(dim, dim) - pi;
  return Povm({pi, rest});
}

Ensemble random_ensemble(Rng& rng, Index dim, size_t members) {
  const auto weights = random_simplex(rng, members);
  std::vector<DensityOperator> states;
  states.reserve(members);
  for (size_t i = 0; i < members; ++i) {
    const Index rank = rng.integer(0, 3) == 0 ? 1 : rng.integer(1, static_cast<int>(dim));
    states.push_back(random_density(rng, dim, rank));
  }
  return Ensemble(weights, states);
}

}  // namespace qsd
