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
#include <random>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// Seeded source for reproducible random instances.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0);
  double normal();
  Complex complex_normal();
  int integer(int lo, int hi);  // inclusive bounds

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

ComplexMatrix ginibre(Rng& rng, Index rows, Index cols);

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(Rng& rng, Index dim);

ComplexMatrix random_hermitian(Rng& rng, Index dim);

ComplexVector random_ket(Rng& rng, Index dim);

/// ρ = G G† / Tr with G of shape dim × rank.
DensityOperator random_density(Rng& rng, Index dim, Index rank);
DensityOperator random_density(Rng& rng, Index dim);

/// Probability vector drawn from a flat Dirichlet distribution.
std::vector<double> random_simplex(Rng& rng, size_t n);

/// Two-outcome projective measurement {Π, I - Π} with Π spanned by a random
/// nonempty proper subset of a Haar-random basis.
Povm random_binary_projective(Rng& rng, Index dim);

/// Mixed ensemble of random pure and Ginibre states.
Ensemble random_ensemble(Rng& rng, Index dim, size_t members);

}  // namespace qsd
