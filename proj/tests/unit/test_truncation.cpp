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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/random.hpp"
#include "qsd/truncation.hpp"

using namespace qsd;
using namespace qsd::testing;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected qsd::Error");
  return ErrorKind::InvalidArgument;
}

std::vector<Index> all_ranks(Index n) {
  std::vector<Index> r(static_cast<size_t>(n));
  std::iota(r.begin(), r.end(), Index{1});
  return r;
}

}  // namespace

TEST_CASE("truncate basics") {
  const auto mixed = DensityOperator::maximally_mixed(4);
  const Truncation half = truncate(mixed, 2);
  CHECK(half.tail == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.alpha() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(half.matrix().trace().real() == doctest::Approx(0.5).epsilon(1e-14));

  Rng rng(3);
  const auto rho = random_density(rng, 5);
  const Truncation full = truncate(rho, 5);
  CHECK(full.tail <= 1e-15);
  CHECK(max_abs(full.matrix() - rho.matrix()) <= 1e-13);

  CHECK(kind_of([&] { truncate(rho, 0); }) == ErrorKind::RankOutOfRange);
  CHECK(kind_of([&] { truncate(rho, 6); }) == ErrorKind::RankOutOfRange);

  const Truncation pure_trunc = truncate(pure(ket_plus()), 1);
  CHECK(pure_trunc.tail == 0.0);
  CHECK(max_abs(pure_trunc.matrix() - outer(ket_plus())) <= 1e-15);
}

TEST_CASE("truncate keeps the lower index on ties") {
  const auto rho = DensityOperator::from_matrix(diag({0.25, 0.25, 0.25, 0.25}));
  const Truncation t = truncate(rho, 1);
  // Every kept direction carries exactly weight 1/4 and the result is deterministic.
  CHECK(t.kept(0) == doctest::Approx(0.25));
  CHECK(max_abs(truncate(rho, 1).factor - t.factor) == 0.0);
}

TEST_CASE("geometric spectrum tail") {
  Rng rng(8);
  const auto rho = geometric_state(12, 0.5, random_unitary(rng, 12));
  const Truncation t = truncate(rho, 4);
  // Σ_{k=5}^{12} 2^{-k} / Σ_{k=1}^{12} 2^{-k} = 255/4095.
  CHECK(t.tail == doctest::Approx(255.0 / 4095.0).epsilon(1e-12));
  for (Index d = 1; d <= 12; ++d) {
    const Truncation td = truncate(rho, d);
    CHECK(std::abs(td.alpha() - td.matrix().trace().real()) <= 1e-12);
    CHECK(oracle_trace_norm(td.matrix() - rho.matrix()) ==
          doctest::Approx(td.tail).epsilon(1e-9));
  }
}

TEST_CASE("root fidelity of factors matches the nested oracle") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_density(rng, 6, rng.integer(1, 6));
    const auto b = random_density(rng, 6, rng.integer(1, 6));
    const ComplexMatrix x = truncate(a, 6).factor;
    const ComplexMatrix y = truncate(b, 6).factor;
    CHECK(root_fidelity_of_factors(x, y) ==
          doctest::Approx(std::sqrt(oracle_fidelity(a.matrix(), b.matrix()))).epsilon(1e-8));
  }
}

TEST_CASE("fidelity convergence on the geometric pair") {
  Rng rng(12);
  const auto rho = geometric_state(12, 0.5, random_unitary(rng, 12));
  const auto sigma = geometric_state(12, 0.5, random_unitary(rng, 12));
  const TruncationStudy s = fidelity_convergence_study(rho, sigma, all_ranks(12));
  CHECK(s.pass());
  CHECK(s.monotone);
  CHECK(s.full_value == doctest::Approx(s.reference_value).epsilon(1e-9));
  CHECK(s.rows.back().fidelity_dev <= 1e-12);
  const TruncationRow& r4 = s.rows[3];
  CHECK(r4.bound == doctest::Approx(2.0 * std::sqrt(255.0 / 4095.0)).epsilon(1e-12));
  CHECK(r4.fidelity_dev < r4.bound);
  for (const auto& r : s.rows) CHECK(r.fidelity_dev <= r.bound + 1e-9);

  CHECK(kind_of([&] { fidelity_convergence_study(rho, sigma, {4, 2}); }) ==
        ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { fidelity_convergence_study(rho, sigma, {13}); }) ==
        ErrorKind::RankOutOfRange);
}

TEST_CASE("lemma bound on random pairs") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(8, 16);
    const auto rho = random_density(rng, n);
    const auto sigma = random_density(rng, n, rng.integer(1, static_cast<int>(n)));
    const TruncationStudy s = fidelity_convergence_study(rho, sigma, all_ranks(n));
    for (const auto& r : s.rows) CHECK(r.bound_holds);
    CHECK(s.converged);
  }
}

TEST_CASE("KB convergence and displacement") {
  Rng rng(4);
  const auto rho = geometric_state(12, 0.5, random_unitary(rng, 12));
  const auto sigma = geometric_state(12, 0.5, random_unitary(rng, 12));
  const std::vector<double> p{0.3, 0.7};
  const Ensemble ens(p, std::vector<DensityOperator>{rho, sigma});
  const TruncationStudy s = kb_convergence_study(ens, all_ranks(12));
  CHECK(s.pass());
  CHECK(s.full_value == doctest::Approx(s.reference_value).epsilon(1e-9));
  CHECK(s.rows.back().kb_dev <= 1e-9);
  CHECK(s.rows.back().bound == 0.0);
  const TruncationRow& r4 = s.rows[3];
  CHECK(r4.bound == doctest::Approx(2.0 * (0.3 * r4.tails[0] + 0.7 * r4.tails[1])).epsilon(1e-14));
  CHECK(r4.tails[0] == doctest::Approx(255.0 / 4095.0).epsilon(1e-12));
  for (const auto& r : s.rows) {
    for (size_t i = 0; i < 2; ++i) CHECK(r.alphas[i] == doctest::Approx(1.0 - r.tails[i]));
  }
  for (size_t k = 1; k < s.rows.size(); ++k) CHECK(s.rows[k].bound < s.rows[k - 1].bound);

  const Ensemble three = random_ensemble(rng, 8, 3);
  CHECK(kb_convergence_study(three, {2, 4, 8}).rows.back().kb_dev <= 1e-9);
}
