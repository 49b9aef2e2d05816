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

#include "doctest.h"
#include "helpers.hpp"
#include "qsd/errors.hpp"
#include "qsd/random.hpp"
#include "qsd/states.hpp"

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

ComplexMatrix projector(const ComplexVector& v) { return outer(v); }

}  // namespace

TEST_CASE("DensityOperator validation") {
  CHECK_NOTHROW(DensityOperator::from_matrix(diag({0.75, 0.25})));
  CHECK(kind_of([] { DensityOperator::from_matrix(diag({0.75, 0.75})); }) ==
        ErrorKind::InvalidState);
  CHECK(kind_of([] { DensityOperator::from_matrix(diag({1.5, -0.5})); }) ==
        ErrorKind::NotPSD);
  ComplexMatrix skew(2, 2);
  skew << 0.5, 0.3, 0.1, 0.5;
  CHECK(kind_of([&] { DensityOperator::from_matrix(skew); }) == ErrorKind::NotHermitian);
  CHECK(kind_of([] { DensityOperator::from_matrix(ComplexMatrix::Zero(2, 3)); }) ==
        ErrorKind::NotSquare);
  ComplexMatrix nan = diag({0.5, 0.5});
  nan(0, 1) = std::nan("");
  CHECK(kind_of([&] { DensityOperator::from_matrix(nan); }) == ErrorKind::NonFinite);
  CHECK(kind_of([] { DensityOperator::from_ket(ket({1.0, 1.0})); }) ==
        ErrorKind::NotNormalized);
}

TEST_CASE("Ensemble validation") {
  const auto r0 = pure(ket0());
  const auto r1 = pure(ket1());
  CHECK(kind_of([&] { Ensemble({{0.5, r0}, {0.6, r1}}); }) == ErrorKind::InvalidEnsemble);
  CHECK(kind_of([&] { Ensemble({{1.5, r0}, {-0.5, r1}}); }) == ErrorKind::InvalidEnsemble);
  CHECK(kind_of([&] { Ensemble(std::vector<EnsembleMember>{}); }) ==
        ErrorKind::InvalidEnsemble);
  CHECK(kind_of([&] {
          Ensemble({{0.5, r0}, {0.5, DensityOperator::maximally_mixed(3)}});
        }) == ErrorKind::DimensionMismatch);
  const Ensemble dropped({{1.0, r0}, {0.0, r1}});
  CHECK(dropped.size() == 1);
}

TEST_CASE("Povm validation") {
  CHECK_NOTHROW(Povm({ComplexMatrix::Identity(2, 2)}));
  CHECK(kind_of([] { Povm({projector(ket0())}); }) == ErrorKind::InvalidPovm);
  CHECK(kind_of([] { Povm(std::vector<ComplexMatrix>{}); }) == ErrorKind::InvalidPovm);
  CHECK(kind_of([] {
          Povm({projector(ket0()), ComplexMatrix::Identity(3, 3)});
        }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("mix: closed forms") {
  const auto r0 = pure(ket0());
  CHECK(max_abs(mix(Ensemble({{1.0, r0}})).matrix() - r0.matrix()) == 0.0);
  CHECK(max_abs(mix(Ensemble({{0.5, r0}, {0.5, pure(ket1())}})).matrix() -
                diag({0.5, 0.5})) <= 1e-15);
  ComplexMatrix expected(2, 2);
  expected << 2.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  const auto m = mix(Ensemble({{1.0 / 3, r0}, {2.0 / 3, pure(ket_plus())}}));
  CHECK(max_abs(m.matrix() - expected) <= 1e-15);
}

TEST_CASE("apply_measurement: closed forms") {
  const auto plus = pure(ket_plus());
  CHECK(max_abs(apply_measurement(plus, Povm({ComplexMatrix::Identity(2, 2)})).matrix() -
                plus.matrix()) <= 1e-15);
  const Povm z({projector(ket0()), projector(ket1())});
  CHECK(max_abs(apply_measurement(plus, z).matrix() - diag({0.5, 0.5})) <= 1e-15);
  const auto d = DensityOperator::from_matrix(diag({0.3, 0.7}));
  CHECK(max_abs(apply_measurement(d, z).matrix() - d.matrix()) <= 1e-15);
}

TEST_CASE("fidelity: closed forms") {
  const auto r0 = pure(ket0());
  const auto half = DensityOperator::maximally_mixed(2);
  CHECK(fidelity(r0, r0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(fidelity(r0, pure(ket1())) == 0.0);
  CHECK(fidelity(half, r0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(fidelity(half, half) == doctest::Approx(1.0).epsilon(1e-12));
  // Mixed path on the same pair without the cached ket.
  const auto r0m = DensityOperator::from_matrix(r0.matrix());
  CHECK(fidelity(half, r0m) == doctest::Approx(0.5).epsilon(1e-12));
  // Commuting mixed pair: (Σ √(a_k b_k))².
  const auto a = DensityOperator::from_matrix(diag({0.9, 0.1}));
  const auto b = DensityOperator::from_matrix(diag({0.1, 0.9}));
  CHECK(fidelity(a, b) == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(kind_of([&] { fidelity(half, DensityOperator::maximally_mixed(3)); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("super_fidelity and purity: closed forms") {
  const auto r0 = pure(ket0());
  const auto half = DensityOperator::maximally_mixed(2);
  CHECK(super_fidelity(r0, r0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(super_fidelity(half, half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(super_fidelity(r0, pure(ket1())) == 0.0);
  CHECK(purity(r0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(purity(DensityOperator::maximally_mixed(5)) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(purity(DensityOperator::from_matrix(diag({0.75, 0.25}))) ==
        doctest::Approx(0.625).epsilon(1e-15));
}

TEST_CASE("fidelity properties on random pairs") {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = rng.integer(2, 6);
    const auto rho = random_density(rng, d, rng.integer(1, static_cast<int>(d)));
    const auto sigma = random_density(rng, d, rng.integer(1, static_cast<int>(d)));
    const double f = fidelity(rho, sigma);
    CHECK(std::abs(f - fidelity(sigma, rho)) <= 1e-9);
    CHECK(super_fidelity(rho, sigma) >= f - 1e-9);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);

    const ComplexVector psi = random_ket(rng, d);
    const auto pure_sigma = pure(psi);
    const double direct = psi.dot(rho.matrix() * psi).real();
    CHECK(std::abs(fidelity(rho, pure_sigma) - direct) <= 1e-9);
    // Same value through the general singular-value route.
    const auto as_matrix = DensityOperator::from_matrix(pure_sigma.matrix());
    const auto rho_matrix = DensityOperator::from_matrix(rho.matrix());
    CHECK(std::abs(fidelity(rho_matrix, as_matrix) - direct) <= 1e-9);
  }
}

TEST_CASE("apply_measurement preserves trace and mix validates") {
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const Index d = rng.integer(2, 6);
    const auto rho = random_density(rng, d);
    const Povm q = random_binary_projective(rng, d);
    const auto out = apply_measurement(rho, q);
    CHECK(std::abs(out.matrix().trace().real() - 1.0) <= 1e-9);
    CHECK_NOTHROW(validate_density(out.matrix()));
    const Ensemble e = random_ensemble(rng, d, static_cast<size_t>(rng.integer(1, 4)));
    CHECK_NOTHROW(validate_density(mix(e).matrix()));
  }
}

TEST_CASE("purification_fidelity_check") {
  const auto r0 = pure(ket0());
  const auto same = purification_fidelity_check(r0, r0, 50, 1);
  CHECK(same.max_overlap == doctest::Approx(1.0).epsilon(1e-12));
  const auto orth = purification_fidelity_check(r0, pure(ket1()), 50, 1);
  CHECK(orth.max_overlap <= 1e-24);

  Rng rng(107);
  const auto rho = random_density(rng, 2);
  const auto sigma = random_density(rng, 2);
  const auto report = purification_fidelity_check(rho, sigma, 1000, 7);
  CHECK(report.bound_holds);
  CHECK(report.max_overlap <= report.fidelity + 1e-9);
  CHECK(report.max_overlap >= 0.9 * report.fidelity);
}
