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
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/random.hpp"
#include "qsd/urm.hpp"

using namespace qsd;
using namespace qsd::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected qsd::Error");
  return ErrorKind::InvalidArgument;
}

// |Σ_{k<d} e^{-i t h k}| / d for an evenly spaced grid of step h.
double geometric_oracle(int d, double h, double t) {
  const double half = 0.5 * h * t;
  if (std::abs(std::sin(half)) < 1e-300) return 1.0;
  return std::abs(std::sin(d * half) / (d * std::sin(half)));
}

struct Pure3 {
  UnitaryFamily family;
  std::vector<DensityOperator> base;
  std::vector<double> weights;
};

Pure3 ac_three_branch(const AcModel& m) {
  const auto psi = DensityOperator::from_ket(m.psi);
  return {UnitaryFamily(m.generator, {0.0, 1.0, 2.0}), {psi, psi, psi},
          {1.0 / 3, 1.0 / 3, 1.0 / 3}};
}

}  // namespace

TEST_CASE("UnitaryFamily rejects repeated rates") {
  CHECK(kind_of([] { UnitaryFamily(pauli_x(), {1.0, 1.0}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] {
          ComplexMatrix m(2, 2);
          m << 0, 1, 0, 0;
          UnitaryFamily(m, {0.0, 1.0});
        }) == ErrorKind::NotHermitian);
}

TEST_CASE("evolve_ensemble: t = 0 and qubit populations") {
  const UnitaryFamily f(pauli_x(), {0.0, 1.0});
  const std::vector<DensityOperator> base{pure(ket0()), pure(ket0())};
  const std::vector<double> w{0.5, 0.5};
  const Ensemble e0 = evolve_ensemble(f, base, w, 0.0);
  CHECK(max_abs(e0.state(1).matrix() - base[1].matrix()) <= 1e-15);
  for (double t : {0.3, 1.1, 7.9}) {
    const Ensemble e = evolve_ensemble(f, base, w, t);
    CHECK(e.state(1).matrix()(0, 0).real() ==
          doctest::Approx(std::cos(t) * std::cos(t)).epsilon(1e-14));
    CHECK(e.state(1).matrix()(1, 1).real() ==
          doctest::Approx(std::sin(t) * std::sin(t)).epsilon(1e-14));
    CHECK(max_abs(e.state(0).matrix() - base[0].matrix()) <= 1e-15);
  }
  const std::vector<double> short_w{1.0};
  CHECK(kind_of([&] { evolve_ensemble(f, base, short_w, 0.1); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("evolve_ensemble preserves spectra and matches direct conjugation") {
  Rng rng(503);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = rng.integer(2, 7);
    const ComplexMatrix b = random_hermitian(rng, d);
    const UnitaryFamily f(b, {0.0, 0.7, -1.3});
    const std::vector<DensityOperator> base{random_density(rng, d), random_density(rng, d, 1),
                                            random_density(rng, d, 2)};
    const auto w = random_simplex(rng, 3);
    const double t = rng.uniform(-5, 5);
    const Ensemble e = evolve_ensemble(f, base, w, t);
    for (size_t i = 0; i < 3; ++i) {
      CHECK_NOTHROW(validate_density(e.state(i).matrix()));
      const HermEigen before = herm_eig(base[i].matrix());
      const HermEigen after = herm_eig(e.state(i).matrix());
      CHECK((before.values - after.values).cwiseAbs().maxCoeff() <= 1e-9);
      // Direct conjugation with a freshly exponentiated generator.
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(b);
      ComplexVector ph(d);
      for (Index k = 0; k < d; ++k) ph(k) = std::polar(1.0, -t * f.rates()[i] * es.eigenvalues()(k));
      const ComplexMatrix u = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
      CHECK(max_abs(u * base[i].matrix() * u.adjoint() - e.state(i).matrix()) <= 1e-10);
    }
  }
}

TEST_CASE("autocorrelation: closed forms") {
  const ComplexVector e1 = ket1();
  for (double t : {0.0, 0.5, 100.0}) {
    CHECK(std::abs(autocorrelation(pauli_z(), e1, t)) == doctest::Approx(1.0).epsilon(1e-14));
    const Complex a = autocorrelation(pauli_z(), ket_plus(), t);
    CHECK(a.real() == doctest::Approx(std::cos(t)).epsilon(1e-14));
    CHECK(std::abs(a.imag()) <= 1e-14);
  }
  const AcModel m = discretized_ac_model(256, 0.0, 1.0);
  for (double t : {0.0, 1.0, 10.0, 55.5, 300.0, 1000.0, 1602.0}) {
    CHECK(std::abs(m.profile.autocorrelation(t)) ==
          doctest::Approx(geometric_oracle(256, 1.0 / 255.0, t)).epsilon(1e-10));
  }
}

TEST_CASE("autocorrelation: bounded by one, equal to one at zero") {
  Rng rng(509);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = rng.integer(2, 10);
    const ComplexMatrix b = random_hermitian(rng, d);
    const ComplexVector psi = random_ket(rng, d);
    CHECK(std::abs(autocorrelation(b, psi, 0.0) - 1.0) <= 1e-12);
    const auto prof = SpectralProfile::of(b, psi);
    CHECK(prof.weights.sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k < 50; ++k) CHECK(std::abs(prof.autocorrelation(rng.uniform(-50, 50))) <= 1.0 + 1e-12);
  }
  CHECK(kind_of([] { autocorrelation(pauli_z(), ket({1.0, 1.0}), 0.0); }) ==
        ErrorKind::NotNormalized);
}

TEST_CASE("cross_correlation") {
  for (double t : {0.0, 1.7, 40.0}) {
    CHECK(std::abs(cross_correlation(pauli_z(), ket0(), ket1(), t)) == 0.0);
    const Complex both = cross_correlation(pauli_x(), ket0(), ket0(), t);
    CHECK(std::abs(both - autocorrelation(pauli_x(), ket0(), t)) <= 1e-14);
  }
  // Smooth pair on the AC grid decays on the same window.
  const AcModel m = discretized_ac_model(256, 0.0, 1.0, WeightProfile::RaisedCosine);
  const HermEigen b = herm_eig(m.generator);
  ComplexVector phi(256);
  for (Index k = 0; k < 256; ++k) phi(k) = std::sin(kPi * (k + 1) / 257.0);
  phi /= phi.norm();
  const ComplexVector psi = m.psi;
  CHECK(std::abs(cross_correlation(b, phi, psi, 0.0)) > 0.9);
  for (double t = 50; t <= 500; t += 25) CHECK(std::abs(cross_correlation(b, phi, psi, t)) <= 0.05);
}

TEST_CASE("wiener_average") {
  CHECK(wiener_average(pauli_z(), ket1(), 10.0) == doctest::Approx(1.0).epsilon(1e-12));
  const double w = wiener_average(pauli_z(), ket_plus(), 1000.0);
  CHECK(std::abs(w - 0.5) <= 0.01);
  CHECK(w == doctest::Approx(0.5 + std::sin(2000.0) / 4000.0).epsilon(1e-6));
  const AcModel m = discretized_ac_model(256, 0.0, 1.0);
  CHECK(std::abs(wiener_average(m.profile, 2000.0) - m.profile.point_mass_sum()) <= 0.01);
  CHECK(m.profile.point_mass_sum() == doctest::Approx(1.0 / 256).epsilon(1e-12));
  CHECK_THROWS_AS(wiener_average(m.profile, 0.0), Error);
}

TEST_CASE("wiener_average bounded below by the largest point mass") {
  Rng rng(521);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = rng.integer(2, 8);
    const ComplexMatrix b = random_hermitian(rng, d);
    const auto prof = SpectralProfile::of(b, random_ket(rng, d));
    const double wmax = prof.weights.maxCoeff();
    CHECK(wiener_average(prof, 3000.0, 60001) >= wmax * wmax - 0.01);
  }
  SpectralProfile merged;
  merged.eigenvalues = RealVector::LinSpaced(3, 0.0, 0.0);
  merged.eigenvalues(2) = 1.0;
  merged.weights = RealVector::Constant(3, 1.0 / 3);
  CHECK(merged.point_mass_sum() == doctest::Approx(4.0 / 9 + 1.0 / 9).epsilon(1e-14));
}

TEST_CASE("bound_sweep: identical bases at t = 0 and the direct KB formula") {
  const AcModel m = discretized_ac_model(64, 0.0, 1.0);
  const Pure3 c = ac_three_branch(m);
  const EvolvingEnsemble model(c.family, c.base, c.weights);
  const auto kb = bound_sweep(model, {0.0, 200.0, 201}, SweepQuantity::KnillBarnum, "ac64");
  CHECK(kb.values[0] == doctest::Approx(2.0).epsilon(1e-12));  // 6 · 1/3
  CHECK(kb.max_cross_check_deviation <= 1e-9);
  CHECK(kb.model == "ac64");

  const auto mon = bound_sweep(model, {0.0, 200.0, 201}, SweepQuantity::Montanaro);
  CHECK(mon.values[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  const auto ac = bound_sweep(model, {0.0, 200.0, 201}, SweepQuantity::Autocorrelation);
  CHECK(ac.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kind_of([&] { bound_sweep(model, {0.0, 1.0, 3}, SweepQuantity::Hellstrom); }) ==
        ErrorKind::UnsupportedCombination);
}

TEST_CASE("bound_sweep: qubit hellstrom curve matches the trace-norm closed form") {
  const UnitaryFamily f(pauli_x(), {0.0, 1.0});
  const std::vector<DensityOperator> base{pure(ket0()), pure(ket0())};
  const std::vector<double> w{0.5, 0.5};
  const auto s = bound_sweep(EvolvingEnsemble(f, base, w), {0.0, 10.0, 401},
                             SweepQuantity::Hellstrom, "qubit");
  for (size_t k = 0; k < s.times.size(); ++k) {
    CHECK(std::abs(s.values[k] - (0.5 - 0.5 * std::abs(std::sin(s.times[k])))) <= 1e-10);
  }
}

TEST_CASE("solvability_verdict: examples") {
  // Orthogonal static ensemble: KB is identically zero.
  const UnitaryFamily f(pauli_z(), {0.0, 1.0});
  const std::vector<DensityOperator> orth{pure(ket0()), pure(ket1())};
  const std::vector<double> w{0.5, 0.5};
  const auto kb0 = bound_sweep(EvolvingEnsemble(f, orth, w), {0.0, 100.0, 101},
                               SweepQuantity::KnillBarnum);
  const auto v0 = solvability_verdict(kb0, 0.1, {10.0, 90.0});
  CHECK(v0.verdict == Verdict::FullySolvableEvidence);
  CHECK(v0.rule == "upper-bound-below-threshold");
  CHECK(!v0.caveat.empty());

  // Qubit example: the Montanaro bound comes back every period.
  const UnitaryFamily fx(pauli_x(), {0.0, 1.0});
  const std::vector<DensityOperator> z{pure(ket0()), pure(ket0())};
  const auto mon = bound_sweep(EvolvingEnsemble(fx, z, w), {0.0, 10 * kPi, 2001},
                               SweepQuantity::Montanaro, "qubit");
  const auto v1 = solvability_verdict(mon, 0.1, {0.0, 10 * kPi}, qubit_example_period(0, 1));
  CHECK(v1.verdict == Verdict::NotFullySolvableEvidence);
  CHECK(v1.period_source == "analytic");
  CHECK(*v1.min_subwindow_max >= 0.1);
  // Without the analytic period the DFT estimate finds the same recurrence.
  const auto v1d = solvability_verdict(mon, 0.1, {0.0, 10 * kPi});
  CHECK(v1d.verdict == Verdict::NotFullySolvableEvidence);
  CHECK(v1d.period_source == "dft");
  CHECK(*v1d.period == doctest::Approx(kPi).epsilon(0.01));
  // A KB sweep alone cannot prove the negative.
  const auto kb1 = bound_sweep(EvolvingEnsemble(fx, z, w), {0.0, 10 * kPi, 2001},
                               SweepQuantity::KnillBarnum);
  CHECK(solvability_verdict(kb1, 0.1, {0.0, 10 * kPi}).verdict == Verdict::Inconclusive);

  CHECK(kind_of([&] { solvability_verdict(mon, 0.1, {0.0, 100.0}); }) ==
        ErrorKind::WindowOutOfRange);
  CHECK(kind_of([&] { solvability_verdict(mon, 0.1, {5.0, 1.0}); }) ==
        ErrorKind::WindowOutOfRange);
}

TEST_CASE("solvability_verdict: AC model plateau and eigenvector control") {
  const AcModel m = discretized_ac_model(256, 0.0, 1.0);
  const TimeWindow window = default_window(m.recurrence_time);
  CHECK(window.start == 50.0);
  CHECK(window.stop == 500.0);
  const Pure3 c = ac_three_branch(m);
  const auto kb = bound_sweep(EvolvingEnsemble(c.family, c.base, c.weights),
                              {0.0, 500.0, 2001}, SweepQuantity::KnillBarnum, "ac256");
  const auto v = solvability_verdict(kb, kDefaultDecayThreshold, window);
  CHECK(v.verdict == Verdict::FullySolvableEvidence);
  CHECK(v.window_max <= 0.1);

  ComplexVector eig = ComplexVector::Zero(256);
  eig(100) = 1.0;
  const auto e = DensityOperator::from_ket(eig);
  const std::vector<DensityOperator> base{e, e, e};
  const EvolvingEnsemble stuck(c.family, base, c.weights);
  const auto ac = bound_sweep(stuck, {0.0, 500.0, 2001}, SweepQuantity::Autocorrelation);
  for (double x : ac.values) CHECK(x == doctest::Approx(1.0).epsilon(1e-12));
  const auto mon = bound_sweep(stuck, {0.0, 500.0, 2001}, SweepQuantity::Montanaro);
  const auto nv = solvability_verdict(mon, kDefaultDecayThreshold, window);
  CHECK(nv.verdict == Verdict::NotFullySolvableEvidence);
  CHECK(nv.period_source == "window");
}

TEST_CASE("qubit_example") {
  const auto orth = qubit_example(kPi / 2, 0.0, 1.0);
  CHECK(orth.error == doctest::Approx(0.0));
  CHECK(qubit_example(0.0, 0.0, 1.0).error == doctest::Approx(0.5).epsilon(1e-15));
  const double period = qubit_example_period(0.0, 1.0);
  for (double t = 0.0; t < 10.0; t += 0.37) {
    const auto a = qubit_example(t, 0.0, 1.0);
    CHECK(std::abs(a.error - qubit_example(t + period, 0.0, 1.0).error) <= 1e-9);
    CHECK(std::abs(a.error - a.determinant_error) <= 1e-10);
    CHECK(std::abs(a.error - (0.5 - 0.5 * std::abs(std::sin(t)))) <= 1e-10);
  }
  const auto other = qubit_example(0.8, 0.5, 2.0);
  CHECK(std::abs(other.error - (0.5 - 0.5 * std::abs(std::sin(0.8 * 1.5)))) <= 1e-10);
  CHECK_THROWS_AS(qubit_example(1.0, 1.0, 1.0), Error);
}

TEST_CASE("discretized_ac_model") {
  const AcModel two = discretized_ac_model(2, -1.0, 1.0);
  for (double t : {0.0, 0.4, 3.0}) {
    CHECK(std::abs(two.profile.autocorrelation(t)) == doctest::Approx(std::abs(std::cos(t))).epsilon(1e-14));
  }
  CHECK(two.recurrence_time == doctest::Approx(kPi));

  const AcModel m = discretized_ac_model(256, 0.0, 1.0);
  CHECK(m.recurrence_time == doctest::Approx(2 * kPi * 255));
  CHECK(m.psi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  double worst = 0.0;
  for (double t = 50.0; t <= m.recurrence_time / 2; t += 0.25) {
    worst = std::max(worst, std::abs(m.profile.autocorrelation(t)));
  }
  CHECK(worst <= 0.05);

  const AcModel rc = discretized_ac_model(256, 0.0, 1.0, WeightProfile::RaisedCosine);
  double rc_worst = 0.0;
  double uni_worst = 0.0;
  for (double t = 100.0; t <= 400.0; t += 0.25) {
    rc_worst = std::max(rc_worst, std::abs(rc.profile.autocorrelation(t)));
    uni_worst = std::max(uni_worst, std::abs(m.profile.autocorrelation(t)));
  }
  CHECK(rc_worst < uni_worst);
  CHECK_THROWS_AS(discretized_ac_model(1, 0.0, 1.0), Error);
  CHECK_THROWS_AS(discretized_ac_model(8, 1.0, 1.0), Error);
}
