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
#include <span>
#include <string>
#include <vector>

#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

/// Hermitian generator B with distinct rates x_i; member i evolves under
/// exp(-i t x_i B).
class UnitaryFamily {
 public:
  UnitaryFamily(const ComplexMatrix& generator, std::vector<double> rates);
  UnitaryFamily(HermEigen generator_eigen, std::vector<double> rates);

  const HermEigen& eigen() const { return eigen_; }
  const std::vector<double>& rates() const { return rates_; }
  size_t size() const { return rates_.size(); }
  Index dim() const { return eigen_.dim(); }

  /// True when B is diagonal in the standard basis.
  bool diagonal() const { return diagonal_; }

  ComplexMatrix unitary(size_t i, double t) const;

 private:
  HermEigen eigen_;
  bool diagonal_ = false;
  std::vector<double> rates_;
};

/// Eigenvalues of B and weights |⟨φ_k|ψ⟩|².
struct SpectralProfile {
  RealVector eigenvalues;
  RealVector weights;

  static SpectralProfile of(const HermEigen& b, const ComplexVector& psi);
  static SpectralProfile of(const ComplexMatrix& b, const ComplexVector& psi);

  /// Σ_k w_k e^{-itλ_k}
  Complex autocorrelation(double t) const;

  /// Σ of squared weights after merging coincident eigenvalues: the long-time
  /// mean of |a(t)|².
  double point_mass_sum() const;
};

/// Base states prepared once in the eigenbasis of B so that evaluating the
/// ensemble at many times is cheap. Pure bases evolve as kets.
class EvolvingEnsemble {
 public:
  EvolvingEnsemble(const UnitaryFamily& family, std::span<const DensityOperator> base,
                   std::span<const double> weights);

  Ensemble at(double t) const;
  DensityOperator member(size_t i, double t) const;

  const UnitaryFamily& family() const { return family_; }
  const std::vector<double>& weights() const { return weights_; }
  size_t size() const { return weights_.size(); }

  /// Set when every base state is the same pure ket.
  const std::optional<SpectralProfile>& shared_profile() const { return shared_profile_; }

 private:
  UnitaryFamily family_;
  std::vector<double> weights_;
  std::vector<std::optional<ComplexVector>> kets_;  // V†ψ
  std::vector<ComplexMatrix> rotated_;              // V†ρV for mixed bases
  std::optional<SpectralProfile> shared_profile_;
};

Ensemble evolve_ensemble(const UnitaryFamily& family, std::span<const DensityOperator> base,
                         std::span<const double> weights, double t);

/// ⟨ψ|e^{-itB}|ψ⟩
Complex autocorrelation(const ComplexMatrix& b, const ComplexVector& psi, double t);

/// ⟨φ|e^{-itB}|ψ⟩
Complex cross_correlation(const HermEigen& b, const ComplexVector& phi,
                          const ComplexVector& psi, double t);
Complex cross_correlation(const ComplexMatrix& b, const ComplexVector& phi,
                          const ComplexVector& psi, double t);

/// (1/T)∫₀ᵀ |a(t)|² dt by the trapezoid rule on n_samples points.
double wiener_average(const SpectralProfile& profile, double horizon, int n_samples = 20001);
double wiener_average(const ComplexMatrix& b, const ComplexVector& psi, double horizon,
                      int n_samples = 20001);

struct TimeGrid {
  double start = 0.0;
  double stop = 0.0;
  int points = 2001;

  std::vector<double> times() const;
};

enum class SweepQuantity { KnillBarnum, Montanaro, Hellstrom, Autocorrelation };

std::string to_string(SweepQuantity q);
SweepQuantity sweep_quantity_from_string(std::string_view name);

struct SweepResult {
  SweepQuantity quantity = SweepQuantity::KnillBarnum;
  std::vector<double> times;
  std::vector<double> values;
  std::string model;
  std::vector<double> rates;
  std::vector<double> weights;
  std::optional<double> period;  // analytic recurrence period when known
  double max_cross_check_deviation = 0.0;
};

/// Evaluates the chosen quantity at every grid time. Autocorrelation is |a(t)|
/// of the first base state, which must be pure. For a single shared pure
/// base, Knill-Barnum values are compared with Σ_{i≠j} √(p_i p_j) |a((x_j -
/// x_i)t)|; a gap above 1e-9 raises NumericalFailure.
SweepResult bound_sweep(const EvolvingEnsemble& model, const TimeGrid& grid,
                        SweepQuantity quantity, std::string model_name = "custom");

enum class Verdict { FullySolvableEvidence, NotFullySolvableEvidence, Inconclusive };

std::string to_string(Verdict v);

struct TimeWindow {
  double start = 0.0;
  double stop = 0.0;
};

struct VerdictReport {
  Verdict verdict = Verdict::Inconclusive;
  std::string rule;  // which rule fired, or "none"
  double threshold = 0.1;
  TimeWindow window;
  double window_max = 0.0;
  double window_min = 0.0;
  std::optional<double> period;
  std::string period_source;  // "analytic", "dft" or "window"
  std::optional<double> min_subwindow_max;
  int samples = 0;
  std::string caveat;
};

inline constexpr double kDefaultDecayThreshold = 0.1;

/// Upper bounds (Knill-Barnum) decide fully-solvable evidence: every sample
/// in the window is at most the threshold. Lower bounds (Montanaro) decide
/// the opposite: every period-length sub-window reaches the threshold.
/// Hellström errors and |a(t)| are exact diagnostics and feed both rules.
VerdictReport solvability_verdict(const SweepResult& sweep, double threshold,
                                  TimeWindow window,
                                  std::optional<double> period = std::nullopt);

/// Default window [50, min(500, T_rec/2)].
TimeWindow default_window(double recurrence_time);

struct QubitExample {
  DensityOperator state1;
  DensityOperator state2;
  double error = 0.0;              // Hellström on the closed-form states
  double determinant_error = 0.0;  // ½ - ½√(-det(ρ1 - ρ2))
};

/// σ_x generator acting on |z₁⟩ with rates x1, x2 and equal weights. The
/// closed-form states are compared with evolve_ensemble; a gap above 1e-10
/// raises NumericalFailure.
QubitExample qubit_example(double t, double x1, double x2);

double qubit_example_period(double x1, double x2);

enum class WeightProfile { Uniform, RaisedCosine };

std::string to_string(WeightProfile p);
WeightProfile weight_profile_from_string(std::string_view name);

struct AcModel {
  ComplexMatrix generator;  // diag(λ_k), λ_k evenly spaced on [a, b]
  ComplexVector psi;
  double recurrence_time = 0.0;  // 2π(d - 1)/(b - a)
  SpectralProfile profile;
};

/// Finite stand-in for a continuous spectrum. Decay of |a(t)| is faithful
/// only well before the recurrence time.
AcModel discretized_ac_model(Index d, double a, double b,
                             WeightProfile profile = WeightProfile::Uniform);

}  // namespace qsd
