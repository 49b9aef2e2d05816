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
#include <optional>
#include <string>
#include <vector>

#include "qsd/discrimination.hpp"
#include "qsd/linalg.hpp"
#include "qsd/states.hpp"

namespace qsd {

inline constexpr double kQuadTol = 1e-8;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return x >= lo && x <= hi; }
  double length() const { return hi - lo; }
};

/// Probability density on a compact support.
class DensitySpec {
 public:
  enum class Kind { Uniform, RaisedCosine, TwoUniforms };

  static DensitySpec uniform(double a, double b);
  /// (1/(b-a)) (1 - cos(2π(x-a)/(b-a))) on [a, b]
  static DensitySpec raised_cosine(double a, double b);
  /// ½ uniform[a, b] + ½ uniform[a+c, b+c]; needs c > b - a.
  static DensitySpec two_uniforms(double a, double b, double c);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double separation() const { return c_; }
  double normalization() const;
  std::string name() const;

  double pdf(double x) const;
  std::vector<Interval> support() const;

 private:
  DensitySpec(Kind kind, double a, double b, double c) : kind_(kind), a_(a), b_(b), c_(c) {}

  Kind kind_;
  double a_;
  double b_;
  double c_;
};

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// Nodes x_q and raw weights w_q (Σ w_q f(x_q) ≈ ∫ f).
struct QuadratureScheme {
  std::vector<double> nodes;
  std::vector<double> weights;
  int nodes_per_cell = 0;

  /// Gauss-Legendre on every support component, each further split at the
  /// given breakpoints.
  static QuadratureScheme for_spec(const DensitySpec& spec, int nodes_per_cell = 128,
                                   const std::vector<double>& breakpoints = {});

  /// Σ w_q p(x_q)
  double mass(const DensitySpec& spec) const;
  size_t size() const { return nodes.size(); }
};

/// Columns √ω_q e^{-i t x_q B}|ψ⟩ in the eigenbasis of B, where ω_q are the
/// given probabilities. ρ = V F F† V†.
ComplexMatrix evolved_factor(const HermEigen& b, const ComplexVector& psi,
                             const std::vector<double>& nodes,
                             const std::vector<double>& probabilities, double t);

/// ∫ p(x) e^{-itxB}|ψ⟩⟨ψ|e^{itxB} dx by the scheme, renormalized by its mass.
/// SchemeMismatch when the scheme mass differs from 1 by more than kQuadTol.
DensityOperator uncountable_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                                    const HermEigen& b, const ComplexVector& psi, double t);
DensityOperator uncountable_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                                    const ComplexMatrix& b, const ComplexVector& psi, double t);

struct NMixture {
  std::vector<Interval> cells;
  std::vector<double> weights;  // p_i = Σ_{q∈Ω_i} w_q p(x_q)
  std::vector<DensityOperator> branches;
  std::vector<size_t> nodes_per_branch;
  double t = 0.0;
  /// ‖Σ p_i ρ_i - ρ_t‖₁ against the full mixture on the same nodes.
  double reconstruction_error = 0.0;

  Ensemble ensemble() const;
};

/// Regroups the quadrature nodes by cell. BadPartition when cells overlap,
/// leave a node uncovered, or carry no mass.
NMixture n_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                   const std::vector<Interval>& partition, const HermEigen& b,
                   const ComplexVector& psi, double t);

/// Bounds for the discrete problem {p_i, ρ_{i,t}}.
BoundsReport uqsd_pipeline(const NMixture& mixture, bool with_pgm = true);

struct Claim13Options {
  int nodes_per_component = 128;
  double t_search = 10.0;
  int scan_points = 400;
  int direct_checks = 3;  // full-matrix fidelity evaluations inside the window
};

struct Claim13Report {
  double c = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double T = 0.0;            // end of the purity window [0, T]
  double delta = 0.0;        // |a(α)| ≤ √eps2 for scanned α > delta
  double alpha_max = 0.0;    // scanned range, T (c + 1)
  double distance = 0.0;     // gap between the supports, c - 1
  double t_prime = 0.0;      // delta / distance
  bool window_nonempty = false;
  double purity_min = 0.0;   // over [0, T], both branches
  double overlap_max = 0.0;  // over [t', T]
  double superfid_bound = 0.0;  // max super fidelity over [t', T]
  double fidelity_max = 0.0;    // factor route over [t', T]
  double direct_fidelity_max = 0.0;  // full-matrix route at sampled times
  std::vector<double> direct_times;
  bool chain_holds = true;  // overlap ≤ max |a|² over the integration region
  double c_min = 0.0;       // smallest separation that works for this T
  bool pass = false;
  std::string reason;
};

/// Purity window first, then the overlap window for the given separation c,
/// with branch supports [0, 1] and [c, c + 1]. SearchFailed when no purity
/// window exists at the scheme size.
Claim13Report claim13_harness(double c, double eps1, double eps2, const HermEigen& b,
                              const ComplexVector& psi, const Claim13Options& options = {});

struct InequalityGaps {
  double strong_concavity = 0.0;  // √F(Σpρ, Σqσ) - Σ√(p q) √F(ρ_q, σ_q)
  double concavity = 0.0;         // √F(Σpρ, σ) - Σ p √F(ρ_q, σ)
  double koenraad_milan = 0.0;    // Σ√p √F(ρ_q, σ) - √F(Σpρ, σ)
  double super_fidelity = 0.0;    // G(Σpρ, σ) - F(Σpρ, σ)
};

InequalityGaps inequality_gaps(const std::vector<double>& p,
                               const std::vector<DensityOperator>& rho,
                               const std::vector<double>& q,
                               const std::vector<DensityOperator>& sigma_family,
                               const DensityOperator& sigma);

struct InequalitySuiteReport {
  int trials = 0;
  int quadrature_trials = 0;
  InequalityGaps min_gaps;
  bool pass = false;  // every minimum ≥ -1e-9
};

/// Even trials discretize unitary orbits by quadrature, odd trials draw
/// random finite mixtures; dimensions 2-6.
InequalitySuiteReport fidelity_inequality_suite(int trials, std::uint64_t seed);

}  // namespace qsd
