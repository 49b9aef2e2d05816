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

#include "qsd/uncountable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/parallel.hpp"
#include "qsd/random.hpp"
#include "qsd/urm.hpp"

namespace qsd {

namespace {

constexpr double kPi = std::numbers::pi;

void require_interval(double a, double b, std::string_view what) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": support must be a finite interval a < b");
  }
}

ComplexMatrix to_standard_basis(const HermEigen& b, const ComplexMatrix& inner) {
  if (b.vectors.isIdentity(0.0)) return inner;
  return b.vectors * inner * b.vectors.adjoint();
}

DensityOperator state_from_factor(const HermEigen& b, const ComplexMatrix& factor) {
  ComplexMatrix rho = to_standard_basis(b, factor * factor.adjoint());
  return DensityOperator::assume_valid(0.5 * (rho + rho.adjoint()));
}

std::vector<double> node_probabilities(const DensitySpec& spec, const QuadratureScheme& scheme) {
  if (scheme.nodes.empty() || scheme.nodes.size() != scheme.weights.size()) {
    throw Error(ErrorKind::SchemeMismatch, "quadrature scheme is empty or malformed");
  }
  const double mass = scheme.mass(spec);
  if (std::abs(mass - 1.0) > kQuadTol) {
    throw Error(ErrorKind::SchemeMismatch,
                "quadrature scheme does not cover the density (mass " + std::to_string(mass) +
                    ")");
  }
  std::vector<double> omega(scheme.size());
  for (size_t q = 0; q < scheme.size(); ++q) {
    omega[q] = scheme.weights[q] * spec.pdf(scheme.nodes[q]) / mass;
  }
  return omega;
}

double sqrt_fidelity(const DensityOperator& a, const DensityOperator& b) {
  return std::sqrt(fidelity(a, b));
}

DensityOperator weighted_mix(const std::vector<double>& w, const std::vector<DensityOperator>& s) {
  ComplexMatrix m = ComplexMatrix::Zero(s.front().dim(), s.front().dim());
  for (size_t i = 0; i < s.size(); ++i) m += w[i] * s[i].matrix();
  return DensityOperator::assume_valid(std::move(m));
}

}  // namespace

DensitySpec DensitySpec::uniform(double a, double b) {
  require_interval(a, b, "uniform density");
  return {Kind::Uniform, a, b, 0.0};
}

DensitySpec DensitySpec::raised_cosine(double a, double b) {
  require_interval(a, b, "raised-cosine density");
  return {Kind::RaisedCosine, a, b, 0.0};
}

DensitySpec DensitySpec::two_uniforms(double a, double b, double c) {
  require_interval(a, b, "two-uniform density");
  if (!std::isfinite(c) || !(c > b - a)) {
    throw Error(ErrorKind::InvalidArgument,
                "two-uniform density: separation must exceed the component length");
  }
  return {Kind::TwoUniforms, a, b, c};
}

double DensitySpec::normalization() const {
  const double len = b_ - a_;
  return kind_ == Kind::TwoUniforms ? 0.5 / len : 1.0 / len;
}

std::string DensitySpec::name() const {
  switch (kind_) {
    case Kind::Uniform: return "uniform";
    case Kind::RaisedCosine: return "raised-cosine";
    case Kind::TwoUniforms: return "two-uniforms";
  }
  return "unknown";
}

double DensitySpec::pdf(double x) const {
  const double len = b_ - a_;
  switch (kind_) {
    case Kind::Uniform:
      return (x >= a_ && x <= b_) ? 1.0 / len : 0.0;
    case Kind::RaisedCosine:
      return (x >= a_ && x <= b_) ? (1.0 - std::cos(2.0 * kPi * (x - a_) / len)) / len : 0.0;
    case Kind::TwoUniforms: {
      const bool in = (x >= a_ && x <= b_) || (x >= a_ + c_ && x <= b_ + c_);
      return in ? 0.5 / len : 0.0;
    }
  }
  return 0.0;
}

std::vector<Interval> DensitySpec::support() const {
  if (kind_ == Kind::TwoUniforms) return {{a_, b_}, {a_ + c_, b_ + c_}};
  return {{a_, b_}};
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "gauss_legendre: n must be positive");
  GaussRule rule;
  rule.nodes.assign(static_cast<size_t>(n), 0.0);
  rule.weights.assign(static_cast<size_t>(n), 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      dp = n * (z * p1 - p2) / (z * z - 1.0);
      const double step = p1 / dp;
      z -= step;
      if (std::abs(step) <= 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[static_cast<size_t>(i)] = -z;
    rule.nodes[static_cast<size_t>(n - 1 - i)] = z;
    rule.weights[static_cast<size_t>(i)] = w;
    rule.weights[static_cast<size_t>(n - 1 - i)] = w;
  }
  return rule;
}

QuadratureScheme QuadratureScheme::for_spec(const DensitySpec& spec, int nodes_per_cell,
                                            const std::vector<double>& breakpoints) {
  const GaussRule rule = gauss_legendre(nodes_per_cell);
  QuadratureScheme s;
  s.nodes_per_cell = nodes_per_cell;
  for (const Interval& comp : spec.support()) {
    std::vector<double> cuts{comp.lo};
    for (double x : breakpoints) {
      if (x > comp.lo && x < comp.hi) cuts.push_back(x);
    }
    cuts.push_back(comp.hi);
    std::sort(cuts.begin(), cuts.end());
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
      const double half = 0.5 * (cuts[k + 1] - cuts[k]);
      for (size_t q = 0; q < rule.nodes.size(); ++q) {
        s.nodes.push_back(mid + half * rule.nodes[q]);
        s.weights.push_back(half * rule.weights[q]);
      }
    }
  }
  return s;
}

double QuadratureScheme::mass(const DensitySpec& spec) const {
  double m = 0.0;
  for (size_t q = 0; q < nodes.size(); ++q) m += weights[q] * spec.pdf(nodes[q]);
  return m;
}

ComplexMatrix evolved_factor(const HermEigen& b, const ComplexVector& psi,
                             const std::vector<double>& nodes,
                             const std::vector<double>& probabilities, double t) {
  if (psi.size() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "evolved_factor: vector and generator differ");
  }
  const ComplexVector coeff =
      b.vectors.isIdentity(0.0) ? psi : ComplexVector(b.vectors.adjoint() * psi);
  const Index d = b.dim();
  ComplexMatrix f(d, static_cast<Index>(nodes.size()));
  for (size_t q = 0; q < nodes.size(); ++q) {
    const double s = std::sqrt(std::max(0.0, probabilities[q]));
    const double theta = t * nodes[q];
    for (Index k = 0; k < d; ++k) {
      f(k, static_cast<Index>(q)) = s * std::polar(1.0, -theta * b.values(k)) * coeff(k);
    }
  }
  return f;
}

DensityOperator uncountable_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                                    const HermEigen& b, const ComplexVector& psi, double t) {
  const std::vector<double> omega = node_probabilities(spec, scheme);
  const DensityOperator base = DensityOperator::from_ket(psi);
  return state_from_factor(b, evolved_factor(b, *base.ket(), scheme.nodes, omega, t));
}

DensityOperator uncountable_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                                    const ComplexMatrix& b, const ComplexVector& psi, double t) {
  return uncountable_mixture(spec, scheme, herm_eig(b), psi, t);
}

Ensemble NMixture::ensemble() const { return Ensemble(weights, branches); }

NMixture n_mixture(const DensitySpec& spec, const QuadratureScheme& scheme,
                   const std::vector<Interval>& partition, const HermEigen& b,
                   const ComplexVector& psi, double t) {
  if (partition.empty()) throw Error(ErrorKind::BadPartition, "n_mixture: empty partition");
  for (const auto& cell : partition) {
    if (!std::isfinite(cell.lo) || !std::isfinite(cell.hi) || !(cell.lo < cell.hi)) {
      throw Error(ErrorKind::BadPartition, "n_mixture: every cell needs lo < hi");
    }
  }
  std::vector<Interval> sorted = partition;
  std::sort(sorted.begin(), sorted.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i].hi > sorted[i + 1].lo) {
      throw Error(ErrorKind::BadPartition, "n_mixture: cells overlap");
    }
  }

  const std::vector<double> omega = node_probabilities(spec, scheme);
  const DensityOperator base = DensityOperator::from_ket(psi);
  const size_t n = partition.size();
  std::vector<std::vector<double>> cell_nodes(n);
  std::vector<std::vector<double>> cell_probs(n);
  for (size_t q = 0; q < scheme.size(); ++q) {
    if (omega[q] == 0.0) continue;
    size_t owner = n;
    int hits = 0;
    for (size_t i = 0; i < n; ++i) {
      if (partition[i].contains(scheme.nodes[q])) {
        owner = i;
        ++hits;
      }
    }
    if (hits != 1) {
      throw Error(ErrorKind::BadPartition,
                  "n_mixture: node " + std::to_string(scheme.nodes[q]) +
                      (hits == 0 ? " lies outside every cell" : " lies in several cells"));
    }
    cell_nodes[owner].push_back(scheme.nodes[q]);
    cell_probs[owner].push_back(omega[q]);
  }

  NMixture m;
  m.cells = partition;
  m.t = t;
  m.weights.resize(n);
  m.nodes_per_branch.resize(n);
  std::vector<ComplexMatrix> factors(n);
  for (size_t i = 0; i < n; ++i) {
    double p = 0.0;
    for (double w : cell_probs[i]) p += w;
    if (!(p > 0.0)) throw Error(ErrorKind::BadPartition, "n_mixture: a cell carries no mass");
    m.weights[i] = p;
    m.nodes_per_branch[i] = cell_nodes[i].size();
    for (double& w : cell_probs[i]) w /= p;
  }
  parallel_for(n, [&](size_t i) {
    factors[i] = evolved_factor(b, *base.ket(), cell_nodes[i], cell_probs[i], t);
  });
  ComplexMatrix recombined = ComplexMatrix::Zero(b.dim(), b.dim());
  for (size_t i = 0; i < n; ++i) {
    m.branches.push_back(state_from_factor(b, factors[i]));
    recombined += m.weights[i] * m.branches.back().matrix();
  }
  const DensityOperator full = uncountable_mixture(spec, scheme, b, psi, t);
  m.reconstruction_error = singular_values(recombined - full.matrix()).sum();
  return m;
}

BoundsReport uqsd_pipeline(const NMixture& mixture, bool with_pgm) {
  return bounds_report(mixture.ensemble(), with_pgm);
}

Claim13Report claim13_harness(double c, double eps1, double eps2, const HermEigen& b,
                              const ComplexVector& psi, const Claim13Options& options) {
  if (!(eps1 > 0.0 && eps1 < 1.0) || !(eps2 > 0.0 && eps2 < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "claim13_harness: eps1 and eps2 must lie in (0, 1)");
  }
  if (!(c > 1.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::InvalidArgument,
                "claim13_harness: supports [0, 1] and [c, c + 1] must be disjoint (c > 1)");
  }
  if (options.nodes_per_component < 1 || options.scan_points < 2 || !(options.t_search > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "claim13_harness: invalid options");
  }
  const DensityOperator base = DensityOperator::from_ket(psi);
  const ComplexVector& unit = *base.ket();

  const GaussRule rule = gauss_legendre(options.nodes_per_component);
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<double> omega;
  for (size_t q = 0; q < rule.nodes.size(); ++q) {
    x1.push_back(0.5 * (1.0 + rule.nodes[q]));
    x2.push_back(c + x1.back());
    omega.push_back(0.5 * rule.weights[q]);
  }
  auto factor1 = [&](double t) { return evolved_factor(b, unit, x1, omega, t); };
  auto factor2 = [&](double t) { return evolved_factor(b, unit, x2, omega, t); };
  auto purity_of = [](const ComplexMatrix& f) { return (f.adjoint() * f).squaredNorm(); };
  auto min_purity = [&](double t) {
    return std::min(purity_of(factor1(t)), purity_of(factor2(t)));
  };

  Claim13Report r;
  r.c = c;
  r.eps1 = eps1;
  r.eps2 = eps2;
  r.distance = c - 1.0;

  // Purity window [0, T].
  const int scan = options.scan_points;
  const double floor = 1.0 - eps1;
  std::vector<double> scan_t(static_cast<size_t>(scan));
  std::vector<double> scan_p(static_cast<size_t>(scan));
  for (int k = 0; k < scan; ++k) scan_t[static_cast<size_t>(k)] = options.t_search * k / (scan - 1);
  parallel_for(scan_t.size(), [&](size_t k) { scan_p[k] = min_purity(scan_t[k]); });
  size_t fail = scan_t.size();
  for (size_t k = 0; k < scan_t.size(); ++k) {
    if (scan_p[k] < floor) {
      fail = k;
      break;
    }
  }
  if (fail == 0) {
    throw Error(ErrorKind::SearchFailed, "claim13_harness: purity window is empty at t = 0");
  }
  if (fail == scan_t.size()) {
    r.T = options.t_search;
  } else {
    double lo = scan_t[fail - 1];
    double hi = scan_t[fail];
    for (int iter = 0; iter < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      (min_purity(mid) >= floor ? lo : hi) = mid;
    }
    r.T = lo;
  }
  if (!(r.T > 0.0)) {
    throw Error(ErrorKind::SearchFailed, "claim13_harness: no purity window at this scheme size");
  }
  r.purity_min = min_purity(r.T);
  for (size_t k = 0; k < fail && k < scan_t.size(); ++k) {
    if (scan_t[k] <= r.T) r.purity_min = std::min(r.purity_min, scan_p[k]);
  }

  // δ: last scanned α with |a(α)| above √eps2.
  const SpectralProfile profile = SpectralProfile::of(b, unit);
  r.alpha_max = r.T * (c + 1.0);
  const double speed = std::max(1e-12, profile.eigenvalues.cwiseAbs().maxCoeff());
  const double h = kPi / (32.0 * speed);
  const auto n_alpha = static_cast<size_t>(
      std::max(2001.0, std::ceil(r.alpha_max / h) + 1.0));
  const double cut = std::sqrt(eps2);
  std::vector<double> mag(n_alpha);
  parallel_for(n_alpha, [&](size_t j) {
    mag[j] = std::abs(profile.autocorrelation(r.alpha_max * j / (n_alpha - 1)));
  });
  for (size_t j = 0; j < n_alpha; ++j) {
    if (mag[j] > cut) r.delta = r.alpha_max * j / (n_alpha - 1);
  }
  r.t_prime = r.delta / r.distance;
  r.c_min = 1.0 + r.delta / r.T;
  r.window_nonempty = r.t_prime < r.T;
  if (!r.window_nonempty) {
    r.reason = "overlap window [t', T] is empty";
    return r;
  }

  // Overlap window (t', T].
  std::vector<double> times(static_cast<size_t>(scan));
  for (int j = 0; j < scan; ++j) {
    times[static_cast<size_t>(j)] = r.t_prime + (r.T - r.t_prime) * (j + 1) / scan;
  }
  struct Sample {
    double overlap, superfid, fidelity, max_a2, purity;
  };
  std::vector<Sample> samples(times.size());
  parallel_for(times.size(), [&](size_t j) {
    const ComplexMatrix f1 = factor1(times[j]);
    const ComplexMatrix f2 = factor2(times[j]);
    const ComplexMatrix g12 = f1.adjoint() * f2;
    const double p1 = purity_of(f1);
    const double p2 = purity_of(f2);
    Sample s;
    s.overlap = g12.squaredNorm();
    s.superfid = s.overlap + std::sqrt(std::max(0.0, (1.0 - p1) * (1.0 - p2)));
    s.fidelity = factor_fidelity(f1, f2);
    s.purity = std::min(p1, p2);
    s.max_a2 = 0.0;
    for (Index q = 0; q < g12.rows(); ++q) {
      for (Index k = 0; k < g12.cols(); ++k) {
        const double w = omega[static_cast<size_t>(q)] * omega[static_cast<size_t>(k)];
        s.max_a2 = std::max(s.max_a2, std::norm(g12(q, k)) / w);
      }
    }
    samples[j] = s;
  });
  for (const Sample& s : samples) {
    r.overlap_max = std::max(r.overlap_max, s.overlap);
    r.superfid_bound = std::max(r.superfid_bound, s.superfid);
    r.fidelity_max = std::max(r.fidelity_max, s.fidelity);
    r.purity_min = std::min(r.purity_min, s.purity);
    if (s.overlap > s.max_a2 + 1e-12) r.chain_holds = false;
  }

  // Full-matrix fidelity on the branch states.
  const int checks = std::max(0, options.direct_checks);
  for (int k = 0; k < checks; ++k) {
    const size_t j = checks == 1 ? times.size() - 1 : (times.size() - 1) * k / (checks - 1);
    r.direct_times.push_back(times[j]);
  }
  std::vector<double> direct(r.direct_times.size());
  for (size_t k = 0; k < r.direct_times.size(); ++k) {
    const double t = r.direct_times[k];
    direct[k] = fidelity(state_from_factor(b, factor1(t)), state_from_factor(b, factor2(t)));
    r.direct_fidelity_max = std::max(r.direct_fidelity_max, direct[k]);
  }

  const double budget = eps1 + eps2 + 1e-9;
  if (r.purity_min < floor) {
    r.reason = "purity fell below 1 - eps1";
  } else if (!(r.overlap_max < eps2)) {
    r.reason = "overlap reached eps2 inside the window";
  } else if (!r.chain_holds) {
    r.reason = "overlap exceeded the largest |a|^2 on the integration region";
  } else if (r.superfid_bound > budget || r.fidelity_max > budget ||
             r.direct_fidelity_max > budget) {
    r.reason = "fidelity exceeded eps1 + eps2";
  } else {
    r.pass = true;
  }
  return r;
}

InequalityGaps inequality_gaps(const std::vector<double>& p,
                               const std::vector<DensityOperator>& rho,
                               const std::vector<double>& q,
                               const std::vector<DensityOperator>& sigma_family,
                               const DensityOperator& sigma) {
  if (p.empty() || p.size() != rho.size() || q.size() != sigma_family.size() ||
      q.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "inequality_gaps: component counts differ");
  }
  const DensityOperator rho_bar = weighted_mix(p, rho);
  const DensityOperator sigma_bar = weighted_mix(q, sigma_family);
  InequalityGaps g;
  double paired = 0.0;
  double linear = 0.0;
  double rooted = 0.0;
  for (size_t k = 0; k < p.size(); ++k) {
    paired += std::sqrt(p[k] * q[k]) * sqrt_fidelity(rho[k], sigma_family[k]);
    const double f = sqrt_fidelity(rho[k], sigma);
    linear += p[k] * f;
    rooted += std::sqrt(p[k]) * f;
  }
  const double mixed = sqrt_fidelity(rho_bar, sigma);
  g.strong_concavity = sqrt_fidelity(rho_bar, sigma_bar) - paired;
  g.concavity = mixed - linear;
  g.koenraad_milan = rooted - mixed;
  g.super_fidelity = std::min(super_fidelity(rho_bar, sigma) - fidelity(rho_bar, sigma),
                              super_fidelity(rho_bar, sigma_bar) - fidelity(rho_bar, sigma_bar));
  return g;
}

InequalitySuiteReport fidelity_inequality_suite(int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "fidelity_inequality_suite: trials < 1");
  Rng rng(seed);
  InequalitySuiteReport r;
  r.trials = trials;
  const double inf = std::numeric_limits<double>::infinity();
  r.min_gaps = {inf, inf, inf, inf};
  for (int trial = 0; trial < trials; ++trial) {
    const Index d = rng.integer(2, 6);
    const int n = rng.integer(2, 5);
    std::vector<double> p;
    std::vector<double> q;
    std::vector<DensityOperator> rho;
    std::vector<DensityOperator> sig;
    if (trial % 2 == 0) {
      ++r.quadrature_trials;
      const HermEigen gen = herm_eig(random_hermitian(rng, d));
      const auto rho0 = random_density(rng, d, rng.integer(1, static_cast<int>(d)));
      const auto sig0 = random_density(rng, d, rng.integer(1, static_cast<int>(d)));
      const double len = rng.uniform(0.5, 3.0);
      const GaussRule rule = gauss_legendre(n);
      const DensitySpec shape = DensitySpec::raised_cosine(0.0, len);
      double q_total = 0.0;
      for (int k = 0; k < n; ++k) {
        const double x = 0.5 * len * (1.0 + rule.nodes[static_cast<size_t>(k)]);
        const double w = 0.5 * len * rule.weights[static_cast<size_t>(k)];
        p.push_back(w / len);
        q.push_back(w * shape.pdf(x));
        q_total += q.back();
        const ComplexMatrix u = unitary_exp(gen, x);
        rho.push_back(DensityOperator::assume_valid(u * rho0.matrix() * u.adjoint()));
        sig.push_back(DensityOperator::assume_valid(u * sig0.matrix() * u.adjoint()));
      }
      for (double& w : q) w /= q_total;
    } else {
      p = random_simplex(rng, static_cast<size_t>(n));
      q = random_simplex(rng, static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) {
        rho.push_back(random_density(rng, d, rng.integer(1, static_cast<int>(d))));
        sig.push_back(random_density(rng, d, rng.integer(1, static_cast<int>(d))));
      }
    }
    const auto sigma = random_density(rng, d, rng.integer(1, static_cast<int>(d)));
    const InequalityGaps g = inequality_gaps(p, rho, q, sig, sigma);
    r.min_gaps.strong_concavity = std::min(r.min_gaps.strong_concavity, g.strong_concavity);
    r.min_gaps.concavity = std::min(r.min_gaps.concavity, g.concavity);
    r.min_gaps.koenraad_milan = std::min(r.min_gaps.koenraad_milan, g.koenraad_milan);
    r.min_gaps.super_fidelity = std::min(r.min_gaps.super_fidelity, g.super_fidelity);
  }
  const auto& m = r.min_gaps;
  r.pass = m.strong_concavity >= -1e-9 && m.concavity >= -1e-9 && m.koenraad_milan >= -1e-9 &&
           m.super_fidelity >= -1e-9;
  return r;
}

}  // namespace qsd
