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

#include "qsd/discrimination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/parallel.hpp"

namespace qsd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_pairs(const Ensemble& e, std::string_view what) {
  if (e.size() < 2) {
    throw Error(ErrorKind::InvalidEnsemble,
                std::string(what) + ": needs at least two members with positive weight");
  }
}

// Tr{M ρ M†} = Σ_kl M_kl (ρ M†)_lk, real part.
double expectation(const ComplexMatrix& m, const ComplexMatrix& rho) {
  return (m * rho).cwiseProduct(m.conjugate()).sum().real();
}

double expectation(const ComplexMatrix& m, const DensityOperator& rho) {
  if (rho.ket()) return (m * *rho.ket()).squaredNorm();
  return expectation(m, rho.matrix());
}

// Eigenpairs with the noise floor applied; pure states skip the solver.
struct Spectrum {
  RealVector values;
  ComplexMatrix vectors;
};

Spectrum spectrum_of(const DensityOperator& rho) {
  Spectrum s;
  if (rho.ket()) {
    s.values = RealVector::Ones(1);
    s.vectors = *rho.ket();
    return s;
  }
  const HermEigen e = herm_eig(rho.matrix());
  const double floor = spectral_noise_floor(e);
  Index kept = 0;
  for (Index k = 0; k < e.dim(); ++k) kept += e.values(k) > floor ? 1 : 0;
  s.values.resize(kept);
  s.vectors.resize(e.dim(), kept);
  Index c = 0;
  for (Index k = 0; k < e.dim(); ++k) {
    if (e.values(k) <= floor) continue;
    s.values(c) = e.values(k);
    s.vectors.col(c) = e.vectors.col(k);
    ++c;
  }
  return s;
}

// R = V diag(√λ) gives √ρ = R V†, hence ‖√ρ√σ‖₁ = ‖R† S‖₁ for σ's factor S.
ComplexMatrix root_factor(const Spectrum& s) {
  return s.vectors * s.values.cwiseSqrt().cast<Complex>().asDiagonal();
}

ChernoffPair minimize_chernoff(const Spectrum& a, const Spectrum& b) {
  const RealMatrix weights = (a.vectors.adjoint() * b.vectors).cwiseAbs2();
  const RealVector log_a = a.values.array().log();
  const RealVector log_b = b.values.array().log();
  auto q = [&](double s) {
    const RealVector pa = (s * log_a.array()).exp();
    const RealVector pb = ((1.0 - s) * log_b.array()).exp();
    return pa.dot(weights * pb);
  };

  constexpr int kGrid = 100;
  int best = 0;
  double best_value = kInf;
  for (int k = 0; k <= kGrid; ++k) {
    const double v = q(static_cast<double>(k) / kGrid);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = q(x1);
  double f2 = q(x2);
  while (hi - lo > 1e-6) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = q(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = q(x2);
    }
  }
  ChernoffPair out;
  out.s_min = static_cast<double>(best) / kGrid;
  out.min_value = best_value;
  const double mid = 0.5 * (lo + hi);
  const double refined = q(mid);
  if (refined < out.min_value) {
    out.min_value = refined;
    out.s_min = mid;
  }
  out.min_value = std::max(0.0, out.min_value);
  out.exponent = out.min_value > 0.0 ? -std::log(out.min_value) : kInf;
  return out;
}

}  // namespace

ErrorBreakdown error_probability(const Ensemble& ensemble, const Povm& povm) {
  if (povm.dim() != ensemble.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "error_probability: POVM and ensemble dimensions differ");
  }
  if (povm.size() < ensemble.size()) {
    throw Error(ErrorKind::InvalidPovm,
                "error_probability: fewer POVM outcomes than ensemble members");
  }
  ErrorBreakdown out;
  double success = 0.0;
  for (size_t i = 0; i < ensemble.size(); ++i) {
    const double p = ensemble.weight(i);
    for (size_t j = 0; j < povm.size(); ++j) {
      const double v = p * expectation(povm[j], ensemble.state(i));
      if (i == j) {
        success += v;
      } else {
        out.cross_term += v;
      }
    }
  }
  out.error = 1.0 - success;
  if (std::abs(out.error - out.cross_term) > 1e-9) {
    throw Error(ErrorKind::NumericalFailure,
                "error_probability: direct and cross-term forms disagree");
  }
  out.error = std::clamp(out.error, 0.0, 1.0);
  return out;
}

HellstromResult hellstrom(double p1, const DensityOperator& rho1, double p2,
                          const DensityOperator& rho2) {
  if (rho1.dim() != rho2.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "hellstrom: state dimensions differ");
  }
  if (p1 < 0.0 || p2 < 0.0 || std::abs(p1 + p2 - 1.0) > tol::trace) {
    throw Error(ErrorKind::InvalidEnsemble, "hellstrom: weights must be a distribution");
  }
  const Index d = rho1.dim();
  const HermEigen e = herm_eig(p1 * rho1.matrix() - p2 * rho2.matrix());
  const double floor = spectral_noise_floor(e);
  ComplexMatrix plus = ComplexMatrix::Zero(d, d);
  ComplexMatrix minus = ComplexMatrix::Zero(d, d);
  for (Index k = 0; k < d; ++k) {
    const ComplexMatrix proj = outer(e.vectors.col(k));
    if (e.values(k) >= -floor) {
      plus += proj;
    } else {
      minus += proj;
    }
  }
  const double error = 0.5 - 0.5 * e.values.cwiseAbs().sum();

  // Direct evaluation of the returned measurement.
  const double direct = p1 * expectation(minus, rho1) + p2 * expectation(plus, rho2);
  if (std::abs(direct - error) > 1e-9) {
    throw Error(ErrorKind::NumericalFailure,
                "hellstrom: measurement error disagrees with the trace-norm form");
  }
  return {std::clamp(error, 0.0, 1.0), Povm({plus, minus})};
}

RealMatrix pairwise_fidelity(const Ensemble& ensemble) {
  const size_t n = ensemble.size();
  std::vector<ComplexMatrix> factors(n);
  parallel_for(n, [&](size_t i) { factors[i] = root_factor(spectrum_of(ensemble.state(i))); });
  RealMatrix f = RealMatrix::Identity(static_cast<Index>(n), static_cast<Index>(n));
  std::vector<std::pair<size_t, size_t>> pairs;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  parallel_for(pairs.size(), [&](size_t k) {
    const auto [i, j] = pairs[k];
    const double v = factor_fidelity(factors[i], factors[j]);
    f(static_cast<Index>(i), static_cast<Index>(j)) = v;
    f(static_cast<Index>(j), static_cast<Index>(i)) = v;
  });
  return f;
}

double qiu_lower(const Ensemble& ensemble) {
  require_pairs(ensemble, "qiu_lower");
  const size_t n = ensemble.size();
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      sum += 2.0 * trace_norm_hermitian(ensemble.weight(i) * ensemble.state(i).matrix() -
                                        ensemble.weight(j) * ensemble.state(j).matrix());
    }
  }
  return std::max(0.0, 0.5 * (1.0 - sum / (2.0 * static_cast<double>(n - 1))));
}

double montanaro_lower(const Ensemble& ensemble) {
  require_pairs(ensemble, "montanaro_lower");
  return montanaro_lower(ensemble, pairwise_fidelity(ensemble));
}

double montanaro_lower(const Ensemble& ensemble, const RealMatrix& fidelities) {
  double sum = 0.0;
  for (size_t i = 0; i < ensemble.size(); ++i) {
    for (size_t j = 0; j < ensemble.size(); ++j) {
      if (i == j) continue;
      sum += ensemble.weight(i) * ensemble.weight(j) *
             fidelities(static_cast<Index>(i), static_cast<Index>(j));
    }
  }
  return 0.5 * sum;
}

double knill_barnum_upper(const Ensemble& ensemble) {
  require_pairs(ensemble, "knill_barnum_upper");
  return knill_barnum_upper(ensemble, pairwise_fidelity(ensemble));
}

double knill_barnum_upper(const Ensemble& ensemble, const RealMatrix& fidelities) {
  double sum = 0.0;
  for (size_t i = 0; i < ensemble.size(); ++i) {
    for (size_t j = 0; j < ensemble.size(); ++j) {
      if (i == j) continue;
      sum += std::sqrt(ensemble.weight(i) * ensemble.weight(j) *
                       fidelities(static_cast<Index>(i), static_cast<Index>(j)));
    }
  }
  return sum;
}

Povm pgm(const Ensemble& ensemble) {
  require_pairs(ensemble, "pgm");
  const Index d = ensemble.dim();
  const HermEigen s = herm_eig(mix(ensemble).matrix());
  const double cutoff = 1e-10 * std::max(0.0, s.values.maxCoeff());
  RealVector inv_root = RealVector::Zero(d);
  Index rank = 0;
  for (Index k = 0; k < d; ++k) {
    if (cutoff > 0.0 && s.values(k) > cutoff) {
      inv_root(k) = 1.0 / std::sqrt(s.values(k));
      ++rank;
    }
  }
  if (rank == 0) {
    throw Error(ErrorKind::DegenerateMixture, "pgm: the mixture has numerical rank 0");
  }
  const ComplexMatrix s_inv_root =
      s.vectors * inv_root.cast<Complex>().asDiagonal() * s.vectors.adjoint();

  std::vector<ComplexMatrix> ops(ensemble.size());
  parallel_for(ensemble.size(), [&](size_t i) {
    const double p = ensemble.weight(i);
    const auto& rho = ensemble.state(i);
    if (rho.ket()) {
      const ComplexVector& psi = *rho.ket();
      ops[i] = std::sqrt(p) * psi * (psi.adjoint() * s_inv_root);
    } else {
      ops[i] = std::sqrt(p) * herm_fn(rho.matrix(), SpectralFunction::sqrt()) * s_inv_root;
    }
  });
  if (rank < d) {
    ComplexMatrix kernel = ComplexMatrix::Zero(d, d);
    for (Index k = 0; k < d; ++k) {
      if (inv_root(k) == 0.0) kernel += outer(s.vectors.col(k));
    }
    ops.push_back(std::move(kernel));
  }
  return Povm(std::move(ops));
}

double BoundsReport::bracket_width() const {
  if (hellstrom_exact) return 0.0;
  const double lower = std::max(qiu_lower, montanaro_lower);
  double upper = kb_upper;
  if (pgm_error) upper = std::min(upper, *pgm_error);
  return std::max(0.0, upper - lower);
}

BoundsReport bounds_report(const Ensemble& ensemble, bool with_pgm) {
  require_pairs(ensemble, "bounds_report");
  BoundsReport r;
  const RealMatrix f = pairwise_fidelity(ensemble);
  r.qiu_lower = qiu_lower(ensemble);
  r.montanaro_lower = montanaro_lower(ensemble, f);
  r.kb_upper = knill_barnum_upper(ensemble, f);
  if (with_pgm) r.pgm_error = error_probability(ensemble, pgm(ensemble)).error;
  if (ensemble.size() == 2) {
    r.hellstrom_exact = hellstrom(ensemble.weight(0), ensemble.state(0),
                                  ensemble.weight(1), ensemble.state(1))
                            .error;
  }
  return r;
}

double chernoff_objective(const DensityOperator& rho, const DensityOperator& sigma,
                          double s) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "chernoff_objective: dimensions differ");
  }
  if (!(s >= 0.0 && s <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "chernoff_objective: s must lie in [0, 1]");
  }
  const Spectrum a = spectrum_of(rho);
  const Spectrum b = spectrum_of(sigma);
  const RealMatrix w = (a.vectors.adjoint() * b.vectors).cwiseAbs2();
  const RealVector pa = (s * a.values.array().log()).exp();
  const RealVector pb = ((1.0 - s) * b.values.array().log()).exp();
  return pa.dot(w * pb);
}

ChernoffPair chernoff_pair(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "chernoff_pair: dimensions differ");
  }
  return minimize_chernoff(spectrum_of(rho), spectrum_of(sigma));
}

ChernoffReport chernoff(const Ensemble& ensemble) {
  require_pairs(ensemble, "chernoff");
  const size_t n = ensemble.size();
  std::vector<Spectrum> spectra(n);
  parallel_for(n, [&](size_t i) { spectra[i] = spectrum_of(ensemble.state(i)); });
  ChernoffReport r;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) r.pairs.push_back({i, j});
  }
  parallel_for(r.pairs.size(), [&](size_t k) {
    auto& pair = r.pairs[k];
    const ChernoffPair m = minimize_chernoff(spectra[pair.i], spectra[pair.j]);
    pair.exponent = m.exponent;
    pair.s_min = m.s_min;
    pair.min_value = m.min_value;
  });
  r.ensemble_exponent = kInf;
  for (const auto& p : r.pairs) r.ensemble_exponent = std::min(r.ensemble_exponent, p.exponent);
  return r;
}

TensorPowerStudy tensor_power_study(double p1, const ComplexVector& psi1, double p2,
                                    const ComplexVector& psi2, int n_max,
                                    int explicit_n_cap) {
  if (n_max < 1 || n_max > 24) {
    throw Error(ErrorKind::InvalidArgument, "tensor_power_study: n_max must lie in [1, 24]");
  }
  if (psi1.size() != psi2.size()) {
    throw Error(ErrorKind::DimensionMismatch, "tensor_power_study: ket dimensions differ");
  }
  if (p1 < 0.0 || p2 < 0.0 || std::abs(p1 + p2 - 1.0) > tol::trace) {
    throw Error(ErrorKind::InvalidEnsemble,
                "tensor_power_study: weights must be a distribution");
  }
  const auto a = DensityOperator::from_ket(psi1);
  const auto b = DensityOperator::from_ket(psi2);
  const ComplexVector& u = *a.ket();
  const ComplexVector& v = *b.ket();

  TensorPowerStudy out;
  out.fidelity = std::min(1.0, std::norm(u.dot(v)));
  out.xi = out.fidelity > 0.0 ? -std::log(out.fidelity) : kInf;

  const double dim = static_cast<double>(u.size());
  ComplexVector un = u;
  ComplexVector vn = v;
  for (int n = 1; n <= n_max; ++n) {
    TensorPowerRow row;
    row.n = n;
    const double x = 4.0 * p1 * p2 * std::pow(out.fidelity, n);
    // ½(1 - √(1 - x)) without cancellation.
    row.p_error = 0.5 * x / (1.0 + std::sqrt(std::max(0.0, 1.0 - x)));
    row.rate = row.p_error > 0.0 ? -std::log(row.p_error) / n : kInf;
    if (n <= explicit_n_cap && std::pow(dim, n) <= 256.0) {
      if (n > 1) {
        un = kron(un, u);
        vn = kron(vn, v);
      }
      const double e = hellstrom(p1, DensityOperator::from_ket(un), p2,
                                 DensityOperator::from_ket(vn))
                           .error;
      row.explicit_error = e;
      const double dev = std::abs(e - row.p_error);
      out.max_explicit_deviation = std::max(out.max_explicit_deviation, dev);
      if (dev > 1e-9) {
        throw Error(ErrorKind::NumericalFailure,
                    "tensor_power_study: explicit and closed-form errors disagree");
      }
    }
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace qsd
