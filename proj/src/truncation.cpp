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

#include "qsd/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/parallel.hpp"

namespace qsd {

namespace {

void require_ranks(const std::vector<Index>& ranks, Index dim) {
  if (ranks.empty()) throw Error(ErrorKind::InvalidArgument, "truncation study: no ranks");
  for (size_t k = 0; k < ranks.size(); ++k) {
    if (ranks[k] < 1 || ranks[k] > dim) {
      throw Error(ErrorKind::RankOutOfRange,
                  "truncation study: rank " + std::to_string(ranks[k]) + " outside [1, " +
                      std::to_string(dim) + "]");
    }
    if (k > 0 && ranks[k] <= ranks[k - 1]) {
      throw Error(ErrorKind::InvalidArgument, "truncation study: ranks must be ascending");
    }
  }
}

// Eigenpairs ordered by descending value, ties by ascending index.
struct Spectrum {
  RealVector values;
  ComplexMatrix vectors;
};

Spectrum descending_spectrum(const DensityOperator& rho) {
  Spectrum s;
  if (rho.ket()) {
    const Index n = rho.dim();
    s.values = RealVector::Zero(n);
    s.values(0) = 1.0;
    s.vectors = ComplexMatrix::Zero(n, n);
    s.vectors.col(0) = *rho.ket();
    return s;
  }
  const HermEigen e = herm_eig(rho.matrix());
  const Index n = e.dim();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return e.values(i) > e.values(j); });
  s.values.resize(n);
  s.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<size_t>(k)];
    s.values(k) = std::max(0.0, e.values(src));
    s.vectors.col(k) = e.vectors.col(src);
  }
  return s;
}

Truncation truncate_spectrum(const Spectrum& s, Index d) {
  const Index n = s.values.size();
  if (d < 1 || d > n) {
    throw Error(ErrorKind::RankOutOfRange,
                "truncate: rank " + std::to_string(d) + " outside [1, " + std::to_string(n) + "]");
  }
  Truncation t;
  t.rank = d;
  t.kept = s.values.head(d);
  t.factor = s.vectors.leftCols(d) * t.kept.cwiseSqrt().cast<Complex>().asDiagonal();
  t.tail = s.values.tail(n - d).sum();
  return t;
}

}  // namespace

Truncation truncate(const DensityOperator& rho, Index d) {
  if (d < 1 || d > rho.dim()) {
    throw Error(ErrorKind::RankOutOfRange, "truncate: rank " + std::to_string(d) +
                                               " outside [1, " + std::to_string(rho.dim()) + "]");
  }
  return truncate_spectrum(descending_spectrum(rho), d);
}

DensityOperator geometric_state(Index dim, double ratio, const ComplexMatrix& basis) {
  if (dim < 1 || !(ratio > 0.0 && ratio <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "geometric_state: need dim ≥ 1 and ratio in (0, 1]");
  }
  if (basis.rows() != dim || basis.cols() != dim) {
    throw Error(ErrorKind::DimensionMismatch, "geometric_state: basis has the wrong shape");
  }
  RealVector lambda(dim);
  for (Index k = 0; k < dim; ++k) lambda(k) = std::pow(ratio, static_cast<double>(k + 1));
  lambda /= lambda.sum();
  ComplexMatrix rho = basis * lambda.cast<Complex>().asDiagonal() * basis.adjoint();
  return DensityOperator::assume_valid(0.5 * (rho + rho.adjoint()));
}

double root_fidelity_of_factors(const ComplexMatrix& x, const ComplexMatrix& y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "root_fidelity_of_factors: heights differ");
  }
  return singular_values(x.adjoint() * y).sum();
}

bool TruncationStudy::pass() const {
  const bool bounds = std::all_of(rows.begin(), rows.end(),
                                  [](const TruncationRow& r) { return r.bound_holds; });
  return bounds && monotone && converged && chain_holds;
}

TruncationStudy fidelity_convergence_study(const DensityOperator& rho,
                                           const DensityOperator& sigma,
                                           const std::vector<Index>& ranks) {
  if (rho.dim() != sigma.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "fidelity_convergence_study: dimensions differ");
  }
  require_ranks(ranks, rho.dim());
  const Spectrum sr = descending_spectrum(rho);
  const Spectrum ss = descending_spectrum(sigma);
  const Index n = rho.dim();

  TruncationStudy study;
  study.kind = TruncationStudy::Kind::Fidelity;
  study.full_value =
      root_fidelity_of_factors(truncate_spectrum(sr, n).factor, truncate_spectrum(ss, n).factor);
  study.reference_value = std::sqrt(fidelity(rho, sigma));
  study.rows.resize(ranks.size());
  parallel_for(ranks.size(), [&](size_t k) {
    const Truncation a = truncate_spectrum(sr, ranks[k]);
    const Truncation b = truncate_spectrum(ss, ranks[k]);
    TruncationRow& r = study.rows[k];
    r.d = ranks[k];
    r.tails = {a.tail, b.tail};
    r.alphas = {a.alpha(), b.alpha()};
    r.tail = a.tail + b.tail;
    r.alpha = std::min(a.alpha(), b.alpha());
    r.value = root_fidelity_of_factors(a.factor, b.factor);
    r.fidelity_dev = std::abs(r.value - study.full_value);
    r.bound = std::sqrt(a.tail) + std::sqrt(b.tail);
    r.bound_holds = r.fidelity_dev <= r.bound + 1e-9;
  });
  for (size_t k = 1; k < study.rows.size(); ++k) {
    if (study.rows[k].fidelity_dev > study.rows[k - 1].fidelity_dev + 1e-12) study.monotone = false;
  }
  if (ranks.back() == n) study.converged = study.rows.back().fidelity_dev <= 1e-9;
  return study;
}

TruncationStudy kb_convergence_study(const Ensemble& ensemble, const std::vector<Index>& ranks) {
  const size_t m = ensemble.size();
  if (m < 2) throw Error(ErrorKind::InvalidEnsemble, "kb_convergence_study: needs N ≥ 2");
  const Index n = ensemble.dim();
  require_ranks(ranks, n);
  std::vector<Spectrum> spectra(m);
  parallel_for(m, [&](size_t i) { spectra[i] = descending_spectrum(ensemble.state(i)); });

  auto kb_of = [&](const std::vector<ComplexMatrix>& factors) {
    double kb = 0.0;
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = i + 1; j < m; ++j) {
        kb += 2.0 * std::sqrt(ensemble.weight(i) * ensemble.weight(j)) *
              root_fidelity_of_factors(factors[i], factors[j]);
      }
    }
    return kb;
  };

  TruncationStudy study;
  study.kind = TruncationStudy::Kind::KnillBarnum;
  {
    std::vector<ComplexMatrix> full(m);
    for (size_t i = 0; i < m; ++i) full[i] = truncate_spectrum(spectra[i], n).factor;
    study.full_value = kb_of(full);
  }
  study.reference_value = knill_barnum_upper(ensemble);
  study.rows.resize(ranks.size());
  parallel_for(ranks.size(), [&](size_t k) {
    TruncationRow& r = study.rows[k];
    r.d = ranks[k];
    std::vector<ComplexMatrix> raw(m);
    std::vector<ComplexMatrix> normalized(m);
    double max_alpha = 0.0;
    r.alpha = 1.0;
    for (size_t i = 0; i < m; ++i) {
      const Truncation t = truncate_spectrum(spectra[i], ranks[k]);
      r.tails.push_back(t.tail);
      r.alphas.push_back(t.alpha());
      r.tail += t.tail;
      r.alpha = std::min(r.alpha, t.alpha());
      max_alpha = std::max(max_alpha, t.alpha());
      r.bound += ensemble.weight(i) * t.tail;
      raw[i] = t.factor;
      normalized[i] = t.factor / std::sqrt(t.alpha());
    }
    r.bound *= static_cast<double>(m);
    r.value = kb_of(normalized);
    r.kb_unnormalized = kb_of(raw);
    r.kb_dev = std::abs(r.value - study.full_value);
    r.bound_holds = r.kb_unnormalized <= max_alpha * r.value + 1e-12;
  });
  for (size_t k = 1; k < study.rows.size(); ++k) {
    if (study.rows[k].bound > study.rows[k - 1].bound + 1e-15) study.monotone = false;
    if (!study.rows[k].bound_holds) study.chain_holds = false;
  }
  if (!study.rows.empty() && !study.rows.front().bound_holds) study.chain_holds = false;
  if (ranks.back() == n) {
    study.converged = study.rows.back().kb_dev <= 1e-9 && study.rows.back().bound <= 1e-12;
  }
  return study;
}

}  // namespace qsd
