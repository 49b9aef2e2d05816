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

#include "qsd/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsd/errors.hpp"
#include "qsd/random.hpp"

namespace qsd {

namespace {

void require_same_dim(Index a, Index b, std::string_view what) {
  if (a != b) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": dimensions " + std::to_string(a) +
                    " and " + std::to_string(b) + " differ");
  }
}

void check_trace(const ComplexMatrix& m, std::string_view what) {
  const double tr = m.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) {
    throw Error(ErrorKind::InvalidState,
                std::string(what) + ": trace " + std::to_string(tr) + " is not 1");
  }
}

}  // namespace

void validate_density(const ComplexMatrix& m) {
  require_hermitian(m, "DensityOperator");
  check_trace(m, "DensityOperator");
  const HermEigen e = herm_eig(m);
  const double scale = e.values.cwiseAbs().maxCoeff();
  if (e.values(0) < -tol::psd_clip * scale) {
    throw Error(ErrorKind::NotPSD, "DensityOperator: eigenvalue " +
                                       std::to_string(e.values(0)) +
                                       " is negative beyond tolerance");
  }
}

DensityOperator DensityOperator::from_storage(ComplexMatrix m) {
  auto data = std::make_shared<Storage>();
  data->dim = m.rows();
  data->matrix = std::move(m);
  std::call_once(data->built, [] {});
  return DensityOperator(std::move(data));
}

const ComplexMatrix& DensityOperator::matrix() const {
  std::call_once(data_->built, [this] { data_->matrix = outer(*data_->ket); });
  return data_->matrix;
}

DensityOperator DensityOperator::from_matrix(const ComplexMatrix& m) {
  validate_density(m);
  return from_storage(0.5 * (m + m.adjoint()));
}

DensityOperator DensityOperator::from_ket(const ComplexVector& psi) {
  if (psi.size() == 0 || !psi.allFinite()) {
    throw Error(ErrorKind::InvalidState, "from_ket: empty or non-finite vector");
  }
  const double norm = psi.norm();
  if (std::abs(norm - 1.0) > tol::trace) {
    throw Error(ErrorKind::NotNormalized,
                "from_ket: norm " + std::to_string(norm) + " is not 1");
  }
  auto data = std::make_shared<Storage>();
  data->dim = psi.size();
  data->ket = psi / norm;
  return DensityOperator(std::move(data));
}

DensityOperator DensityOperator::assume_valid(ComplexMatrix m) {
  require_square_finite(m, "DensityOperator");
  check_trace(m, "DensityOperator");
  return from_storage(std::move(m));
}

DensityOperator DensityOperator::maximally_mixed(Index dim) {
  return from_storage(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityOperator DensityOperator::basis_state(Index dim, Index k) {
  ComplexVector e = ComplexVector::Zero(dim);
  e(k) = 1.0;
  return from_ket(e);
}

Ensemble::Ensemble(std::vector<EnsembleMember> members) {
  if (members.empty()) {
    throw Error(ErrorKind::InvalidEnsemble, "Ensemble: no members");
  }
  double total = 0.0;
  const Index dim = members.front().state.dim();
  for (const auto& m : members) {
    if (!(m.weight >= 0.0) || !std::isfinite(m.weight)) {
      throw Error(ErrorKind::InvalidEnsemble, "Ensemble: negative or non-finite weight");
    }
    require_same_dim(dim, m.state.dim(), "Ensemble");
    total += m.weight;
  }
  if (std::abs(total - 1.0) > tol::trace) {
    throw Error(ErrorKind::InvalidEnsemble,
                "Ensemble: weights sum to " + std::to_string(total));
  }
  for (auto& m : members) {
    if (m.weight > 0.0) members_.push_back(std::move(m));
  }
}

Ensemble::Ensemble(std::span<const double> weights,
                   std::span<const DensityOperator> states)
    : Ensemble([&] {
        if (weights.size() != states.size()) {
          throw Error(ErrorKind::DimensionMismatch,
                      "Ensemble: weight and state counts differ");
        }
        std::vector<EnsembleMember> m;
        m.reserve(weights.size());
        for (size_t i = 0; i < weights.size(); ++i) {
          m.push_back({weights[i], states[i]});
        }
        return m;
      }()) {}

Povm::Povm(std::vector<ComplexMatrix> operators) : operators_(std::move(operators)) {
  if (operators_.empty()) {
    throw Error(ErrorKind::InvalidPovm, "Povm: no operators");
  }
  const Index dim = operators_.front().rows();
  for (const auto& m : operators_) {
    require_square_finite(m, "Povm");
    require_same_dim(dim, m.rows(), "Povm");
  }
  const double defect = completeness_defect();
  if (defect > tol::povm) {
    throw Error(ErrorKind::InvalidPovm,
                "Povm: operators do not resolve the identity (defect " +
                    std::to_string(defect) + ")");
  }
}

double Povm::completeness_defect() const {
  const Index dim = operators_.front().rows();
  ComplexMatrix sum = -ComplexMatrix::Identity(dim, dim);
  for (const auto& m : operators_) sum.noalias() += m.adjoint() * m;
  return max_abs(sum);
}

DensityOperator mix(const Ensemble& ensemble) {
  ComplexMatrix rho = ComplexMatrix::Zero(ensemble.dim(), ensemble.dim());
  for (const auto& m : ensemble.members()) rho += m.weight * m.state.matrix();
  return DensityOperator::assume_valid(std::move(rho));
}

DensityOperator apply_measurement(const DensityOperator& rho, const Povm& povm) {
  require_same_dim(rho.dim(), povm.dim(), "apply_measurement");
  ComplexMatrix out = ComplexMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& m : povm.operators()) {
    out.noalias() += m * rho.matrix() * m.adjoint();
  }
  return DensityOperator::assume_valid(std::move(out));
}

double fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "fidelity");
  double f = 0.0;
  if (rho.ket() && sigma.ket()) {
    f = std::norm(rho.ket()->dot(*sigma.ket()));
  } else if (rho.ket()) {
    const auto& psi = *rho.ket();
    f = psi.dot(sigma.matrix() * psi).real();
  } else if (sigma.ket()) {
    const auto& psi = *sigma.ket();
    f = psi.dot(rho.matrix() * psi).real();
  } else {
    const ComplexMatrix a = herm_fn(rho.matrix(), SpectralFunction::sqrt());
    const ComplexMatrix b = herm_fn(sigma.matrix(), SpectralFunction::sqrt());
    const double root = singular_values(a * b).sum();
    f = root * root;
  }
  return std::clamp(f, 0.0, 1.0);
}

double factor_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "factor_fidelity: factor heights differ");
  }
  const ComplexMatrix core = a.adjoint() * b;
  const double root = (core.rows() == 1 || core.cols() == 1) ? core.norm()
                                                             : singular_values(core).sum();
  return std::clamp(root * root, 0.0, 1.0);
}

double purity(const DensityOperator& rho) {
  if (rho.ket()) return 1.0;
  return rho.matrix().squaredNorm();
}

double overlap(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "overlap");
  if (rho.ket() && sigma.ket()) return std::norm(rho.ket()->dot(*sigma.ket()));
  if (rho.ket()) return rho.ket()->dot(sigma.matrix() * *rho.ket()).real();
  if (sigma.ket()) return sigma.ket()->dot(rho.matrix() * *sigma.ket()).real();
  return rho.matrix().cwiseProduct(sigma.matrix().transpose()).sum().real();
}

double super_fidelity(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_dim(rho.dim(), sigma.dim(), "super_fidelity");
  const double mixed = std::max(0.0, 1.0 - purity(rho)) *
                       std::max(0.0, 1.0 - purity(sigma));
  return overlap(rho, sigma) + std::sqrt(mixed);
}

PurificationCheck purification_fidelity_check(const DensityOperator& rho,
                                              const DensityOperator& sigma,
                                              int trials, std::uint64_t seed) {
  require_same_dim(rho.dim(), sigma.dim(), "purification_fidelity_check");
  const Index d = rho.dim();
  const HermEigen er = herm_eig(rho.matrix());
  const HermEigen es = herm_eig(sigma.matrix());
  auto roots = [](const HermEigen& e) {
    RealVector r(e.dim());
    for (Index k = 0; k < e.dim(); ++k) r(k) = std::sqrt(std::max(0.0, e.values(k)));
    return r;
  };
  const RealVector lr = roots(er);
  const RealVector ls = roots(es);

  // |ξ⟩ = Σ_k √λ_k |v_k⟩|k⟩ and |χ_U⟩ = Σ_l √μ_l |w_l⟩ U|l⟩ give
  // ⟨ξ|χ_U⟩ = Σ_kl A_kl U_kl with A_kl = √λ_k √μ_l ⟨v_k|w_l⟩.
  const ComplexMatrix a = lr.cast<Complex>().asDiagonal() *
                          (er.vectors.adjoint() * es.vectors) *
                          ls.cast<Complex>().asDiagonal();

  PurificationCheck out;
  out.fidelity = fidelity(rho, sigma);
  out.trials = trials;
  Rng rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    // The first sample is the eigenbasis-aligned purification.
    const ComplexMatrix u =
        trial == 0 ? ComplexMatrix::Identity(d, d) : random_unitary(rng, d);
    const double value = std::norm(a.cwiseProduct(u).sum());
    out.max_overlap = std::max(out.max_overlap, value);
  }
  out.bound_holds = out.max_overlap <= out.fidelity + 1e-9;
  if (!out.bound_holds) {
    throw Error(ErrorKind::NumericalFailure,
                "purification_fidelity_check: sampled overlap exceeds fidelity");
  }
  return out;
}

}  // namespace qsd
