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

#include "qsd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "qsd/errors.hpp"

namespace qsd {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Off-diagonal entries below this fraction of ‖A‖_F are left alone; they
// cannot move an eigenvalue by more than round-off.
constexpr double kAbsoluteFloor = 1e-17;

void rotate(ComplexMatrix& a, ComplexMatrix& v, Index p, Index q) {
  const Index n = a.rows();
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  const Complex phase = std::conj(apq / mag);

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(1.0 + theta * theta));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // Columns of G = diag(1, phase) * [[c, s], [-s, c]].
  const Complex g_qp = -s * phase;
  const Complex g_qq = c * phase;

  Complex* col_p = a.col(p).data();
  Complex* col_q = a.col(q).data();
  for (Index k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const Complex akp = col_p[k];
    const Complex akq = col_q[k];
    col_p[k] = c * akp + g_qp * akq;
    col_q[k] = s * akp + g_qq * akq;
  }
  for (Index k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    a(p, k) = std::conj(col_p[k]);
    a(q, k) = std::conj(col_q[k]);
  }
  a(p, p) = app - t * mag;
  a(q, q) = aqq + t * mag;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  Complex* vp = v.col(p).data();
  Complex* vq = v.col(q).data();
  for (Index k = 0; k < n; ++k) {
    const Complex x = vp[k];
    const Complex y = vq[k];
    vp[k] = c * x + g_qp * y;
    vq[k] = s * x + g_qq * y;
  }
}

}  // namespace

ComplexMatrix HermEigen::reconstruct() const {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

double max_abs(const ComplexMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& a) {
  return max_abs(a - a.adjoint());
}

void require_square_finite(const ComplexMatrix& a, std::string_view what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::NotSquare,
                std::string(what) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFinite,
                std::string(what) + ": matrix has non-finite entries");
  }
}

void require_hermitian(const ComplexMatrix& a, std::string_view what) {
  require_square_finite(a, what);
  const double scale = std::max(1.0, max_abs(a));
  const double defect = hermiticity_defect(a);
  if (defect > tol::herm * scale) {
    throw Error(ErrorKind::NotHermitian,
                std::string(what) + ": matrix is not Hermitian (defect " +
                    std::to_string(defect) + ")");
  }
}

HermEigen herm_eig(const ComplexMatrix& input) {
  require_hermitian(input, "herm_eig");
  const Index n = input.rows();

  ComplexMatrix a = 0.5 * (input + input.adjoint());
  for (Index k = 0; k < n; ++k) a(k, k) = a(k, k).real();
  ComplexMatrix v = ComplexMatrix::Identity(n, n);

  const double floor = kAbsoluteFloor * a.norm();
  int sweep = 0;
  bool converged = (n == 1);
  while (!converged && sweep < kMaxJacobiSweeps) {
    ++sweep;
    bool rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= floor) continue;
        const double diag =
            std::sqrt(std::abs(a(p, p).real()) * std::abs(a(q, q).real()));
        if (mag <= kEps * diag) continue;
        rotate(a, v, p, q);
        rotated = true;
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(ErrorKind::NoConvergence,
                "herm_eig: Jacobi iteration exceeded " +
                    std::to_string(kMaxJacobiSweeps) + " sweeps");
  }

  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  HermEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<size_t>(k)];
    out.values(k) = a(src, src).real();
    out.vectors.col(k) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

double spectral_noise_floor(const HermEigen& e) {
  if (e.values.size() == 0) return 0.0;
  const double scale = e.values.cwiseAbs().maxCoeff();
  return 32.0 * kEps * std::sqrt(static_cast<double>(e.dim())) * scale;
}

ComplexMatrix herm_fn(const HermEigen& e, SpectralFunction f) {
  const Index n = e.dim();
  RealVector mapped(n);
  const double scale = n ? e.values.cwiseAbs().maxCoeff() : 0.0;
  const double clip = tol::psd_clip * scale;
  const double floor = spectral_noise_floor(e);

  if (f.kind == SpectralFunction::Kind::Power &&
      (f.exponent < 0.0 || f.exponent > 1.0)) {
    throw Error(ErrorKind::InvalidArgument,
                "herm_fn: power exponent must lie in [0, 1]");
  }

  for (Index k = 0; k < n; ++k) {
    const double lambda = e.values(k);
    switch (f.kind) {
      case SpectralFunction::Kind::Abs:
        mapped(k) = std::abs(lambda);
        break;
      case SpectralFunction::Kind::Sqrt:
      case SpectralFunction::Kind::Power: {
        if (lambda < -clip) {
          throw Error(ErrorKind::NotPSD,
                      "herm_fn: eigenvalue " + std::to_string(lambda) +
                          " below -psd_clip_tol");
        }
        if (lambda <= floor) {
          mapped(k) = 0.0;
        } else {
          const double s =
              f.kind == SpectralFunction::Kind::Sqrt ? 0.5 : f.exponent;
          mapped(k) = s == 0.0 ? 1.0 : std::pow(lambda, s);
        }
        break;
      }
    }
  }
  return e.vectors * mapped.cast<Complex>().asDiagonal() * e.vectors.adjoint();
}

ComplexMatrix herm_fn(const ComplexMatrix& a, SpectralFunction f) {
  return herm_fn(herm_eig(a), f);
}

RealVector singular_values(const ComplexMatrix& a) {
  if (a.size() == 0) return RealVector();
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues();
}

double trace_norm_hermitian(const ComplexMatrix& a) {
  return herm_eig(a).values.cwiseAbs().sum();
}

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  if (!a.allFinite()) {
    throw Error(ErrorKind::NonFinite, "trace_norm: non-finite entries");
  }
  if (a.rows() == a.cols() &&
      hermiticity_defect(a) <= tol::herm * std::max(1.0, max_abs(a))) {
    return trace_norm_hermitian(a);
  }
  return singular_values(a).sum();
}

ComplexMatrix unitary_exp(const HermEigen& b, double theta) {
  const Index n = b.dim();
  ComplexVector phases(n);
  for (Index k = 0; k < n; ++k) {
    phases(k) = std::polar(1.0, -theta * b.values(k));
  }
  return b.vectors * phases.asDiagonal() * b.vectors.adjoint();
}

ComplexMatrix unitary_exp(const ComplexMatrix& b, double theta) {
  return unitary_exp(herm_eig(b), theta);
}

ComplexMatrix outer(const ComplexVector& psi) { return psi * psi.adjoint(); }

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

}  // namespace qsd
