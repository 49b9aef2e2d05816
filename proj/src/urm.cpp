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

#include "qsd/urm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <string>

#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/parallel.hpp"

namespace qsd {

namespace {

void require_unit(const ComplexVector& v, std::string_view what) {
  if (v.size() == 0 || !v.allFinite()) {
    throw Error(ErrorKind::InvalidState, std::string(what) + ": empty or non-finite vector");
  }
  if (std::abs(v.norm() - 1.0) > tol::trace) {
    throw Error(ErrorKind::NotNormalized, std::string(what) + ": vector is not normalized");
  }
}

void require_distinct(const std::vector<double>& rates) {
  if (rates.empty()) {
    throw Error(ErrorKind::InvalidArgument, "UnitaryFamily: no rates");
  }
  for (size_t i = 0; i < rates.size(); ++i) {
    if (!std::isfinite(rates[i])) {
      throw Error(ErrorKind::InvalidArgument, "UnitaryFamily: non-finite rate");
    }
    for (size_t j = 0; j < i; ++j) {
      if (rates[i] == rates[j]) {
        throw Error(ErrorKind::InvalidArgument, "UnitaryFamily: rates must be distinct");
      }
    }
  }
}

ComplexVector phases(const RealVector& lambda, double theta) {
  ComplexVector out(lambda.size());
  for (Index k = 0; k < lambda.size(); ++k) out(k) = std::polar(1.0, -theta * lambda(k));
  return out;
}

bool is_upper(SweepQuantity q) { return q != SweepQuantity::Montanaro; }
bool is_lower(SweepQuantity q) { return q != SweepQuantity::KnillBarnum; }

// Period of the dominant nonzero frequency of a uniformly sampled signal.
std::optional<double> dft_period(const std::vector<double>& t, const std::vector<double>& y) {
  const size_t n = y.size();
  if (n < 4) return std::nullopt;
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (double v : y) spread = std::max(spread, std::abs(v - mean));
  if (spread <= 1e-12 * std::max(1.0, std::abs(mean))) return std::nullopt;

  size_t best = 0;
  double best_power = -1.0;
  for (size_t k = 1; k <= n / 2; ++k) {
    Complex acc = 0.0;
    const double w = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    for (size_t j = 0; j < n; ++j) acc += (y[j] - mean) * std::polar(1.0, w * static_cast<double>(j));
    const double power = std::norm(acc);
    if (power > best_power) {
      best_power = power;
      best = k;
    }
  }
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  return dt * static_cast<double>(n) / static_cast<double>(best);
}

}  // namespace

UnitaryFamily::UnitaryFamily(const ComplexMatrix& generator, std::vector<double> rates)
    : UnitaryFamily(herm_eig(generator), std::move(rates)) {}

UnitaryFamily::UnitaryFamily(HermEigen generator_eigen, std::vector<double> rates)
    : eigen_(std::move(generator_eigen)), rates_(std::move(rates)) {
  require_distinct(rates_);
  diagonal_ = eigen_.vectors.isIdentity(0.0);
}

ComplexMatrix UnitaryFamily::unitary(size_t i, double t) const {
  return unitary_exp(eigen_, t * rates_.at(i));
}

SpectralProfile SpectralProfile::of(const HermEigen& b, const ComplexVector& psi) {
  require_unit(psi, "SpectralProfile");
  if (psi.size() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "SpectralProfile: vector and generator differ");
  }
  SpectralProfile p;
  p.eigenvalues = b.values;
  p.weights = (b.vectors.adjoint() * psi).cwiseAbs2();
  p.weights /= p.weights.sum();
  return p;
}

SpectralProfile SpectralProfile::of(const ComplexMatrix& b, const ComplexVector& psi) {
  return of(herm_eig(b), psi);
}

Complex SpectralProfile::autocorrelation(double t) const {
  Complex acc = 0.0;
  for (Index k = 0; k < weights.size(); ++k) {
    acc += weights(k) * std::polar(1.0, -t * eigenvalues(k));
  }
  return acc;
}

double SpectralProfile::point_mass_sum() const {
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  double total = 0.0;
  double block = weights.size() ? weights(0) : 0.0;
  for (Index k = 1; k < weights.size(); ++k) {
    if (std::abs(eigenvalues(k) - eigenvalues(k - 1)) <= 1e-12 * scale) {
      block += weights(k);
    } else {
      total += block * block;
      block = weights(k);
    }
  }
  return total + block * block;
}

EvolvingEnsemble::EvolvingEnsemble(const UnitaryFamily& family,
                                   std::span<const DensityOperator> base,
                                   std::span<const double> weights)
    : family_(family), weights_(weights.begin(), weights.end()) {
  if (base.size() != family.size() || weights.size() != family.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "evolve_ensemble: base states, weights and rates must have equal length");
  }
  // Validates the weights once up front.
  Ensemble(weights, base);
  const ComplexMatrix& v = family.eigen().vectors;
  kets_.resize(base.size());
  rotated_.resize(base.size());
  bool shared = true;
  for (size_t i = 0; i < base.size(); ++i) {
    if (base[i].dim() != family.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "evolve_ensemble: state and generator differ");
    }
    if (base[i].ket()) {
      kets_[i] = v.adjoint() * *base[i].ket();
    } else {
      rotated_[i] = v.adjoint() * base[i].matrix() * v;
    }
    shared = shared && base[i].ket() &&
             (i == 0 || max_abs(*base[i].ket() - *base[0].ket()) == 0.0);
  }
  if (shared) shared_profile_ = SpectralProfile::of(family.eigen(), *base[0].ket());
}

DensityOperator EvolvingEnsemble::member(size_t i, double t) const {
  const HermEigen& e = family_.eigen();
  const ComplexVector ph = phases(e.values, t * family_.rates()[i]);
  if (kets_[i]) {
    if (family_.diagonal()) return DensityOperator::from_ket(ph.cwiseProduct(*kets_[i]));
    return DensityOperator::from_ket(e.vectors * ph.cwiseProduct(*kets_[i]));
  }
  const ComplexMatrix inner = ph.asDiagonal() * rotated_[i] * ph.conjugate().asDiagonal();
  ComplexMatrix rho = e.vectors * inner * e.vectors.adjoint();
  return DensityOperator::assume_valid(0.5 * (rho + rho.adjoint()));
}

Ensemble EvolvingEnsemble::at(double t) const {
  std::vector<EnsembleMember> members;
  members.reserve(size());
  for (size_t i = 0; i < size(); ++i) members.push_back({weights_[i], member(i, t)});
  return Ensemble(std::move(members));
}

Ensemble evolve_ensemble(const UnitaryFamily& family, std::span<const DensityOperator> base,
                         std::span<const double> weights, double t) {
  return EvolvingEnsemble(family, base, weights).at(t);
}

Complex autocorrelation(const ComplexMatrix& b, const ComplexVector& psi, double t) {
  return SpectralProfile::of(b, psi).autocorrelation(t);
}

Complex cross_correlation(const HermEigen& b, const ComplexVector& phi,
                          const ComplexVector& psi, double t) {
  require_unit(phi, "cross_correlation");
  require_unit(psi, "cross_correlation");
  if (phi.size() != b.dim() || psi.size() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "cross_correlation: dimensions differ");
  }
  const ComplexVector a = b.vectors.adjoint() * phi;
  const ComplexVector c = b.vectors.adjoint() * psi;
  return a.dot(phases(b.values, t).cwiseProduct(c));
}

Complex cross_correlation(const ComplexMatrix& b, const ComplexVector& phi,
                          const ComplexVector& psi, double t) {
  return cross_correlation(herm_eig(b), phi, psi, t);
}

double wiener_average(const SpectralProfile& profile, double horizon, int n_samples) {
  if (!(horizon > 0.0) || n_samples < 2) {
    throw Error(ErrorKind::InvalidArgument,
                "wiener_average: needs a positive horizon and at least two samples");
  }
  const double h = horizon / (n_samples - 1);
  double sum = 0.0;
  for (int j = 0; j < n_samples; ++j) {
    const double v = std::norm(profile.autocorrelation(j * h));
    sum += (j == 0 || j == n_samples - 1) ? 0.5 * v : v;
  }
  return sum * h / horizon;
}

double wiener_average(const ComplexMatrix& b, const ComplexVector& psi, double horizon,
                      int n_samples) {
  return wiener_average(SpectralProfile::of(b, psi), horizon, n_samples);
}

std::vector<double> TimeGrid::times() const {
  if (points < 1 || !std::isfinite(start) || !std::isfinite(stop)) {
    throw Error(ErrorKind::InvalidArgument, "TimeGrid: invalid specification");
  }
  if (points == 1) return {start};
  if (!(stop > start)) {
    throw Error(ErrorKind::InvalidArgument, "TimeGrid: stop must exceed start");
  }
  std::vector<double> t(static_cast<size_t>(points));
  const double h = (stop - start) / (points - 1);
  for (int k = 0; k < points; ++k) t[static_cast<size_t>(k)] = start + k * h;
  t.back() = stop;
  return t;
}

std::string to_string(SweepQuantity q) {
  switch (q) {
    case SweepQuantity::KnillBarnum: return "kb";
    case SweepQuantity::Montanaro: return "montanaro";
    case SweepQuantity::Hellstrom: return "hellstrom";
    case SweepQuantity::Autocorrelation: return "autocorrelation";
  }
  return "unknown";
}

SweepQuantity sweep_quantity_from_string(std::string_view name) {
  if (name == "kb") return SweepQuantity::KnillBarnum;
  if (name == "montanaro") return SweepQuantity::Montanaro;
  if (name == "hellstrom") return SweepQuantity::Hellstrom;
  if (name == "autocorrelation") return SweepQuantity::Autocorrelation;
  throw Error(ErrorKind::InvalidArgument, "unknown sweep quantity '" + std::string(name) + "'");
}

SweepResult bound_sweep(const EvolvingEnsemble& model, const TimeGrid& grid,
                        SweepQuantity quantity, std::string model_name) {
  size_t active = 0;
  for (double w : model.weights()) active += w > 0.0 ? 1 : 0;
  if (quantity == SweepQuantity::Hellstrom && active != 2) {
    throw Error(ErrorKind::UnsupportedCombination,
                "bound_sweep: hellstrom needs exactly two members");
  }
  if ((quantity == SweepQuantity::KnillBarnum || quantity == SweepQuantity::Montanaro) &&
      active < 2) {
    throw Error(ErrorKind::InvalidEnsemble, "bound_sweep: bounds need two or more members");
  }
  std::optional<SpectralProfile> self_profile;
  if (quantity == SweepQuantity::Autocorrelation) {
    const auto base = model.member(0, 0.0);
    if (!base.ket()) {
      throw Error(ErrorKind::UnsupportedCombination,
                  "bound_sweep: autocorrelation needs a pure first base state");
    }
    self_profile = SpectralProfile::of(model.family().eigen(), *base.ket());
  }

  SweepResult r;
  r.quantity = quantity;
  r.times = grid.times();
  r.values.assign(r.times.size(), 0.0);
  r.model = std::move(model_name);
  r.rates = model.family().rates();
  r.weights = model.weights();
  std::vector<double> deviation(r.times.size(), 0.0);

  const auto& x = r.rates;
  const auto& p = r.weights;
  parallel_for(r.times.size(), [&](size_t k) {
    const double t = r.times[k];
    if (quantity == SweepQuantity::Autocorrelation) {
      r.values[k] = std::abs(self_profile->autocorrelation(t));
      return;
    }
    const Ensemble e = model.at(t);
    switch (quantity) {
      case SweepQuantity::KnillBarnum: {
        r.values[k] = knill_barnum_upper(e);
        if (const auto& prof = model.shared_profile()) {
          double direct = 0.0;
          for (size_t i = 0; i < x.size(); ++i) {
            for (size_t j = 0; j < x.size(); ++j) {
              if (i == j) continue;
              direct += std::sqrt(p[i] * p[j]) * std::abs(prof->autocorrelation((x[j] - x[i]) * t));
            }
          }
          deviation[k] = std::abs(direct - r.values[k]);
        }
        break;
      }
      case SweepQuantity::Montanaro:
        r.values[k] = montanaro_lower(e);
        break;
      case SweepQuantity::Hellstrom:
        r.values[k] = hellstrom(e.weight(0), e.state(0), e.weight(1), e.state(1)).error;
        break;
      case SweepQuantity::Autocorrelation:
        break;
    }
  });
  r.max_cross_check_deviation = *std::max_element(deviation.begin(), deviation.end());
  if (r.max_cross_check_deviation > 1e-9) {
    throw Error(ErrorKind::NumericalFailure,
                "bound_sweep: Knill-Barnum sweep disagrees with the autocorrelation formula");
  }
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::FullySolvableEvidence: return "fully-solvable-evidence";
    case Verdict::NotFullySolvableEvidence: return "not-fully-solvable-evidence";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

TimeWindow default_window(double recurrence_time) {
  return {50.0, std::min(500.0, 0.5 * recurrence_time)};
}

VerdictReport solvability_verdict(const SweepResult& sweep, double threshold,
                                  TimeWindow window, std::optional<double> period) {
  const auto& t = sweep.times;
  const auto& y = sweep.values;
  if (t.empty() || t.size() != y.size()) {
    throw Error(ErrorKind::InvalidArgument, "solvability_verdict: empty sweep");
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(t.back()));
  if (!(window.start <= window.stop) || window.start < t.front() - slack ||
      window.stop > t.back() + slack) {
    throw Error(ErrorKind::WindowOutOfRange,
                "solvability_verdict: window lies outside the sweep grid");
  }
  std::vector<double> wt;
  std::vector<double> wy;
  for (size_t k = 0; k < t.size(); ++k) {
    if (t[k] >= window.start - slack && t[k] <= window.stop + slack) {
      wt.push_back(t[k]);
      wy.push_back(y[k]);
    }
  }
  if (wt.empty()) {
    throw Error(ErrorKind::WindowOutOfRange, "solvability_verdict: no samples in the window");
  }

  VerdictReport r;
  r.threshold = threshold;
  r.window = window;
  r.samples = static_cast<int>(wt.size());
  r.window_max = *std::max_element(wy.begin(), wy.end());
  r.window_min = *std::min_element(wy.begin(), wy.end());
  r.rule = "none";
  r.caveat =
      "finite-dimensional generators have pure point spectrum; decay is evidence on the "
      "sampled window only";

  if (period) {
    r.period = period;
    r.period_source = "analytic";
  } else if (sweep.period) {
    r.period = sweep.period;
    r.period_source = "analytic";
  } else if (auto p = dft_period(wt, wy)) {
    r.period = p;
    r.period_source = "dft";
  } else {
    r.period = wt.back() - wt.front();
    r.period_source = "window";
  }

  if (is_upper(sweep.quantity) && r.window_max <= threshold) {
    r.verdict = Verdict::FullySolvableEvidence;
    r.rule = "upper-bound-below-threshold";
    return r;
  }

  if (is_lower(sweep.quantity)) {
    // Sliding maximum over [t_s, t_s + period] for every admissible start.
    const double span = *r.period;
    std::deque<size_t> q;
    size_t end = 0;
    double lowest = std::numeric_limits<double>::infinity();
    bool any = false;
    for (size_t s = 0; s < wt.size(); ++s) {
      if (wt[s] + span > wt.back() + slack) break;
      while (end < wt.size() && wt[end] <= wt[s] + span + slack) {
        while (!q.empty() && wy[q.back()] <= wy[end]) q.pop_back();
        q.push_back(end++);
      }
      while (q.front() < s) q.pop_front();
      lowest = std::min(lowest, wy[q.front()]);
      any = true;
    }
    if (any) {
      r.min_subwindow_max = lowest;
      if (lowest >= threshold) {
        r.verdict = Verdict::NotFullySolvableEvidence;
        r.rule = "lower-bound-recurs-every-period";
      }
    }
  }
  return r;
}

QubitExample qubit_example(double t, double x1, double x2) {
  if (x1 == x2) {
    throw Error(ErrorKind::InvalidArgument, "qubit_example: rates must differ");
  }
  auto closed_form = [](double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    ComplexMatrix m(2, 2);
    m << c * c, Complex(0.0, c * s), Complex(0.0, -c * s), s * s;
    return DensityOperator::from_matrix(m);
  };
  const DensityOperator r1 = closed_form(t * x1);
  const DensityOperator r2 = closed_form(t * x2);

  ComplexMatrix sigma_x(2, 2);
  sigma_x << 0, 1, 1, 0;
  const UnitaryFamily family(sigma_x, {x1, x2});
  const DensityOperator z1 = DensityOperator::basis_state(2, 0);
  const std::vector<DensityOperator> base{z1, z1};
  const std::vector<double> weights{0.5, 0.5};
  const Ensemble evolved = evolve_ensemble(family, base, weights, t);
  const double gap = std::max(max_abs(evolved.state(0).matrix() - r1.matrix()),
                              max_abs(evolved.state(1).matrix() - r2.matrix()));
  if (gap > 1e-10) {
    throw Error(ErrorKind::NumericalFailure,
                "qubit_example: closed form disagrees with evolve_ensemble");
  }

  const ComplexMatrix delta = r1.matrix() - r2.matrix();
  const double det = (delta(0, 0) * delta(1, 1) - delta(0, 1) * delta(1, 0)).real();
  QubitExample out{r1, r2, 0.0, 0.5 - 0.5 * std::sqrt(std::max(0.0, -det))};
  out.error = hellstrom(0.5, r1, 0.5, r2).error;
  return out;
}

double qubit_example_period(double x1, double x2) {
  return std::numbers::pi / std::abs(x2 - x1);
}

std::string to_string(WeightProfile p) {
  return p == WeightProfile::Uniform ? "uniform" : "raised-cosine";
}

WeightProfile weight_profile_from_string(std::string_view name) {
  if (name == "uniform") return WeightProfile::Uniform;
  if (name == "raised-cosine") return WeightProfile::RaisedCosine;
  throw Error(ErrorKind::InvalidArgument, "unknown weight profile '" + std::string(name) + "'");
}

AcModel discretized_ac_model(Index d, double a, double b, WeightProfile profile) {
  if (d < 2 || !(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidArgument,
                "discretized_ac_model: needs d >= 2 and a finite interval a < b");
  }
  RealVector lambda(d);
  RealVector w(d);
  for (Index k = 0; k < d; ++k) {
    lambda(k) = a + static_cast<double>(k) * (b - a) / static_cast<double>(d - 1);
    if (profile == WeightProfile::Uniform) {
      w(k) = 1.0;
    } else {
      const double s = std::sin(std::numbers::pi * static_cast<double>(k + 1) /
                                static_cast<double>(d + 1));
      w(k) = s * s;
    }
  }
  w /= w.sum();
  AcModel m;
  m.generator = lambda.cast<Complex>().asDiagonal();
  m.psi = w.cwiseSqrt().cast<Complex>();
  m.psi /= m.psi.norm();
  m.recurrence_time = 2.0 * std::numbers::pi * static_cast<double>(d - 1) / (b - a);
  m.profile.eigenvalues = lambda;
  m.profile.weights = w;
  return m;
}

}  // namespace qsd
