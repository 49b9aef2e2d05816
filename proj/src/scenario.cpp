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

#include "qsd/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qsd/discrimination.hpp"
#include "qsd/linalg.hpp"
#include "qsd/random.hpp"
#include "qsd/states.hpp"
#include "qsd/truncation.hpp"
#include "qsd/uncountable.hpp"
#include "qsd/urm.hpp"

namespace qsd {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
  throw Error(ErrorKind::ValidationError, path + ": " + message);
}

// Typed, strict view of a JSON object; unread keys are rejected by finish().
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!has(key)) invalid(path_, "missing required field '" + key + "'");
    used_.insert(key);
    return j_.at(key);
  }

  Obj obj(const std::string& key) { return Obj(raw(key), sub(key)); }

  double num(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      invalid(sub(key), "expected a finite number");
    }
    return v.get<double>();
  }
  double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) invalid(sub(key), "expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) {
    return has(key) ? integer(key) : fallback;
  }
  long long integer_in(const std::string& key, long long fallback, long long lo, long long hi) {
    const long long v = integer(key, fallback);
    if (v < lo || v > hi) {
      invalid(sub(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) invalid(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::string str(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) invalid(sub(key), "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& fallback) {
    return has(key) ? str(key) : fallback;
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) invalid(sub(key), "expected an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        invalid(sub(key) + "[" + std::to_string(i) + "]", "expected a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::vector<Obj> objects(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array() || v.empty()) invalid(sub(key), "expected a nonempty array");
    std::vector<Obj> out;
    for (size_t i = 0; i < v.size(); ++i) {
      out.emplace_back(v[i], sub(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) invalid(path_, "unknown field '" + item.key() + "'");
    }
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// Errors raised while building user-supplied objects are input problems;
// genuine numerical failures keep their class.
template <class Fn>
auto as_validation(const std::string& path, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::ValidationError:
      case ErrorKind::NumericalFailure:
      case ErrorKind::NoConvergence:
      case ErrorKind::SearchFailed:
        throw;
      default:
        break;
    }
    throw Error(ErrorKind::ValidationError,
                path + ": " + std::string(to_string(e.kind())) + ": " + e.what());
  }
}

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

json num(const std::optional<double>& x) { return x ? num(*x) : json(nullptr); }

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

std::string short_fmt(double x) {
  if (!std::isfinite(x)) return fmt(x);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

class Csv {
 public:
  explicit Csv(std::vector<std::string> header) : width_(header.size()) { row(header); }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  std::string str() const { return out_.str(); }

 private:
  size_t width_;
  std::ostringstream out_;
};

// ---- input decoding -------------------------------------------------------

Complex parse_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  invalid(path, "expected a number or [re, im]");
}

ComplexVector parse_vector(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) invalid(path, "expected a nonempty array");
  ComplexVector out(static_cast<Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) {
    out(static_cast<Index>(i)) = parse_complex(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

ComplexMatrix parse_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) invalid(path, "expected a nonempty array of rows");
  const size_t n = v.size();
  ComplexMatrix m(static_cast<Index>(n), static_cast<Index>(n));
  for (size_t i = 0; i < n; ++i) {
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!v[i].is_array() || v[i].size() != n) invalid(rp, "rows must make a square matrix");
    for (size_t j = 0; j < n; ++j) {
      m(static_cast<Index>(i), static_cast<Index>(j)) =
          parse_complex(v[i][j], rp + "[" + std::to_string(j) + "]");
    }
  }
  return m;
}

DensityOperator parse_state(Obj o, Rng& rng) {
  DensityOperator out = DensityOperator::maximally_mixed(1);
  if (o.has("ket")) {
    const ComplexVector psi = parse_vector(o.raw("ket"), o.sub("ket"));
    out = as_validation(o.path(), [&] { return DensityOperator::from_ket(psi); });
  } else if (o.has("matrix")) {
    const ComplexMatrix m = parse_matrix(o.raw("matrix"), o.sub("matrix"));
    out = as_validation(o.path(), [&] { return DensityOperator::from_matrix(m); });
  } else if (o.has("random")) {
    Obj r = o.obj("random");
    const Index dim = r.integer_in("dim", 2, 1, 64);
    const Index rank = r.integer_in("rank", dim, 1, dim);
    r.finish();
    out = random_density(rng, dim, rank);
  } else {
    invalid(o.path(), "a state needs one of 'ket', 'matrix' or 'random'");
  }
  o.finish();
  return out;
}

Ensemble parse_ensemble(Obj o, Rng& rng) {
  if (o.has("random")) {
    Obj r = o.obj("random");
    const Index dim = r.integer_in("dim", 2, 1, 64);
    const auto members = static_cast<size_t>(r.integer_in("members", 2, 1, 16));
    r.finish();
    o.finish();
    return random_ensemble(rng, dim, members);
  }
  const std::vector<double> weights = o.numbers("weights");
  std::vector<DensityOperator> states;
  for (Obj s : o.objects("states")) states.push_back(parse_state(std::move(s), rng));
  o.finish();
  return as_validation(o.path(), [&] { return Ensemble(weights, states); });
}

struct GeneratorModel {
  std::string name;
  HermEigen b;
  ComplexVector psi;
  std::optional<double> recurrence_time;
};

GeneratorModel parse_generator_model(Obj o, Rng& rng) {
  GeneratorModel g;
  g.name = o.str("type", "ac");
  if (g.name == "ac") {
    const Index dim = o.integer_in("dim", 256, 2, 1024);
    std::vector<double> interval{0.0, 1.0};
    if (o.has("interval")) interval = o.numbers("interval");
    if (interval.size() != 2 || !(interval[0] < interval[1])) {
      invalid(o.sub("interval"), "expected [a, b] with a < b");
    }
    const std::string profile = o.str("profile", "uniform");
    const WeightProfile wp =
        as_validation(o.sub("profile"), [&] { return weight_profile_from_string(profile); });
    const AcModel m = discretized_ac_model(dim, interval[0], interval[1], wp);
    g.b = herm_eig(m.generator);
    g.psi = m.psi;
    g.recurrence_time = m.recurrence_time;
    if (o.has("eigenvector")) {
      const Index k = o.integer_in("eigenvector", 0, 0, dim - 1);
      g.psi = ComplexVector::Zero(dim);
      g.psi(k) = 1.0;
    }
  } else if (g.name == "custom") {
    const ComplexMatrix gen = parse_matrix(o.raw("generator"), o.sub("generator"));
    g.b = as_validation(o.sub("generator"), [&] { return herm_eig(gen); });
    const DensityOperator s = parse_state(o.obj("state"), rng);
    if (!s.ket()) invalid(o.sub("state"), "the base state must be given as a ket");
    if (s.dim() != g.b.dim()) invalid(o.sub("state"), "dimension differs from the generator");
    g.psi = *s.ket();
  } else {
    invalid(o.sub("type"), "expected 'ac' or 'custom'");
  }
  o.finish();
  return g;
}

DensitySpec parse_density(Obj o) {
  const std::string type = o.str("type");
  const std::vector<double> s = o.numbers("support");
  if (s.size() != 2) invalid(o.sub("support"), "expected [a, b]");
  DensitySpec out = as_validation(o.path(), [&] {
    if (type == "uniform") return DensitySpec::uniform(s[0], s[1]);
    if (type == "raised-cosine") return DensitySpec::raised_cosine(s[0], s[1]);
    if (type == "two-uniforms") return DensitySpec::two_uniforms(s[0], s[1], o.num("separation"));
    invalid(o.sub("type"), "expected 'uniform', 'raised-cosine' or 'two-uniforms'");
  });
  o.finish();
  return out;
}

TimeGrid parse_grid(Obj o) {
  TimeGrid g;
  g.start = o.num("start", 0.0);
  g.stop = o.num("stop");
  g.points = static_cast<int>(o.integer_in("points", 2001, 2, 1000000));
  if (!(g.stop > g.start)) invalid(o.sub("stop"), "must exceed start");
  o.finish();
  return g;
}

json bounds_json(const BoundsReport& b) {
  json j;
  j["qiu_lower"] = num(b.qiu_lower);
  j["montanaro_lower"] = num(b.montanaro_lower);
  j["pgm_error"] = num(b.pgm_error);
  j["kb_upper"] = num(b.kb_upper);
  j["hellstrom"] = num(b.hellstrom_exact);
  j["bracket_width"] = num(b.bracket_width());
  return j;
}

std::vector<std::string> bounds_cells(const BoundsReport& b) {
  return {fmt(b.qiu_lower), fmt(b.montanaro_lower), fmt(b.pgm_error), fmt(b.kb_upper),
          fmt(b.hellstrom_exact)};
}

const std::vector<std::string> kBoundsHeader{"qiu_lower", "montanaro_lower", "pgm_error",
                                             "kb_upper", "hellstrom"};

struct Output {
  json report;
  std::string csv;
  std::string summary;
};

// ---- kinds -------------------------------------------------------------------

Output run_hellstrom(Obj& o, Rng& rng) {
  const Ensemble ens = parse_ensemble(o.obj("ensemble"), rng);
  if (ens.size() != 2) invalid(o.sub("ensemble"), "hellstrom needs exactly two members");
  const HellstromResult h = hellstrom(ens.weight(0), ens.state(0), ens.weight(1), ens.state(1));
  const double qiu = qiu_lower(ens);
  Output out;
  out.report["dim"] = ens.dim();
  out.report["weights"] = {ens.weight(0), ens.weight(1)};
  out.report["error"] = num(h.error);
  out.report["qiu_lower"] = num(qiu);
  out.report["povm_defect"] = num(h.povm.completeness_defect());
  Csv csv({"error", "qiu_lower"});
  csv.row({fmt(h.error), fmt(qiu)});
  out.csv = csv.str();
  out.summary = "hellstrom error=" + short_fmt(h.error);
  return out;
}

Output run_bounds(Obj& o, Rng& rng) {
  const Ensemble ens = parse_ensemble(o.obj("ensemble"), rng);
  if (ens.size() < 2) invalid(o.sub("ensemble"), "needs at least two members");
  const bool with_pgm = o.flag("pgm", true);
  const BoundsReport b = bounds_report(ens, with_pgm);
  Output out;
  out.report["dim"] = ens.dim();
  out.report["members"] = ens.size();
  out.report["bounds"] = bounds_json(b);
  const bool ordered = (!b.pgm_error || (b.montanaro_lower <= *b.pgm_error + 1e-9 &&
                                         *b.pgm_error <= b.kb_upper + 1e-9 &&
                                         b.qiu_lower <= *b.pgm_error + 1e-9));
  out.report["ordering_holds"] = ordered;
  Csv csv(kBoundsHeader);
  csv.row(bounds_cells(b));
  out.csv = csv.str();
  out.summary = "bounds qiu=" + short_fmt(b.qiu_lower) + " montanaro=" +
                short_fmt(b.montanaro_lower) +
                (b.pgm_error ? " pgm=" + short_fmt(*b.pgm_error) : std::string()) +
                " kb=" + short_fmt(b.kb_upper) + (ordered ? " ordering=ok" : " ordering=VIOLATED");
  return out;
}

Output run_urm_sweep(Obj& o, Rng& rng) {
  Obj m = o.obj("model");
  const std::string type = m.str("type");
  std::vector<double> rates;
  std::vector<double> weights;
  std::optional<UnitaryFamily> family;
  std::vector<DensityOperator> base;
  std::optional<double> recurrence;
  std::optional<double> period;
  if (type == "qubit") {
    rates = m.has("rates") ? m.numbers("rates") : std::vector<double>{0.0, 1.0};
    if (rates.size() != 2) invalid(m.sub("rates"), "the qubit model takes two rates");
    family.emplace(as_validation(m.sub("rates"), [&] {
      ComplexMatrix sx = ComplexMatrix::Zero(2, 2);
      sx(0, 1) = sx(1, 0) = 1.0;
      return UnitaryFamily(sx, rates);
    }));
    base.assign(2, DensityOperator::basis_state(2, 0));
    weights = {0.5, 0.5};
    period = as_validation(m.sub("rates"), [&] { return qubit_example_period(rates[0], rates[1]); });
  } else if (type == "ac") {
    const Index dim = m.integer_in("dim", 256, 2, 1024);
    std::vector<double> interval{0.0, 1.0};
    if (m.has("interval")) interval = m.numbers("interval");
    if (interval.size() != 2 || !(interval[0] < interval[1])) {
      invalid(m.sub("interval"), "expected [a, b] with a < b");
    }
    const std::string profile = m.str("profile", "uniform");
    const WeightProfile wp =
        as_validation(m.sub("profile"), [&] { return weight_profile_from_string(profile); });
    const AcModel ac = discretized_ac_model(dim, interval[0], interval[1], wp);
    rates = m.has("rates") ? m.numbers("rates") : std::vector<double>{0.0, 1.0, 2.0};
    ComplexVector psi = ac.psi;
    if (m.has("eigenvector")) {
      psi = ComplexVector::Zero(dim);
      psi(m.integer_in("eigenvector", 0, 0, dim - 1)) = 1.0;
    }
    family.emplace(as_validation(m.sub("rates"), [&] { return UnitaryFamily(ac.generator, rates); }));
    base.assign(rates.size(), DensityOperator::from_ket(psi));
    recurrence = ac.recurrence_time;
  } else if (type == "custom") {
    const ComplexMatrix gen = parse_matrix(m.raw("generator"), m.sub("generator"));
    rates = m.numbers("rates");
    family.emplace(as_validation(m.sub("generator"), [&] { return UnitaryFamily(gen, rates); }));
    if (m.has("state")) {
      base.assign(rates.size(), parse_state(m.obj("state"), rng));
    } else {
      for (Obj s : m.objects("states")) base.push_back(parse_state(std::move(s), rng));
    }
  } else {
    invalid(m.sub("type"), "expected 'qubit', 'ac' or 'custom'");
  }
  if (m.has("weights")) weights = m.numbers("weights");
  if (weights.empty()) weights.assign(rates.size(), 1.0 / static_cast<double>(rates.size()));
  m.finish();
  if (base.size() != rates.size()) invalid(m.path(), "one base state per rate is required");

  const std::string qname = o.str("quantity", "kb");
  const SweepQuantity quantity =
      as_validation(o.sub("quantity"), [&] { return sweep_quantity_from_string(qname); });
  const TimeGrid grid = parse_grid(o.obj("grid"));

  double threshold = kDefaultDecayThreshold;
  TimeWindow window{grid.start, grid.stop};
  if (recurrence) window = default_window(*recurrence);
  std::optional<double> verdict_period = period;
  if (o.has("verdict")) {
    Obj v = o.obj("verdict");
    threshold = v.num("threshold", threshold);
    if (v.has("window")) {
      const auto w = v.numbers("window");
      if (w.size() != 2 || !(w[0] < w[1])) invalid(v.sub("window"), "expected [start, stop]");
      window = {w[0], w[1]};
    }
    if (v.has("period")) verdict_period = v.num("period");
    v.finish();
  }

  const EvolvingEnsemble model = as_validation(
      m.path(), [&] { return EvolvingEnsemble(*family, base, weights); });
  SweepResult sweep = as_validation(o.path(), [&] {
    return bound_sweep(model, grid, quantity, type);
  });
  if (period && !sweep.period) sweep.period = period;
  const VerdictReport verdict = as_validation(o.sub("verdict"), [&] {
    return solvability_verdict(sweep, threshold, window, verdict_period);
  });

  Output out;
  json& r = out.report;
  r["model"] = type;
  r["quantity"] = to_string(quantity);
  r["rates"] = rates;
  r["weights"] = weights;
  r["grid"] = {{"start", grid.start}, {"stop", grid.stop}, {"points", grid.points}};
  if (recurrence) r["recurrence_time"] = num(*recurrence);
  r["period"] = num(sweep.period);
  r["max_cross_check_deviation"] = num(sweep.max_cross_check_deviation);
  double lo = sweep.values.front();
  double hi = lo;
  for (double v : sweep.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  r["min_value"] = num(lo);
  r["max_value"] = num(hi);
  if (type == "qubit" && quantity == SweepQuantity::Hellstrom) {
    double dev = 0.0;
    for (size_t k = 0; k < sweep.times.size(); ++k) {
      dev = std::max(dev, std::abs(sweep.values[k] -
                                   qubit_example(sweep.times[k], rates[0], rates[1]).error));
    }
    r["closed_form_deviation"] = num(dev);
  }
  json v;
  v["verdict"] = to_string(verdict.verdict);
  v["rule"] = verdict.rule;
  v["threshold"] = num(verdict.threshold);
  v["window"] = {num(verdict.window.start), num(verdict.window.stop)};
  v["window_max"] = num(verdict.window_max);
  v["window_min"] = num(verdict.window_min);
  v["period"] = num(verdict.period);
  v["period_source"] = verdict.period_source;
  v["min_subwindow_max"] = num(verdict.min_subwindow_max);
  v["samples"] = verdict.samples;
  v["caveat"] = verdict.caveat;
  r["verdict"] = v;

  Csv csv({"t", to_string(quantity)});
  for (size_t k = 0; k < sweep.times.size(); ++k) {
    csv.row({fmt(sweep.times[k]), fmt(sweep.values[k])});
  }
  out.csv = csv.str();
  out.summary = "urm-sweep model=" + type + " quantity=" + to_string(quantity) +
                " points=" + std::to_string(sweep.times.size()) + " min=" + short_fmt(lo) +
                " max=" + short_fmt(hi) + " verdict=" + to_string(verdict.verdict);
  return out;
}

Output run_chernoff(Obj& o, Rng& rng) {
  const Ensemble ens = parse_ensemble(o.obj("ensemble"), rng);
  if (ens.size() < 2) invalid(o.sub("ensemble"), "needs at least two members");
  const ChernoffReport rep = chernoff(ens);
  Output out;
  json pairs = json::array();
  Csv csv({"i", "j", "exponent", "s_min", "min_value"});
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"i", p.i}, {"j", p.j}, {"exponent", num(p.exponent)},
                     {"s_min", num(p.s_min)}, {"min_value", num(p.min_value)}});
    csv.row({std::to_string(p.i), std::to_string(p.j), fmt(p.exponent), fmt(p.s_min),
             fmt(p.min_value)});
  }
  out.report["pairs"] = pairs;
  out.report["ensemble_exponent"] = num(rep.ensemble_exponent);
  out.csv = csv.str();
  out.summary = "chernoff ensemble_exponent=" + short_fmt(rep.ensemble_exponent);
  return out;
}

Output run_tensor_power(Obj& o, Rng& rng) {
  const Ensemble ens = parse_ensemble(o.obj("ensemble"), rng);
  if (ens.size() != 2 || !ens.state(0).ket() || !ens.state(1).ket()) {
    invalid(o.sub("ensemble"), "tensor-power needs two pure members given as kets");
  }
  const int n_max = static_cast<int>(o.integer_in("n_max", 20, 1, 24));
  const int cap = static_cast<int>(o.integer_in("explicit_n_cap", 6, 0, 8));
  const TensorPowerStudy s = as_validation(o.path(), [&] {
    return tensor_power_study(ens.weight(0), *ens.state(0).ket(), ens.weight(1),
                              *ens.state(1).ket(), n_max, cap);
  });
  Output out;
  out.report["fidelity"] = num(s.fidelity);
  out.report["xi"] = num(s.xi);
  out.report["max_explicit_deviation"] = num(s.max_explicit_deviation);
  json rows = json::array();
  Csv csv({"n", "p_error", "rate", "explicit_error"});
  for (const auto& r : s.rows) {
    rows.push_back({{"n", r.n}, {"p_error", num(r.p_error)}, {"rate", num(r.rate)},
                    {"explicit_error", num(r.explicit_error)}});
    csv.row({std::to_string(r.n), fmt(r.p_error), fmt(r.rate), fmt(r.explicit_error)});
  }
  out.report["rows"] = rows;
  out.csv = csv.str();
  out.summary = "tensor-power xi=" + short_fmt(s.xi) + " rate_n=" +
                short_fmt(s.rows.back().rate) + " n=" + std::to_string(s.rows.back().n);
  return out;
}

std::vector<Interval> parse_partition(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) invalid(path, "expected a nonempty array of [lo, hi] cells");
  std::vector<Interval> cells;
  for (size_t i = 0; i < v.size(); ++i) {
    const auto& c = v[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      invalid(path + "[" + std::to_string(i) + "]", "expected [lo, hi]");
    }
    cells.push_back({c[0].get<double>(), c[1].get<double>()});
  }
  return cells;
}

Output run_nmixture(Obj& o, Rng& rng) {
  const GeneratorModel g = parse_generator_model(o.obj("model"), rng);
  const DensitySpec spec = parse_density(o.obj("density"));
  const int nodes = static_cast<int>(o.integer_in("nodes_per_cell", 128, 1, 4096));
  const std::vector<Interval> cells = parse_partition(o.raw("partition"), o.sub("partition"));
  std::vector<double> breaks;
  for (const auto& c : cells) {
    breaks.push_back(c.lo);
    breaks.push_back(c.hi);
  }
  const QuadratureScheme scheme = QuadratureScheme::for_spec(spec, nodes, breaks);
  std::vector<double> times;
  if (o.has("times")) {
    times = o.numbers("times");
    if (times.empty()) invalid(o.sub("times"), "expected at least one time");
  } else {
    times = parse_grid(o.obj("grid")).times();
  }
  const bool with_bounds = o.flag("bounds", false);

  Output out;
  json rows = json::array();
  std::vector<std::string> header{"t", "reconstruction_error"};
  if (with_bounds) header.insert(header.end(), kBoundsHeader.begin(), kBoundsHeader.end());
  Csv csv(header);
  double worst = 0.0;
  std::vector<double> weights;
  for (double t : times) {
    const NMixture nm = as_validation(o.path(), [&] {
      return n_mixture(spec, scheme, cells, g.b, g.psi, t);
    });
    weights = nm.weights;
    worst = std::max(worst, nm.reconstruction_error);
    json row{{"t", num(t)}, {"reconstruction_error", num(nm.reconstruction_error)}};
    std::vector<std::string> cells_out{fmt(t), fmt(nm.reconstruction_error)};
    if (with_bounds) {
      if (nm.weights.size() < 2) invalid(o.sub("partition"), "bounds need at least two cells");
      const BoundsReport b = uqsd_pipeline(nm);
      row["bounds"] = bounds_json(b);
      const auto bc = bounds_cells(b);
      cells_out.insert(cells_out.end(), bc.begin(), bc.end());
    }
    rows.push_back(row);
    csv.row(cells_out);
  }
  json cj = json::array();
  for (const auto& c : cells) cj.push_back({num(c.lo), num(c.hi)});
  out.report["model"] = g.name;
  out.report["dim"] = g.b.dim();
  out.report["density"] = spec.name();
  out.report["nodes_per_cell"] = nodes;
  out.report["quadrature_nodes"] = scheme.size();
  out.report["quadrature_mass"] = num(scheme.mass(spec));
  out.report["partition"] = cj;
  out.report["weights"] = weights;
  out.report["max_reconstruction_error"] = num(worst);
  out.report["rows"] = rows;
  out.csv = csv.str();
  out.summary = "nmixture cells=" + std::to_string(cells.size()) + " times=" +
                std::to_string(times.size()) + " max_reconstruction_error=" + short_fmt(worst) +
                (worst <= 1e-10 ? " rewriting=ok" : " rewriting=VIOLATED");
  return out;
}

Output run_claim13(Obj& o, Rng& rng) {
  const double c = o.num("c", 50.0);
  const double eps1 = o.num("eps1", 0.05);
  const double eps2 = o.num("eps2", 0.01);
  Claim13Options opt;
  opt.nodes_per_component = static_cast<int>(o.integer_in("nodes_per_component", 128, 1, 4096));
  opt.t_search = o.num("t_search", opt.t_search);
  opt.scan_points = static_cast<int>(o.integer_in("scan_points", 400, 2, 100000));
  opt.direct_checks = static_cast<int>(o.integer_in("direct_checks", 3, 0, 100));
  json model_default = {{"type", "ac"}};
  const GeneratorModel g = o.has("model") ? parse_generator_model(o.obj("model"), rng)
                                          : parse_generator_model(Obj(model_default, "model"), rng);
  const Claim13Report r = [&] {
    try {
      return claim13_harness(c, eps1, eps2, g.b, g.psi, opt);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidArgument) {
        throw Error(ErrorKind::ValidationError, o.path() + ": " + e.what());
      }
      throw;
    }
  }();
  Output out;
  json& j = out.report;
  j["c"] = num(r.c);
  j["eps1"] = num(r.eps1);
  j["eps2"] = num(r.eps2);
  j["T"] = num(r.T);
  j["t_prime"] = num(r.t_prime);
  j["purity_min"] = num(r.purity_min);
  j["overlap_max"] = num(r.overlap_max);
  j["superfid_bound"] = num(r.superfid_bound);
  j["pass"] = r.pass;
  j["delta"] = num(r.delta);
  j["alpha_max"] = num(r.alpha_max);
  j["distance"] = num(r.distance);
  j["window_nonempty"] = r.window_nonempty;
  j["fidelity_max"] = num(r.fidelity_max);
  j["direct_fidelity_max"] = num(r.direct_fidelity_max);
  json dt = json::array();
  for (double t : r.direct_times) dt.push_back(num(t));
  j["direct_times"] = dt;
  j["chain_holds"] = r.chain_holds;
  j["c_min"] = num(r.c_min);
  j["reason"] = r.reason;
  j["model"] = g.name;
  j["dim"] = g.b.dim();
  Csv csv({"c", "eps1", "eps2", "T", "t_prime", "purity_min", "overlap_max", "superfid_bound",
           "fidelity_max", "direct_fidelity_max", "c_min", "pass"});
  csv.row({fmt(r.c), fmt(r.eps1), fmt(r.eps2), fmt(r.T), fmt(r.t_prime), fmt(r.purity_min),
           fmt(r.overlap_max), fmt(r.superfid_bound), fmt(r.fidelity_max),
           fmt(r.direct_fidelity_max), fmt(r.c_min), r.pass ? "true" : "false"});
  out.csv = csv.str();
  out.summary = "claim13 T=" + short_fmt(r.T) + " t'=" + short_fmt(r.t_prime) +
                " purity_min=" + short_fmt(r.purity_min) + " overlap_max=" +
                short_fmt(r.overlap_max) + " F<=" + short_fmt(r.superfid_bound) +
                (r.pass ? " pass" : " fail (" + r.reason + ")");
  return out;
}

Output run_truncation(Obj& o, Rng& rng) {
  const std::string study = o.str("study", "fidelity");
  if (study != "fidelity" && study != "kb") invalid(o.sub("study"), "expected 'fidelity' or 'kb'");
  std::vector<DensityOperator> states;
  std::vector<double> weights;
  if (o.has("geometric")) {
    Obj gobj = o.obj("geometric");
    const Index dim = gobj.integer_in("dim", 12, 1, 256);
    const double ratio = gobj.num("ratio", 0.5);
    if (!(ratio > 0.0 && ratio <= 1.0)) invalid(gobj.sub("ratio"), "must lie in (0, 1]");
    const auto members = static_cast<size_t>(gobj.integer_in("members", 2, 2, 16));
    gobj.finish();
    for (size_t i = 0; i < members; ++i) {
      states.push_back(geometric_state(dim, ratio, random_unitary(rng, dim)));
    }
  } else {
    for (Obj s : o.objects("states")) states.push_back(parse_state(std::move(s), rng));
  }
  if (o.has("weights")) weights = o.numbers("weights");
  if (weights.empty()) weights.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  const Index dim = states.front().dim();
  std::vector<Index> ranks;
  if (o.has("ranks")) {
    for (double r : o.numbers("ranks")) {
      if (r != std::floor(r)) invalid(o.sub("ranks"), "ranks must be integers");
      ranks.push_back(static_cast<Index>(r));
    }
  } else {
    for (Index d = 1; d <= dim; ++d) ranks.push_back(d);
  }

  TruncationStudy s = as_validation(o.path(), [&] {
    if (study == "fidelity") {
      if (states.size() != 2) invalid(o.path(), "the fidelity study takes exactly two states");
      return fidelity_convergence_study(states[0], states[1], ranks);
    }
    return kb_convergence_study(Ensemble(weights, states), ranks);
  });

  const bool fid = s.kind == TruncationStudy::Kind::Fidelity;
  Output out;
  out.report["study"] = study;
  out.report["dim"] = dim;
  out.report["members"] = states.size();
  out.report["full_value"] = num(s.full_value);
  out.report["reference_value"] = num(s.reference_value);
  out.report["monotone"] = s.monotone;
  out.report["converged"] = s.converged;
  out.report["chain_holds"] = s.chain_holds;
  out.report["pass"] = s.pass();
  json rows = json::array();
  Csv csv({"d", "tail", "alpha", "fidelity_dev", "kb_dev", "bound"});
  for (const auto& r : s.rows) {
    json tails = json::array();
    json alphas = json::array();
    for (double t : r.tails) tails.push_back(num(t));
    for (double a : r.alphas) alphas.push_back(num(a));
    json row{{"d", r.d},          {"tail", num(r.tail)},   {"alpha", num(r.alpha)},
             {"tails", tails},    {"alphas", alphas},      {"value", num(r.value)},
             {"bound", num(r.bound)}, {"bound_holds", r.bound_holds}};
    if (fid) {
      row["fidelity_dev"] = num(r.fidelity_dev);
    } else {
      row["kb_dev"] = num(r.kb_dev);
      row["kb_unnormalized"] = num(r.kb_unnormalized);
    }
    rows.push_back(row);
    csv.row({std::to_string(r.d), fmt(r.tail), fmt(r.alpha), fid ? fmt(r.fidelity_dev) : "",
             fid ? "" : fmt(r.kb_dev), fmt(r.bound)});
  }
  out.report["rows"] = rows;
  out.csv = csv.str();
  out.summary = "truncation study=" + study + " ranks=" + std::to_string(ranks.size()) +
                " full=" + short_fmt(s.full_value) + (s.pass() ? " pass" : " fail");
  return out;
}

Output run_inequality_suite(Obj& o, std::uint64_t seed) {
  const int trials = static_cast<int>(o.integer_in("trials", 100, 1, 100000));
  const InequalitySuiteReport r = fidelity_inequality_suite(trials, seed);
  Output out;
  out.report["trials"] = r.trials;
  out.report["quadrature_trials"] = r.quadrature_trials;
  out.report["min_gaps"] = {{"strong_concavity", num(r.min_gaps.strong_concavity)},
                            {"concavity", num(r.min_gaps.concavity)},
                            {"koenraad_milan", num(r.min_gaps.koenraad_milan)},
                            {"super_fidelity", num(r.min_gaps.super_fidelity)}};
  out.report["pass"] = r.pass;
  Csv csv({"strong_concavity", "concavity", "koenraad_milan", "super_fidelity"});
  csv.row({fmt(r.min_gaps.strong_concavity), fmt(r.min_gaps.concavity),
           fmt(r.min_gaps.koenraad_milan), fmt(r.min_gaps.super_fidelity)});
  out.csv = csv.str();
  out.summary = "inequality-suite trials=" + std::to_string(r.trials) + " min_gap=" +
                short_fmt(std::min({r.min_gaps.strong_concavity, r.min_gaps.concavity,
                                    r.min_gaps.koenraad_milan, r.min_gaps.super_fidelity})) +
                (r.pass ? " pass" : " fail");
  return out;
}

std::pair<int, int> line_column(std::string_view text, size_t byte) {
  int line = 1;
  int column = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

RunResult run_scenario_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is one past the offending character.
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ScenarioParseError(std::string("malformed JSON: ") + e.what(), line, column);
  }
  Obj o(doc, "scenario");
  RunResult result;
  result.kind = o.str("kind");
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), result.kind) == kinds.end()) {
    invalid(o.sub("kind"), "unknown kind '" + result.kind + "'");
  }
  const long long seed = o.integer("seed", 0);
  if (seed < 0) invalid(o.sub("seed"), "must be nonnegative");
  result.output_prefix = o.str("output", "qsd_" + result.kind);
  if (result.output_prefix.empty()) invalid(o.sub("output"), "must not be empty");
  if (o.has("description")) o.str("description");

  Rng rng(static_cast<std::uint64_t>(seed));
  Output out;
  if (result.kind == "hellstrom") out = run_hellstrom(o, rng);
  else if (result.kind == "bounds") out = run_bounds(o, rng);
  else if (result.kind == "urm-sweep") out = run_urm_sweep(o, rng);
  else if (result.kind == "chernoff") out = run_chernoff(o, rng);
  else if (result.kind == "tensor-power") out = run_tensor_power(o, rng);
  else if (result.kind == "nmixture") out = run_nmixture(o, rng);
  else if (result.kind == "claim13") out = run_claim13(o, rng);
  else if (result.kind == "truncation") out = run_truncation(o, rng);
  else out = run_inequality_suite(o, static_cast<std::uint64_t>(seed));
  o.finish();

  json report;
  report["kind"] = result.kind;
  report["seed"] = seed;
  for (auto& item : out.report.items()) report[item.key()] = item.value();
  report["summary"] = out.summary;
  result.json = report.dump(2) + "\n";
  result.csv = std::move(out.csv);
  result.summary = std::move(out.summary);
  return result;
}

RunResult run_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ValidationError, "cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return run_scenario_text(buf.str());
}

void write_artifacts(const RunResult& result, const std::string& prefix) {
  for (const auto& [ext, body] : {std::pair{".csv", &result.csv}, std::pair{".json", &result.json}}) {
    const std::string path = prefix + ext;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << *body;
    if (!out) throw Error(ErrorKind::ValidationError, "cannot write '" + path + "'");
  }
}

std::string error_json(const std::exception& e) {
  json j;
  if (const auto* q = dynamic_cast<const Error*>(&e)) {
    const ErrorClass c = classify(q->kind());
    j["error"] = c == ErrorClass::Parse        ? "ParseError"
                 : c == ErrorClass::Validation ? "ValidationError"
                                               : "NumericalFailure";
    j["kind"] = std::string(to_string(q->kind()));
  } else {
    j["error"] = "NumericalFailure";
    j["kind"] = "Internal";
  }
  j["message"] = e.what();
  j["exit_code"] = exit_code(e);
  if (const auto* p = dynamic_cast<const ScenarioParseError*>(&e)) {
    j["line"] = p->line();
    j["column"] = p->column();
  }
  return j.dump();
}

int exit_code(const std::exception& e) {
  if (const auto* q = dynamic_cast<const Error*>(&e)) {
    switch (classify(q->kind())) {
      case ErrorClass::Parse: return 2;
      case ErrorClass::Validation: return 3;
      case ErrorClass::Numerical: return 4;
    }
  }
  return 4;
}

}  // namespace qsd
