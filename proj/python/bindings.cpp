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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsd/discrimination.hpp"
#include "qsd/errors.hpp"
#include "qsd/linalg.hpp"
#include "qsd/parallel.hpp"
#include "qsd/scenario.hpp"
#include "qsd/states.hpp"
#include "qsd/truncation.hpp"
#include "qsd/uncountable.hpp"
#include "qsd/urm.hpp"

namespace py = pybind11;
using namespace qsd;

namespace {

DensityOperator state(const ComplexMatrix& m) { return DensityOperator::from_matrix(m); }

Ensemble ensemble(const std::vector<double>& weights, const std::vector<ComplexMatrix>& states) {
  std::vector<DensityOperator> s;
  for (const auto& m : states) s.push_back(state(m));
  return Ensemble(weights, s);
}

py::dict bounds_dict(const BoundsReport& b) {
  py::dict d;
  d["qiu_lower"] = b.qiu_lower;
  d["montanaro_lower"] = b.montanaro_lower;
  d["kb_upper"] = b.kb_upper;
  d["pgm_error"] = b.pgm_error ? py::cast(*b.pgm_error) : py::none();
  d["hellstrom"] = b.hellstrom_exact ? py::cast(*b.hellstrom_exact) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Minimum-error quantum state discrimination toolkit";

  static py::exception<Error> error_type(m, "QsdError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type.ptr())(std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      exc.attr("exit_code") = exit_code(e);
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  m.def("set_thread_limit", &set_thread_limit, py::arg("n"));

  m.def("fidelity", [](const ComplexMatrix& a, const ComplexMatrix& b) {
    return fidelity(state(a), state(b));
  }, py::arg("rho"), py::arg("sigma"));
  m.def("super_fidelity", [](const ComplexMatrix& a, const ComplexMatrix& b) {
    return super_fidelity(state(a), state(b));
  }, py::arg("rho"), py::arg("sigma"));
  m.def("trace_norm", [](const ComplexMatrix& a) { return trace_norm(a); }, py::arg("a"));
  m.def("sqrtm", [](const ComplexMatrix& a) { return herm_fn(a, SpectralFunction::sqrt()); },
        py::arg("a"));

  m.def("hellstrom", [](double p1, const ComplexMatrix& r1, double p2, const ComplexMatrix& r2) {
    const HellstromResult h = hellstrom(p1, state(r1), p2, state(r2));
    return py::make_tuple(h.error, h.povm.operators());
  }, py::arg("p1"), py::arg("rho1"), py::arg("p2"), py::arg("rho2"),
     "Minimum error and the optimal two-outcome measurement operators.");

  m.def("bounds", [](const std::vector<double>& w, const std::vector<ComplexMatrix>& s, bool pgm) {
    return bounds_dict(bounds_report(ensemble(w, s), pgm));
  }, py::arg("weights"), py::arg("states"), py::arg("pgm") = true);

  m.def("pgm", [](const std::vector<double>& w, const std::vector<ComplexMatrix>& s) {
    return pgm(ensemble(w, s)).operators();
  }, py::arg("weights"), py::arg("states"));

  m.def("chernoff_exponent", [](const ComplexMatrix& a, const ComplexMatrix& b) {
    const ChernoffPair c = chernoff_pair(state(a), state(b));
    return py::make_tuple(c.exponent, c.s_min);
  }, py::arg("rho"), py::arg("sigma"));

  m.def("qubit_example_error", [](double t, double x1, double x2) {
    return qubit_example(t, x1, x2).error;
  }, py::arg("t"), py::arg("x1") = 0.0, py::arg("x2") = 1.0);

  m.def("ac_autocorrelation", [](Index d, double t) {
    return discretized_ac_model(d, 0.0, 1.0).profile.autocorrelation(t);
  }, py::arg("dim"), py::arg("t"));

  m.def("truncate", [](const ComplexMatrix& rho, Index d) {
    const Truncation t = truncate(state(rho), d);
    return py::make_tuple(t.matrix(), t.tail);
  }, py::arg("rho"), py::arg("d"));

  m.def("gauss_legendre", [](int n) {
    const GaussRule r = gauss_legendre(n);
    return py::make_tuple(r.nodes, r.weights);
  }, py::arg("n"));

  m.def("run_scenario", [](const std::string& text) {
    const RunResult r = run_scenario_text(text);
    py::dict d;
    d["kind"] = r.kind;
    d["output"] = r.output_prefix;
    d["json"] = r.json;
    d["csv"] = r.csv;
    d["summary"] = r.summary;
    return d;
  }, py::arg("text"), "Runs a scenario given as JSON text and returns the rendered artifacts.");
}
