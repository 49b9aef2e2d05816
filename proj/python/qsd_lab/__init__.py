# Copyright 2026 The qsd-lab Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Minimum-error quantum state discrimination toolkit."""

import json as _json

from ._core import (
    QsdError,
    ac_autocorrelation,
    bounds,
    chernoff_exponent,
    fidelity,
    gauss_legendre,
    hellstrom,
    pgm,
    qubit_example_error,
    set_thread_limit,
    sqrtm,
    super_fidelity,
    trace_norm,
    truncate,
)
from ._core import run_scenario as _run_scenario

__version__ = "0.1.0"


def run_scenario(scenario):
    """Run a scenario given as a dict or JSON text; returns (report dict, csv text)."""
    text = scenario if isinstance(scenario, str) else _json.dumps(scenario)
    out = _run_scenario(text)
    return _json.loads(out["json"]), out["csv"]


__all__ = [
    "QsdError",
    "ac_autocorrelation",
    "bounds",
    "chernoff_exponent",
    "fidelity",
    "gauss_legendre",
    "hellstrom",
    "pgm",
    "qubit_example_error",
    "run_scenario",
    "set_thread_limit",
    "sqrtm",
    "super_fidelity",
    "trace_norm",
    "truncate",
]
