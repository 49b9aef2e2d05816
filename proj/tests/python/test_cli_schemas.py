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

import json
import os
import pathlib
import subprocess

import jsonschema
import pytest

ROOT = pathlib.Path(os.environ.get("QSD_LAB_ROOT", pathlib.Path(__file__).resolve().parents[2]))
CLI = os.environ.get("QSD_LAB_CLI", str(ROOT / "build" / "tools" / "qsd-lab"))
SCENARIOS = sorted((ROOT / "scenarios").glob("*.json"))


def load_schema(name):
    schema = json.loads((ROOT / "schemas" / name).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return schema


def run(args, cwd):
    return subprocess.run([CLI, *map(str, args)], cwd=cwd, capture_output=True, text=True)


@pytest.mark.parametrize("scenario", SCENARIOS, ids=lambda p: p.stem)
def test_scenario_outputs_validate(scenario, tmp_path):
    jsonschema.validate(json.loads(scenario.read_text()), load_schema("scenario.schema.json"))
    first = run([scenario, "--out", tmp_path / "a"], tmp_path)
    assert first.returncode == 0, first.stderr
    assert first.stdout.count("\n") == 1
    report = json.loads((tmp_path / "a.json").read_text())
    jsonschema.validate(report, load_schema("report.schema.json"))
    assert (tmp_path / "a.csv").read_text().count("\n") >= 2
    again = run([scenario, "--out", tmp_path / "b", "--threads", "1"], tmp_path)
    assert again.returncode == 0, again.stderr
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_qubit_csv_matches_closed_form(tmp_path):
    import math

    res = run([ROOT / "scenarios" / "qubit_hellstrom.json", "--out", tmp_path / "q"], tmp_path)
    assert res.returncode == 0, res.stderr
    lines = (tmp_path / "q.csv").read_text().splitlines()
    assert lines[0] == "t,hellstrom"
    for line in lines[1:]:
        t, e = map(float, line.split(","))
        assert abs(e - (0.5 - 0.5 * abs(math.sin(t)))) <= 1e-10


@pytest.mark.parametrize(
    "text, code",
    [
        ('{"kind": "bounds",\n  "seed": ]', 2),
        ('{"kind": "nope"}', 3),
        ('{"kind": "claim13", "c": 0.5}', 3),
        ('{"kind": "bounds", "ensemble": {"random": {"dim": 2}}, "extra": true}', 3),
    ],
)
def test_errors_are_machine_readable(text, code, tmp_path):
    path = tmp_path / "s.json"
    path.write_text(text)
    res = run([path], tmp_path)
    assert res.returncode == code
    err = json.loads(res.stderr)
    jsonschema.validate(err, load_schema("error.schema.json"))
    assert err["exit_code"] == code
    if code == 2:
        assert (err["line"], err["column"]) == (2, 11)
    assert not list(tmp_path.glob("*.csv"))
