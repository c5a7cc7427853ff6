#!/usr/bin/env python3
# Copyright 2026 The Privaudit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Runs every privaudit command and validates its JSON report.

usage: validate_reports.py BINARY SCHEMA WORKDIR
"""

import json
import os
import subprocess
import sys

import jsonschema


def run(binary, args):
    proc = subprocess.run([binary] + args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise SystemExit(f"{' '.join(args)} exited {proc.returncode}: "
                         f"{proc.stderr}")


def main():
    if len(sys.argv) != 4:
        raise SystemExit(__doc__)
    binary, schema_path, work = sys.argv[1:]
    os.makedirs(work, exist_ok=True)
    with open(schema_path) as f:
        schema = json.load(f)
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)

    p = lambda name: os.path.join(work, name)
    run(binary, ["synth", "gaussian-pair", "--out", p("scores.jsonl"),
                 "--m-per-class", "200", "--seed", "1",
                 "--report", p("synth_pair.json")])
    run(binary, ["synth", "panel", "--out", p("panel.json"), "--samples", "200",
                 "--seed", "1", "--report", p("synth_panel.json")])
    run(binary, ["synth", "toy-lm", "--out", p("traces.jsonl"),
                 "--completions-out", p("completions.jsonl"),
                 "--scheme", "top_k:2", "--seed", "1",
                 "--report", p("synth_toy.json")])
    run(binary, ["synth", "rr", "--out", p("rr.jsonl"), "--seed", "1",
                 "--report", p("synth_rr.json")])
    run(binary, ["synth", "gaussian-mech", "--out", p("gm.jsonl"), "--m", "400",
                 "--seed", "1", "--report", p("synth_gm.json")])
    run(binary, ["lira", "--panel", p("panel.json"), "--out", p("lira.jsonl"),
                 "--report", p("lira.json")])
    run(binary, ["rmia", "--panel", p("panel.json"), "--out", p("rmia.jsonl"),
                 "--alpha", "auto", "--report", p("rmia.json")])
    run(binary, ["audit", "--scores", p("lira.jsonl"), "--k", "100",
                 "--epsilon-at-tpr", "0.01", "--report", p("audit.json")])
    run(binary, ["audit", "--scores", p("gm.jsonl"), "--k", "50",
                 "--delta", "1e-5", "--resampling", "without_replacement",
                 "--report", p("audit_literal.json")])
    run(binary, ["guess-audit", "--scores", p("scores.jsonl"),
                 "--report", p("guess.json")])
    run(binary, ["extract", "--traces", p("traces.jsonl"), "--completions",
                 p("completions.jsonl"), "--scheme", "greedy", "--scheme",
                 "top_k:2", "--predicate", "lcs", "--report", p("extract.json")])

    reports = sorted(f for f in os.listdir(work)
                     if f.endswith(".json") and f != "panel.json")
    failures = 0
    for name in reports:
        with open(p(name)) as f:
            report = json.load(f)
        errors = list(validator.iter_errors(report))
        for e in errors:
            print(f"{name}: {'/'.join(map(str, e.absolute_path))}: {e.message}")
        print(f"{name}: {'ok' if not errors else 'INVALID'}")
        failures += bool(errors)
    if len(reports) < 11:
        print(f"expected 11 reports, found {len(reports)}")
        failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
