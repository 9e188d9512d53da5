# SPDX-License-Identifier: Apache-2.0
"""Every JSON file the CLI writes validates against its schema."""
import json
import os
import shutil
import subprocess

import jsonschema
import pytest

from conftest import CORPUS, LISTING_SEQ

BIN = os.environ.get("HTKIT_BIN") or shutil.which("htkit")
pytestmark = pytest.mark.skipif(not BIN, reason="htkit binary not available")


def run(*args, expect=0):
    env = {k: v for k, v in os.environ.items() if not k.startswith("SENTAUR_LLM_")}
    p = subprocess.run([BIN, "--quiet", *map(str, args)], capture_output=True, text=True, env=env)
    assert p.returncode == expect, p.stderr
    return p


def load(path):
    return json.loads(path.read_text())


def test_outputs_match_schemas(tmp_path, schema):
    ram = CORPUS / "dpram.v"
    infected, manifest = tmp_path / "t.v", tmp_path / "m.json"
    run("insert", "--design", ram, "--trigger", "time:50:200", "--effect", "dos", "-o", infected, "-m", manifest)
    jsonschema.validate(load(manifest), schema("manifest"))

    report = tmp_path / "r.json"
    run("assess", "--design", infected, "--metrics", 200, "-o", report, expect=1)
    jsonschema.validate(load(report), schema("assessment_report"))

    summary, trace = tmp_path / "s.json", tmp_path / "tr.json"
    run("sim", "--design", CORPUS / "sequence_detector.v", "--stimulus", CORPUS / "stimuli/listing_fire.json",
        "--watch", "Tj_Trig", "--trace", trace, "-o", summary)
    jsonschema.validate(load(summary), schema("sim_summary"))
    jsonschema.validate(load(trace), schema("trace"))
    assert load(summary)["watch"]["Tj_Trig"] == [6]

    div = tmp_path / "d.json"
    run("diff", "--golden", ram, "--suspect", infected, "--stimulus", CORPUS / "stimuli/ram_random.json",
        "--cycles", 400, "-o", div, expect=1)
    jsonschema.validate(load(div), schema("divergence"))

    fixed, fixes = tmp_path / "f.v", tmp_path / "f.json"
    run("sanitize", "--design", CORPUS / "sequence_detector_nodefault.v", "-o", fixed, "--fixes", fixes)
    jsonschema.validate(load(fixes), schema("sanitize_fixes"))

    edited, edit_log = tmp_path / "e.v", tmp_path / "e.json"
    run("edit", "--design", CORPUS / "ram_top.v", "--edits", CORPUS / "stimuli/no_edits.json", "-o", edited,
        "--log", edit_log)
    jsonschema.validate(load(edit_log), schema("edit_script"))

    gen, verdict, log = tmp_path / "g.v", tmp_path / "v.json", tmp_path / "p.json"
    run("llm-gen", "--mock", "--trigger", LISTING_SEQ, "--effect", "dos", "-o", gen, "--validation", verdict,
        "--log", log)
    jsonschema.validate(load(verdict), schema("validation"))
    jsonschema.validate(load(log), schema("prompt_log"))

    merged = tmp_path / "all.json"
    run("report", report, div, manifest, fixes, verdict, summary, "-o", merged)
    jsonschema.validate(load(merged), schema("report_summary"))
    assert load(merged)["summary"]["divergent"] == 1


def test_stimulus_corpus_matches_schema(schema):
    for path in sorted((CORPUS / "stimuli").glob("*.json")):
        doc = load(path)
        jsonschema.validate(doc, schema("edit_script" if "edits" in doc else "stimulus"))


def test_missing_key_is_an_input_error(tmp_path):
    run("assess", "--design", CORPUS / "dpram.v", "--llm", expect=3)


def test_bad_trigger_is_a_usage_error():
    run("insert", "--design", CORPUS / "dpram.v", "--trigger", "bogus", "--effect", "dos", expect=2)
