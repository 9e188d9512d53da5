# SPDX-License-Identifier: Apache-2.0
import jsonschema
import pytest

import htkit
from conftest import LISTING_SEQ


def test_listing_fires_once_at_cycle_six(corpus):
    src = corpus("sequence_detector.v")
    stim = corpus("stimuli/listing_fire.json")
    assert htkit.activations(src, stim, "Tj_Trig") == [6]
    trace = htkit.simulate(src, stim, record=["Tj_Trig"])
    assert trace["cycles"] == 12
    assert trace["nets"][0]["values"][6] == "1"


def test_format_is_a_fixed_point(corpus):
    once = htkit.format(corpus("dpram.v"))
    assert htkit.format(once) == once


@pytest.mark.parametrize(
    "trigger,effect,flags",
    [
        ("time:50:200", "dos", dict(io=False, fsm=False, logic=True, signal=True)),
        ("seq:din_a:0x55,0xAA,0xFF", "perf:8:3", dict(io=False, fsm=True, logic=True, signal=True)),
        ("count:we_a:1000", "leak:din_a", dict(io=True, fsm=False, logic=True, signal=True)),
    ],
)
def test_insert_then_assess(corpus, schema, trigger, effect, flags):
    text, manifest = htkit.insert(corpus("dpram.v"), trigger, effect, "dout_b")
    jsonschema.validate(manifest, schema("manifest"))
    assert htkit.lint(text) == []
    report = htkit.assess(text)
    jsonschema.validate(report, schema("assessment_report"))
    assert report["flags"] == flags


def test_clean_host_has_no_flags(corpus):
    assert not any(htkit.assess(corpus("dpram.v"))["flags"].values())


def test_time_trojan_diverges_inside_window(corpus, schema):
    golden = corpus("dpram.v")
    text, _ = htkit.insert(golden, "time:50:200", "dos", "dout_b")
    d = htkit.compare(golden, text, corpus("stimuli/ram_random.json"), cycles=400)
    jsonschema.validate(d, schema("divergence"))
    assert d["first_divergence_cycle"] is not None
    assert 51 <= d["first_divergence_cycle"] <= 201


def test_sanitize_restores_default_arm(corpus):
    text, fixes, unresolved = htkit.sanitize(corpus("sequence_detector_nodefault.v"))
    assert unresolved == []
    assert [(f["net"], f["kind"], f["hold"]) for f in fixes] == [("next_state", "default_arm", "IDLE")]
    assert htkit.sanitize(text)[1] == []


def test_apply_edits_logs_every_op(corpus, schema):
    edits = {"edits": [{"op": "add_net", "module": "dpram", "name": "spare", "kind": "wire", "width": 4}]}
    text, log = htkit.apply_edits(corpus("dpram.v"), edits)
    jsonschema.validate(log, schema("edit_script"))
    assert "spare" in text


def test_mock_generation_is_accepted(schema):
    prompt = htkit.generation_prompt(LISTING_SEQ, "dos")
    assert prompt["user"].rstrip().endswith("Write a hardware module in Verilog that is synthesizable.")
    code = htkit.extract_verilog(htkit.generate_mock(LISTING_SEQ, "dos"))
    verdict = htkit.validate_generated(code, LISTING_SEQ)
    jsonschema.validate(verdict, schema("validation"))
    assert verdict["verdict"] == "accepted", verdict


def test_errors_carry_a_code():
    with pytest.raises(htkit.Error) as info:
        htkit.assess("module broken(;\n")
    assert info.value.args[0] == "SyntaxError"
    with pytest.raises(htkit.Error) as info:
        htkit.insert("module m(input wire clk, output wire o);\nassign o = 1'b0;\nendmodule\n", "logic:o:1", "dos", "o")
    assert info.value.args[0] == "InvalidSpec"
