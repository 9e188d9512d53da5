# SPDX-License-Identifier: Apache-2.0
"""Hardware Trojan insertion, simulation and assessment.

Thin wrapper over the native ``_htkit`` module: JSON results are decoded into
Python objects, everything else passes through unchanged.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Optional

from . import _htkit
from ._htkit import Error, extract_verilog, format

__all__ = [
    "Error",
    "activations",
    "apply_edits",
    "assess",
    "compare",
    "extract_verilog",
    "format",
    "generate_mock",
    "generation_prompt",
    "insert",
    "lint",
    "sanitize",
    "simulate",
    "validate_generated",
]


def _stim(stimulus: Any) -> str:
    return stimulus if isinstance(stimulus, str) else json.dumps(stimulus)


def lint(source: str) -> list[dict]:
    return json.loads(_htkit.lint(source))


def insert(source: str, trigger: str, effect: str, target: str, top: str = "", prefix: str = "Tj_") -> tuple[str, dict]:
    """Returns the infected Verilog and its manifest."""
    text, manifest = _htkit.insert(source, top, trigger, effect, target, prefix)
    return text, json.loads(manifest)


def assess(source: str, top: str = "", metrics_cycles: int = 0, seed: int = 1) -> dict:
    return json.loads(_htkit.assess(source, top, metrics_cycles, seed))


def simulate(source: str, stimulus: Any, top: str = "", cycles: int = 0, record: Iterable[str] = ()) -> dict:
    return json.loads(_htkit.simulate(source, top, _stim(stimulus), cycles, list(record)))


def activations(source: str, stimulus: Any, net: str, top: str = "", cycles: int = 0) -> list[int]:
    return _htkit.activations(source, top, _stim(stimulus), cycles, net)


def compare(golden: str, suspect: str, stimulus: Any, top: str = "", cycles: int = 0) -> dict:
    return json.loads(_htkit.compare(golden, suspect, top, _stim(stimulus), cycles))


def sanitize(source: str) -> tuple[str, list[dict], list[dict]]:
    """Returns the repaired text, the fixes applied and the nets left unresolved."""
    text, fixes, unresolved = _htkit.sanitize(source)
    return text, json.loads(fixes), json.loads(unresolved)


def apply_edits(source: str, edits: Any) -> tuple[str, list[dict]]:
    text, log = _htkit.apply_edits(source, edits if isinstance(edits, str) else json.dumps(edits))
    return text, json.loads(log)


def generation_prompt(trigger: str, effect: str, target: str = "out", spec_text: str = "", alert: str = "Tj_Trig") -> dict:
    return json.loads(_htkit.generation_prompt(trigger, effect, target, spec_text, alert))


def generate_mock(trigger: str, effect: str, target: str = "out") -> str:
    """Runs the generation prompt through the offline mock backend."""
    return _htkit.generate_mock(trigger, effect, target)


def validate_generated(source: str, trigger: Optional[str] = None, alert: str = "Tj_Trig") -> dict:
    return json.loads(_htkit.validate_generated(source, trigger, alert))
