# SPDX-License-Identifier: Apache-2.0
import json
import os
import pathlib

import pytest

ROOT = pathlib.Path(__file__).resolve().parents[2]
CORPUS = pathlib.Path(os.environ.get("HTKIT_CORPUS_DIR", ROOT / "corpus"))
SCHEMAS = ROOT / "schemas"

LISTING_SEQ = "seq:state:0x3243f6a8885a308d313198a2e0370734,0x00112233445566778899aabbccddeeff,0x0,0x1"


def read(rel: str) -> str:
    return (CORPUS / rel).read_text()


@pytest.fixture
def corpus():
    return read


@pytest.fixture
def schema():
    def load(name: str) -> dict:
        return json.loads((SCHEMAS / f"{name}.schema.json").read_text())

    return load
