from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from rationale_miner.corpus import clean_issue, parse_issue

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture()
def raw_issue() -> dict:
    return json.loads((FIXTURES / "flink-1320.json").read_text(encoding="utf-8"))


@pytest.fixture()
def golden_issue(raw_issue):
    return clean_issue(parse_issue(raw_issue))


@pytest.fixture()
def golden_corpus(tmp_path) -> Path:
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    shutil.copy(FIXTURES / "flink-1320.json", corpus / "FLINK-1320.json")
    return corpus
