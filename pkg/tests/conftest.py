import json
from pathlib import Path

import pytest

from veristep.problem import OUTCOME, PROSFI, ProverQARecord, build_problem, load_proverqa

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def record(name: str) -> ProverQARecord:
    return ProverQARecord.from_dict(json.loads((FIXTURES / name).read_text(encoding="utf-8")))


@pytest.fixture
def hattie():
    return build_problem(record("hattie.json"), PROSFI)


@pytest.fixture
def hattie_response() -> str:
    return (FIXTURES / "hattie_response.txt").read_text(encoding="utf-8")


@pytest.fixture
def brecken():
    return build_problem(record("brecken.json"), PROSFI)


@pytest.fixture
def paola():
    return build_problem(record("paola.json"), OUTCOME)


@pytest.fixture
def corpus_records():
    return load_proverqa(FIXTURES / "proverqa_corpus.jsonl")
