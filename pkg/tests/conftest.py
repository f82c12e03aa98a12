import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

from chorcheck.semantics import Configuration
from chorcheck.syntax import parse_document

# per-call time limits are asserted by the acceptance suite instead
settings.register_profile("chorcheck", deadline=None)
settings.load_profile("chorcheck")

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name: str):
    path = CORPUS / name
    return parse_document(path.read_text(encoding="utf-8"), str(path))


def configuration(doc_name: str, chor: str) -> Configuration:
    doc = load(doc_name)
    return Configuration(doc.state, doc.choreographies[chor])


@pytest.fixture
def corpus():
    return CORPUS


@pytest.fixture
def ob():
    return configuration("ob.gc", "OB")


@pytest.fixture
def rng():
    return random.Random(1234)


def pytest_terminal_summary(terminalreporter):
    module = next((m for k, m in sys.modules.items() if k.endswith("test_acceptance")), None)
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines.values():
            terminalreporter.write_line(line)
