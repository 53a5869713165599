from __future__ import annotations

from pathlib import Path

import pytest

from ifaceaudit.model import build_model
from ifaceaudit.parser import parse_source, read_source_dir

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_model(name: str):
    parsed = parse_source(read_source_dir(FIXTURES / name))
    return build_model(parsed.interfaces, parsed.classes, parsed.calls, parsed.system_loc)


@pytest.fixture(scope="session")
def downloadmanager():
    return fixture_model("downloadmanager")


@pytest.fixture(scope="session")
def fig2():
    return fixture_model("fig2")


@pytest.fixture(scope="session")
def setmap():
    return fixture_model("setmap")


@pytest.fixture(scope="session")
def filters_model():
    return fixture_model("filters")
