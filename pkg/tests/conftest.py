import json
from functools import lru_cache
from pathlib import Path

import pytest

from semiplanar.tilings import generate, loads

DATA = Path(__file__).parent / "data"
ACCEPTANCE_LINES: list[str] = []


@lru_cache(maxsize=None)
def tiling(kind: str, radius: int):
    return generate(kind, radius)


@pytest.fixture(scope="session")
def z2():
    """4^4 truncation with layout coordinates centered at the center vertex."""
    t = tiling("4^4", 14)
    xy = t.coords - t.coords[t.center]
    return t.graph, t.center, xy.round(9)


@pytest.fixture(scope="session")
def cap():
    text = (DATA / "dodecahedral_cap.json").read_text()
    return loads(text), json.loads(text)["center"]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
