from pathlib import Path

import pytest

from ggk.serialize import load

FIXTURES = Path(__file__).parent / "fixtures"
FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.json"))


def fixture_path(name: str) -> str:
    return str(FIXTURES / f"{name}.json")


@pytest.fixture(scope="session")
def gogs():
    return {name: load(fixture_path(name)) for name in FIXTURE_NAMES}


Z_DOC = {"kind": "orientable", "finite_part": {"table": [[0]]}, "alpha": [0]}
TRIVIAL_DOC = {"kind": "finite", "table": [[0]]}


def cyclic_doc(n: int) -> dict:
    return {"kind": "finite", "table": [[(i + j) % n for j in range(n)] for i in range(n)]}


def loop_doc(vgroup, egroup, mono_from, mono_to, v="v", e="l") -> dict:
    return {"vertices": [{"id": v, "group": vgroup}],
            "edges": [{"id": e, "from": v, "to": v, "group": egroup,
                       "mono_from": mono_from, "mono_to": mono_to}]}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
