import pytest

from qcycles.topology import Topology

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE_LINES.append(f"{criterion:<34} {'PASS' if passed else 'FAIL'}  {detail}")


def record_note(criterion: str, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{criterion:<34} INFO  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def triangle():
    return Topology.from_edges(3, [(0, 1), (1, 2), (0, 2)], "triangle")


@pytest.fixture
def ring4():
    return Topology.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)], "ring4")
