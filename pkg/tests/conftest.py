import json
from pathlib import Path

import pytest

from oracles import FROZEN

CRITERIA = []


@pytest.fixture(scope="session")
def oracle():
    return json.loads(Path(FROZEN).read_text())


@pytest.fixture
def record():
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def add(number, passed, detail):
        line = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        CRITERIA.append(line)
        return passed

    return add


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
