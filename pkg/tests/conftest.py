import sys
from pathlib import Path

import pytest

SCENARIOS = Path(__file__).resolve().parents[1] / "src" / "circumnav" / "scenarios"


@pytest.fixture
def scenario():
    def get(name):
        return SCENARIOS / f"{name}.cfg"
    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in mod.verdict_lines():
        terminalreporter.write_line(line)
