import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rkrelate.vecfield import parse_field  # noqa: E402


@pytest.fixture
def decay():
    """X(u) = -3u"""
    return parse_field(["-3*x1"], 1, name="decay")


@pytest.fixture
def zero2():
    return parse_field(["0", "0"], 2, name="zero")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.VERDICTS):
        terminalreporter.write_line(mod.VERDICTS[n])
