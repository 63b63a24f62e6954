import json
from pathlib import Path

import pytest

from mobnil.sieve import sieve_mobius

FIXTURES = Path(__file__).with_name("fixtures")


@pytest.fixture(scope="session")
def regression():
    return json.loads((FIXTURES / "regression.json").read_text())


@pytest.fixture(scope="session")
def mob_small():
    return sieve_mobius(2 * 10 ** 5)


@pytest.fixture(scope="session")
def mob_large():
    return sieve_mobius(2 * 10 ** 6)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
