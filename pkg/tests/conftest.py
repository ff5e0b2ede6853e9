import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[CRITERIA] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line; returns ``ok`` so tests can assert on it."""

    def record(num: int, ok: bool, detail: str) -> bool:
        request.config.stash[CRITERIA][num] = (bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    rows = config.stash.get(CRITERIA, {})
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(rows):
        ok, detail = rows[num]
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
