import numpy as np
import pytest

from foodcast import pipeline
from foodcast.config import RunConfig

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, ok, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}")


@pytest.fixture
def criterion():
    """Record one acceptance line; call with (number, name, ok, detail)."""

    def record(number, name, ok, detail=""):
        ACCEPTANCE.append((number, name, bool(ok), detail))
        return ok

    return record


@pytest.fixture(scope="session")
def sample_table():
    return pipeline.load_table(RunConfig())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
