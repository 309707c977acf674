import numpy as np
import pytest

from groth_lhv.core import RandomSource


@pytest.fixture
def rng():
    return RandomSource(12345)


@pytest.fixture
def gen():
    return np.random.default_rng(2024)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(RESULTS):
        title, ok, detail, elapsed = RESULTS[num]
        terminalreporter.write_line(
            f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} ({detail}; {elapsed:.2f}s)")
