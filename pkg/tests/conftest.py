import numpy as np
import pytest

from psdperm.linalg import random_psd

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        print(f"[criterion {criterion}] {'PASS' if passed else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(_ACCEPTANCE, key=lambda r: (int(str(r[0]).rstrip('abc')), str(r[0]))):
        terminalreporter.write_line(f"criterion {criterion:<5} {'PASS' if passed else 'FAIL'}  {detail}")


def psd_corpus(sizes, per_size, seed):
    """Seeded random PSD matrices with ranks cycling through 1..n."""
    gen = np.random.default_rng(seed)
    out = []
    for n in sizes:
        for i in range(per_size):
            rank = 1 + i % n
            out.append(random_psd(n, rank, gen, complex_=bool(i % 3)))
    return out
