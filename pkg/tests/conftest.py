import numpy as np
import pytest

from lpuncertainty import canonical_basis, dft_basis

_criteria = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the line is printed in the terminal summary."""

    def record(label, ok, detail=""):
        _criteria.append((label, bool(ok), detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {label} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criteria:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label} {detail}")


@pytest.fixture
def dft4():
    return canonical_basis(4, 2), dft_basis(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
