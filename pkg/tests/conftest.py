import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, d, real=False):
    a = rng.standard_normal((d, d))
    if not real:
        a = a + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


ACCEPTANCE_RESULTS = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion; returns a callable(number, ok, detail)."""

    def record(number, ok, detail):
        ACCEPTANCE_RESULTS[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'} | {detail}")
