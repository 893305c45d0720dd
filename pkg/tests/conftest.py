import numpy as np
import pytest

from zccflows.liealg import SL3, elementary


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def E(i, j, n=3):
    return elementary(n, i, j)


def naive_matmul(A, B):
    """Triple-loop product, kept independent of numpy's matmul."""
    n = len(A)
    return np.array([[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)])


def random_sl3(rng, size=()):
    return SL3.random(rng, size)


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Recorder for acceptance criteria: one PASS/FAIL line each."""
    seen = []

    def record(number, title, value, tol, ok=None, elapsed=None):
        ok = (value <= tol) if ok is None else ok
        extra = "" if elapsed is None else f", {elapsed:.2f} s"
        line = f"{'PASS' if ok else 'FAIL'}  [{number:2d}] {title}: {value:.3g} (tol {tol:.3g}{extra})"
        seen.append(ok)
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    yield record
    if not seen:
        ACCEPTANCE_LINES.append(f"FAIL  [--] {request.node.name}: did not complete")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
