import numpy as np
import pytest

from jensen_lab import Interval, random_hermitian_in


@pytest.fixture
def rng():
    return np.random.default_rng(20021)


def rand_herm(dim, rng, lo=-1.0, hi=1.0):
    return random_hermitian_in(dim, Interval.closed(lo, hi), rng)


def rand_complex(shape, rng):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# one verdict line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def record_acceptance(number, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
