from fractions import Fraction as F

import pytest

from cantor_cvt import validate_params


@pytest.fixture
def cantor():
    """Classical middle-thirds measure, exact."""
    return validate_params(F(1, 3), F(1, 3), F(1, 2))


@pytest.fixture
def cantor_float():
    return validate_params(1 / 3, 1 / 3, 0.5)


@pytest.fixture
def r0p4375():
    return validate_params(0.4375, 0.4375, 0.5)


@pytest.fixture
def r4_9():
    return validate_params(4 / 9, 4 / 9, 0.5)


@pytest.fixture
def asym():
    """r1 = 1/4, r2 = 1/2, p = (1/4, 3/4), exact."""
    return validate_params(F(1, 4), F(1, 2), F(1, 4))


@pytest.fixture
def asym_float():
    return validate_params(0.25, 0.5, 0.25)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, ok, seconds, detail=""):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number} ({seconds:.2f}s) {detail}".rstrip()
        _ACCEPTANCE.append((number, line))
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
