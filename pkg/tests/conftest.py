import pytest

from homcert.algebra import truncated_polynomial_algebra
from homcert.linalg import PrimeField
from homcert.ringspec import algebra_from_spec, square_zero_spec


def trunc(p, e):
    return truncated_polynomial_algebra(PrimeField(p), e)


def sq0(p, m=2):
    return algebra_from_spec(square_zero_spec(p, m))


# the four rings named in the acceptance criteria
PRESETS = {
    "F2[x]/x^2": lambda: trunc(2, 2),
    "F3[x]/x^3": lambda: trunc(3, 3),
    "F2[x]/x^4": lambda: trunc(2, 4),
    "F2[x,y]/(x,y)^2": lambda: sq0(2, 2),
}


@pytest.fixture(params=sorted(PRESETS))
def preset(request):
    return PRESETS[request.param]()


@pytest.fixture
def r2():
    return trunc(2, 2)


# acceptance lines are collected here and printed after the run, so they show
# up in plain `pytest -v` output without -s
ACCEPTANCE: list[str] = []


def record(criterion: str, ok: bool, detail: str) -> bool:
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
