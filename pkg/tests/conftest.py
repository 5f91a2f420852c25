from fractions import Fraction

import pytest
from hypothesis import settings

from capped_nn import dyadic as dy

settings.register_profile("default", max_examples=150, deadline=None)
settings.load_profile("default")


def frac(d: dy.Dyadic) -> Fraction:
    return Fraction(d.numerator, 1 << d.exponent)


def D(text: str) -> dy.Dyadic:
    """Shorthand: ``D("3/8")`` for a dyadic given as a plain fraction."""
    f = Fraction(text)
    e = f.denominator.bit_length() - 1
    assert f.denominator == 1 << e
    return dy.normalize(f.numerator, e)


@pytest.fixture
def small_cap():
    old = dy.set_precision_cap(64)
    yield 64
    dy.set_precision_cap(old)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def record(n: int, passed: bool, detail: str) -> bool:
    ACCEPTANCE[n] = (passed, detail)
    print(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
