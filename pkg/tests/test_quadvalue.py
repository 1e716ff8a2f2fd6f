from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ffmoments.quadvalue import QuadValue

fractions = st.fractions(max_denominator=10**6).filter(lambda x: abs(x) < 10**9)


def quads(q):
    return st.builds(lambda a, b: QuadValue(q, a, b), fractions, fractions)


def _extended(x: QuadValue) -> mpmath.mpf:
    with mpmath.workdps(60):
        return (mpmath.mpf(x.a.numerator) / x.a.denominator
                + mpmath.mpf(x.b.numerator) / x.b.denominator / mpmath.sqrt(x.q))


def test_half_powers():
    assert QuadValue.half_power(3, 0) == 1
    assert QuadValue.half_power(3, 1) == QuadValue(3, 0, 1)
    assert QuadValue.half_power(3, 2) == Fraction(1, 3)
    assert QuadValue.half_power(3, 1) ** 2 == QuadValue.half_power(3, 2)
    assert QuadValue.half_power(5, -1) * QuadValue.half_power(5, 1) == 1


def test_from_half_powers_matches_termwise_sum():
    terms = {0: 4, 1: -3, 2: 7, 5: 11, 6: -2}
    expected = sum((c * QuadValue.half_power(3, n) for n, c in terms.items()), QuadValue(3))
    assert QuadValue.from_half_powers(3, terms) == expected
    assert QuadValue.from_half_powers(3, {}) == 0


def test_mixed_fields_rejected():
    with pytest.raises(ValueError):
        QuadValue(3, 1) + QuadValue(5, 1)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        QuadValue(3, 1) / QuadValue(3)


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([3, 5, 7]).flatmap(lambda q: st.tuples(quads(q), quads(q), quads(q))))
def test_ring_laws(xyz):
    x, y, z = xyz
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x + y == y + x
    if not y.is_zero():
        assert (x / y) * y == x


@settings(max_examples=300, deadline=None)
@given(st.sampled_from([3, 5, 7, 11]).flatmap(quads))
def test_float_agrees_with_extended_precision(x):
    ref = _extended(x)
    assert abs(float(x) - float(ref)) <= 1e-14 * max(1.0, abs(float(ref)))


def test_float_survives_cancellation():
    # a and b*q^(-1/2) nearly cancel; naive float arithmetic would lose every digit
    b = Fraction(-173205080756887729, 10**17)  # about -sqrt(3)
    x = QuadValue(3, 1, b)
    assert float(x) == pytest.approx(float(_extended(x)), rel=1e-14)
