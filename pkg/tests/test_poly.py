from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ffmoments.poly import (
    FqPoly,
    enumerate_monic,
    enumerate_squarefree,
    factor,
    field,
    gcd,
    irreducibles_up_to,
    is_squarefree,
    merge_factorizations,
    moebius,
    necklace_count,
    poly_sqrt,
)

from oracles import all_monic, brute_factor, is_irreducible

Q = 3


def P(*coeffs, q=Q):
    """Polynomial from coefficients, constant term first."""
    return FqPoly(coeffs, q)


t = FqPoly.t(Q)


def polys(q=Q, max_deg=5):
    return st.lists(st.integers(0, q - 1), max_size=max_deg + 1).map(lambda c: FqPoly(c, q))


# construction and ring operations

def test_field_rejects_non_odd_primes():
    for bad in (1, 2, 4, 9, 15):
        with pytest.raises(ValueError):
            field(bad)
    assert field(5).q == 5


def test_examples_ring_ops():
    assert (t + 1) * (t + 2) == t**2 + 2
    assert gcd(t**2 + 2, t + 2) == t + 2
    assert (t**3 + 2 * t).derivative() == P(2)


def test_zero_polynomial_degree_is_sentinel():
    z = P()
    assert z.is_zero() and z.deg is None
    assert P(0, 0, 0) == z
    assert P(1).deg == 0


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        divmod(t, P())


def test_mixed_moduli_rejected():
    with pytest.raises(ValueError):
        t + FqPoly.t(5)


def test_str_and_index_roundtrip():
    f = t**2 + 2 * t + 2
    assert str(f) == "t^2 + 2t + 2"
    for n in range(4):
        for i, g in enumerate(enumerate_monic(Q, n)):
            assert g.index == i and FqPoly.from_index(Q, n, i) == g


@settings(max_examples=200, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == P()
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


@settings(max_examples=200, deadline=None)
@given(polys(), polys().filter(lambda f: not f.is_zero()))
def test_divmod_contract(a, b):
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.is_zero() or rem.deg < b.deg


@settings(max_examples=100, deadline=None)
@given(polys(), polys(), st.integers(0, Q - 1))
def test_evaluation_is_a_ring_map(a, b, x):
    assert (a * b)(x) == a(x) * b(x) % Q
    assert (a + b)(x) == (a(x) + b(x)) % Q


@settings(max_examples=100, deadline=None)
@given(polys(), polys())
def test_gcd_divides_both_and_is_monic(a, b):
    if a.is_zero() and b.is_zero():
        return
    d = gcd(a, b)
    assert d.is_monic()
    assert (a % d).is_zero() and (b % d).is_zero()


# square-freeness, factorization, Moebius

def test_examples_squarefree():
    assert not is_squarefree(t**2)
    assert is_squarefree(t**2 + 1)
    assert is_squarefree(t**3 + 2 * t)
    with pytest.raises(ValueError):
        is_squarefree(P())


def test_pth_power_is_not_squarefree():
    assert not is_squarefree(t**3 + 1)  # (t + 1)^3 in characteristic 3


def test_examples_factor():
    assert factor(t**2 + 2) == ((t + 1, 1), (t + 2, 1))
    assert factor(t**2) == ((t, 2),)
    assert factor(t**2 + 1) == ((t**2 + 1, 1),)
    assert factor(P(1)) == ()


def test_examples_moebius():
    assert moebius(t**2) == 0
    assert moebius(t**2 + 2) == 1
    assert moebius(t + 1) == -1


def _product(fac):
    out = P(1)
    for p, e in fac:
        out = out * p**e
    return out


def test_factor_matches_trial_division_oracle():
    for n in range(1, 7):
        for f in all_monic(Q, n):
            fac = factor(f)
            assert dict(fac) == brute_factor(f)
            assert _product(fac) == f


def test_factor_merges_over_products():
    monics = [f for n in range(4) for f in all_monic(Q, n)]
    for f, g in itertools.product(monics, repeat=2):
        assert factor(f * g) == merge_factorizations(factor(f), factor(g))


def test_squarefree_iff_multiplicities_one():
    for n in range(6):
        for f in all_monic(Q, n):
            assert is_squarefree(f) == all(e == 1 for _, e in factor(f))


def test_factor_at_q5():
    for f in all_monic(5, 4):
        assert dict(factor(f)) == brute_factor(f)


# square roots

def test_examples_poly_sqrt():
    assert poly_sqrt(t**2 + 2 * t + 1) == t + 1
    assert poly_sqrt(t**2 + 1) is None
    assert poly_sqrt(P(1)) == P(1)


@pytest.mark.parametrize("q", [3, 5])
def test_poly_sqrt_exhaustive(q):
    squares = {}
    for k in range(3):
        for h in all_monic(q, k):
            squares[h * h] = h
    for n in range(5):
        for f in all_monic(q, n):
            assert poly_sqrt(f) == squares.get(f)


# enumeration

def test_examples_enumeration_counts():
    assert list(enumerate_monic(Q, 0)) == [P(1)]
    assert sum(1 for _ in enumerate_monic(Q, 2)) == 9
    assert sum(1 for _ in enumerate_monic(Q, 3)) == 27
    assert sum(1 for _ in enumerate_squarefree(Q, 1)) == 3
    assert sum(1 for _ in enumerate_squarefree(Q, 2)) == 6
    assert sum(1 for _ in enumerate_squarefree(Q, 3)) == 18


@pytest.mark.parametrize("q", [3, 5])
def test_squarefree_counts(q):
    from ffmoments.characters import _ensemble

    top = 7 if q == 3 else 6
    for n in range(2, top + 1):
        assert _ensemble(q, n).shape[0] == q**n - q ** (n - 1)
    for n in range(2, 5):
        assert sum(1 for _ in enumerate_squarefree(q, n)) == q**n - q ** (n - 1)


def test_enumeration_is_lexicographic_and_chunkable():
    full = list(enumerate_monic(Q, 4))
    assert full == sorted(full)
    assert [f.index for f in full] == list(range(81))
    for chunks in (1, 2, 5, 8):
        parts = [list(enumerate_monic(Q, 4, k, chunks)) for k in range(chunks)]
        assert sum(parts, []) == full


# irreducibles

def test_examples_irreducibles():
    table = irreducibles_up_to(Q, 3)
    assert table[1] == [t, t + 1, t + 2]
    assert len(table[2]) == 3 and len(table[3]) == 8


@pytest.mark.parametrize("q, top", [(3, 8), (5, 5)])
def test_necklace_identity(q, top):
    table = irreducibles_up_to(q, top)
    for d in range(1, top + 1):
        assert len(table[d]) == necklace_count(q, d)


def test_irreducibles_match_definition():
    for d in range(1, 5):
        expected = [f for f in all_monic(Q, d) if is_irreducible(f)]
        assert sorted(field(Q).irreducibles(d)) == sorted(expected)
