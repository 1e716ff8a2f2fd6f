from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ffmoments import batch
from ffmoments.asymptotics import no_growth
from ffmoments.characters import (
    _ensemble,
    char_sum_over_H,
    chi,
    coeff_A,
    coprime_main_term,
    coprime_squarefree_count,
    zeta_A,
)
from ffmoments.poly import FqPoly, field, gcd, poly_sqrt

import oracles
from oracles import all_monic, squarefree_list

Q = 3
t = FqPoly.t(Q)


def P(*c, q=Q):
    return FqPoly(c, q)


def test_examples_chi():
    assert chi(t, t) == 0
    assert chi(t, t + 1) == -1
    assert chi(t + 1, t) == 1
    assert chi(t**3 + 2 * t, P(1)) == 1


def test_chi_rejects_bad_inputs():
    with pytest.raises(ValueError):
        chi(t**2, t + 1)
    with pytest.raises(ValueError):
        chi(2 * t + 1, t)
    with pytest.raises(ValueError):
        chi(t, 2 * t)


def test_examples_coeff_A():
    assert coeff_A(t**2 + 1, 0) == 1
    assert coeff_A(t**2 + 1, 1) == -1
    assert coeff_A(t**3 + 2 * t, 1) == 0


def test_examples_char_sums():
    assert char_sum_over_H(P(1), 3) == 18
    assert char_sum_over_H(t, 2) == -2
    assert char_sum_over_H(t**2, 2) == 4


def test_examples_coprime_counts():
    assert coprime_squarefree_count(3, P(1)) == 18
    assert coprime_main_term(3, P(1)) == 18
    assert coprime_squarefree_count(2, t) == 4
    assert coprime_main_term(2, t) == Fraction(9, 2)
    rootless = [D for D in squarefree_list(Q, 2) if all(D(x) for x in range(Q))]
    assert coprime_squarefree_count(2, t * (t + 1) * (t + 2)) == len(rootless)


def test_zeta():
    assert zeta_A(3) == Fraction(3, 2)
    assert zeta_A(5, 3) == Fraction(25, 24)


@pytest.mark.parametrize("q", [3, 5])
def test_chi_matches_listed_squares(q):
    Ds = squarefree_list(q, 3)
    fs = [f for n in range(3) for f in all_monic(q, n)]
    for D in Ds:
        for f in fs:
            assert chi(D, f) == oracles.chi(D, f)


def test_multiplicativity_exhaustive():
    fs = [f for n in range(3) for f in all_monic(Q, n)]
    for D in squarefree_list(Q, 3):
        for f, g in itertools.product(fs, repeat=2):
            assert chi(D, f * g) == chi(D, f) * chi(D, g)


def test_periodicity_in_D():
    Ds = squarefree_list(Q, 4) + squarefree_list(Q, 5)
    for P_ in field(Q).irreducibles(1) + field(Q).irreducibles(2):
        classes: dict = {}
        for D in Ds:
            classes.setdefault(D % P_, set()).add(chi(D, P_))
        assert all(len(v) == 1 for v in classes.values())


def test_chi_on_squares():
    hs = [h for n in range(3) for h in all_monic(Q, n)]
    for D in squarefree_list(Q, 3):
        for h in hs:
            v = chi(D, h * h)
            assert v in (0, 1)
            assert (v == 1) == gcd(D, h).is_one()


@pytest.mark.parametrize("q, n", [(3, 3), (3, 4), (5, 3)])
def test_coeff_A_matches_oracle(q, n):
    for D in squarefree_list(q, n)[::3]:
        for k in range(n):
            assert coeff_A(D, k) == oracles.coeff_A(D, k)


@pytest.mark.parametrize("q, n, nmax", [(3, 5, 4), (3, 6, 5), (5, 4, 3)])
def test_batch_coefficients_match_scalar(q, n, nmax):
    block = _ensemble(q, n)
    A = batch.coefficient_block(block, q, nmax)
    rows = np.random.default_rng(1).choice(block.shape[0], size=min(40, block.shape[0]), replace=False)
    for i in rows:
        D = FqPoly(block[i].tolist(), q)
        assert A[i].tolist() == [coeff_A(D, k) for k in range(nmax + 1)]


def test_char_sum_matches_brute_force():
    for n in (2, 3):
        Ds = squarefree_list(Q, n)
        for f in [f for k in range(3) for f in all_monic(Q, k)]:
            assert char_sum_over_H(f, n) == sum(oracles.chi(D, f) for D in Ds)


def test_nonsquare_char_sums_do_not_grow():
    """max |sum_D chi_D(f)| / (q^((2g+1)/2) q^(deg f / 4)) over non-square f, deg f <= g."""
    ratios = []
    for g in range(1, 5):
        n = 2 * g + 1
        worst = 0.0
        for k in range(g + 1):
            for f in all_monic(Q, k):
                if poly_sqrt(f) is None:
                    worst = max(worst, abs(char_sum_over_H(f, n)) / (Q ** (n / 2) * Q ** (k / 4)))
        ratios.append(worst)
    assert no_growth(ratios[1:]), ratios
    assert max(ratios) < 1


def test_coprime_count_error_has_fitted_constant():
    """|count - main| <= C q^(n/2) (deg f + 1): C fitted on n <= 5 covers n = 6..8."""
    ratio_by_n = {}
    for n in range(2, 9):
        worst = 0.0
        for k in range(0, min(n, 4) + 1):
            for f in list(all_monic(Q, k))[:: max(1, Q**k // 9)]:
                dev = abs(coprime_squarefree_count(n, f) - coprime_main_term(n, f))
                worst = max(worst, float(dev) / (Q ** (n / 2) * (k + 1)))
        ratio_by_n[n] = worst
    C = max(ratio_by_n[n] for n in range(2, 6))
    assert all(ratio_by_n[n] <= C for n in range(6, 9)), ratio_by_n
