from __future__ import annotations

from fractions import Fraction

import pytest

from ffmoments.characters import char_sum_over_H, zeta_A
from ffmoments.ensemble import (
    BudgetExceeded,
    EnsembleSpec,
    compare,
    empirical_moment,
    empirical_moment_direct,
    empirical_S,
    empirical_S_split,
    empirical_T,
    ensemble_totals,
    exact_M_sum,
    exact_N_sum,
    recombine,
)
from ffmoments.lfunction import build_l, deriv_half_direct
from ffmoments.poly import enumerate_monic, enumerate_squarefree
from ffmoments.quadvalue import QuadValue

Q = 3


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(4, "odd", 2)
    with pytest.raises(ValueError):
        EnsembleSpec(3, "sideways", 2)
    with pytest.raises(ValueError):
        EnsembleSpec(3, "odd", 0)
    spec = EnsembleSpec(3, "even", 0)
    assert (spec.degree, spec.size, spec.norm) == (2, 6, 9)


def test_example_even_g0():
    assert empirical_moment(EnsembleSpec(Q, "even", 0, 1)) == QuadValue(Q, 0, -6)


@pytest.mark.parametrize("mu", [0, 1, 2, 3])
def test_odd_g1_matches_per_d_direct(mu):
    expected = sum((deriv_half_direct(build_l(D), mu) for D in enumerate_squarefree(Q, 3)), QuadValue(Q))
    assert empirical_moment(EnsembleSpec(Q, "odd", 1, mu)) == expected


@pytest.mark.parametrize("parity, g", [("odd", 2), ("odd", 3), ("even", 1), ("even", 2)])
def test_totals_path_equals_per_d_and_direct(parity, g):
    for mu in (1, 2):
        spec = EnsembleSpec(Q, parity, g, mu)
        value = empirical_moment(spec)
        assert value == empirical_moment(spec, per_d=True)
        assert value == empirical_moment_direct(spec)


def test_examples_S():
    assert empirical_S("odd", 0, 0, 1, Q) == 18
    assert empirical_S("odd", 0, 1, 1, Q) == 0
    with pytest.raises(ValueError):
        empirical_S("odd", 3, 0, 1, Q)


def test_S_with_f_outer_order():
    for parity in ("odd", "even"):
        for g in (1, 2):
            for h in (g - 1, g):
                for m in range(3):
                    split = empirical_S_split(parity, h, m, g, Q)
                    assert split.square + split.nonsquare == split.f_outer == empirical_S(parity, h, m, g, Q)


def test_examples_T():
    assert empirical_T(0, 1, Q) == QuadValue(Q, 0, 54)
    layer = sum(char_sum_over_H(f, 4) for f in enumerate_monic(Q, 1))
    assert empirical_T(1, 1, Q) == (54 + layer) * QuadValue.half_power(Q, 2)
    with pytest.raises(ValueError):
        empirical_T(-1, 0, Q)


def test_degenerate_M_and_N():
    for g in (1, 2):
        for h in (0, 1):
            D = Q ** (2 * g + 1)
            assert exact_M_sum(h, 0, Q, g) == D / zeta_A(Q)
            assert exact_M_sum(h, 2, Q, g) == 0
            De = Q ** (2 * g + 2)
            assert exact_N_sum(h, Q, g) == (De / zeta_A(Q)) * QuadValue.half_power(Q, h + 1)
    assert isinstance(exact_M_sum(4, 1, Q, 4), Fraction)
    with pytest.raises(ValueError):
        exact_M_sum(-1, 0, Q, 1)


def test_N_sum_within_fitted_budget():
    from ffmoments.asymptotics import lemma_main, no_growth

    ratios = []
    for g in range(1, 8):
        h = g
        pred = lemma_main("N", h, 0, Q, g, 1, parity="even")
        ratios.append(abs(float(exact_N_sum(h, Q, g)) - pred.value) / pred.error_budget)
    assert no_growth(ratios)
    pred = lemma_main("N", 5, 0, Q, 5, 1, parity="even")
    assert abs(float(exact_N_sum(5, Q, 5)) - pred.value) <= max(ratios[:3]) * pred.error_budget


@pytest.mark.parametrize("parity, gs", [("odd", (1, 2, 3)), ("even", (0, 1, 2))])
def test_recombination_identities(parity, gs):
    for g in gs:
        for mu in range(4 if parity == "odd" else 3):
            spec = EnsembleSpec(Q, parity, g, mu)
            assert empirical_moment(spec) == recombine(spec)


def test_budget_guard():
    with pytest.raises(BudgetExceeded) as info:
        empirical_moment(EnsembleSpec(Q, "odd", 4), budget=1000)
    assert info.value.estimate > 1000
    with pytest.raises(BudgetExceeded):
        ensemble_totals(Q, 9, 4, budget=10)


def test_worker_count_does_not_change_totals():
    from ffmoments import ensemble

    old = ensemble.CHUNK_ROWS
    ensemble.CHUNK_ROWS = 500  # several chunks even at small degree
    try:
        ensemble._totals_cached.cache_clear()
        ref = ensemble_totals(Q, 7, 3, workers=1)
        for w in (2, 3):
            ensemble._totals_cached.cache_clear()
            assert ensemble_totals(Q, 7, 3, workers=w) == ref
    finally:
        ensemble.CHUNK_ROWS = old
        ensemble._totals_cached.cache_clear()


def test_compare_report_fields():
    rep = compare(EnsembleSpec(Q, "odd", 2, 1))
    assert rep.ensemble_size == 162
    assert rep.rel_dev == pytest.approx(rep.abs_dev / abs(rep.predicted))
    assert rep.rel_dev < 0.1
    assert rep.flag == ""
    low = compare(EnsembleSpec(Q, "odd", 1, 3))
    assert low.flag == "error-dominated"
    even = compare(EnsembleSpec(Q, "even", 2, 1))
    assert even.rel_dev < 0.1
