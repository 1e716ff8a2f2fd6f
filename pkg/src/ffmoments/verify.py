"""Exact-identity and convergence suites behind ``ffmoments verify``.

Each suite returns a :class:`CheckResult`; ``passed`` is a plain bool and
``detail`` a short human-readable summary of what was compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import mpmath

from . import asymptotics as asy
from .asymptotics import no_growth
from .ensemble import (
    EnsembleSpec,
    empirical_moment,
    empirical_S,
    empirical_S_split,
    exact_M_sum,
    exact_N_sum,
    per_d_coefficients,
    recombine,
)
from .lfunction import (
    afe_even_from_coeffs,
    afe_odd_from_coeffs,
    build_l,
    direct_from_coeffs,
    fe_symmetry_check,
    rh_roots_check,
)
from .poly import enumerate_squarefree
from .quadvalue import QuadValue


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


# L-function identities

def afe_exactness(q: int, g_max: int, mu_max: int, even_g_max: int = 2) -> CheckResult:
    """AFE value equals the derivative of the full L-polynomial, for every D.

    Full coefficients come from the batch Euler-product path, independently
    of any functional equation.
    """
    checked = bad = 0
    for g in range(1, g_max + 1):
        _, A = per_d_coefficients(q, 2 * g + 1, 2 * g)
        for row in A.tolist():
            for mu in range(mu_max + 1):
                checked += 1
                if afe_odd_from_coeffs(row, g, q, mu) != direct_from_coeffs(row, q, mu, "odd"):
                    bad += 1
    for g in range(0, min(g_max, even_g_max) + 1):
        _, A = per_d_coefficients(q, 2 * g + 2, 2 * g + 1)
        jet = asy.delta_jet(mu_max, q)
        for row in A.tolist():
            for mu in range(mu_max + 1):
                checked += 1
                if afe_even_from_coeffs(row, g, q, mu, jet) != direct_from_coeffs(row, q, mu, "even"):
                    bad += 1
    return CheckResult(f"afe-exact q={q}", bad == 0, f"{checked} (D, mu) pairs, {bad} mismatches")


def fe_symmetry(q: int, g_max: int) -> CheckResult:
    checked = bad = 0
    for g in range(1, g_max + 1):
        for D in enumerate_squarefree(q, 2 * g + 1):
            checked += 1
            if not fe_symmetry_check(build_l(D)):
                bad += 1
    return CheckResult(f"fe-symmetry q={q}", bad == 0, f"{checked} discriminants, {bad} failures")


def rh_roots(q: int, odd_g_max: int, even_g_max: int = 1, tol: float = 1e-8) -> CheckResult:
    checked = bad = 0
    worst = 0.0
    degrees = [2 * g + 1 for g in range(1, odd_g_max + 1)] + [2 * g + 2 for g in range(1, even_g_max + 1)]
    for n in degrees:
        for D in enumerate_squarefree(q, n):
            rep = rh_roots_check(build_l(D), tol)
            checked += 1
            worst = max(worst, rep.max_deviation)
            bad += not rep.ok
    return CheckResult(f"rh-roots q={q}", bad == 0,
                       f"{checked} L-polynomials, max ||u|-q^-1/2| = {worst:.2e}, {bad} failures")


# closed-form ingredients

def divisor_product_identity(q: int, l_max: int = 10) -> CheckResult:
    bad = [l for l in range(l_max + 1) if not asy.lemma43_check(l, q)]
    return CheckResult(f"divisor-product identity q={q}", not bad, f"l <= {l_max}, failures {bad}")


def faulhaber_suite(m_max: int = 6, n_max: int = 100, split_m: int = 4, split_h: int = 12) -> CheckResult:
    bad = 0
    for m in range(m_max + 1):
        J = asy.faulhaber(m)
        bad += sum(J(n) != asy.power_sum(m, n) for n in range(n_max + 1))
    splits = 0
    for m in range(split_m + 1):
        for h in range(split_h + 1):
            for L in range(h // 2 + 1):
                splits += 1
                bad += not asy.faulhaber_split_check(m, h, L)
    return CheckResult("faulhaber", bad == 0,
                       f"power sums m <= {m_max}, n <= {n_max}; {splits} split cases; {bad} failures")


def _richardson_derivative(f, x, order: int, h, levels: int = 3):
    """order-th derivative of f at x by central differences with Richardson extrapolation."""
    def central(step):
        return sum((-1) ** j * comb(order, j) * f(x + (mpmath.mpf(order) / 2 - j) * step)
                   for j in range(order + 1)) / step**order

    table = [central(h / 2**k) for k in range(levels)]
    for level in range(1, levels):
        factor = 4**level
        table = [(factor * table[i + 1] - table[i]) / (factor - 1) for i in range(len(table) - 1)]
    return table[0]


def _mpf(x: QuadValue):
    frac = lambda r: mpmath.mpf(r.numerator) / r.denominator
    return frac(x.a) + frac(x.b) / mpmath.sqrt(x.q)


def delta_jet_suite(q: int, order: int = 4, tol: float = 1e-6, step: float = 1e-3) -> CheckResult:
    jet = asy.delta_jet(order, q)
    ok = jet[0] == 1
    worst = 0.0
    with mpmath.workdps(50):
        qq = mpmath.mpf(q)
        delta = lambda s: (1 - qq ** (-s)) / (1 - qq ** (s - 1))
        for m in range(1, order + 1):
            fd = _richardson_derivative(delta, mpmath.mpf(1) / 2, m, mpmath.mpf(step)) / (-mpmath.log(qq)) ** m
            err = float(abs(fd - _mpf(jet[m])))
            worst = max(worst, err)
    ok = ok and worst <= tol
    return CheckResult(f"delta-jet q={q}", ok, f"d_0 = {jet[0]}, orders 1..{order}, max error {worst:.2e}")


def h_closed_form_suite(q: int = 3, n_max: int = 5, points=(0.8, 1.0, 1.5), tol: float = 1e-10) -> CheckResult:
    worst = 0.0
    for n in range(1, n_max + 1):
        for s in points:
            a = asy.h_n_eval(n, s, q=q, closed_form=True)
            b = asy.h_n_eval(n, s, q=q, closed_form=False)
            worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    return CheckResult(f"H_n closed forms q={q}", worst <= tol,
                       f"n <= {n_max} at s in {list(points)}, max relative error {worst:.2e}")


def phi_suite(q: int = 3, n_max: int = 2, cutoff: int = asy.DEFAULT_CUTOFF, tol: float = 1e-6,
              step: float = 1e-3) -> CheckResult:
    worst = 0.0
    with mpmath.workdps(40):
        qq = mpmath.mpf(q)
        counts = [asy.necklace_count(q, d) for d in range(1, cutoff + 1)]

        def G(s):
            return mpmath.fprod(
                (1 - 1 / (qq ** (d * s) * (1 + qq**d))) ** c for d, c in enumerate(counts, start=1))

        for n in range(n_max + 1):
            fd = _richardson_derivative(G, mpmath.mpf(1), n, mpmath.mpf(step)) / (-mpmath.log(qq)) ** n \
                if n else G(mpmath.mpf(1))
            worst = max(worst, abs(float(fd) - asy.phi_G_eval(n, 1.0, cutoff, q)))
    return CheckResult(f"phi^n(G) q={q}", worst <= tol, f"n <= {n_max}, max error {worst:.2e}")


def g_convergence_suite(q: int = 3, cutoff: int = asy.DEFAULT_CUTOFF, m_max: int = 3,
                        tol: float = 1e-5) -> CheckResult:
    series = asy.g_deriv_series(0, cutoff, q)
    product = asy.euler_product_G(1.0, cutoff, q)
    budget = series.tail_bound + asy.euler_tail_bound(cutoff, q)
    gap = abs(float(series.partial) - product)
    ok = gap <= budget and budget <= tol
    cauchy_bad = 0
    for m in range(m_max + 1):
        for N in range(4, cutoff + 1):
            lo = asy.g_deriv_series(m, N, q)
            hi = asy.g_deriv_series(m, N + 2, q)
            cauchy_bad += abs(float(hi.partial - lo.partial)) > lo.tail_bound
    ok = ok and cauchy_bad == 0
    return CheckResult(f"G convergence q={q}", ok,
                       f"|series - product| = {gap:.2e} <= {budget:.2e}; Cauchy failures {cauchy_bad}")


def component_sums_suite(q: int = 3, h_max: int = 10, m_max: int = 3, cutoff: int = asy.DEFAULT_CUTOFF) -> CheckResult:
    """M-sums within the exact tail budget; N-sum and divisor-tail deviations do not grow."""
    bad = 0
    for h in range(h_max + 1):
        for g in (h, h + 1):
            for m in range(m_max + 1):
                pred = asy.lemma_main("M", h, m, q, g, max(m, 1), cutoff)
                if abs(float(exact_M_sum(h, m, q, g)) - pred.value) > pred.error_budget:
                    bad += 1
    n_ratios = []
    for h in range(1, h_max + 1):
        pred = asy.lemma_main("N", h, 0, q, h, 1, cutoff, parity="even")
        n_ratios.append(abs(float(exact_N_sum(h, q, h)) - pred.value) / pred.error_budget)
    tail_ok = True
    for m in range(m_max + 1):
        gs = list(range(2, h_max + 1))
        ratios = [abs(float(asy.g_tail(m, g // 2, cutoff, q))) / (g**m * q ** (-g / 2)) for g in gs]
        tail_ok &= no_growth(ratios)
    ok = bad == 0 and no_growth(n_ratios) and tail_ok
    C = asy.fit_constant(n_ratios, [1.0] * len(n_ratios))
    return CheckResult(f"M/N sums q={q}", ok,
                       f"M budget failures {bad}; N deviation/(g|D|^3/4) fitted C = {C:.3g}, "
                       f"max {max(n_ratios):.3g}; divisor tail no-growth {tail_ok}")


# ensemble decompositions

def decomposition_suite(q: int = 3, odd_g_max: int = 3, even_g_max: int = 2, mu_max: int = 2,
                        workers: int | None = None) -> CheckResult:
    checked = bad = 0
    for parity, gs in (("odd", range(1, odd_g_max + 1)), ("even", range(0, even_g_max + 1))):
        for g in gs:
            for mu in range(mu_max + 1):
                spec = EnsembleSpec(q, parity, g, mu)
                checked += 1
                bad += empirical_moment(spec, workers) != recombine(spec, workers)
    return CheckResult(f"S/T recombination q={q}", bad == 0, f"{checked} specs, {bad} mismatches")


def square_split_suite(q: int = 3, g_max: int = 2, m_max: int = 2, workers: int | None = None) -> CheckResult:
    checked = bad = 0
    for parity in ("odd", "even"):
        for g in range(1, g_max + 1):
            for h in (g - 1, g):
                for m in range(m_max + 1):
                    split = empirical_S_split(parity, h, m, g, q)
                    direct = empirical_S(parity, h, m, g, q, workers)
                    checked += 1
                    bad += not (split.square + split.nonsquare == split.f_outer == direct)
    return CheckResult(f"square/non-square split q={q}", bad == 0, f"{checked} sums, {bad} mismatches")


def run_all(q: int = 3, g_max: int = 3, mu_max: int = 3, cutoff: int = asy.DEFAULT_CUTOFF,
            workers: int | None = None) -> list[CheckResult]:
    """Every suite at the requested scale; costs stay in the seconds range for g_max <= 3."""
    out = [
        afe_exactness(q, g_max, mu_max),
        fe_symmetry(q, min(g_max, 2)),
        rh_roots(q, min(g_max, 2), 1),
        divisor_product_identity(q),
        faulhaber_suite(),
        delta_jet_suite(q),
        h_closed_form_suite(q, points=(0.8, 1.0, 1.5)),
        phi_suite(q, cutoff=cutoff),
        g_convergence_suite(q, cutoff),
        component_sums_suite(q, cutoff=cutoff),
        decomposition_suite(q, g_max, min(g_max, 2), mu_max, workers),
        square_split_suite(q, min(g_max, 2), min(mu_max, 2), workers),
    ]
    return out
