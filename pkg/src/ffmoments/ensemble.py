"""Exhaustive averages over the hyperelliptic ensembles H_{2g+1} and H_{2g+2}.

Every empirical quantity here is linear in the per-D coefficients A_n(D),
so the enumeration reduces to the integer totals

    E_n = sum over D in H_N of A_n(D),   n = 0..nmax,

computed chunk by chunk over the lexicographic order of monic D.  Chunks
are independent and their totals are exact integers, so the result does
not depend on how chunks are spread over workers.
"""

from __future__ import annotations

import functools
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb, factorial

import numpy as np

from . import batch
from .asymptotics import (
    AsymPrediction,
    compositions3,
    delta_jet,
    lemma43_lhs_coeffs,
    thm1_main,
    thm2_main,
    theorem_error_scale,
)
from .characters import coprime_squarefree_count, squarefree_block, squarefree_count, zeta_A
from .lfunction import afe_even_from_coeffs, afe_odd_from_coeffs, direct_from_coeffs
from .poly import FqPoly, enumerate_monic, factor, field, poly_sqrt
from .quadvalue import QuadValue

DEFAULT_BUDGET = 5 * 10**9
CHUNK_ROWS = 1 << 16
WORKERS_ENV = "FFMOMENTS_WORKERS"


class BudgetExceeded(RuntimeError):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"estimated {estimate:.3e} character evaluations exceeds budget {budget:.3e}")
        self.estimate = estimate
        self.budget = budget


def default_workers() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class EnsembleSpec:
    q: int
    parity: str
    g: int
    mu: int = 1

    def __post_init__(self):
        field(self.q)
        if self.parity not in ("odd", "even"):
            raise ValueError(f"parity must be 'odd' or 'even', got {self.parity!r}")
        if self.g < 0 or self.mu < 0:
            raise ValueError("g and mu must be >= 0")
        if self.parity == "odd" and self.g < 1:
            raise ValueError("odd ensembles need g >= 1")

    @property
    def degree(self) -> int:
        return 2 * self.g + 1 if self.parity == "odd" else 2 * self.g + 2

    @property
    def norm(self) -> int:
        return self.q**self.degree

    @property
    def size(self) -> int:
        return squarefree_count(self.q, self.degree)


def estimate_cost(q: int, N: int, nmax: int) -> int:
    """Character evaluations needed for A_0..A_nmax over H_N."""
    return squarefree_count(q, N) * sum(q**n for n in range(nmax + 1))


def _chunk_totals(args) -> tuple[int, tuple[int, ...]]:
    q, N, nmax, lo, hi = args
    block = squarefree_block(q, N, lo, hi)
    A = batch.coefficient_block(block, q, nmax)
    return block.shape[0], tuple(int(x) for x in A.sum(axis=0))


def _chunks(q: int, N: int, nmax: int) -> list[tuple]:
    total = q**N
    n_chunks = max(1, -(-total // CHUNK_ROWS))
    return [(q, N, nmax, lo, hi) for lo, hi in batch.chunk_bounds(total, n_chunks)]


@functools.lru_cache(maxsize=64)
def _totals_cached(q: int, N: int, nmax: int, workers: int) -> tuple[int, tuple[int, ...]]:
    jobs = _chunks(q, N, nmax)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_totals, jobs))
    else:
        parts = [_chunk_totals(j) for j in jobs]
    size = sum(p[0] for p in parts)
    totals = [0] * (nmax + 1)
    for _, t in parts:
        for n, v in enumerate(t):
            totals[n] += v
    return size, tuple(totals)


def ensemble_totals(q: int, N: int, nmax: int, workers: int | None = None,
                    budget: int = DEFAULT_BUDGET) -> tuple[int, tuple[int, ...]]:
    """(#H_N, (E_0, ..., E_nmax)) with E_n the sum of A_n(D) over D in H_N."""
    field(q)
    est = estimate_cost(q, N, nmax)
    if est > budget:
        raise BudgetExceeded(est, budget)
    return _totals_cached(q, N, nmax, workers or default_workers())


def per_d_coefficients(q: int, N: int, nmax: int) -> tuple[np.ndarray, np.ndarray]:
    """(square-free D block, A_0..A_nmax per D) for the whole ensemble; desk scale only."""
    block = squarefree_block(q, N, 0, q**N)
    return block, batch.coefficient_block(block, q, nmax)


def _afe(A, spec: EnsembleSpec) -> QuadValue:
    if spec.parity == "odd":
        return afe_odd_from_coeffs(A, spec.g, spec.q, spec.mu)
    return afe_even_from_coeffs(A, spec.g, spec.q, spec.mu, delta_jet(spec.mu, spec.q))


def empirical_moment(spec: EnsembleSpec, workers: int | None = None, budget: int = DEFAULT_BUDGET,
                     per_d: bool = False) -> QuadValue:
    """Exact sum over the ensemble of the normalized mu-th derivative at 1/2.

    The default path applies the AFE to the ensemble totals; ``per_d`` sums
    the per-D AFE values instead (same number, by linearity).
    """
    if per_d:
        est = estimate_cost(spec.q, spec.degree, spec.g)
        if est > budget:
            raise BudgetExceeded(est, budget)
        _, A = per_d_coefficients(spec.q, spec.degree, spec.g)
        total = QuadValue(spec.q)
        for row in A.tolist():
            total += _afe(row, spec)
        return total
    _, E = ensemble_totals(spec.q, spec.degree, spec.g, workers, budget)
    return _afe(E, spec)


def empirical_moment_direct(spec: EnsembleSpec) -> QuadValue:
    """Oracle: differentiate every full L-polynomial (even parity computes all 2g+2 coefficients)."""
    top = 2 * spec.g if spec.parity == "odd" else 2 * spec.g + 1
    _, A = per_d_coefficients(spec.q, spec.degree, top)
    return direct_from_coeffs([int(x) for x in A.sum(axis=0)], spec.q, spec.mu, spec.parity)


def _check_h(h: int, g: int):
    if h < 0:
        raise ValueError("h must be >= 0")
    if h not in (g - 1, g):
        raise ValueError("need h in {g-1, g}")


def empirical_S(parity: str, h: int, m: int, g: int, q: int, workers: int | None = None) -> QuadValue:
    """sum_{n<=h} n^m q^(-n/2) sum_{f monic deg n} sum_{D in H} chi_D(f)."""
    _check_h(h, g)
    spec = EnsembleSpec(q, parity, g)
    _, E = ensemble_totals(q, spec.degree, g, workers)
    return QuadValue.from_half_powers(q, {n: n**m * E[n] for n in range(h + 1)})


def empirical_T(h: int, g: int, q: int, workers: int | None = None) -> QuadValue:
    """q^(-(h+1)/2) sum_{n<=h} sum_f sum_{D in H_{2g+2}} chi_D(f)."""
    _check_h(h, g)
    _, E = ensemble_totals(q, 2 * g + 2, g, workers)
    return sum(E[: h + 1]) * QuadValue.half_power(q, h + 1)


def f_outer_char_sums(q: int, N: int, nmax: int) -> dict[FqPoly, int]:
    """sum over D in H_N of chi_D(f), for every monic f of degree <= nmax."""
    block = squarefree_block(q, N, 0, q**N)
    cols: dict[FqPoly, np.ndarray] = {}
    out: dict[FqPoly, int] = {}
    for n in range(nmax + 1):
        for f in enumerate_monic(q, n):
            values = np.ones(block.shape[0], dtype=np.int64)
            for P, e in factor(f):
                if P not in cols:
                    cols[P] = batch.chi_column(block, P)
                values *= cols[P] ** e
            out[f] = int(values.sum())
    return out


@dataclass(frozen=True)
class SSplit:
    square: QuadValue
    nonsquare: QuadValue
    f_outer: QuadValue


def empirical_S_split(parity: str, h: int, m: int, g: int, q: int) -> SSplit:
    """S_{h,m} three ways: squares via coprime counts, non-squares and the whole via f-outer sums."""
    _check_h(h, g)
    N = EnsembleSpec(q, parity, g).degree
    sums = f_outer_char_sums(q, N, h)
    sq: dict[int, int] = {}
    nsq: dict[int, int] = {}
    full: dict[int, int] = {}
    for f, s in sums.items():
        n = f.deg
        w = n**m
        full[n] = full.get(n, 0) + w * s
        root = poly_sqrt(f)
        if root is None:
            nsq[n] = nsq.get(n, 0) + w * s
        else:
            sq[n] = sq.get(n, 0) + w * coprime_squarefree_count(N, root)
    return SSplit(QuadValue.from_half_powers(q, sq), QuadValue.from_half_powers(q, nsq),
                  QuadValue.from_half_powers(q, full))


def recombine(spec: EnsembleSpec, workers: int | None = None) -> QuadValue:
    """The moment rebuilt from S (and T) sums, as in the odd and even decompositions."""
    q, g, mu = spec.q, spec.g, spec.mu
    if spec.parity == "odd":
        value = (-1) ** mu * empirical_S("odd", g, mu, g, q, workers)
        for m in range(mu + 1):
            value += comb(mu, m) * (-2 * g) ** (mu - m) * empirical_S("odd", g - 1, m, g, q, workers)
        return value
    jet = delta_jet(mu, q)
    value = empirical_S("even", g, mu, g, q, workers) - (g + 1) ** mu * empirical_T(g, g, q, workers)
    if g >= 1:
        for a, b, c in compositions3(mu):
            w = (-1) ** c * factorial(mu) // (factorial(a) * factorial(b) * factorial(c)) * (2 * g) ** a
            value += w * jet[b] * empirical_S("even", g - 1, c, g, q, workers)
        tail = sum((comb(mu, m) * g ** (mu - m) * jet[m] for m in range(mu + 1)), QuadValue(q))
        value -= tail * empirical_T(g - 1, g, q, workers)
    return value


def exact_M_sum(h: int, m: int, q: int, g: int, parity: str = "odd") -> Fraction:
    """(2^m |D| / zeta_A(2)) sum_{l <= [h/2]} l^m q^-l sum_{L monic deg l} prod_{P|L}(1 + |P|^-1)^-1."""
    if h < 0:
        raise ValueError("h must be >= 0")
    D = q ** (2 * g + 1 if parity == "odd" else 2 * g + 2)
    k = h // 2
    c = lemma43_lhs_coeffs(q, k)
    inner = sum((Fraction(l**m) * c[l] / q**l for l in range(k + 1)), Fraction(0))
    return 2**m * D / zeta_A(q) * inner


def exact_N_sum(h: int, q: int, g: int, parity: str = "even") -> QuadValue:
    """(|D| / zeta_A(2)) q^(-(h+1)/2) sum_{l <= [h/2]} sum_{L monic deg l} prod_{P|L}(1 + |P|^-1)^-1."""
    if h < 0:
        raise ValueError("h must be >= 0")
    D = q ** (2 * g + 1 if parity == "odd" else 2 * g + 2)
    k = h // 2
    inner = sum(lemma43_lhs_coeffs(q, k)[: k + 1], Fraction(0))
    return (D / zeta_A(q) * inner) * QuadValue.half_power(q, h + 1)


@dataclass
class MomentReport:
    spec: EnsembleSpec
    ensemble_size: int
    empirical: QuadValue
    predicted: float
    error_scale: float
    constant: float = 1.0
    runtime_ms: float = 0.0
    prediction: AsymPrediction | None = dc_field(default=None, repr=False)

    @property
    def empirical_float(self) -> float:
        return float(self.empirical)

    @property
    def abs_dev(self) -> float:
        return abs(self.empirical_float - self.predicted)

    @property
    def rel_dev(self) -> float:
        return self.abs_dev / abs(self.predicted) if self.predicted else float("inf")

    @property
    def normalized_dev(self) -> float:
        """abs_dev / (|D|^(7/8) (log_q |D|)^mu)."""
        return self.abs_dev / self.error_scale

    @property
    def error_budget(self) -> float:
        return self.constant * self.error_scale

    @property
    def flag(self) -> str:
        return "error-dominated" if self.spec.g <= 1 else ""


def predict(spec: EnsembleSpec, cutoff: int) -> AsymPrediction:
    if spec.parity == "odd":
        return thm1_main(spec.q, spec.g, spec.mu, cutoff)
    return thm2_main(spec.q, spec.g, spec.mu, cutoff)


def compare(spec: EnsembleSpec, cutoff: int = 14, workers: int | None = None,
            budget: int = DEFAULT_BUDGET, constant: float = 1.0) -> MomentReport:
    """Join the exact ensemble moment with its predicted main term."""
    start = time.perf_counter()
    empirical = empirical_moment(spec, workers, budget)
    pred = predict(spec, cutoff)
    elapsed = (time.perf_counter() - start) * 1000
    return MomentReport(spec, spec.size, empirical, pred.value,
                        theorem_error_scale(spec.q, spec.g, spec.mu, spec.parity),
                        constant, elapsed, pred)
