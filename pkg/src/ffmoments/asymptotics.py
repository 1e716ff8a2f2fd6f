"""Closed-form ingredients of the mean-value formulas and their predictions.

Normalized derivatives of G at s = 1 come from the square-free Dirichlet
series, aggregated by degree.  The summand mu(L) / prod_{P|L}(1 + |P|) is
multiplicative and depends on L only through the degrees of its prime
factors, so the degree-l total is the u^l coefficient of

    prod_d (1 - u^d / (1 + q^d))^{pi_q(d)},

with pi_q(d) the number of monic irreducibles of degree d.  Everything up
to the final assembly of a prediction is exact.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import comb, factorial

from .characters import zeta_A
from .poly import field, necklace_count
from .quadvalue import QuadValue

DEFAULT_CUTOFF = 14


# Bernoulli and Faulhaber

@functools.lru_cache(maxsize=None)
def _bernoulli_minus(n: int) -> tuple[Fraction, ...]:
    B = [Fraction(1)]
    for m in range(1, n + 1):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    return tuple(B)


def bernoulli_plus(l: int) -> Fraction:
    """Second Bernoulli numbers, B_1 = +1/2."""
    if l < 0:
        raise ValueError("l must be >= 0")
    b = _bernoulli_minus(l)[l]
    return -b if l == 1 else b


@dataclass(frozen=True)
class FaulhaberCoeffs:
    """J_m(n) = sum_{l=1}^n l^m = sum_a j[a-1] n^a for a = 1..m+1."""

    m: int
    j: tuple[Fraction, ...]

    def coeff(self, a: int) -> Fraction:
        return self.j[a - 1] if 1 <= a <= self.m + 1 else Fraction(0)

    def __call__(self, n: int) -> Fraction:
        return sum((c * n ** (a + 1) for a, c in enumerate(self.j)), Fraction(0))


@functools.lru_cache(maxsize=None)
def faulhaber(m: int) -> FaulhaberCoeffs:
    if m < 0:
        raise ValueError("m must be >= 0")
    j = tuple(
        Fraction(comb(m + 1, m + 1 - a)) * bernoulli_plus(m + 1 - a) / (m + 1)
        for a in range(1, m + 2)
    )
    return FaulhaberCoeffs(m, j)


def power_sum(m: int, n: int) -> int:
    return sum(l**m for l in range(1, n + 1))


def faulhaber_split_check(m: int, h: int, L_deg: int) -> bool:
    """sum_{L_deg <= l <= [h/2]} l^m == J_m([h/2]) + L_deg^m - sum_a j_m(a) L_deg^a."""
    k = h // 2
    if not 0 <= L_deg <= k:
        raise ValueError("need 0 <= L_deg <= h // 2")
    J = faulhaber(m)
    lhs = sum(l**m for l in range(L_deg, k + 1))
    rhs = J(k) + L_deg**m - sum(J.coeff(a) * L_deg**a for a in range(1, m + 2))
    return lhs == rhs


# per-degree generating functions

def _series_mul(a: list, b: list, N: int) -> list:
    out = [Fraction(0)] * (N + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(N + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


@functools.lru_cache(maxsize=None)
def g_degree_coeffs(q: int, N: int) -> tuple[Fraction, ...]:
    """c_l = sum over L in H_l of mu(L) / prod_{P|L}(1 + |P|), l = 0..N."""
    field(q)
    series = [Fraction(1)] + [Fraction(0)] * N
    for d in range(1, N + 1):
        pi = necklace_count(q, d)
        x = Fraction(-1, 1 + q**d)
        factor = [Fraction(0)] * (N + 1)
        for k in range(N // d + 1):
            factor[d * k] = comb(pi, k) * x**k
        series = _series_mul(series, factor, N)
    return tuple(series)


@functools.lru_cache(maxsize=None)
def lemma43_lhs_coeffs(q: int, N: int) -> tuple[Fraction, ...]:
    """sum over all monic L of degree l of prod_{P|L} (1 + |P|^-1)^-1, l = 0..N."""
    field(q)
    series = [Fraction(1)] + [Fraction(0)] * N
    for d in range(1, N + 1):
        pi = necklace_count(q, d)
        c = Fraction(q**d, q**d + 1)
        # (1 + c v)^pi with v = u^d / (1 - u^d)
        factor = [Fraction(0)] * (N + 1)
        for k in range(N // d + 1):
            coef = comb(pi, k) * c**k
            for jj in range((N - d * k) // d + 1):
                # u^{dk} (1 - u^d)^{-k}
                factor[d * (k + jj)] += coef * (comb(k + jj - 1, jj) if k else (1 if jj == 0 else 0))
        series = _series_mul(series, factor, N)
    return tuple(series)


def lemma43_sides(q: int, l: int) -> tuple[Fraction, Fraction]:
    lhs = lemma43_lhs_coeffs(q, l)[l]
    c = g_degree_coeffs(q, l)
    rhs = q**l * sum(c[k] / Fraction(q) ** k for k in range(l + 1))
    return lhs, rhs


def lemma43_check(l: int, q: int = 3) -> bool:
    if l < 0:
        raise ValueError("l must be >= 0")
    lhs, rhs = lemma43_sides(q, l)
    return lhs == rhs


# G and its derivatives at s = 1

def geometric_tail(q: int, m: int, N: int) -> float:
    """sum_{l > N} l^m q^-l; bounds the Dirichlet-series tail since |c_l| q^-l <= q^-l."""
    total, l = 0.0, N + 1
    while True:
        term = l**m * float(q) ** (-l)
        total += term
        if term < 1e-18 * total and l > N + m + 2:
            return total
        l += 1


@dataclass(frozen=True)
class GSeriesValue:
    """Truncation of G^(m)(1)/(-ln q)^m at degree <= cutoff."""

    q: int
    m: int
    cutoff: int
    partial: Fraction
    tail_bound: float

    def __float__(self):
        return float(self.partial)


def g_deriv_series(m: int, cutoff: int = DEFAULT_CUTOFF, q: int = 3) -> GSeriesValue:
    if m < 0 or cutoff < 0:
        raise ValueError("m and cutoff must be >= 0")
    c = g_degree_coeffs(q, cutoff)
    partial = sum((l**m * c[l] / Fraction(q) ** l for l in range(cutoff + 1)), Fraction(0))
    return GSeriesValue(q, m, cutoff, partial, geometric_tail(q, m, cutoff))


def g_tail(m: int, lo: int, cutoff: int, q: int = 3) -> Fraction:
    """sum over lo < deg L <= cutoff of mu(L) deg(L)^m / (|L| prod (1 + |P|)), exact."""
    c = g_degree_coeffs(q, cutoff)
    return sum((l**m * c[l] / Fraction(q) ** l for l in range(lo + 1, cutoff + 1)), Fraction(0))


def euler_product_G(s: float, cutoff: int = DEFAULT_CUTOFF, q: int = 3) -> float:
    """prod over deg P <= cutoff of (1 - 1/(|P|^s (1 + |P|)))."""
    log = 0.0
    for d in range(1, cutoff + 1):
        log += necklace_count(q, d) * math.log1p(-1.0 / (q ** (d * s) * (1 + q**d)))
    return math.exp(log)


def euler_tail_bound(cutoff: int, q: int = 3) -> float:
    """|G(1) - truncated product| <= sum_{d > cutoff} q^-d / d."""
    total, d = 0.0, cutoff + 1
    while True:
        term = float(q) ** (-d) / d
        total += term
        if term < 1e-18 * total:
            return total
        d += 1


# H_n and the operator phi

_H_CLOSED = {
    1: lambda F: 1 / (1 - F),
    2: lambda F: -F / (1 - F) ** 2,
    3: lambda F: F * (1 + F) / (1 - F) ** 3,
    4: lambda F: -F * (1 + 4 * F + F**2) / (1 - F) ** 4,
    5: lambda F: F * (1 + 11 * F + 11 * F**2 + F**3) / (1 - F) ** 5,
}


@functools.lru_cache(maxsize=None)
def h_numerator(n: int) -> tuple[int, ...]:
    """Integer polynomial p_n with H_n's per-prime summand deg(P)^n p_n(F) / (1 - F)^n.

    From p_1 = 1 and p_{n+1} = -F ((1 - F) p_n' + n p_n), which is
    H_{n+1} = H_n' / (-ln q) written in F = f_P(s).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return (1,)
    p = list(h_numerator(n - 1))
    k = n - 1
    dp = [i * c for i, c in enumerate(p)][1:] + [0]
    inner = [0] * (len(p) + 1)
    for i, c in enumerate(dp):
        inner[i] += c
        inner[i + 1] -= c
    for i, c in enumerate(p):
        inner[i] += k * c
    out = [0] + [-c for c in inner]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return tuple(out)


def _f_P(d: int, s: float, q: int) -> float:
    return q ** (d * s) * (q**d + 1)


def h_n_eval(n: int, s: float, cutoff: int = DEFAULT_CUTOFF, q: int = 3, closed_form: bool | None = None) -> float:
    """H_n(s) truncated to deg P <= cutoff.

    The listed closed forms serve n <= 5; the recursion serves every n and is
    used when ``closed_form`` is False or n > 5.
    """
    if s <= 0:
        raise ValueError("s must be > 0")
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    if closed_form is None:
        closed_form = n <= 5
    if closed_form and n not in _H_CLOSED:
        raise ValueError(f"no closed form for H_{n}")
    total = 0.0
    for d in range(1, cutoff + 1):
        F = _f_P(d, s, q)
        if closed_form:
            r = _H_CLOSED[n](F)
        else:
            r = sum(c * F**i for i, c in enumerate(h_numerator(n))) / (1 - F) ** n
        total += necklace_count(q, d) * d**n * r
    return total


# monomials in G, H_1, H_2, ... as exponent tuples (e_G, e_H1, e_H2, ...)

def _phi(poly: dict[tuple, int]) -> dict[tuple, int]:
    out: dict[tuple, int] = {}

    def add(mono, c):
        mono = tuple(mono)
        while mono and mono[-1] == 0:
            mono = mono[:-1]
        out[mono] = out.get(mono, 0) + c

    for mono, c in poly.items():
        for i, e in enumerate(mono):
            if not e:
                continue
            new = list(mono) + [0, 0]
            new[i] -= 1
            if i == 0:
                # phi(G) = G H_1
                new[0] += 1
                new[1] += 1
            else:
                new[i + 1] += 1
            add(new, c * e)
    return {k: v for k, v in out.items() if v}


@functools.lru_cache(maxsize=None)
def phi_power_of_G(n: int) -> tuple[tuple[tuple, int], ...]:
    """phi^n(G) as a sum of monomials in G, H_1, ..., H_n."""
    poly = {(1,): 1}
    for _ in range(n):
        poly = _phi(poly)
    return tuple(sorted(poly.items()))


def phi_G_eval(n: int, s: float, cutoff: int = DEFAULT_CUTOFF, q: int = 3) -> float:
    """phi^n(G)(s) = G^(n)(s)/(-ln q)^n, with G and H_k truncated at the same cutoff."""
    G = euler_product_G(s, cutoff, q)
    H = [None] + [h_n_eval(k, s, cutoff, q) for k in range(1, n + 1)]
    total = 0.0
    for mono, c in phi_power_of_G(n):
        v = float(c) * G ** mono[0]
        for k, e in enumerate(mono[1:], start=1):
            v *= H[k] ** e
        total += v
    return total


# delta(s) = (1 - q^-s)/(1 - q^(s-1)) and its jet at s = 1/2

def _poly_eval(coeffs: list, x):
    v = 0 * x
    for c in reversed(coeffs):
        v = v * x + c
    return v


@functools.lru_cache(maxsize=None)
def delta_jet(mu: int, q: int) -> tuple[QuadValue, ...]:
    """d_m = delta^(m)(1/2)/(-ln q)^m for m = 0..mu, exactly.

    With X = q^-s, d/ds = -ln q * X d/dX and delta = X(1 - X)/(X - 1/q);
    applying X d/dX to N(X)/(X - c)^k gives X (N'(X - c) - k N)/(X - c)^(k+1).
    """
    if mu < 0:
        raise ValueError("mu must be >= 0")
    field(q)
    c = Fraction(1, q)
    num = [Fraction(0), Fraction(1), Fraction(-1)]
    k = 1
    X = QuadValue.half_power(q, 1)
    out = []
    for _ in range(mu + 1):
        out.append(_poly_eval(num, X) / (X - c) ** k)
        dnum = [i * a for i, a in enumerate(num)][1:]
        # N' (X - c) - k N
        t = [Fraction(0)] * (len(num) + 1)
        for i, a in enumerate(dnum):
            t[i + 1] += a
            t[i] -= c * a
        for i, a in enumerate(num):
            t[i] -= k * a
        num = [Fraction(0)] + t
        k += 1
    return tuple(out)


def delta_float(s: float, q: int) -> float:
    return (1 - q ** (-s)) / (1 - q ** (s - 1))


# predictions

@dataclass
class AsymPrediction:
    kind: str
    params: dict
    terms: dict[str, float]
    error_budget: float
    notes: dict = dc_field(default_factory=dict)

    @property
    def value(self) -> float:
        return math.fsum(self.terms.values())


def _norm_D(q: int, g: int, parity: str) -> int:
    if parity == "odd":
        return q ** (2 * g + 1)
    if parity == "even":
        return q ** (2 * g + 2)
    raise ValueError(f"parity must be 'odd' or 'even', got {parity!r}")


def _G_values(q: int, upto: int, cutoff: int, tail_tol: float | None) -> list[GSeriesValue]:
    vals = [g_deriv_series(m, cutoff, q) for m in range(upto + 1)]
    if tail_tol is not None:
        worst = max(v.tail_bound for v in vals)
        if worst > tail_tol:
            raise ValueError(f"cutoff {cutoff} leaves tail {worst:.3g} above tolerance {tail_tol:.3g}")
    return vals


def _bracket(G: list[float], m: int, k: int) -> tuple[float, float]:
    """(G(1) J_m(k) + G_m, sum_{a=1}^{m+1} j_m(a) G_a) with G_a = G^(a)(1)/(-ln q)^a."""
    J = faulhaber(m)
    first = G[0] * float(J(k)) + G[m]
    second = math.fsum(float(J.coeff(a)) * G[a] for a in range(1, m + 2))
    return first, second


def lemma_main(kind: str, h: int, m: int, q: int, g: int, mu: int, cutoff: int = DEFAULT_CUTOFF,
               parity: str = "odd", tail_tol: float | None = None) -> AsymPrediction:
    """Main term of M_{h,m} (kind "M") or N_h (kind "N").

    M's error budget is the exact degree > [h/2] tail of the three truncated
    G-series entering it (plus the rigorous tail beyond the cutoff); N's is
    the O-term shape g |D|^(3/4) with unit constant.
    """
    if h not in (g - 1, g) or h < 0:
        raise ValueError("need h in {g-1, g} and h >= 0")
    if not 0 <= m <= mu:
        raise ValueError("need 0 <= m <= mu")
    D = _norm_D(q, g, parity)
    Z = float(zeta_A(q))
    k = h // 2
    params = dict(q=q, g=g, h=h, m=m, mu=mu, cutoff=cutoff, parity=parity)
    if kind == "M":
        Gv = _G_values(q, m + 1, cutoff, tail_tol)
        G = [float(v) for v in Gv]
        first, second = _bracket(G, m, k)
        scale = 2**m * D / Z
        terms = {"main": scale * first, "faulhaber": -scale * second}
        J = faulhaber(m)
        tails = [abs(float(g_tail(a, k, cutoff, q))) + v.tail_bound for a, v in enumerate(Gv)]
        budget = scale * (float(J(k)) * tails[0] + tails[m]
                          + sum(abs(float(J.coeff(a))) * tails[a] for a in range(1, m + 2)))
        return AsymPrediction("M", params, terms, budget)
    if kind == "N":
        Gv = _G_values(q, 0, cutoff, tail_tol)
        value = float(Gv[0]) * D * q ** (k - (h + 1) / 2)
        return AsymPrediction("N", params, {"main": value}, g * D**0.75)
    raise ValueError(f"kind must be 'M' or 'N', got {kind!r}")


def theorem_error_scale(q: int, g: int, mu: int, parity: str) -> float:
    """|D|^(7/8) (log_q |D|)^mu."""
    D = _norm_D(q, g, parity)
    logD = 2 * g + 1 if parity == "odd" else 2 * g + 2
    return D**0.875 * logD**mu


def thm1_main(q: int, g: int, mu: int, cutoff: int = DEFAULT_CUTOFF,
              tail_tol: float | None = None, constant: float = 1.0) -> AsymPrediction:
    """Main term for the sum over H_{2g+1} of L^(mu)(1/2, chi_D)/(ln q)^mu."""
    if mu < 1 or g < 1:
        raise ValueError("need mu >= 1 and g >= 1")
    D = _norm_D(q, g, "odd")
    Z = float(zeta_A(q))
    G = [float(v) for v in _G_values(q, mu + 1, cutoff, tail_tol)]
    lead = (-2) ** mu * D / Z
    first, second = _bracket(G, mu, g // 2)
    terms = {"S_g_main": lead * first, "S_g_faulhaber": -lead * second}
    side = 2**mu * D / Z
    acc1, acc2 = [], []
    for m in range(mu + 1):
        w = comb(mu, m) * (-g) ** (mu - m)
        f1, f2 = _bracket(G, m, (g - 1) // 2)
        acc1.append(w * f1)
        acc2.append(w * f2)
    terms["S_g-1_main"] = side * math.fsum(acc1)
    terms["S_g-1_faulhaber"] = -side * math.fsum(acc2)
    return AsymPrediction("thm1", dict(q=q, g=g, mu=mu, cutoff=cutoff, normalization="(ln q)^mu"),
                          terms, constant * theorem_error_scale(q, g, mu, "odd"))


def compositions3(mu: int):
    for a in range(mu + 1):
        for b in range(mu + 1 - a):
            yield a, b, mu - a - b


def thm2_main(q: int, g: int, mu: int, cutoff: int = DEFAULT_CUTOFF,
              tail_tol: float | None = None, constant: float = 1.0) -> AsymPrediction:
    """Main term for the sum over H_{2g+2} of L^(mu)(1/2, chi_D)/(-ln q)^mu."""
    if mu < 1 or g < 1:
        raise ValueError("need mu >= 1 and g >= 1")
    D = _norm_D(q, g, "even")
    Z = float(zeta_A(q))
    G = [float(v) for v in _G_values(q, mu + 1, cutoff, tail_tol)]
    d = [float(x) for x in delta_jet(mu, q)]
    lead = 2**mu * D / Z
    first, second = _bracket(G, mu, g // 2)
    terms = {"S_g_main": lead * first, "S_g_faulhaber": -lead * second}
    terms["T_g"] = -((g + 1) ** mu) * G[0] * D * q ** (g // 2 - (g + 1) / 2)
    acc1, acc2 = [], []
    for a, b, c in compositions3(mu):
        w = (-1) ** c * factorial(mu) // (factorial(a) * factorial(b) * factorial(c)) * g**a * d[b] / 2**b
        f1, f2 = _bracket(G, c, (g - 1) // 2)
        acc1.append(w * f1)
        acc2.append(w * f2)
    terms["S_g-1_main"] = lead * math.fsum(acc1)
    terms["S_g-1_faulhaber"] = -lead * math.fsum(acc2)
    terms["T_g-1"] = -G[0] * D * q ** ((g - 1) // 2 - g / 2) * math.fsum(
        comb(mu, m) * g ** (mu - m) * d[m] for m in range(mu + 1))
    return AsymPrediction("thm2", dict(q=q, g=g, mu=mu, cutoff=cutoff, normalization="(-ln q)^mu"),
                          terms, constant * theorem_error_scale(q, g, mu, "even"))


def fit_constant(deviations, scales) -> float:
    """Least-squares C in |deviation| ~ C * scale (through the origin)."""
    num = math.fsum(abs(d) * s for d, s in zip(deviations, scales))
    den = math.fsum(s * s for s in scales)
    return num / den if den else 0.0


def log_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against x; the growth rate of y."""
    pts = [(x, math.log(y)) for x, y in zip(xs, ys) if y > 0]
    n = len(pts)
    if n < 2:
        return 0.0
    mx = math.fsum(p[0] for p in pts) / n
    my = math.fsum(p[1] for p in pts) / n
    sxx = math.fsum((p[0] - mx) ** 2 for p in pts)
    sxy = math.fsum((p[0] - mx) * (p[1] - my) for p in pts)
    return sxy / sxx


def no_growth(values) -> bool:
    """Max over the later half of a grid does not exceed the max over the earlier half."""
    values = [abs(v) for v in values]
    if len(values) < 2:
        return True
    half = len(values) // 2
    return max(values[half:]) <= max(values[:half])
