"""L(s, chi_D) as a polynomial in u = q^-s and its derivatives at s = 1/2.

All values at s = 1/2 are exact elements of Q(sqrt q).  Odd-degree D
(D in H_{2g+1}) are normalized by (ln q)^mu, even-degree D (H_{2g+2}) by
(-ln q)^mu.  Under those normalizations

    odd:   L^(mu)(1/2)/(ln q)^mu   = sum_n (-n)^mu A_n q^(-n/2)
    even:  L^(mu)(1/2)/(-ln q)^mu  = sum_n   n^mu A_n q^(-n/2)

over the full coefficient range.  The approximate functional equation
expresses the same numbers through A_0 .. A_g only.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import Sequence

import mpmath

from .asymptotics import compositions3, delta_jet
from .characters import _check_discriminant, coeff_A
from .poly import FqPoly
from .quadvalue import QuadValue


def genus_of(deg: int) -> tuple[int, str]:
    if deg % 2:
        if deg < 3:
            raise ValueError("odd-degree D must have degree >= 3")
        return (deg - 1) // 2, "odd"
    if deg < 2:
        raise ValueError("even-degree D must have degree >= 2")
    return (deg - 2) // 2, "even"


@dataclass(frozen=True)
class LData:
    D: FqPoly
    parity: str
    g: int
    A: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.D.q

    @property
    def degree(self) -> int:
        return len(self.A) - 1

    @classmethod
    def from_low_coeffs(cls, D: FqPoly, low: Sequence[int]) -> LData:
        """Complete A_0 .. A_g (odd) by the functional equation; even D needs all 2g+2 values."""
        g, parity = genus_of(D.deg)
        low = tuple(int(x) for x in low)
        if parity == "odd":
            if len(low) < g + 1:
                raise ValueError(f"need A_0..A_{g}")
            A = list(low[: g + 1]) + [D.q ** (g - n) * low[n] for n in range(g - 1, -1, -1)]
        else:
            if len(low) < 2 * g + 2:
                raise ValueError(f"need A_0..A_{2 * g + 1}")
            A = list(low[: 2 * g + 2])
        return cls(D, parity, g, tuple(A))


def build_l(D: FqPoly) -> LData:
    """L-polynomial coefficients of chi_D from direct character sums."""
    _check_discriminant(D)
    g, parity = genus_of(D.deg)
    top = g if parity == "odd" else 2 * g + 1
    return LData.from_low_coeffs(D, [coeff_A(D, n) for n in range(top + 1)])


def fe_symmetry_check(L: LData) -> bool:
    """A(2g-n) == q^(g-n) A(n) for all n, both sides from direct sums."""
    if L.parity != "odd":
        raise ValueError("the functional-equation check is implemented for odd parity only")
    A = [coeff_A(L.D, n) for n in range(2 * L.g + 1)]
    return all(A[2 * L.g - n] == L.q ** (L.g - n) * A[n] for n in range(2 * L.g + 1))


@dataclass(frozen=True)
class RootReport:
    max_deviation: float
    unit_roots: int
    ok: bool
    converged: bool
    roots: tuple[complex, ...]


def rh_roots_check(L: LData, tol: float = 1e-8) -> RootReport:
    """Locate the roots of sum A_n u^n and compare their moduli with q^(-1/2).

    Odd parity: every root within tol of q^(-1/2).  Even parity: exactly one
    root within tol of the unit circle, the others within tol of q^(-1/2).
    """
    coeffs = list(reversed(L.A))
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) <= 1:
        return RootReport(0.0, 0, L.parity == "odd", True, ())
    with mpmath.workdps(50):
        target = 1 / mpmath.sqrt(L.q)
        try:
            roots, err = mpmath.polyroots(coeffs, maxsteps=2000, extraprec=400, error=True)
            converged = err < 1e-30
        except mpmath.libmp.NoConvergence:
            return RootReport(float("inf"), 0, False, False, ())
        mods = [abs(r) for r in roots]
        unit = [m for m in mods if abs(m - 1) <= tol]
        rest = [m for m in mods if abs(m - 1) > tol]
        dev = max((abs(m - target) for m in rest), default=mpmath.mpf(0))
        roots_c = tuple(complex(r) for r in roots)
    dev = float(dev)
    if L.parity == "odd":
        ok = converged and not unit and dev <= tol
    else:
        ok = converged and len(unit) == 1 and dev <= tol
    return RootReport(dev, len(unit), ok, converged, roots_c)


def direct_from_coeffs(A: Sequence[int], q: int, mu: int, parity: str) -> QuadValue:
    sign = -1 if parity == "odd" else 1
    return QuadValue.from_half_powers(q, {n: (sign * n) ** mu * a for n, a in enumerate(A)})


def deriv_half_direct(L: LData, mu: int) -> QuadValue:
    """Normalized mu-th derivative at 1/2 by differentiating the whole polynomial."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    return direct_from_coeffs(L.A, L.q, mu, L.parity)


def afe_odd_from_coeffs(A: Sequence[int], g: int, q: int, mu: int) -> QuadValue:
    """sum_{n<=g} (-n)^mu A_n q^(-n/2) + sum_m C(mu,m)(-2g)^(mu-m) sum_{n<=g-1} n^m A_n q^(-n/2)."""
    terms: dict[int, int] = {}
    for n in range(g + 1):
        terms[n] = (-n) ** mu * A[n]
    for n in range(g):
        w = sum(comb(mu, m) * (-2 * g) ** (mu - m) * n**m for m in range(mu + 1))
        terms[n] += w * A[n]
    return QuadValue.from_half_powers(q, terms)


def deriv_half_afe_odd(D: FqPoly, mu: int, A: Sequence[int] | None = None) -> QuadValue:
    """L^(mu)(1/2, chi_D)/(ln q)^mu for D in H_{2g+1} from A_0 .. A_g alone."""
    g, parity = genus_of(D.deg)
    if parity != "odd":
        raise ValueError("D must have odd degree")
    if A is None:
        _check_discriminant(D)
        A = [coeff_A(D, n) for n in range(g + 1)]
    return afe_odd_from_coeffs(A, g, D.q, mu)


def afe_even_from_coeffs(A: Sequence[int], g: int, q: int, mu: int,
                         jet: Sequence[QuadValue] | None = None) -> QuadValue:
    if jet is None:
        jet = delta_jet(mu, q)
    if len(jet) < mu + 1:
        raise ValueError(f"delta jet has order {len(jet) - 1} < {mu}")
    total_g = sum(A[: g + 1])
    total_g1 = sum(A[:g])
    value = QuadValue.from_half_powers(q, {n: n**mu * A[n] for n in range(g + 1)})
    value -= (g + 1) ** mu * total_g * QuadValue.half_power(q, g + 1)
    inner = [QuadValue.from_half_powers(q, {n: (-n) ** c * A[n] for n in range(g)}) for c in range(mu + 1)]
    for a, b, c in compositions3(mu):
        w = factorial(mu) // (factorial(a) * factorial(b) * factorial(c)) * (2 * g) ** a
        value += w * jet[b] * inner[c]
    tail = QuadValue(q)
    for m in range(mu + 1):
        tail += comb(mu, m) * g ** (mu - m) * jet[m]
    value -= total_g1 * QuadValue.half_power(q, g) * tail
    return value


def deriv_half_afe_even(D: FqPoly, mu: int, jets: Sequence[QuadValue] | None = None,
                        A: Sequence[int] | None = None) -> QuadValue:
    """L^(mu)(1/2, chi_D)/(-ln q)^mu for D in H_{2g+2} from A_0 .. A_g and the delta jet."""
    g, parity = genus_of(D.deg)
    if parity != "even":
        raise ValueError("D must have even degree")
    if A is None:
        _check_discriminant(D)
        A = [coeff_A(D, n) for n in range(g + 1)]
    return afe_even_from_coeffs(A, g, D.q, mu, jets)
