"""The quadratic character chi_D(f) = (D / f) on monic polynomials over GF(q)."""

from __future__ import annotations

import functools
from fractions import Fraction

import numpy as np

from . import batch
from .poly import FqPoly, enumerate_monic, factor, field, is_squarefree, powmod


@functools.lru_cache(maxsize=4096)
def _check_discriminant(D: FqPoly) -> None:
    if not D.is_monic():
        raise ValueError(f"D must be monic, got {D}")
    if not is_squarefree(D):
        raise ValueError(f"D must be square-free, got {D}")


@functools.lru_cache(maxsize=1 << 16)
def chi_prime(D: FqPoly, P: FqPoly) -> int:
    """chi_D at a monic irreducible P, by Euler's criterion in GF(q)[t]/(P)."""
    r = D % P
    if r.is_zero():
        return 0
    v = powmod(r, (P.norm() - 1) // 2, P)
    if v.is_one():
        return 1
    if v == P.q - 1:
        return -1
    raise ArithmeticError(f"Euler criterion gave {v}; is {P} irreducible?")


def chi(D: FqPoly, f: FqPoly) -> int:
    """chi_D(f) for D monic square-free and f monic, extended multiplicatively."""
    _check_discriminant(D)
    if not f.is_monic():
        raise ValueError(f"f must be monic, got {f}")
    if D.q != f.q:
        raise ValueError("D and f live over different fields")
    value = 1
    for P, e in factor(f):
        c = chi_prime(D, P)
        if c == 0:
            return 0
        if c == -1 and e % 2:
            value = -value
    return value


def coeff_A(D: FqPoly, n: int) -> int:
    """A(n, chi_D): the sum of chi_D(f) over monic f of degree n."""
    _check_discriminant(D)
    if n < 0:
        raise ValueError("n must be >= 0")
    return sum(chi(D, f) for f in enumerate_monic(D.q, n))


def squarefree_block(q: int, n: int, lo: int, hi: int) -> np.ndarray:
    """Rows of the monic block [lo, hi) of degree n that are square-free."""
    block = batch.monic_block(q, n, lo, hi)
    return block[batch.squarefree_mask(block, q)]


@functools.lru_cache(maxsize=32)
def _ensemble(q: int, n: int) -> np.ndarray:
    out = squarefree_block(q, n, 0, q**n)
    out.setflags(write=False)
    return out


def char_sum_over_H(f: FqPoly, n: int) -> int:
    """Sum of chi_D(f) over all D in H_n (monic square-free of degree n)."""
    if not f.is_monic():
        raise ValueError(f"f must be monic, got {f}")
    if n < 0:
        raise ValueError("n must be >= 0")
    block = _ensemble(f.q, n)
    values = np.ones(block.shape[0], dtype=np.int64)
    for P, e in factor(f):
        c = batch.chi_column(block, P)
        values *= c**e if e > 1 else c
    return int(values.sum())


def coprime_squarefree_count(n: int, f: FqPoly) -> int:
    """#{D in H_n : gcd(D, f) = 1}."""
    if not f.is_monic():
        raise ValueError(f"f must be monic, got {f}")
    block = _ensemble(f.q, n)
    keep = np.ones(block.shape[0], dtype=bool)
    for P, _ in factor(f):
        keep &= ~batch.divisible(block, P)
    return int(keep.sum())


def zeta_A(q: int, s: int = 2):
    """zeta_A(s) = 1 / (1 - q^(1-s)) for integer s >= 2, exact."""
    return 1 / (1 - Fraction(q) ** (1 - s))


def coprime_main_term(n: int, f: FqPoly):
    """|D| / zeta_A(2) * prod_{P | f} (1 + |P|^-1)^-1, exact."""
    q = f.q
    v = Fraction(q**n) / zeta_A(q)
    for P, _ in factor(f):
        v /= 1 + Fraction(1, P.norm())
    return v


def squarefree_count(q: int, n: int) -> int:
    """#H_n: q^n - q^(n-1) for n >= 2."""
    field(q)
    if n < 2:
        return q**n
    return q**n - q ** (n - 1)
