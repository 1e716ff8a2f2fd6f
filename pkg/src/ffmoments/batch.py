"""Vectorized kernels over blocks of monic polynomials.

A block is an int64 array of shape (N, n + 1) holding the coefficient
vectors (constant term first, trailing 1) of the monic polynomials of
degree n whose lexicographic indices fall in a contiguous range.  Reducing
a block modulo a fixed polynomial m is a linear map over GF(q), so it is a
single matrix product with the table of t^i mod m.
"""

from __future__ import annotations

import functools
from typing import TYPE_CHECKING

import numpy as np

if TYPE_CHECKING:
    from .poly import FqPoly


def chunk_bounds(total: int, chunks: int) -> list[tuple[int, int]]:
    """Split range(total) into `chunks` contiguous, near-equal pieces."""
    if chunks < 1:
        raise ValueError("chunks must be >= 1")
    base, extra = divmod(total, chunks)
    out, lo = [], 0
    for k in range(chunks):
        hi = lo + base + (1 if k < extra else 0)
        out.append((lo, hi))
        lo = hi
    return out


def monic_block(q: int, n: int, lo: int, hi: int) -> np.ndarray:
    idx = np.arange(lo, hi, dtype=np.int64)
    out = np.empty((hi - lo, n + 1), dtype=np.int64)
    for i in range(n):
        idx, out[:, i] = np.divmod(idx, q)
    out[:, n] = 1
    return out


@functools.lru_cache(maxsize=None)
def _power_residues(modulus: FqPoly, n: int) -> np.ndarray:
    """Matrix R with R[i] = coefficient vector of t^i mod modulus, i <= n."""
    from .poly import FqPoly

    d = modulus.deg
    q = modulus.q
    rows = np.zeros((n + 1, d), dtype=np.int64)
    r = FqPoly((1,), q) % modulus
    t = FqPoly.t(q)
    for i in range(n + 1):
        rows[i, : len(r.coeffs)] = r.coeffs
        r = r * t % modulus
    rows = rows.astype(np.float64)
    rows.setflags(write=False)
    return rows


def _mod(x: np.ndarray, q: int) -> np.ndarray:
    # exact for non-negative integral floats; much faster than np.fmod
    return x - q * np.floor((x + 0.5) * (1.0 / q))


def residues(block: np.ndarray, modulus: FqPoly) -> np.ndarray:
    """Coefficient vectors of every row of `block` reduced mod `modulus`.

    Products run in float64 (BLAS); every intermediate is a small integer,
    far below 2^53, so the result is exact.
    """
    R = _power_residues(modulus, block.shape[1] - 1)
    return _mod(np.asarray(block, dtype=np.float64) @ R, modulus.q)


def encode(res: np.ndarray, q: int) -> np.ndarray:
    weights = q ** np.arange(res.shape[1], dtype=np.float64)
    return (res @ weights).astype(np.int64)


def divisible(block: np.ndarray, p: FqPoly) -> np.ndarray:
    return ~residues(block, p).any(axis=1)


def squarefree_mask(block: np.ndarray, q: int) -> np.ndarray:
    """True on rows that no P^2 divides, P monic irreducible."""
    from .poly import field

    n = block.shape[1] - 1
    ctx = field(q)
    keep = np.ones(block.shape[0], dtype=bool)
    for d in range(1, n // 2 + 1):
        for p in ctx.irreducibles(d):
            keep &= ~divisible(block, p * p)
    return keep


@functools.lru_cache(maxsize=None)
def legendre_table(p: FqPoly) -> np.ndarray:
    """Quadratic character of GF(q)[t]/(p) indexed by encoded residue.

    Entry 0 (the zero residue) is 0, squares of units map to +1, the rest
    to -1.  Built by squaring every unit of the residue field.
    """
    q, d = p.q, p.deg
    units = monic_free_residues(q, d)[1:]
    # r^2 = sum_{i,j} r_i r_j (t^(i+j) mod p)
    R = _power_residues(p, 2 * d - 2)
    pair = R[np.add.outer(np.arange(d), np.arange(d)).ravel()]
    outer = (units[:, :, None] * units[:, None, :]).reshape(units.shape[0], d * d)
    sq = _mod(outer @ pair, q)
    table = np.full(q**d, -1, dtype=np.int8)
    table[0] = 0
    table[encode(sq, q)] = 1
    table.setflags(write=False)
    return table


@functools.lru_cache(maxsize=None)
def monic_free_residues(q: int, d: int) -> np.ndarray:
    """All coefficient vectors of length d in index order (the residues mod a degree-d modulus)."""
    idx = np.arange(q**d, dtype=np.int64)
    out = np.empty((q**d, d), dtype=np.float64)
    for i in range(d):
        idx, r = np.divmod(idx, q)
        out[:, i] = r
    out.setflags(write=False)
    return out


def chi_column(block: np.ndarray, p: FqPoly) -> np.ndarray:
    """chi_D(p) for every row D of the block, as int64 in {-1, 0, 1}."""
    return legendre_table(p)[encode(residues(block, p), p.q)].astype(np.int64)


def coefficient_block(block: np.ndarray, q: int, nmax: int) -> np.ndarray:
    """A(n, chi_D) for n = 0..nmax and every row D of the block.

    Uses the Euler product: sum_f chi_D(f) u^deg f is the product over
    monic irreducibles P of 1 / (1 - chi_D(P) u^deg P), truncated at u^nmax.
    """
    from .poly import field

    ctx = field(q)
    block = np.asarray(block, dtype=np.float64)
    A = np.zeros((block.shape[0], nmax + 1), dtype=np.int64)
    A[:, 0] = 1
    for d in range(1, nmax + 1):
        for p in ctx.irreducibles(d):
            c = chi_column(block, p)
            for n in range(d, nmax + 1):
                A[:, n] += c * A[:, n - d]
    return A
