"""Polynomials over a prime field GF(q), q an odd prime.

A polynomial c_0 + c_1 t + ... + c_n t^n is stored as the tuple
(c_0, ..., c_n) of residues in [0, q), leading coefficient nonzero;
the zero polynomial is the empty tuple and its degree is ``None``.

Monic polynomials of degree n are numbered 0 .. q^n - 1 by reading the
non-leading coefficients as base-q digits, constant term least
significant.  Every enumeration in the package follows that order.
"""

from __future__ import annotations

import functools
from collections import Counter
from typing import Iterator, Sequence

import numpy as np

from . import batch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class FqPoly:
    """Immutable polynomial over GF(q)."""

    __slots__ = ("q", "coeffs")

    def __init__(self, coeffs: Sequence[int], q: int):
        c = [int(x) % q for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "coeffs", tuple(c))

    def __setattr__(self, name, value):
        raise AttributeError("FqPoly is immutable")

    @classmethod
    def _raw(cls, coeffs: tuple, q: int) -> FqPoly:
        # coeffs already reduced and stripped
        obj = object.__new__(cls)
        object.__setattr__(obj, "q", q)
        object.__setattr__(obj, "coeffs", coeffs)
        return obj

    @classmethod
    def from_index(cls, q: int, n: int, index: int) -> FqPoly:
        """Monic polynomial of degree n with the given lexicographic index."""
        if not 0 <= index < q**n:
            raise ValueError(f"index {index} out of range for degree {n}")
        c = []
        for _ in range(n):
            index, r = divmod(index, q)
            c.append(r)
        c.append(1)
        return cls._raw(tuple(c), q)

    @classmethod
    def t(cls, q: int) -> FqPoly:
        return cls._raw((0, 1), q)

    @property
    def deg(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lead(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    @property
    def index(self) -> int:
        """Lexicographic index among monic polynomials of the same degree."""
        if not self.is_monic():
            raise ValueError("index is defined for monic polynomials only")
        v = 0
        for c in reversed(self.coeffs[:-1]):
            v = v * self.q + c
        return v

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def norm(self) -> int:
        """|f| = q^deg f, and |0| = 0."""
        return 0 if not self.coeffs else self.q ** (len(self.coeffs) - 1)

    def _coerce(self, other) -> FqPoly:
        if isinstance(other, FqPoly):
            if other.q != self.q:
                raise ValueError(f"mixed moduli {self.q} and {other.q}")
            return other
        if isinstance(other, int):
            return FqPoly((other,), self.q)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        c = list(a)
        for i, x in enumerate(b):
            c[i] = (c[i] + x) % self.q
        return FqPoly(c, self.q)

    __radd__ = __add__

    def __neg__(self):
        return FqPoly._raw(tuple((-x) % self.q for x in self.coeffs), self.q)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, q = self.coeffs, other.coeffs, self.q
        if not a or not b:
            return FqPoly._raw((), q)
        c = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        return FqPoly._raw(tuple(v % q for v in c), q)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        result = FqPoly._raw((1,), self.q)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __divmod__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        q = self.q
        r = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv = pow(b[-1], -1, q)
        if len(r) - 1 < db:
            return FqPoly._raw((), q), self
        quo = [0] * (len(r) - db)
        for k in range(len(r) - 1 - db, -1, -1):
            c = r[k + db] * inv % q
            quo[k] = c
            if c:
                for j in range(db + 1):
                    r[k + j] = (r[k + j] - c * b[j]) % q
        return FqPoly(quo, q), FqPoly(r[:db], q)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __eq__(self, other):
        if isinstance(other, FqPoly):
            return self.q == other.q and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == FqPoly((other,), self.q).coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.coeffs))

    def __lt__(self, other: FqPoly):
        # degree first, then lexicographic index; matches enumeration order
        return (len(self.coeffs), self.coeffs[::-1]) < (len(other.coeffs), other.coeffs[::-1])

    def __call__(self, x: int) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = (v * x + c) % self.q
        return v

    def derivative(self) -> FqPoly:
        return FqPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.q)

    def monic(self) -> FqPoly:
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic associate")
        inv = pow(self.lead, -1, self.q)
        return FqPoly._raw(tuple(c * inv % self.q for c in self.coeffs), self.q)

    def __repr__(self):
        return f"FqPoly({list(self.coeffs)}, q={self.q})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}{mono}")
        return " + ".join(parts)


def gcd(a: FqPoly, b: FqPoly) -> FqPoly:
    """Monic gcd; gcd(0, 0) is 0."""
    while not b.is_zero():
        a, b = b, a % b
    return a if a.is_zero() else a.monic()


def powmod(a: FqPoly, e: int, m: FqPoly) -> FqPoly:
    result = FqPoly._raw((1,), a.q) % m
    base = a % m
    while e:
        if e & 1:
            result = result * base % m
        e >>= 1
        if e:
            base = base * base % m
    return result


class FieldCtx:
    """GF(q) for an odd prime q, with the read-only caches built on it.

    Obtain instances through :func:`field` so caches are shared.
    """

    def __init__(self, q: int):
        if not isinstance(q, int) or q < 3 or not is_prime(q):
            raise ValueError(f"q must be an odd prime, got {q!r}")
        self.q = q
        self._irreducibles: dict[int, list[FqPoly]] = {}

    def __repr__(self):
        return f"FieldCtx(q={self.q})"

    def poly(self, coeffs: Sequence[int]) -> FqPoly:
        return FqPoly(coeffs, self.q)

    @property
    def one(self) -> FqPoly:
        return FqPoly._raw((1,), self.q)

    @property
    def t(self) -> FqPoly:
        return FqPoly.t(self.q)

    def irreducibles(self, d: int) -> list[FqPoly]:
        """Monic irreducibles of degree d, in enumeration order."""
        if d < 1:
            raise ValueError("degree must be >= 1")
        if d not in self._irreducibles:
            for k in range(1, d):
                self.irreducibles(k)
            divisors = [p for k in range(1, d // 2 + 1) for p in self._irreducibles[k]]
            mask = np.ones(self.q**d, dtype=bool)
            for lo, hi in batch.chunk_bounds(self.q**d, max(1, self.q**d // 200_000)):
                block = batch.monic_block(self.q, d, lo, hi)
                keep = np.ones(hi - lo, dtype=bool)
                for p in divisors:
                    keep &= ~batch.divisible(block, p)
                mask[lo:hi] = keep
            self._irreducibles[d] = [FqPoly.from_index(self.q, d, int(i)) for i in np.flatnonzero(mask)]
        return self._irreducibles[d]


@functools.cache
def field(q: int) -> FieldCtx:
    return FieldCtx(q)


def necklace_count(q: int, n: int) -> int:
    """Number of monic irreducibles of degree n over GF(q)."""
    total = 0
    for d in range(1, n + 1):
        if n % d == 0:
            total += moebius_int(d) * q ** (n // d)
    return total // n


def moebius_int(n: int) -> int:
    mu, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            mu = -mu
        p += 1
    return -mu if n > 1 else mu


def _check_monic(f: FqPoly):
    if not f.is_monic():
        raise ValueError(f"expected a monic polynomial, got {f}")


def is_squarefree(f: FqPoly) -> bool:
    if f.is_zero():
        raise ValueError("square-freeness of the zero polynomial is undefined")
    if f.deg == 0:
        return True
    df = f.derivative()
    if df.is_zero():
        # f is a p-th power of a non-constant polynomial
        return False
    return gcd(f, df).is_one()


@functools.lru_cache(maxsize=None)
def factor(f: FqPoly) -> tuple[tuple[FqPoly, int], ...]:
    """Factor a monic polynomial into monic irreducibles with multiplicities.

    Trial division by the cached irreducibles of degree <= deg(f)/2; any
    cofactor left over is itself irreducible.
    """
    _check_monic(f)
    ctx = field(f.q)
    out: list[tuple[FqPoly, int]] = []
    rest = f
    d = 1
    while rest.deg >= 2 * d:
        for p in ctx.irreducibles(d):
            if rest.deg < 2 * d:
                break
            e = 0
            while True:
                quo, rem = divmod(rest, p)
                if not rem.is_zero():
                    break
                rest = quo
                e += 1
            if e:
                out.append((p, e))
        d += 1
    if rest.deg > 0:
        for i, (p, e) in enumerate(out):
            if p == rest:
                out[i] = (p, e + 1)
                break
        else:
            out.append((rest, 1))
    out.sort(key=lambda pe: (pe[0].deg, pe[0].index))
    return tuple(out)


def moebius(f: FqPoly) -> int:
    fac = factor(f)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def radical_primes(f: FqPoly) -> list[FqPoly]:
    return [p for p, _ in factor(f)]


def poly_sqrt(f: FqPoly) -> FqPoly | None:
    """Monic square root of a monic polynomial, or None if f is not a square."""
    _check_monic(f)
    n = f.deg
    if n % 2:
        return None
    q, k = f.q, n // 2
    inv2 = pow(2, -1, q)
    h = [0] * (k + 1)
    h[k] = 1
    fc = f.coeffs
    for i in range(k - 1, -1, -1):
        # coefficient of t^(k+i) in h^2 is 2 h_i h_k + sum over j+l = k+i with i < j, l < k
        s = sum(h[j] * h[k + i - j] for j in range(i + 1, k))
        h[i] = (fc[k + i] - s) * inv2 % q
    root = FqPoly(h, q)
    return root if root * root == f else None


def enumerate_monic(q: int, n: int, chunk: int = 0, chunks: int = 1) -> Iterator[FqPoly]:
    """Monic polynomials of degree n in lexicographic order.

    With ``chunks > 1`` only the ``chunk``-th of that many contiguous
    slices of the order is produced.
    """
    field(q)
    if n < 0:
        raise ValueError("degree must be >= 0")
    lo, hi = batch.chunk_bounds(q**n, chunks)[chunk]
    for i in range(lo, hi):
        yield FqPoly.from_index(q, n, i)


def enumerate_squarefree(q: int, n: int, chunk: int = 0, chunks: int = 1) -> Iterator[FqPoly]:
    for f in enumerate_monic(q, n, chunk, chunks):
        if is_squarefree(f):
            yield f


def irreducibles_up_to(q: int, N: int) -> dict[int, list[FqPoly]]:
    if N < 1:
        raise ValueError("N must be >= 1")
    ctx = field(q)
    return {d: ctx.irreducibles(d) for d in range(1, N + 1)}


def merge_factorizations(*facs) -> tuple[tuple[FqPoly, int], ...]:
    c: Counter = Counter()
    for fac in facs:
        for p, e in fac:
            c[p] += e
    return tuple(sorted(c.items(), key=lambda pe: (pe[0].deg, pe[0].index)))
