"""Exact numbers a + b * q^(-1/2) with rational a, b."""

from __future__ import annotations

import decimal
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Mapping

_DEC = decimal.Context(prec=60)


@dataclass(frozen=True)
class QuadValue:
    q: int
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))

    @classmethod
    def half_power(cls, q: int, n: int) -> QuadValue:
        """q^(-n/2) for any integer n."""
        if n % 2 == 0:
            return cls(q, Fraction(q) ** (-n // 2))
        return cls(q, 0, Fraction(q) ** (-(n - 1) // 2))

    @classmethod
    def from_half_powers(cls, q: int, terms: Mapping[int, Rational]) -> QuadValue:
        """sum of c_n q^(-n/2) over n >= 0, accumulated over a common denominator."""
        if not terms:
            return cls(q)
        top = max(terms) // 2 + 1
        a_num = b_num = 0
        for n, c in terms.items():
            if n < 0:
                raise ValueError("exponents must be >= 0")
            if n % 2 == 0:
                a_num += c * q ** (top - n // 2)
            else:
                b_num += c * q ** (top - (n - 1) // 2)
        den = q**top
        return cls(q, Fraction(a_num) / den, Fraction(b_num) / den)

    def _check(self, other: QuadValue):
        if other.q != self.q:
            raise ValueError(f"mixed fields Q(sqrt {self.q}) and Q(sqrt {other.q})")

    def __add__(self, other):
        if isinstance(other, QuadValue):
            self._check(other)
            return QuadValue(self.q, self.a + other.a, self.b + other.b)
        if isinstance(other, (int, Fraction)):
            return QuadValue(self.q, self.a + other, self.b)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return QuadValue(self.q, -self.a, -self.b)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, QuadValue):
            self._check(other)
            a, b, c, d = self.a, self.b, other.a, other.b
            return QuadValue(self.q, a * c + b * d / self.q, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return QuadValue(self.q, self.a * other, self.b * other)
        return NotImplemented

    __rmul__ = __mul__

    def conjugate(self) -> QuadValue:
        return QuadValue(self.q, self.a, -self.b)

    def field_norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b / self.q

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return QuadValue(self.q, self.a / other, self.b / other)
        if isinstance(other, QuadValue):
            self._check(other)
            n = other.field_norm()
            if n == 0:
                raise ZeroDivisionError("division by zero in Q(sqrt q)")
            return self * other.conjugate() / n
        return NotImplemented

    def __rtruediv__(self, other):
        return QuadValue(self.q, other) / self

    def __pow__(self, e: int):
        if e < 0:
            return QuadValue(self.q, 1) / self ** (-e)
        out = QuadValue(self.q, 1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, QuadValue):
            return self.q == other.q and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.q, self.a, self.b))

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def to_decimal(self) -> decimal.Decimal:
        a = _DEC.divide(decimal.Decimal(self.a.numerator), decimal.Decimal(self.a.denominator))
        b = _DEC.divide(decimal.Decimal(self.b.numerator), decimal.Decimal(self.b.denominator))
        return _DEC.add(a, _DEC.divide(b, _DEC.sqrt(decimal.Decimal(self.q))))

    def __float__(self):
        # 60-digit intermediate keeps the result correctly rounded even under cancellation
        return float(self.to_decimal())

    def __repr__(self):
        return f"QuadValue(q={self.q}, a={self.a}, b={self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        return f"{self.a} + {self.b}*{self.q}^(-1/2)"
