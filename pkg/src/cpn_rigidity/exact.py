"""Exact arithmetic helpers shared by the certification modules.

Everything here works on :class:`fractions.Fraction` and Python integers;
no floating point is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]


def binom(a: int, b: int) -> int:
    """Binomial coefficient with the convention C(a, b) = 0 when b < 0 or b > a.

    Negative ``a`` is also mapped to 0: it only arises as ``m - 4`` for small
    ``m``, where the corresponding space of forms is empty.
    """
    if b < 0 or a < 0 or b > a:
        return 0
    return math.comb(a, b)


def binomial_row(a: int) -> list[int]:
    """All of C(a, 0), ..., C(a, a) via the multiplicative recurrence."""
    if a < 0:
        return []
    row = [1]
    c = 1
    for b in range(a):
        c = c * (a - b) // (b + 1)
        row.append(c)
    return row


def row_get(row: list[int], b: int) -> int:
    """Index into a binomial row, returning 0 out of range."""
    if b < 0 or b >= len(row):
        return 0
    return row[b]


def fraction_str(q: Rational) -> str:
    """Canonical "num/den" string (integers render without a denominator)."""
    return str(Fraction(q))


def parse_fraction(s: str) -> Fraction:
    return Fraction(s.strip())


def sign(q: Rational) -> int:
    return (q > 0) - (q < 0)


def exact_sqrt(q: Rational) -> Fraction:
    """Square root of a nonnegative rational that is a perfect square.

    Raises ValueError when the root is irrational.
    """
    q = Fraction(q)
    if q < 0:
        raise ValueError(f"negative argument {q}")
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn != q.numerator or rd * rd != q.denominator:
        raise ValueError(f"{q} is not the square of a rational")
    return Fraction(rn, rd)


@dataclass(frozen=True)
class PiScaled:
    """The monomial ``coeff * pi**pi_power`` with an exact rational coefficient.

    Sums are only defined between equal powers of pi; products add powers.
    A zero coefficient is treated as compatible with any power.
    """

    coeff: Fraction
    pi_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", Fraction(self.coeff))
        if not isinstance(self.pi_power, int):
            raise TypeError("pi_power must be an integer")

    @classmethod
    def coerce(cls, other) -> "PiScaled":
        if isinstance(other, PiScaled):
            return other
        if isinstance(other, (int, Fraction)):
            return cls(Fraction(other), 0)
        raise TypeError(f"cannot interpret {other!r} as a pi-graded value")

    def _align(self, other: "PiScaled") -> int:
        if self.coeff == 0:
            return other.pi_power
        if other.coeff == 0 or self.pi_power == other.pi_power:
            return self.pi_power
        raise ValueError(
            f"pi-grading mismatch: pi^{self.pi_power} vs pi^{other.pi_power}"
        )

    def __add__(self, other):
        other = PiScaled.coerce(other)
        return PiScaled(self.coeff + other.coeff, self._align(other))

    __radd__ = __add__

    def __neg__(self):
        return PiScaled(-self.coeff, self.pi_power)

    def __sub__(self, other):
        return self + (-PiScaled.coerce(other))

    def __rsub__(self, other):
        return PiScaled.coerce(other) - self

    def __mul__(self, other):
        other = PiScaled.coerce(other)
        return PiScaled(self.coeff * other.coeff, self.pi_power + other.pi_power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = PiScaled.coerce(other)
        if other.coeff == 0:
            raise ZeroDivisionError("division by zero pi-graded value")
        return PiScaled(self.coeff / other.coeff, self.pi_power - other.pi_power)

    def __rtruediv__(self, other):
        return PiScaled.coerce(other) / self

    def __pow__(self, k: int):
        return PiScaled(self.coeff**k, self.pi_power * k)

    def __eq__(self, other):
        try:
            other = PiScaled.coerce(other)
        except TypeError:
            return NotImplemented
        if self.coeff == 0 and other.coeff == 0:
            return True
        return self.coeff == other.coeff and self.pi_power == other.pi_power

    def __hash__(self):
        if self.coeff == 0:
            return hash(Fraction(0))
        return hash((self.coeff, self.pi_power))

    @property
    def is_rational(self) -> bool:
        return self.coeff == 0 or self.pi_power == 0

    def rational(self) -> Fraction:
        """The value as a Fraction; only valid when pi has cancelled."""
        if not self.is_rational:
            raise ValueError(f"{self} still carries pi^{self.pi_power}")
        return self.coeff

    def sqrt(self) -> "PiScaled":
        if self.pi_power % 2:
            raise ValueError(f"odd power of pi in {self}")
        return PiScaled(exact_sqrt(self.coeff), self.pi_power // 2)

    def __float__(self):
        return float(self.coeff) * math.pi**self.pi_power

    def __str__(self):
        return f"{self.coeff} * pi^{self.pi_power}"

    @classmethod
    def parse(cls, s: str) -> "PiScaled":
        """Inverse of ``str``: accepts "q * pi^k" or a bare fraction."""
        if "pi" not in s:
            return cls(Fraction(s.strip()), 0)
        q, _, k = s.partition("*")
        k = k.strip()
        if not k.startswith("pi^"):
            raise ValueError(f"malformed pi-graded value {s!r}")
        return cls(Fraction(q.strip()), int(k[3:]))


PI = PiScaled(Fraction(1), 1)
