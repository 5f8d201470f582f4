"""Exact heat-invariant coefficients of the Hodge Laplacian on p-forms.

The three curvature weights of the second heat invariant are linear in the
binomials ``C(m, p)``, ``C(m-2, p-1)``, ``C(m-4, p-2)``.  We keep them as
integer numerators over the common denominator 360 so that large sweeps
never touch rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError
from .exact import binom

# 360 * lambda_i expressed in the binomial basis (C(m,p), C(m-2,p-1), C(m-4,p-2)).
LAMBDA_NUMERATORS = (
    (2, -30, 180),
    (-2, 180, -720),
    (5, -60, 180),
)
LAMBDA_DENOMINATOR = 360


def _check_mp(m, p):
    if not isinstance(m, int) or not isinstance(p, int):
        raise DomainError("m and p must be integers")
    if m < 4 or m % 2:
        raise DomainError(f"m must be an even integer >= 4, got {m}")
    if not 0 <= p <= m:
        raise DomainError(f"p must lie in [0, {m}], got {p}")


def _check_key_domain(n, p):
    if not isinstance(n, int) or not isinstance(p, int):
        raise DomainError("n and p must be integers")
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    if p % 2 or not 2 <= p <= 2 * (n - 1):
        raise DomainError(f"p must be even with 2 <= p <= {2 * (n - 1)}, got {p}")


def binomial_basis(m: int, p: int) -> tuple[int, int, int]:
    return binom(m, p), binom(m - 2, p - 1), binom(m - 4, p - 2)


def scaled_lambdas(c0: int, c1: int, c2: int) -> tuple[int, int, int]:
    """``360 * (lambda1, lambda2, lambda3)`` from the three binomials."""
    return tuple(a * c0 + b * c1 + c * c2 for a, b, c in LAMBDA_NUMERATORS)


def scaled_key_combination(n: int, l1: int, l2: int, l3: int) -> int:
    """The key combination times ``720 (n+1)(n+2)``, given scaled lambdas.

    A positive multiple, so its sign is the sign of the combination itself.
    """
    q = (n + 1) * (n + 2)
    return 2 * (4 * n + 2) * l1 + q * l2 + 2 * q * l3


@dataclass(frozen=True)
class PatodiTriple:
    m: int
    p: int
    lambda1: Fraction
    lambda2: Fraction
    lambda3: Fraction

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.lambda1, self.lambda2, self.lambda3)


def lambdas_unchecked(m: int, p: int) -> tuple[Fraction, Fraction, Fraction]:
    """Curvature weights for any dimension ``m >= 1``.

    The formula itself is valid in every dimension; only the Kähler and
    decomposition machinery needs ``m >= 4``.  Used for low-dimensional
    heat-trace targets such as the round 2-sphere.
    """
    if m < 1 or not 0 <= p <= m:
        raise DomainError(f"need m >= 1 and 0 <= p <= m, got m={m}, p={p}")
    scaled = scaled_lambdas(*binomial_basis(m, p))
    return tuple(Fraction(x, LAMBDA_DENOMINATOR) for x in scaled)


def patodi_lambdas(m: int, p: int) -> PatodiTriple:
    _check_mp(m, p)
    return PatodiTriple(m, p, *lambdas_unchecked(m, p))


def a0_coefficient(m: int, p: int) -> Fraction:
    return Fraction(binom(m, p))


def a1_coefficient(m: int, p: int, *, check_factored: bool = True) -> Fraction:
    """Coefficient of the total scalar curvature in the first heat invariant.

    With ``check_factored`` the value is also computed from
    ``(m-2)!/(p!(m-p)!) * (p^2 - m p + m(m-1)/6)`` and the two must agree.
    """
    _check_mp(m, p)
    return _a1(m, p, check_factored)


def _a1(m, p, check_factored=True):
    value = Fraction(binom(m, p), 6) - binom(m - 2, p - 1)
    if check_factored:
        factored = a1_factored(m, p)
        if factored != value:
            raise ArithmeticError(
                f"a1 forms disagree at (m, p)=({m}, {p}): {value} vs {factored}"
            )
    return value


def a1_factored(m: int, p: int) -> Fraction:
    prefactor = Fraction(
        math.factorial(m - 2), math.factorial(p) * math.factorial(m - p)
    )
    return prefactor * (p * p - m * p + Fraction(m * (m - 1), 6))


@dataclass(frozen=True)
class HeatCoefficientReport:
    """Exact coefficients attached to the first three heat invariants at ``(m, p)``.

    ``kahler_*`` are the weights of ``s^2``, ``|traceless Ric(omega)|^2`` and
    ``|B|^2`` once the second invariant is rewritten for a Kähler metric
    (``m = 2n``).  ``key_combination`` is None when ``p`` is outside the even
    range ``[2, m-2]``.
    """

    n: int
    p: int
    lambdas: PatodiTriple
    a0_coeff: Fraction
    a1_coeff: Fraction
    kahler_s2: Fraction
    kahler_ric: Fraction
    kahler_bochner: Fraction
    key_combination: Optional[Fraction]


def kahler_weights(n: int) -> tuple[tuple[Fraction, ...], ...]:
    """Rows giving the Kähler weights as linear forms in (lambda1, lambda2, lambda3)."""
    return (
        (Fraction(2, n * (n + 1)), Fraction(1, 2 * n), Fraction(1)),
        (Fraction(16, n + 2), Fraction(2), Fraction(0)),
        (Fraction(4), Fraction(0), Fraction(0)),
    )


def key_weights(n: int) -> tuple[Fraction, Fraction, Fraction]:
    return (Fraction(4 * n + 2, (n + 1) * (n + 2)), Fraction(1, 2), Fraction(1))


def _dot(row, vec):
    return sum((a * b for a, b in zip(row, vec)), Fraction(0))


def kahler_a2_coefficients(n: int, p: int) -> HeatCoefficientReport:
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    m = 2 * n
    triple = patodi_lambdas(m, p)
    lam = triple.as_tuple()
    s2, ric, boch = (_dot(row, lam) for row in kahler_weights(n))
    key = None
    if p % 2 == 0 and 2 <= p <= m - 2:
        key = _dot(key_weights(n), lam)
    return HeatCoefficientReport(
        n=n,
        p=p,
        lambdas=triple,
        a0_coeff=a0_coefficient(m, p),
        a1_coeff=_a1(m, p),
        kahler_s2=s2,
        kahler_ric=ric,
        kahler_bochner=boch,
        key_combination=key,
    )


def key_combination(n: int, p: int) -> Fraction:
    _check_key_domain(n, p)
    l1, l2, l3 = scaled_lambdas(*binomial_basis(2 * n, p))
    return Fraction(scaled_key_combination(n, l1, l2, l3), 720 * (n + 1) * (n + 2))


def key_closed_form_coefficients(m: int) -> tuple[Fraction, Fraction, Fraction]:
    """The binomial-basis weights of the key combination when ``m = 2n``."""
    d = (m + 2) * (m + 4)
    return (
        Fraction(m * m + 10 * m + 12, 90 * d),
        Fraction(m * (m - 2), 12 * d),
        Fraction(-m * (m - 2), 2 * d),
    )


def key_closed_form(n: int, p: int) -> Fraction:
    m = 2 * n
    return _dot(key_closed_form_coefficients(m), binomial_basis(m, p))


@dataclass(frozen=True)
class Counterexample:
    n: int
    coefficient: str
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class IdentityCertificate:
    n: int
    ok: bool
    checks: int
    counterexample: Optional[Counterexample] = None

    def __bool__(self):
        return self.ok


def verify_key_combination_identity(n: int) -> IdentityCertificate:
    """Re-derive the key combination from the two integral relations at fixed ``n``.

    Checks, column by column in (lambda1, lambda2, lambda3):

    * solving the Chern-number relation for the traceless Ricci integral gives
      the factor ``(n-1)/(4n)`` on ``int(s^2 - s0^2)``;
    * adding that multiple of the Ricci weights to the ``s^2`` weights gives
      the key weights;
    * in the binomial basis the key weights match the closed form, and the
      two agree pointwise at every even ``p`` in ``[2, 2n-2]``.
    """
    if not isinstance(n, int) or n < 2:
        raise DomainError(f"n must be an integer >= 2, got {n}")
    checks = 0

    def fail(label, lhs, rhs):
        return IdentityCertificate(n, False, checks, Counterexample(n, label, lhs, rhs))

    # (1/(n(n-1))) * ((n-1)/(4n) S - T) = s0^2/(4n^2) V, with S0 = s0^2 V.
    # Solving for T: T = (n-1)/(4n) S - n(n-1)/(4n^2) S0.
    factor = Fraction(n - 1, 4 * n)
    derived = (Fraction(n - 1, 4 * n), -Fraction(n * (n - 1), 4 * n * n))
    for label, lhs, rhs in (
        ("ric-factor[S]", derived[0], factor),
        ("ric-factor[S0]", derived[1], -factor),
    ):
        checks += 1
        if lhs != rhs:
            return fail(label, lhs, rhs)

    s_row, ric_row, _ = kahler_weights(n)
    target = key_weights(n)
    for i in range(3):
        checks += 1
        lhs = s_row[i] + factor * ric_row[i]
        if lhs != target[i]:
            return fail(f"lambda{i + 1}", lhs, target[i])

    # Binomial basis: sum_i key_i * (row of 360*lambda_i) / 360.
    closed = key_closed_form_coefficients(2 * n)
    for j, label in enumerate(("C(m,p)", "C(m-2,p-1)", "C(m-4,p-2)")):
        checks += 1
        lhs = sum(
            (target[i] * LAMBDA_NUMERATORS[i][j] for i in range(3)), Fraction(0)
        ) / LAMBDA_DENOMINATOR
        if lhs != closed[j]:
            return fail(label, lhs, closed[j])

    for p in range(2, 2 * n - 1, 2):
        checks += 1
        lhs, rhs = key_combination(n, p), key_closed_form(n, p)
        if lhs != rhs:
            return fail(f"p={p}", lhs, rhs)
    return IdentityCertificate(n, True, checks)
