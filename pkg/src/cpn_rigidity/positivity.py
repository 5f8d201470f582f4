"""Exact certification of the sign claims on the heat-invariant weights.

A linear combination ``alpha C(m,p) + beta C(m-2,p-1) + gamma C(m-4,p-2)``
equals ``(m-4)!/(p!(m-p)!) * f(p, m)`` with ``f`` a quartic in ``p``.  This
module evaluates ``f``, checks the critical-point algebra of its
``p``-dependent part ``g``, verifies the closed-form factorizations, and
certifies the two sign statements by exhaustive exact evaluation at integer
``p``.

Irrational critical points never appear explicitly: every identity that
involves them is checked by substituting the quadratic relation they satisfy.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import CertificationError, DomainError
from .exact import binomial_row, row_get, sign
from .heat_coefficients import scaled_key_combination, scaled_lambdas

REPORT_VERSION = 1


@dataclass(frozen=True)
class CombinationCoefficients:
    alpha: Fraction
    beta: Fraction
    gamma: Fraction

    @classmethod
    def of(cls, alpha, beta, gamma):
        return cls(Fraction(alpha), Fraction(beta), Fraction(gamma))


def key_coefficients(m: int) -> CombinationCoefficients:
    """Weights of the key combination ("case 1") at ``m = 2n``."""
    d = (m + 2) * (m + 4)
    return CombinationCoefficients(
        Fraction(m * m + 10 * m + 12, 90 * d),
        Fraction(m * (m - 2), 12 * d),
        Fraction(-m * (m - 2), 2 * d),
    )


# lambda1 ("case 2"); the middle weight is -1/12, as in lambda1's definition.
LAMBDA1_COEFFICIENTS = CombinationCoefficients.of(Fraction(1, 180), Fraction(-1, 12), Fraction(1, 2))

# (p, m) with lambda1 = 0 among even m >= 4 and even p in [2, m-2].
LAMBDA1_ZERO_SET = [(2, 16), (14, 16)]


def _check_m(m):
    if not isinstance(m, int) or m < 4 or m % 2:
        raise DomainError(f"m must be an even integer >= 4, got {m}")


def g_value(p, m: int, beta: Fraction, gamma: Fraction) -> Fraction:
    """The ``p``-dependent part of ``f``; ``p`` may be any rational."""
    return beta * (m - 2) * (m - 3) * p * (m - p) + gamma * p * (p - 1) * (m - p) * (m - p - 1)


def h_value(p, m: int, beta: Fraction, gamma: Fraction) -> Fraction:
    """``g'(p) = (2p - m) h(p)``."""
    return 2 * gamma * p * p - 2 * gamma * m * p + gamma * (m - 1) - beta * (m - 2) * (m - 3)


def _f(p, m, c: CombinationCoefficients) -> Fraction:
    return c.alpha * m * (m - 1) * (m - 2) * (m - 3) + g_value(p, m, c.beta, c.gamma)


def eval_f(p: int, m: int, coeffs: CombinationCoefficients, *, check_binomial: bool = True) -> Fraction:
    """Evaluate the quartic ``f(p, m)`` exactly.

    With ``check_binomial`` the binomial form is evaluated too, and
    ``(m-4)!/(p!(m-p)!) * f`` must equal it.
    """
    _check_m(m)
    if not isinstance(p, int) or not 2 <= p <= m - 2:
        raise DomainError(f"p must be an integer in [2, {m - 2}], got {p}")
    value = _f(p, m, coeffs)
    if check_binomial:
        scale = Fraction(math.factorial(m - 4), math.factorial(p) * math.factorial(m - p))
        binomial = (
            coeffs.alpha * math.comb(m, p)
            + coeffs.beta * math.comb(m - 2, p - 1)
            + coeffs.gamma * math.comb(m - 4, p - 2)
        )
        if scale * value != binomial:
            raise ArithmeticError(f"polynomial and binomial forms disagree at (p, m)=({p}, {m})")
    return value


@dataclass(frozen=True)
class CriticalPointAnalysis:
    """Critical-point data of ``g`` on the real interval ``[2, m-2]``.

    ``p23_discriminant`` is ``D`` in ``p_{2,3} = m/2 +- sqrt(D)``.  Fields that
    depend on ``p_{2,3}`` are None when ``gamma == 0``.
    """

    m: int
    p1: Fraction
    g_second_at_p1: Fraction
    p23_discriminant: Optional[Fraction]
    p23_real: Optional[bool]
    g_second_at_p23: Optional[Fraction]
    g_second_sign_at_p23: Optional[int]
    g_at_p23: Optional[Fraction]
    p23_in_range: Optional[bool]
    gamma_zero: bool


def analyze_critical_points(m: int, coeffs: CombinationCoefficients) -> CriticalPointAnalysis:
    _check_m(m)
    b, c = coeffs.beta, coeffs.gamma
    p1 = Fraction(m, 2)
    g2_p1 = (-2 * b - c) * m * m + (10 * b + 2 * c) * m + (-12 * b - 2 * c)
    # g'' = 2h + 2 gamma (2p - m)^2, so g''(m/2) = 2 h(m/2)
    if g2_p1 != 2 * h_value(p1, m, b, c):
        raise ArithmeticError(f"g''(m/2) formula disagrees with 2h(m/2) at m={m}")
    if c == 0:
        return CriticalPointAnalysis(m, p1, g2_p1, None, None, None, None, None, None, True)

    # h(p) = 0  <=>  p^2 - m p = u
    u = b / (2 * c) * (m - 2) * (m - 3) - Fraction(m - 1, 2)
    disc = Fraction(m * m, 4) + u
    # (2p - m)^2 = 4 (p^2 - m p) + m^2 = 4 D at p = p_{2,3}
    g2_p23 = 2 * c * 4 * disc
    # g = (p^2 - m p)(gamma (p^2 - m p) + gamma (m-1) - beta (m-2)(m-3)), substituted
    g_sub = u * (c * u + c * (m - 1) - b * (m - 2) * (m - 3))
    g_closed = -(b * (m - 2) * (m - 3) - c * (m - 1)) ** 2 / (4 * c)
    if g_sub != g_closed:
        raise ArithmeticError(f"g(p_23) closed form disagrees at m={m}")
    real = disc >= 0
    half_gap = Fraction(m, 2) - 2
    # p_2 = m/2 - sqrt(D) >= 2  <=>  D <= (m/2 - 2)^2 ; p_3 is the mirror image
    in_range = real and half_gap >= 0 and disc <= half_gap * half_gap
    return CriticalPointAnalysis(
        m=m,
        p1=p1,
        g_second_at_p1=g2_p1,
        p23_discriminant=disc,
        p23_real=real,
        g_second_at_p23=g2_p23 if real else None,
        g_second_sign_at_p23=sign(g2_p23) if real else None,
        g_at_p23=g_closed,
        p23_in_range=in_range,
        gamma_zero=False,
    )


@dataclass(frozen=True)
class ClosedFormFailure:
    m: int
    identity: str
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class ClosedFormCertificate:
    m: int
    ok: bool
    failure: Optional[ClosedFormFailure] = None

    def __bool__(self):
        return self.ok


def closed_form_identities(m: int) -> list[tuple[str, Fraction, Fraction]]:
    """The four factorization identities at ``m`` as (name, evaluated, closed form)."""
    k = key_coefficients(m)
    l1 = LAMBDA1_COEFFICIENTS
    d = (m + 2) * (m + 4)
    out = [
        (
            "key f(m/2)",
            _f(Fraction(m, 2), m, k),
            Fraction(m * (m - 2), 1440 * d) * (m**4 + 126 * m**3 - 400 * m**2 - 288 * m + 576),
        ),
        (
            "key f(2)",
            _f(2, m, k),
            Fraction(m * (m - 2) * (m - 3), 90 * d) * (m**3 + 24 * m**2 - 148 * m + 228),
        ),
        (
            "lambda1 f(2)",
            _f(2, m, l1),
            Fraction((m - 2) * (m - 3) * (m - 15) * (m - 16), 180),
        ),
    ]
    u = l1.beta / (2 * l1.gamma) * (m - 2) * (m - 3) - Fraction(m - 1, 2)
    g23 = u * (l1.gamma * u + l1.gamma * (m - 1) - l1.beta * (m - 2) * (m - 3))
    out.append(
        (
            "lambda1 f(p23)",
            l1.alpha * m * (m - 1) * (m - 2) * (m - 3) + g23,
            Fraction(m, 1440) * (3 * m**3 - 58 * m**2 + 83 * m - 48),
        )
    )
    return out


def verify_closed_forms(m: int) -> ClosedFormCertificate:
    _check_m(m)
    for name, lhs, rhs in closed_form_identities(m):
        if lhs != rhs:
            return ClosedFormCertificate(m, False, ClosedFormFailure(m, name, lhs, rhs))
    return ClosedFormCertificate(m, True)


@dataclass
class PositivityCertificate:
    """Outcome of an exhaustive sweep over even ``m`` and even ``p`` in ``[2, m-2]``.

    Only exceptional records are kept: zeros of lambda1 or of the key
    combination, and negatives of either.  Merging two certificates over
    disjoint ranges is associative.
    """

    m_min: int
    m_max: int
    pairs_checked: int = 0
    lambda1_zeros: list[tuple[int, int]] = field(default_factory=list)
    key_zeros: list[tuple[int, int]] = field(default_factory=list)
    lambda1_negative: list[tuple[int, int]] = field(default_factory=list)
    key_negative: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.key_zeros or self.lambda1_negative or self.key_negative)

    def merge(self, other: "PositivityCertificate") -> "PositivityCertificate":
        return PositivityCertificate(
            min(self.m_min, other.m_min),
            max(self.m_max, other.m_max),
            self.pairs_checked + other.pairs_checked,
            sorted(self.lambda1_zeros + other.lambda1_zeros, key=_pm_key),
            sorted(self.key_zeros + other.key_zeros, key=_pm_key),
            sorted(self.lambda1_negative + other.lambda1_negative, key=_pm_key),
            sorted(self.key_negative + other.key_negative, key=_pm_key),
        )

    def to_report(self) -> dict:
        records = []
        for kind, items in (
            ("lambda1_zero", self.lambda1_zeros),
            ("key_zero", self.key_zeros),
            ("lambda1_negative", self.lambda1_negative),
            ("key_negative", self.key_negative),
        ):
            records += [{"kind": kind, "p": p, "m": m} for p, m in items]
        return {
            "version": REPORT_VERSION,
            "m_min": self.m_min,
            "m_max": self.m_max,
            "pairs_checked": self.pairs_checked,
            "ok": self.ok,
            "records": records,
        }


def _pm_key(pm):
    return (pm[1], pm[0])


def sweep_m(m: int) -> PositivityCertificate:
    """Sign of lambda1 and of the key combination at every even ``p`` in ``[2, m-2]``.

    Both are evaluated from integer binomials after clearing positive
    denominators, so the signs are exact.
    """
    _check_m(m)
    n = m // 2
    r0, r1, r2 = binomial_row(m), binomial_row(m - 2), binomial_row(m - 4)
    cert = PositivityCertificate(m, m)
    for p in range(2, m - 1, 2):
        l1, l2, l3 = scaled_lambdas(r0[p], row_get(r1, p - 1), row_get(r2, p - 2))
        key = scaled_key_combination(n, l1, l2, l3)
        cert.pairs_checked += 1
        if l1 == 0:
            cert.lambda1_zeros.append((p, m))
        elif l1 < 0:
            cert.lambda1_negative.append((p, m))
        if key == 0:
            cert.key_zeros.append((p, m))
        elif key < 0:
            cert.key_negative.append((p, m))
    return cert


def _sweep_chunk(ms):
    cert = None
    for m in ms:
        c = sweep_m(m)
        cert = c if cert is None else cert.merge(c)
    return cert


def default_workers() -> int:
    """Worker processes for sweeps, capped by ``RIGIDITY_THREADS`` (default 1)."""
    raw = os.environ.get("RIGIDITY_THREADS")
    if not raw:
        return 1
    try:
        cap = int(raw)
    except ValueError:
        raise DomainError(f"RIGIDITY_THREADS must be an integer, got {raw!r}") from None
    return max(1, min(cap, os.cpu_count() or 1))


def certify_proposition(m_min: int, m_max: int, *, workers: Optional[int] = None, raise_on_failure: bool = True) -> PositivityCertificate:
    """Certify ``key > 0`` and ``lambda1 >= 0`` over every even ``m`` in range.

    When 16 lies in the range, the zero set of lambda1 must be exactly
    ``{(2, 16), (14, 16)}``; the second point is the mirror ``p -> m - p`` of
    the first, forced by the binomial symmetry.  Any failure raises :class:`CertificationError` with the
    first witness unless ``raise_on_failure`` is False.
    """
    if m_min % 2:
        m_min += 1
    _check_m(m_min)
    if m_max < m_min:
        raise DomainError(f"empty range [{m_min}, {m_max}]")
    ms = list(range(m_min, m_max + 1, 2))
    workers = default_workers() if workers is None else workers
    if workers > 1 and len(ms) > 1:
        chunks = [ms[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = [c for c in pool.map(_sweep_chunk, chunks) if c is not None]
    else:
        parts = [_sweep_chunk(ms)]
    cert = parts[0]
    for part in parts[1:]:
        cert = cert.merge(part)
    cert.m_min, cert.m_max = m_min, m_max

    if raise_on_failure:
        for label, items in (
            ("negative lambda1", cert.lambda1_negative),
            ("negative key combination", cert.key_negative),
            ("vanishing key combination", cert.key_zeros),
        ):
            if items:
                raise CertificationError(f"{label} at (p, m)={items[0]}", items[0])
        expected = LAMBDA1_ZERO_SET if m_min <= 16 <= m_max else []
        if cert.lambda1_zeros != expected:
            raise CertificationError(
                f"lambda1 zero set is {cert.lambda1_zeros}, expected {expected}",
                cert.lambda1_zeros,
            )
    return cert
