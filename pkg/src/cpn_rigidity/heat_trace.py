"""Heat traces of finite spectrum fixtures and fits of their small-t expansion.

``(4 pi t)^(m/2) * sum_k mult_k exp(-lambda_k t)`` is fitted by a polynomial
of degree at most 2 in ``t``; the coefficients are compared with the local
formulas for ``a_0, a_1, a_2`` built from :mod:`heat_coefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .errors import DomainError
from .exact import PI, PiScaled, binom
from .heat_coefficients import lambdas_unchecked

DEFAULT_WINDOW = (0.005, 0.05)
DEFAULT_POINTS = 40
MAX_CONDITION = 1e8
MAX_ORDER = 2


class ConditioningError(DomainError):
    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class SpectrumFixture:
    m: int
    p: int
    b_p: int
    entries: tuple
    label: str = ""
    truncation: Optional[int] = None

    def __post_init__(self):
        entries = tuple((float(lam), int(mult)) for lam, mult in self.entries)
        if not entries:
            raise DomainError("fixture has no eigenvalues")
        if any(lam < 0 for lam, _ in entries):
            raise DomainError("eigenvalues must be nonnegative")
        if any(mult < 1 for _, mult in entries):
            raise DomainError("multiplicities must be positive")
        if any(b[0] < a[0] for a, b in zip(entries, entries[1:])):
            raise DomainError("eigenvalues must be nondecreasing")
        zero = sum(mult for lam, mult in entries if lam == 0)
        if zero != self.b_p:
            raise DomainError(f"zero eigenvalue has multiplicity {zero}, declared b_p = {self.b_p}")
        if " " in self.label:
            raise DomainError("label must be a single token")
        object.__setattr__(self, "entries", entries)

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([lam for lam, _ in self.entries])

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([mult for _, mult in self.entries], dtype=float)


def sphere_multiplicity(m: int, k: int) -> int:
    return binom(k + m, m) - binom(k + m - 2, m)


def sphere_fixture(m: int, kmax: int) -> SpectrumFixture:
    """Functions on the unit ``S^m``: ``lambda_k = k(k+m-1)`` for ``k <= kmax``."""
    if m < 1 or kmax < 0:
        raise DomainError(f"need m >= 1 and kmax >= 0, got m={m}, kmax={kmax}")
    entries = [(k * (k + m - 1), sphere_multiplicity(m, k)) for k in range(kmax + 1)]
    return SpectrumFixture(m, 0, 1, tuple(entries), f"unit-S{m}-functions", kmax)


def scale_fixture(fixture: SpectrumFixture, lam: float) -> SpectrumFixture:
    """Spectrum of the metric ``g / lam``: every eigenvalue is multiplied by ``lam``."""
    if lam <= 0:
        raise DomainError(f"scale must be positive, got {lam}")
    return SpectrumFixture(
        fixture.m,
        fixture.p,
        fixture.b_p,
        tuple((e * lam, k) for e, k in fixture.entries),
        fixture.label,
        fixture.truncation,
    )


def counting_function(fixture: SpectrumFixture, lam: float) -> int:
    """Number of eigenvalues ``<= lam`` counted with multiplicity."""
    return sum(k for e, k in fixture.entries if e <= lam)


# ---------------------------------------------------------------- fixture files

def dumps_fixture(fixture: SpectrumFixture) -> str:
    trunc = "-" if fixture.truncation is None else str(fixture.truncation)
    lines = [f"{fixture.m} {fixture.p} {fixture.b_p} {fixture.label or '-'} {trunc}"]
    lines += [f"{lam:.17g} {mult}" for lam, mult in fixture.entries]
    return "\n".join(lines) + "\n"


def loads_fixture(text: str) -> SpectrumFixture:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not rows or len(rows[0]) != 5:
        raise DomainError("fixture header must read 'm p b_p label truncation'")
    m, p, b_p, label, trunc = rows[0]
    try:
        entries = tuple((float(a), int(b)) for a, b in rows[1:])
    except ValueError as exc:
        raise DomainError(f"malformed fixture record: {exc}") from exc
    return SpectrumFixture(
        int(m), int(p), int(b_p), entries, "" if label == "-" else label, None if trunc == "-" else int(trunc)
    )


def load_fixture(path) -> SpectrumFixture:
    return loads_fixture(Path(path).read_text())


def save_fixture(path, fixture: SpectrumFixture) -> None:
    Path(path).write_text(dumps_fixture(fixture))


def bundled_fixture(name: str = "s2_p0.txt") -> SpectrumFixture:
    return loads_fixture(resources.files(__package__).joinpath("fixtures", name).read_text())


# ---------------------------------------------------------------- trace

@dataclass(frozen=True)
class TraceValue:
    value: float
    tail_bound: float


def _terms(fixture, t):
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    return t, np.exp(-np.outer(t, fixture.eigenvalues)) * fixture.multiplicities


def _tail(terms):
    # the omitted terms are bounded by a geometric series continuing the last ratio
    if terms.shape[1] < 2:
        return np.full(terms.shape[0], np.inf)
    last, prev = terms[:, -1], terms[:, -2]
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(prev > 0, last / prev, 1.0)
        bound = np.where(rho < 1, last * rho / (1 - rho), np.inf)
    # an underflowed last term leaves nothing representable in the tail
    return np.where(last == 0, 0.0, bound)


def heat_trace(fixture: SpectrumFixture, t: float) -> TraceValue:
    """``sum mult * exp(-lambda t)`` plus an estimate of the truncated tail."""
    _, terms = _terms(fixture, t)
    return TraceValue(math.fsum(terms[0]), float(_tail(terms)[0]))


def heat_trace_grid(fixture: SpectrumFixture, t_grid) -> tuple[np.ndarray, np.ndarray]:
    _, terms = _terms(fixture, t_grid)
    return np.array([math.fsum(row) for row in terms]), _tail(terms)


# ---------------------------------------------------------------- fit

def geometric_grid(window=DEFAULT_WINDOW, points: int = DEFAULT_POINTS) -> np.ndarray:
    lo, hi = window
    if not 0 < lo < hi:
        raise DomainError(f"window must satisfy 0 < lo < hi, got {window}")
    return np.geomspace(lo, hi, points)


def _check_order(order):
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise DomainError(f"order must be 0, 1 or 2, got {order}")


class HeatTraceExpansion(RegressorMixin, BaseEstimator):
    """Least-squares fit of ``(4 pi t)^(m/2) * trace(t)`` by a polynomial in ``t``.

    ``X`` holds times (shape ``(k,)`` or ``(k, 1)``), ``y`` the trace values.
    After ``fit``, ``coef_[i]`` estimates ``a_i``.
    """

    def __init__(self, m=2, order=2, max_condition=MAX_CONDITION):
        self.m = m
        self.order = order
        self.max_condition = max_condition

    def _design(self, t):
        return np.vander(t, self.order + 1, increasing=True)

    @staticmethod
    def _times(X):
        t = np.asarray(X, dtype=float).reshape(-1)
        if np.any(t <= 0):
            raise DomainError("times must be positive")
        return t

    def fit(self, X, y):
        _check_order(self.order)
        t = self._times(X)
        y = np.asarray(y, dtype=float).reshape(-1)
        if len(t) != len(y) or len(t) <= self.order:
            raise DomainError(f"need more than {self.order} matched samples, got {len(t)} and {len(y)}")
        V = self._design(t)
        # condition of the column-equilibrated design; scaling does not change the fit
        cond = float(np.linalg.cond(V / np.abs(V).max(axis=0)))
        if cond > self.max_condition:
            raise ConditioningError(
                f"design condition {cond:.3e} exceeds {self.max_condition:.1e}; widen the window or lower the order",
                cond,
            )
        target = (4 * np.pi * t) ** (self.m / 2) * y
        coef, *_ = np.linalg.lstsq(V, target, rcond=None)
        self.coef_ = coef
        self.condition_ = cond
        self.pinv_norm_ = float(np.abs(np.linalg.pinv(V)).sum(axis=1).max())
        self.residual_ = float(np.max(np.abs(V @ coef - target)))
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        t = self._times(X)
        return (self._design(t) @ self.coef_) / (4 * np.pi * t) ** (self.m / 2)


@dataclass(frozen=True)
class ExpansionFit:
    order: int
    coefficients: tuple
    residual: float
    t_grid: tuple
    tail_bound: float
    coef_error_bound: float
    condition: float
    estimator: HeatTraceExpansion = field(repr=False, compare=False, default=None)


def fit_expansion(
    fixture: SpectrumFixture,
    order: int = 2,
    t_grid=None,
    *,
    max_condition: float = MAX_CONDITION,
    max_tail: Optional[float] = None,
) -> ExpansionFit:
    """Fit ``a_0..a_order`` on a geometric grid (default ``DEFAULT_WINDOW``, 40 points).

    ``coef_error_bound`` propagates the truncation tail through the
    least-squares solve: ``||pinv(V)||_inf * max_t (4 pi t)^(m/2) tail(t)``.
    """
    _check_order(order)
    t = geometric_grid() if t_grid is None else np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise DomainError("t_grid must be strictly positive and increasing")
    ratios = t[1:] / t[:-1]
    if np.max(np.abs(ratios - ratios[0])) > 1e-9 * ratios[0]:
        raise DomainError("t_grid must be geometric")
    values, tails = heat_trace_grid(fixture, t)
    tail = float(np.max((4 * np.pi * t) ** (fixture.m / 2) * tails))
    if max_tail is not None and tail > max_tail:
        raise DomainError(f"truncation tail {tail:.3e} exceeds {max_tail:.1e}; extend the fixture")
    est = HeatTraceExpansion(m=fixture.m, order=order, max_condition=max_condition).fit(t, values)
    return ExpansionFit(
        order=order,
        coefficients=tuple(float(c) for c in est.coef_),
        residual=est.residual_,
        t_grid=tuple(float(x) for x in t),
        tail_bound=tail,
        coef_error_bound=est.pinv_norm_ * tail,
        condition=est.condition_,
        estimator=est,
    )


# ---------------------------------------------------------------- local targets

GEOMETRIC_KEYS = ("vol", "int_s", "int_R2", "int_Ric2", "int_s2")


def patodi_targets(m: int, p: int, constants: dict) -> tuple[PiScaled, PiScaled, PiScaled]:
    """``(a_0, a_1, a_2)`` from volume and the integrated curvature quantities."""
    missing = [k for k in GEOMETRIC_KEYS if k not in constants]
    if missing:
        raise DomainError(f"missing geometric constants: {missing}")
    if not (isinstance(m, int) and isinstance(p, int) and m >= 1 and 0 <= p <= m):
        raise DomainError(f"need 0 <= p <= m, got m={m}, p={p}")
    c = {k: PiScaled.coerce(constants[k]) for k in GEOMETRIC_KEYS}
    l1, l2, l3 = lambdas_unchecked(m, p)
    a0 = binom(m, p) * c["vol"]
    a1 = (Fraction(binom(m, p), 6) - binom(m - 2, p - 1)) * c["int_s"]
    a2 = l1 * c["int_R2"] + l2 * c["int_Ric2"] + l3 * c["int_s2"]
    return a0, a1, a2


def sphere_volume(m: int) -> PiScaled:
    """Volume of the unit ``S^m`` as a rational multiple of a power of pi."""
    if m % 2 == 0:
        k = m // 2
        return PiScaled(Fraction(2 ** (k + 1), math.prod(range(1, 2 * k, 2))), k)
    k = (m + 1) // 2
    return PiScaled(Fraction(2, math.factorial(k - 1)), k)


def sphere_constants(m: int) -> dict:
    """Integrated curvature quantities of the unit ``S^m`` (sectional curvature 1)."""
    vol = sphere_volume(m)
    s = m * (m - 1)
    return {
        "vol": vol,
        "int_s": s * vol,
        "int_R2": 2 * m * (m - 1) * vol,
        "int_Ric2": m * (m - 1) ** 2 * vol,
        "int_s2": s * s * vol,
    }


__all__ = [
    "PI",
    "ConditioningError",
    "ExpansionFit",
    "HeatTraceExpansion",
    "SpectrumFixture",
    "TraceValue",
    "bundled_fixture",
    "counting_function",
    "fit_expansion",
    "geometric_grid",
    "heat_trace",
    "load_fixture",
    "patodi_targets",
    "save_fixture",
    "scale_fixture",
    "sphere_constants",
    "sphere_fixture",
    "sphere_volume",
]
