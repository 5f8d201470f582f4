"""Integer solutions of the degeneracy equation ``p^2 - 2np + n(2n-1)/3 = 0``.

Solutions come from the Pell equation ``(2n+1)^2 - 12 r^2 = 1`` via
``p = n -+ r``.  Three recursions are provided (Pell pairs, all degenerate
pairs, even-``p`` pairs) together with a brute-force scan that shares no code
with them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .errors import DomainError

PELL_D = 12
FUNDAMENTAL = (7, 2)  # 7 + 2 sqrt(12)


@dataclass(frozen=True)
class PellSolution:
    k: int
    n_tilde: int
    r_tilde: int

    def __post_init__(self):
        if (2 * self.n_tilde + 1) ** 2 - PELL_D * self.r_tilde**2 != 1:
            raise ArithmeticError(f"not a Pell solution: {self}")


@dataclass(frozen=True)
class DegeneracySolution:
    k: int
    n_tilde: int
    p_tilde: int

    def __post_init__(self):
        if not satisfies_degeneracy(self.n_tilde, self.p_tilde):
            raise ArithmeticError(f"not a degeneracy solution: {self}")

    @property
    def parity(self) -> str:
        return "even" if self.p_tilde % 2 == 0 else "odd"


@dataclass(frozen=True)
class ExceptionalPair:
    k: int
    n: int
    p: int

    def __post_init__(self):
        if self.p % 2:
            raise ArithmeticError(f"exceptional pair with odd p: {self}")
        if not (satisfies_degeneracy(self.n, self.p) and satisfies_degeneracy(self.n, self.mirror)):
            raise ArithmeticError(f"not a degeneracy solution: {self}")
        if not self.p < self.n < self.mirror:
            raise ArithmeticError(f"ordering p < n < 2n - p violated: {self}")

    @property
    def mirror(self) -> int:
        return 2 * self.n - self.p


def satisfies_degeneracy(n: int, p: int) -> bool:
    # 3 p^2 - 6 n p + n (2n - 1) = 0, kept integral
    return 3 * p * p - 6 * n * p + n * (2 * n - 1) == 0


def _check_count(count):
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be a positive integer, got {count}")


def iter_pell() -> Iterator[PellSolution]:
    n, r, k = 3, 2, 1
    while True:
        sol = PellSolution(k, n, r)
        yield sol
        x, y = 2 * n + 1, r
        # (x + y sqrt 12)(7 + 2 sqrt 12)
        x_next = FUNDAMENTAL[0] * x + PELL_D * FUNDAMENTAL[1] * y
        y_next = FUNDAMENTAL[1] * x + FUNDAMENTAL[0] * y
        n, r = 7 * n + 12 * r + 3, 4 * n + 7 * r + 2
        if (2 * n + 1, r) != (x_next, y_next):
            raise ArithmeticError(f"recursion and fundamental-unit power disagree at k={k + 1}")
        k += 1


def pell_solutions(count: int) -> list[PellSolution]:
    _check_count(count)
    it = iter_pell()
    return [next(it) for _ in range(count)]


def iter_degeneracy() -> Iterator[DegeneracySolution]:
    n, p, k = 3, 1, 1
    while True:
        sol = DegeneracySolution(k, n, p)
        if sol.parity != ("odd" if k % 2 else "even"):
            raise ArithmeticError(f"parity does not alternate at k={k}")
        yield sol
        n, p = 19 * n - 12 * p + 3, 8 * n - 5 * p + 1
        k += 1


def degeneracy_solutions(count: int) -> list[DegeneracySolution]:
    _check_count(count)
    it = iter_degeneracy()
    return [next(it) for _ in range(count)]


def iter_exceptional() -> Iterator[ExceptionalPair]:
    """Even-``p`` solutions, each checked against every second degeneracy solution."""
    n, p, k = 48, 20, 1
    deg = iter_degeneracy()
    while True:
        next(deg)
        twin = next(deg)
        if (twin.n_tilde, twin.p_tilde) != (n, p):
            raise ArithmeticError(f"pair {k} differs from degeneracy solution {2 * k}")
        yield ExceptionalPair(k, n, p)
        n, p = 265 * n - 168 * p + 48, 112 * n - 71 * p + 20
        k += 1


def exceptional_pairs(count: int) -> list[ExceptionalPair]:
    _check_count(count)
    it = iter_exceptional()
    return [next(it) for _ in range(count)]


def exceptional_pairs_up_to(n_max: int) -> list[ExceptionalPair]:
    out = []
    for pair in iter_exceptional():
        if pair.n > n_max:
            return out
        out.append(pair)


def brute_force_scan(n_max: int, n_min: int = 1) -> list[tuple[int, int]]:
    """All ``(n, p)`` with ``n_min <= n <= n_max``, even ``p`` in ``[2, 2n-2]``, solving the equation.

    Tests whether ``n(n+1)/3`` is a perfect square with an exact integer
    square root; independent of every recursion in this module.
    """
    if n_max < 1:
        raise DomainError(f"n_max must be >= 1, got {n_max}")
    out = []
    isqrt = math.isqrt
    for n in range(max(1, n_min), n_max + 1):
        t = n * (n + 1)
        if t % 3:
            continue
        r2 = t // 3
        r = isqrt(r2)
        if r * r != r2:
            continue
        for p in (n - r, n + r):
            if p % 2 == 0 and 2 <= p <= 2 * (n - 1):
                out.append((n, p))
    return out


@dataclass(frozen=True)
class DegreeClassification:
    p: int
    exceptional: bool
    n_k: int | None
    k: int | None
    unresolved: tuple[int, ...]


def classify_degree(p: int) -> DegreeClassification:
    """Which complex dimensions stay open for a fixed even form degree ``p``.

    ``n = p/2`` is always open; if ``p`` is some ``p_k`` or ``2 n_k - p_k``
    then ``n_k`` is open as well.
    """
    if not isinstance(p, int) or p < 2 or p % 2:
        raise DomainError(f"p must be an even integer >= 2, got {p}")
    for pair in iter_exceptional():
        if p in (pair.p, pair.mirror):
            return DegreeClassification(p, True, pair.n, pair.k, tuple(sorted({p // 2, pair.n})))
        # p_k and its mirror increase strictly with k
        if min(pair.p, pair.mirror) > p:
            return DegreeClassification(p, False, None, None, (p // 2,))
