"""Exact algebra of circle bundles over Kähler–Einstein bases.

The base has complex dimension ``n``, scalar curvature ``s_g`` and Fano index
(or divisor) ``I``.  The connection has constant curvature matrix
``A = sigma * J0`` with ``J0 = (0, Id; -Id, 0)`` and ``sigma = s_g/(8 n pi I)``,
and the bundle metric has fiber length ``2 pi a``.  Only ``a**2`` is stored,
so every curvature quantity stays rational after pi cancels.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError
from .exact import PI, PiScaled, exact_sqrt

# Above this n the block-matrix square is only checked through its closed form.
MATRIX_CHECK_MAX_N = 8


def _check_base(n, s_g, I):
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    s_g = Fraction(s_g)
    if s_g <= 0:
        raise DomainError(f"s_g must be positive, got {s_g}")
    if not isinstance(I, int) or I < 1:
        raise DomainError(f"I must be a positive integer, got {I}")
    return s_g


def connection_scale(n: int, s_g, I: int) -> PiScaled:
    """``s_g/(8 n pi I)``, the entry size of the connection matrix."""
    s_g = _check_base(n, s_g, I)
    return PiScaled(s_g / (8 * n * I), -1)


def j0(n: int) -> list[list[int]]:
    size = 2 * n
    M = [[0] * size for _ in range(size)]
    for i in range(n):
        M[i][n + i] = 1
        M[n + i][i] = -1
    return M


def _matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def connection_square(n: int, s_g, I: int) -> PiScaled:
    """The scalar ``c`` with ``sum_k A_ik A_kj = c delta_ij``, namely ``-sigma**2``.

    For small ``n`` the explicit block matrix is squared with exact arithmetic.
    """
    sigma = connection_scale(n, s_g, I)
    value = -(sigma**2)
    if n <= MATRIX_CHECK_MAX_N:
        A = [[sigma.coeff * x for x in row] for row in j0(n)]
        sq = _matmul(A, A)
        for i, j in itertools.product(range(2 * n), repeat=2):
            expect = value.coeff if i == j else 0
            if sq[i][j] != expect:
                raise ArithmeticError(f"A^2 entry ({i},{j}) is {sq[i][j]}, expected {expect}")
    return value


@dataclass(frozen=True)
class BundleData:
    n: int
    s_g: Fraction
    I: int
    a_squared: PiScaled
    A_scale: PiScaled

    def __post_init__(self):
        _check_base(self.n, self.s_g, self.I)
        if not (self.a_squared * self.A_scale**2).is_rational:
            raise DomainError(f"a^2 = {self.a_squared} does not cancel pi against the connection")

    @classmethod
    def build(cls, n: int, s_g, I: int, a_squared) -> "BundleData":
        return cls(n, Fraction(s_g), I, PiScaled.coerce(a_squared), connection_scale(n, s_g, I))

    @property
    def q(self) -> Fraction:
        """``a^2 sigma^2``: the rational that every curvature entry is linear in."""
        return (self.a_squared * self.A_scale**2).rational()


@dataclass(frozen=True)
class BundleRicci:
    r_tangent: Fraction
    r_fiber: Fraction
    r_mixed: Fraction

    def __post_init__(self):
        if self.r_mixed != 0:
            raise ArithmeticError(f"mixed Ricci component must vanish, got {self.r_mixed}")

    @property
    def einstein(self) -> bool:
        return self.r_tangent == self.r_fiber

    def scalar(self, n: int) -> Fraction:
        return 2 * n * self.r_tangent + self.r_fiber


def bundle_ricci(n: int, s_g, I: int, a_squared) -> BundleRicci:
    data = BundleData.build(n, s_g, I, a_squared)
    q = data.q
    r_tangent = data.s_g / (2 * n) - 2 * q
    # R_00 = -a^2 sum A_ij A_ji; A is antisymmetric, so this is a^2 sum A_ij^2 = 2n q
    trace_A2 = 2 * n * connection_square(n, s_g, I) if n <= MATRIX_CHECK_MAX_N else -2 * n * data.A_scale**2
    r_fiber = (-data.a_squared * trace_A2).rational()
    closed = (data.s_g**2 * data.a_squared / (2 * n * (4 * PI * I) ** 2)).rational()
    if r_fiber != closed or r_fiber != 2 * n * q:
        raise ArithmeticError(f"fiber Ricci forms disagree: {r_fiber}, {closed}, {2 * n * q}")
    return BundleRicci(r_tangent, r_fiber, Fraction(0))


def einstein_scalar(n: int, s_g) -> Fraction:
    return Fraction(s_g) * (2 * n + 1) / (2 * (n + 1))


def einstein_parameter_squared(n: int, s_g, I: int) -> PiScaled:
    """``a^2 = 16 pi^2 I^2 n / (s_g (n+1))``, checked to give an Einstein bundle."""
    s_g = _check_base(n, s_g, I)
    a2 = PiScaled(Fraction(16 * I * I * n) / (s_g * (n + 1)), 2)
    ric = bundle_ricci(n, s_g, I, a2)
    target = s_g / (2 * (n + 1))
    if not (ric.r_tangent == ric.r_fiber == target):
        raise ArithmeticError(f"bundle at a^2 = {a2} is not Einstein: {ric}")
    if ric.scalar(n) != einstein_scalar(n, s_g):
        raise ArithmeticError(f"total scalar {ric.scalar(n)} != {einstein_scalar(n, s_g)}")
    return a2


def solve_einstein_a_squared(n: int, s_g, I: int) -> PiScaled:
    """Solve ``r_tangent = r_fiber`` as a linear equation in ``a^2``."""
    s_g = _check_base(n, s_g, I)
    sigma2 = connection_scale(n, s_g, I) ** 2
    # s_g/(2n) - 2 a^2 sigma^2 = 2n a^2 sigma^2
    return PiScaled(s_g / (2 * n * (2 * n + 2))) / sigma2


@dataclass(frozen=True)
class VolumeBound:
    ratio: Fraction
    degree: Fraction


def volume_bound(n: int, I: int) -> VolumeBound:
    """Bound on ``Vol(X)/Vol(CP^n)`` and on the anticanonical degree, for ``1 <= I <= n+1``."""
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if not isinstance(I, int) or not 1 <= I <= n + 1:
        raise DomainError(f"I must lie in [1, {n + 1}], got {I}")
    ratio = Fraction(n + 1, I)
    return VolumeBound(ratio, ratio * (n + 1) ** n)


def volume_relation(vol_base, a) -> PiScaled:
    """Total space volume ``vol_base * 2 pi a``."""
    a = PiScaled.coerce(a)
    if a.coeff != 0 and a.pi_power not in (0, 1):
        raise DomainError(f"a must carry pi^0 or pi^1, got {a}")
    return PiScaled.coerce(Fraction(vol_base)) * 2 * PI * a


def einstein_parameter_ratio(n: int, s_g, I: int) -> Fraction:
    """``a(CP^n) / a(M)`` at equal ``s_g``; with equal total volumes this is the base volume ratio."""
    # a itself is sqrt(rational) * pi, so divide the squares first
    squared = (einstein_parameter_squared(n, s_g, n + 1) / einstein_parameter_squared(n, s_g, I)).rational()
    # Vol(M) 2 pi a_M = Vol(CP^n) 2 pi a_model
    vol_M_over_model = exact_sqrt(squared)
    if vol_M_over_model != Fraction(n + 1, I):
        raise ArithmeticError(f"volume ratio {vol_M_over_model} != {Fraction(n + 1, I)}")
    return vol_M_over_model


# ---------------------------------------------------------------- explicit curvature

def fs_base_tensor(n: int, c) -> dict:
    """Real Fubini–Study-type tensor of holomorphic curvature ``c`` in the ``K_ij = sum_k K_ikjk`` convention.

    Sparse dict keyed by index tuples over the real frame ``0..2n-1``.
    """
    c = Fraction(c)
    J = j0(n)
    d = lambda a, b: 1 if a == b else 0  # noqa: E731
    out = {}
    for i, j, k, l in itertools.product(range(2 * n), repeat=4):
        # R(X,Y,Y,X) = sectional form, then swap the last pair
        r = (
            d(i, k) * d(j, l) - d(i, l) * d(j, k)
            + J[i][k] * J[j][l] - J[i][l] * J[j][k]
            + 2 * J[i][j] * J[k][l]
        )
        if r:
            out[(i, j, k, l)] = c / 4 * r
    return out


def explicit_bundle_curvature(n: int, s_g, I: int, a_squared) -> dict:
    """Full curvature of the bundle metric for constant ``A``, fiber index ``0``, base indices ``1..2n``.

    ``R_ijkl = K_ijkl - a^2 (2 A_ij A_kl + A_ik A_jl - A_il A_jk)``,
    ``R_i0k0 = a^2 sum_l A_il A_kl`` and ``R_i0kl = 0``.
    """
    data = BundleData.build(n, s_g, I, a_squared)
    q = data.q
    J = j0(n)
    K = fs_base_tensor(n, data.s_g / (n * (n + 1)))
    size = 2 * n
    R = {}
    for i, j, k, l in itertools.product(range(size), repeat=4):
        v = K.get((i, j, k, l), 0) - q * (2 * J[i][j] * J[k][l] + J[i][k] * J[j][l] - J[i][l] * J[j][k])
        if v:
            R[(i + 1, j + 1, k + 1, l + 1)] = Fraction(v)
    for i, k in itertools.product(range(size), repeat=2):
        v = q * sum(J[i][t] * J[k][t] for t in range(size))
        if v:
            a, b = i + 1, k + 1
            R[(a, 0, b, 0)] = R[(0, a, 0, b)] = v
            R[(a, 0, 0, b)] = R[(0, a, b, 0)] = -v
    return R


def contract_ricci(R: dict, dim: int) -> list[list[Fraction]]:
    """``Ric_ij = sum_k R_ikjk`` on a sparse tensor."""
    ric = [[Fraction(0)] * dim for _ in range(dim)]
    for (i, k, j, l), v in R.items():
        if k == l:
            ric[i][j] += v
    return ric


def curvature_symmetry_defects(R: dict, dim: int) -> list[tuple]:
    """Index tuples where an exact sparse tensor breaks antisymmetry, pair symmetry or Bianchi."""
    get = lambda *idx: R.get(idx, 0)  # noqa: E731
    bad = []
    for i, j, k, l in itertools.product(range(dim), repeat=4):
        v = get(i, j, k, l)
        if v != -get(j, i, k, l) or v != -get(i, j, l, k) or v != get(k, l, i, j):
            bad.append((i, j, k, l))
        elif v + get(j, k, i, l) + get(k, i, j, l) != 0:
            bad.append((i, j, k, l))
    return bad


@dataclass(frozen=True)
class CrossCheck:
    n: int
    ricci: BundleRicci
    explicit_tangent: Fraction
    explicit_fiber: Fraction
    off_diagonal_zero: bool
    symmetry_defects: int

    @property
    def ok(self) -> bool:
        return (
            self.off_diagonal_zero
            and self.symmetry_defects == 0
            and self.explicit_tangent == self.ricci.r_tangent
            and self.explicit_fiber == self.ricci.r_fiber
        )


def lemma_cross_check(n: int, s_g, I: int, a_squared: Optional[PiScaled] = None) -> CrossCheck:
    """Contract the explicit bundle curvature and compare it with :func:`bundle_ricci`."""
    if a_squared is None:
        a_squared = einstein_parameter_squared(n, s_g, I)
    dim = 2 * n + 1
    R = explicit_bundle_curvature(n, s_g, I, a_squared)
    ric = contract_ricci(R, dim)
    diag = {ric[i][i] for i in range(1, dim)}
    off = all(ric[i][j] == 0 for i in range(dim) for j in range(dim) if i != j)
    tangent = diag.pop() if len(diag) == 1 else None
    return CrossCheck(
        n=n,
        ricci=bundle_ricci(n, s_g, I, a_squared),
        explicit_tangent=tangent,
        explicit_fiber=ric[0][0],
        off_diagonal_zero=off,
        symmetry_defects=len(curvature_symmetry_defects(R, dim)),
    )
