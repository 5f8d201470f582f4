"""Algebraic curvature tensors in an orthonormal frame and their decompositions.

Conventions
-----------
Real tensors ``R[i, j, k, l]`` satisfy ``R(X, Y, Y, X) = sectional curvature``
and the Ricci tensor is the contraction ``Ric[i, j] = sum_k R[i, k, k, j]``.
With this contraction the scalar and traceless-Ricci parts

    S = s/(m(m-1)) (g_il g_jk - g_ik g_jl)
    P = 1/(m-2) (g_il Rt_jk - g_ik Rt_jl + g_jk Rt_il - g_jl Rt_ik)

contract back to ``(s/m) g`` and ``Rt`` respectively.

Kähler tensors ``Rc[i, j, k, l]`` stand for ``R(u_i, conj u_j, u_k, conj u_l)``
over a unitary frame ``u_i = (e_i - sqrt(-1) J e_i)/sqrt(2)``; the real frame
is ``{e_1..e_n, Je_1..Je_n}``.  Kähler Ricci is ``sum_k Rc[i, j, k, k]`` and
the scalar curvature is twice its trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import CertificationError, DomainError

SYMMETRY_TOL = 1e-12
IDENTITY_TOL = 1e-10
BRIDGE_TOL = 1e-9


class SymmetryError(DomainError):
    """Input components violate a curvature symmetry beyond tolerance."""

    def __init__(self, message, entry=None, violation=None):
        super().__init__(message)
        self.entry = entry
        self.violation = violation


def _scale(*values) -> float:
    return max([1.0] + [float(abs(v)) for v in values])


def close(a, b, tol: float = IDENTITY_TOL) -> bool:
    """Relative comparison above magnitude 1, absolute below."""
    return abs(a - b) <= tol * _scale(a, b)


def _max_violation(tensor, others):
    worst, where, label = 0.0, None, None
    for name, other in others:
        diff = np.abs(tensor - other)
        idx = np.unravel_index(np.argmax(diff), diff.shape)
        if diff[idx] > worst:
            worst, where, label = float(diff[idx]), tuple(int(i) for i in idx), name
    return worst, where, label


def real_symmetry_violation(R: np.ndarray):
    """Largest deviation from the real curvature symmetries, with its entry and name."""
    return _max_violation(
        R,
        [
            ("antisymmetry ij", -R.transpose(1, 0, 2, 3)),
            ("antisymmetry kl", -R.transpose(0, 1, 3, 2)),
            ("pair symmetry", R.transpose(2, 3, 0, 1)),
            # R_ijkl + R_jkil + R_kijl = 0
            ("first Bianchi", -R.transpose(1, 2, 0, 3) - R.transpose(2, 0, 1, 3)),
        ],
    )


def kahler_symmetry_violation(Rc: np.ndarray):
    return _max_violation(
        Rc,
        [
            ("swap i,k", Rc.transpose(2, 1, 0, 3)),
            ("swap j,l", Rc.transpose(0, 3, 2, 1)),
            ("hermitian", np.conj(Rc.transpose(1, 0, 3, 2))),
        ],
    )


def _validated(components, dtype, ndim_name, checker, tol):
    arr = np.array(components, dtype=dtype)
    if arr.ndim != 4 or len(set(arr.shape)) != 1:
        raise DomainError(f"expected a square rank-4 array, got shape {arr.shape}")
    worst, entry, label = checker(arr)
    if worst > tol * _scale(np.max(np.abs(arr)) if arr.size else 0.0):
        raise SymmetryError(
            f"{label} violated by {worst:.3e} at entry {entry}", entry=entry, violation=worst
        )
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CurvatureTensor:
    components: np.ndarray
    tol: float = field(default=SYMMETRY_TOL, compare=False)

    def __post_init__(self):
        arr = _validated(self.components, float, "m", real_symmetry_violation, self.tol)
        if arr.shape[0] < 2:
            raise DomainError("dimension must be >= 2")
        object.__setattr__(self, "components", arr)

    @property
    def m(self) -> int:
        return self.components.shape[0]


@dataclass(frozen=True)
class KahlerCurvatureTensor:
    components: np.ndarray
    tol: float = field(default=SYMMETRY_TOL, compare=False)

    def __post_init__(self):
        arr = _validated(self.components, complex, "n", kahler_symmetry_violation, self.tol)
        if arr.shape[0] < 1:
            raise DomainError("dimension must be >= 1")
        object.__setattr__(self, "components", arr)

    @property
    def n(self) -> int:
        return self.components.shape[0]


# ---------------------------------------------------------------- builders

def constant_curvature_tensor(m: int, c: float = 1.0) -> CurvatureTensor:
    g = np.eye(m)
    return CurvatureTensor(c * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g)))


def gauss_tensor(h: np.ndarray) -> np.ndarray:
    """``h_il h_jk - h_ik h_jl`` for a symmetric ``h``: an algebraic curvature tensor."""
    return np.einsum("il,jk->ijkl", h, h) - np.einsum("ik,jl->ijkl", h, h)


def random_curvature_tensor(m: int, rng: np.random.Generator, terms: int = 4) -> CurvatureTensor:
    """Signed sum of Gauss-equation terms built from random symmetric matrices."""
    R = np.zeros((m,) * 4)
    for _ in range(terms):
        a = rng.standard_normal((m, m))
        R += rng.choice((-1.0, 1.0)) * gauss_tensor((a + a.T) / 2)
    return CurvatureTensor(R)


def fubini_study_tensor(n: int, c: float = 1.0) -> KahlerCurvatureTensor:
    """Constant holomorphic sectional curvature ``c``: ``(c/2)(g_ij g_kl + g_il g_kj)``."""
    g = np.eye(n)
    return KahlerCurvatureTensor(
        c / 2 * (np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g))
    )


def hermitian_gram_term(H: np.ndarray) -> np.ndarray:
    return (np.einsum("ij,kl->ijkl", H, H) + np.einsum("il,kj->ijkl", H, H)) / 2


def random_kahler_tensor(n: int, rng: np.random.Generator, terms: int = 4) -> KahlerCurvatureTensor:
    """Signed sum of symmetrized Hermitian Gram terms; ``H = I`` alone gives the FS tensor."""
    Rc = np.zeros((n,) * 4, dtype=complex)
    for _ in range(terms):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        Rc += rng.choice((-1.0, 1.0)) * hermitian_gram_term((a + a.conj().T) / 2)
    return KahlerCurvatureTensor(Rc)


# ---------------------------------------------------------------- decompositions

@dataclass
class DecompositionResult:
    kind: str
    dim: int
    parts: dict
    norms: dict
    ricci: np.ndarray
    traceless_ricci: np.ndarray
    scalar: float
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def _inner(a, b) -> float:
    return float(np.real(np.sum(a * np.conj(b))))


def _norm2(a) -> float:
    return _inner(a, a)


def real_ricci(R: np.ndarray) -> np.ndarray:
    return np.einsum("ikkj->ij", R)


def curvature_norms(R: CurvatureTensor) -> dict:
    """``|R|^2``, ``|Ric|^2`` and ``s`` in any dimension ``m >= 2``."""
    ric = real_ricci(R.components)
    return {"R": _norm2(R.components), "Ric": _norm2(ric), "s": float(np.trace(ric))}


def _orthogonality_checks(parts, norms, tol):
    names = list(parts)
    out = {}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ip = _inner(parts[a], parts[b])
            out[f"<{a},{b}>=0"] = abs(ip) <= tol * (np.sqrt(norms[a] * norms[b]) + 1)
    return out


def decompose_real(R: CurvatureTensor, tol: float = IDENTITY_TOL, *, strict: bool = True) -> DecompositionResult:
    """Split ``R = S + P + W`` and check the norm identities.

    With ``strict`` a failed identity raises :class:`CertificationError`.
    """
    m = R.m
    if m < 4:
        raise DomainError(f"real decomposition needs m >= 4, got {m}")
    Rt = R.components
    g = np.eye(m)
    ric = real_ricci(Rt)
    s = float(np.trace(ric))
    ric0 = ric - s / m * g
    S = s / (m * (m - 1)) * (np.einsum("il,jk->ijkl", g, g) - np.einsum("ik,jl->ijkl", g, g))
    P = (
        np.einsum("il,jk->ijkl", g, ric0)
        - np.einsum("ik,jl->ijkl", g, ric0)
        + np.einsum("jk,il->ijkl", g, ric0)
        - np.einsum("jl,ik->ijkl", g, ric0)
    ) / (m - 2)
    W = Rt - S - P
    parts = {"S": S, "P": P, "W": W}
    norms = {"R": _norm2(Rt), "S": _norm2(S), "P": _norm2(P), "W": _norm2(W),
             "Ric": _norm2(ric), "Ric0": _norm2(ric0)}
    checks = {
        "|S|^2=2s^2/(m(m-1))": close(norms["S"], 2 * s * s / (m * (m - 1)), tol),
        "|P|^2=4|Ric0|^2/(m-2)": close(norms["P"], 4 * norms["Ric0"] / (m - 2), tol),
        "|Ric|^2=|Ric0|^2+s^2/m": close(norms["Ric"], norms["Ric0"] + s * s / m, tol),
        "|R|^2=|S|^2+|P|^2+|W|^2": close(norms["R"], norms["S"] + norms["P"] + norms["W"], tol),
        "W traceless": float(np.max(np.abs(real_ricci(W)))) <= tol * _scale(s),
    }
    checks.update(_orthogonality_checks(parts, norms, tol))
    result = DecompositionResult("real", m, parts, norms, ric, ric0, s, checks)
    if strict and not result.ok:
        failed = [k for k, v in checks.items() if not v]
        raise CertificationError(f"real decomposition identities failed: {failed}", failed)
    return result


def kahler_ricci(Rc: np.ndarray) -> np.ndarray:
    return np.einsum("ijkk->ij", Rc)


def decompose_kahler(Rc: KahlerCurvatureTensor, tol: float = IDENTITY_TOL, *, strict: bool = True) -> DecompositionResult:
    """Split ``Rc = Sc + Pc + B`` (B is the Bochner tensor) and check the norm identities."""
    n = Rc.n
    T = Rc.components
    g = np.eye(n)
    ric = kahler_ricci(T)
    s = float(2 * np.real(np.trace(ric)))
    ric0 = ric - s / (2 * n) * g
    gg = np.einsum("ij,kl->ijkl", g, g) + np.einsum("il,kj->ijkl", g, g)
    Sc = s / (2 * n * (n + 1)) * gg
    Pc = (
        np.einsum("ij,kl->ijkl", g, ric0)
        + np.einsum("kl,ij->ijkl", g, ric0)
        + np.einsum("il,kj->ijkl", g, ric0)
        + np.einsum("kj,il->ijkl", g, ric0)
    ) / (n + 2)
    B = T - Sc - Pc
    parts = {"Sc": Sc, "Pc": Pc, "B": B}
    norms = {"Rc": _norm2(T), "Sc": _norm2(Sc), "Pc": _norm2(Pc), "B": _norm2(B),
             "Ric": _norm2(ric), "Ric0": _norm2(ric0)}
    checks = {
        "|Ric|^2=|Ric0|^2+s^2/(4n)": close(norms["Ric"], norms["Ric0"] + s * s / (4 * n), tol),
        "|Sc|^2=s^2/(2n(n+1))": close(norms["Sc"], s * s / (2 * n * (n + 1)), tol),
        "|Pc|^2=4|Ric0|^2/(n+2)": close(norms["Pc"], 4 * norms["Ric0"] / (n + 2), tol),
        "|Rc|^2=|Sc|^2+|Pc|^2+|B|^2": close(norms["Rc"], norms["Sc"] + norms["Pc"] + norms["B"], tol),
        "B traceless": float(np.max(np.abs(kahler_ricci(B)))) <= tol * _scale(s),
    }
    checks.update(_orthogonality_checks(parts, norms, tol))
    result = DecompositionResult("kahler", n, parts, norms, ric, ric0, s, checks)
    if strict and not result.ok:
        failed = [k for k, v in checks.items() if not v]
        raise CertificationError(f"Kähler decomposition identities failed: {failed}", failed)
    return result


# ---------------------------------------------------------------- real <-> Kähler

def complex_frame(n: int) -> np.ndarray:
    """Rows express ``e_1..e_n, Je_1..Je_n`` in the basis ``u_1..u_n, conj u_1..conj u_n``."""
    r = 1 / np.sqrt(2)
    E = np.zeros((2 * n, 2 * n), dtype=complex)
    for i in range(n):
        E[i, i], E[i, n + i] = r, r
        E[n + i, i], E[n + i, n + i] = 1j * r, -1j * r
    return E


def complex_structure(n: int) -> np.ndarray:
    """Matrix of J in the real frame: ``J e_i = e_{i+n}``, ``J e_{i+n} = -e_i``."""
    J = np.zeros((2 * n, 2 * n))
    J[n:, :n] = np.eye(n)
    J[:n, n:] = -np.eye(n)
    return J


def realify(Rc: KahlerCurvatureTensor) -> CurvatureTensor:
    """The J-invariant real curvature tensor whose complexification is ``Rc``."""
    n = Rc.n
    T = np.zeros((2 * n,) * 4, dtype=complex)
    h, a = slice(0, n), slice(n, 2 * n)
    X = Rc.components
    T[h, a, h, a] = X
    T[a, h, h, a] = -X.transpose(1, 0, 2, 3)
    T[h, a, a, h] = -X.transpose(0, 1, 3, 2)
    T[a, h, a, h] = X.transpose(1, 0, 3, 2)
    E = complex_frame(n)
    R = np.einsum("Aa,Bb,Cc,Dd,abcd->ABCD", E, E, E, E, T, optimize=True)
    imag = float(np.max(np.abs(R.imag)))
    if imag > SYMMETRY_TOL * _scale(np.max(np.abs(R.real))):
        raise ArithmeticError(f"realified tensor has imaginary part {imag:.3e}")
    return CurvatureTensor(R.real.copy())


def complexify(R: CurvatureTensor) -> KahlerCurvatureTensor:
    """``Rc_ijkl = (R_ijkl - R_i,j+n,k,l+n) + sqrt(-1) (R_i,j+n,k,l + R_i,j,k,l+n)``."""
    if R.m % 2:
        raise DomainError("complexify needs even real dimension")
    n = R.m // 2
    h, a = slice(0, n), slice(n, 2 * n)
    X = R.components
    return KahlerCurvatureTensor((X[h, h, h, h] - X[h, a, h, a]) + 1j * (X[h, a, h, h] + X[h, h, h, a]))


def j_invariance_violation(R: CurvatureTensor) -> float:
    J = complex_structure(R.m // 2)
    X = R.components
    first = np.einsum("aA,bB,abcd->ABcd", J, J, X)
    second = np.einsum("cC,dD,abcd->abCD", J, J, X)
    return float(max(np.max(np.abs(first - X)), np.max(np.abs(second - X))))


@dataclass(frozen=True)
class NormBridgeReport:
    n: int
    real_R2: float
    real_ric2: float
    kahler_R2: float
    kahler_ric2: float
    ratio_R: float
    ratio_ric: float
    ok: bool


def verify_norm_bridge(Rc: KahlerCurvatureTensor, tol: float = BRIDGE_TOL) -> NormBridgeReport:
    """Check ``|R|^2 = 4|Rc|^2`` and ``|Ric(g)|^2 = 2|Ric(omega)|^2``."""
    R = realify(Rc)
    real = curvature_norms(R)
    k_R2 = _norm2(Rc.components)
    k_ric2 = _norm2(kahler_ricci(Rc.components))
    ok = close(real["R"], 4 * k_R2, tol) and close(real["Ric"], 2 * k_ric2, tol)
    return NormBridgeReport(
        n=Rc.n,
        real_R2=real["R"],
        real_ric2=real["Ric"],
        kahler_R2=k_R2,
        kahler_ric2=k_ric2,
        ratio_R=real["R"] / k_R2 if k_R2 else float("nan"),
        ratio_ric=real["Ric"] / k_ric2 if k_ric2 else float("nan"),
        ok=ok,
    )


@dataclass(frozen=True)
class ChernIntegrands:
    """Pointwise integrands per unit ``omega^n`` of ``c1 . omega^(n-1)`` and ``c1^2 . omega^(n-2)``."""

    c1: float
    c1_squared: float
    c1_squared_traceless_form: float


def chern_integrands(dec: DecompositionResult, n: Optional[int] = None, tol: float = SYMMETRY_TOL) -> ChernIntegrands:
    if dec.kind != "kahler":
        raise DomainError("chern_integrands needs a Kähler decomposition")
    n = dec.dim if n is None else n
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    s = dec.scalar
    first = s / (2 * n)
    second = (s * s / 4 - dec.norms["Ric"]) / (n * (n - 1))
    rewritten = ((n - 1) / (4 * n) * s * s - dec.norms["Ric0"]) / (n * (n - 1))
    if not close(second, rewritten, tol):
        raise CertificationError(f"c1^2 integrand forms disagree: {second} vs {rewritten}")
    return ChernIntegrands(first, second, rewritten)


# ---------------------------------------------------------------- fixtures & self-test

def save_tensor(path, tensor) -> None:
    """Flat component list with a ``kind dim`` header; complex entries as ``re im``."""
    path = Path(path)
    if isinstance(tensor, KahlerCurvatureTensor):
        lines = [f"kahler {tensor.n}"]
        lines += [f"{float(z.real)!r} {float(z.imag)!r}" for z in tensor.components.ravel()]
    else:
        lines = [f"real {tensor.m}"]
        lines += [repr(float(x)) for x in tensor.components.ravel()]
    path.write_text("\n".join(lines) + "\n")


def load_tensor(path):
    lines = Path(path).read_text().split("\n")
    kind, dim = lines[0].split()
    dim = int(dim)
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != dim**4:
        raise DomainError(f"expected {dim ** 4} components, found {len(body)}")
    if kind == "kahler":
        vals = [complex(float(a), float(b)) for a, b in (ln.split() for ln in body)]
        return KahlerCurvatureTensor(np.array(vals).reshape((dim,) * 4))
    if kind == "real":
        return CurvatureTensor(np.array([float(v) for v in body]).reshape((dim,) * 4))
    raise DomainError(f"unknown tensor kind {kind!r}")


def selftest(n: int, trials: int, seed: int, tol: float = IDENTITY_TOL) -> dict:
    """Run every decomposition and bridge identity on seeded random Kähler tensors."""
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    rng = np.random.default_rng(seed)
    failures = []
    for t in range(trials):
        Rc = random_kahler_tensor(n, rng)
        dk = decompose_kahler(Rc, tol, strict=False)
        R = realify(Rc)
        dr = decompose_real(R, tol, strict=False)
        bridge = verify_norm_bridge(Rc, max(tol, BRIDGE_TOL))
        recon = float(np.max(np.abs(sum(dk.parts.values()) - Rc.components)))
        recon_r = float(np.max(np.abs(sum(dr.parts.values()) - R.components)))
        bad = [k for k, v in {**dk.checks, **{"real " + k: v for k, v in dr.checks.items()}}.items() if not v]
        if not bridge.ok:
            bad.append("norm bridge")
        if recon > SYMMETRY_TOL * _scale(dk.scalar) or recon_r > SYMMETRY_TOL * _scale(dr.scalar):
            bad.append("reconstruction")
        if bad:
            failures.append({"trial": t, "failed": bad})
    return {"n": n, "trials": trials, "seed": seed, "tol": tol, "failures": failures, "ok": not failures}
