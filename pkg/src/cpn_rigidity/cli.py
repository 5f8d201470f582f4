"""Command-line front end: ``rigidity <command> ...``.

Exit codes: 0 when every check passes, 1 when a check finds a
counterexample, 2 for usage errors.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import circle_bundle, curvature, heat_coefficients, heat_trace, pell, positivity
from .errors import CertificationError, DomainError
from .exact import fraction_str, sign

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2
BRUTE_FORCE_LIMIT = 10**8
HEAT_TOLERANCES = (0.01, 0.02, 0.05)

COVERED = "covered_by_theorem"
EXCEPTIONAL = "exceptional_pair"
MIDDLE = "unresolved_middle"
OUT_OF_RANGE = "out_of_range"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class RigidityVerdict:
    n: int
    p: int
    a1_nonzero: bool
    key_positive: Optional[bool]
    lambda1_sign: str
    classification: str

    def __post_init__(self):
        in_range = self.p % 2 == 0 and 2 <= self.p <= 2 * (self.n - 1)
        if (self.classification == COVERED) != (in_range and self.a1_nonzero):
            raise ArithmeticError(f"inconsistent verdict {self}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "p": self.p,
            "a1_nonzero": self.a1_nonzero,
            "key_positive": self.key_positive,
            "lambda1_sign": self.lambda1_sign,
            "classification": self.classification,
        }


_SIGN_NAMES = {-1: "negative", 0: "zero", 1: "positive"}


def rigidity_verdict(n: int, p: int) -> RigidityVerdict:
    """Status of the spectral question for ``p``-forms in complex dimension ``n``.

    Signs come from the reduced quartic, which differs from the coefficient by
    a positive factorial factor, so huge ``n`` stay cheap.
    """
    if n < 1 or p < 0:
        raise DomainError(f"need n >= 1 and p >= 0, got n={n}, p={p}")
    m = 2 * n
    a1_nonzero = not pell.satisfies_degeneracy(n, p)
    inner = m >= 4 and 2 <= p <= m - 2
    if p > m:
        l1_sign = 0
    elif inner:
        l1_sign = sign(positivity.eval_f(p, m, positivity.LAMBDA1_COEFFICIENTS, check_binomial=False))
    else:
        l1_sign = sign(heat_coefficients.lambdas_unchecked(m, p)[0])
    key = None
    if inner and p % 2 == 0:
        key = positivity.eval_f(p, m, positivity.key_coefficients(m), check_binomial=False) > 0
    if p > m or p % 2:
        cls = OUT_OF_RANGE
    elif p == m:
        cls = MIDDLE
    elif p == 0:
        cls = OUT_OF_RANGE
    elif a1_nonzero:
        cls = COVERED
    else:
        cls = EXCEPTIONAL
    return RigidityVerdict(n, p, a1_nonzero, key, _SIGN_NAMES[l1_sign], cls)


# ---------------------------------------------------------------- commands

def _pairs(items):
    return [[p, m] for p, m in items]


def cmd_lambdas(args) -> tuple[dict, int]:
    m, p = args.m, args.p
    if m % 2:
        raise UsageError(f"m must be even, got {m}")
    rep = heat_coefficients.kahler_a2_coefficients(m // 2, p)
    lam = rep.lambdas
    key = rep.key_combination
    return {
        "command": "lambdas",
        "m": m,
        "p": p,
        "lambda1": fraction_str(lam.lambda1),
        "lambda2": fraction_str(lam.lambda2),
        "lambda3": fraction_str(lam.lambda3),
        "a0_coefficient": fraction_str(rep.a0_coeff),
        "a1_coefficient": fraction_str(rep.a1_coeff),
        "kahler_s2": fraction_str(rep.kahler_s2),
        "kahler_traceless_ricci": fraction_str(rep.kahler_ric),
        "kahler_bochner": fraction_str(rep.kahler_bochner),
        "key_combination": None if key is None else fraction_str(key),
    }, EXIT_OK


def cmd_certify(args) -> tuple[dict, int]:
    lo, hi = args.lo, args.hi
    if hi < lo:
        raise UsageError(f"empty range [{lo}, {hi}]")
    report = {"command": "certify", "kind": args.kind, "range": [lo, hi]}
    if args.kind in ("key-positivity", "lambda1"):
        cert = positivity.certify_proposition(lo, hi, raise_on_failure=False)
        report["pairs_checked"] = cert.pairs_checked
        if args.kind == "key-positivity":
            failures = cert.key_negative + cert.key_zeros
            report["equality_set"] = _pairs(cert.key_zeros)
            report["negative"] = _pairs(cert.key_negative)
        else:
            expected = positivity.LAMBDA1_ZERO_SET if cert.m_min <= 16 <= cert.m_max else []
            stray = [z for z in cert.lambda1_zeros if z not in expected]
            missing = [z for z in expected if z not in cert.lambda1_zeros]
            failures = cert.lambda1_negative + stray + missing
            report["equality_set"] = _pairs(cert.lambda1_zeros)
            report["expected_equality_set"] = _pairs(expected)
            report["negative"] = _pairs(cert.lambda1_negative)
    elif args.kind == "closed-forms":
        failures = []
        ms = [m for m in range(max(lo, 4), hi + 1) if m % 2 == 0]
        for m in ms:
            c = positivity.verify_closed_forms(m)
            if not c:
                f = c.failure
                failures.append({"m": m, "identity": f.identity, "lhs": fraction_str(f.lhs), "rhs": fraction_str(f.rhs)})
        report["identities_checked"] = 4 * len(ms)
        report["failures"] = failures
    else:
        failures = []
        checks = 0
        for n in range(max(lo, 2), hi + 1):
            c = heat_coefficients.verify_key_combination_identity(n)
            checks += c.checks
            if not c:
                ce = c.counterexample
                failures.append({"n": n, "coefficient": ce.coefficient, "lhs": fraction_str(ce.lhs), "rhs": fraction_str(ce.rhs)})
        report["checks"] = checks
        report["failures"] = failures
    report["ok"] = not failures
    return report, EXIT_OK if not failures else EXIT_COUNTEREXAMPLE


def cmd_exceptional(args) -> tuple[dict, int]:
    if args.count is not None:
        pairs = pell.exceptional_pairs(args.count)
        bound = pairs[-1].n
    else:
        if args.max_n < 1:
            raise UsageError("--max-n must be positive")
        pairs = pell.exceptional_pairs_up_to(args.max_n)
        bound = args.max_n
    report = {
        "command": "exceptional",
        "pairs": [{"k": q.k, "n": q.n, "p": q.p, "mirror": q.mirror} for q in pairs],
    }
    code = EXIT_OK
    if args.brute_force:
        if bound > BRUTE_FORCE_LIMIT:
            raise UsageError(f"brute-force scan limited to n <= {BRUTE_FORCE_LIMIT}, requested {bound}")
        scanned = pell.brute_force_scan(bound)
        expected = [pt for q in pairs for pt in ((q.n, q.p), (q.n, q.mirror))]
        report["brute_force"] = {"n_max": bound, "solutions": [[n, p] for n, p in scanned], "agrees": scanned == expected}
        if scanned != expected:
            code = EXIT_COUNTEREXAMPLE
    return report, code


def cmd_classify(args) -> tuple[dict, int]:
    p = args.p
    c = pell.classify_degree(p)
    lo = p // 2
    hi = args.n_max if args.n_max is not None else lo + 3
    if hi < lo:
        raise UsageError(f"--n-max must be at least {lo}")
    ns = sorted(set(range(lo, hi + 1)) | set(c.unresolved))
    verdicts = [rigidity_verdict(n, p) for n in ns]
    unresolved = [v.n for v in verdicts if v.classification in (MIDDLE, EXCEPTIONAL)]
    if tuple(unresolved) != c.unresolved:
        return {"command": "classify", "p": p, "error": "verdicts disagree with the Pell classification"}, EXIT_COUNTEREXAMPLE
    return {
        "command": "classify",
        "p": p,
        "exceptional_degree": c.exceptional,
        "n_k": c.n_k,
        "unresolved": list(c.unresolved),
        "covered": f"every other n >= {lo + 1}",
        "verdicts": [v.to_dict() for v in verdicts],
    }, EXIT_OK


def cmd_curvature(args) -> tuple[dict, int]:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    rep = curvature.selftest(args.n, args.trials, args.seed, args.tol)
    return {"command": "curvature selftest", **rep}, EXIT_OK if rep["ok"] else EXIT_COUNTEREXAMPLE


def cmd_bundle(args) -> tuple[dict, int]:
    n, s_g, I = args.n, Fraction(args.s_g), args.I
    try:
        a2 = circle_bundle.einstein_parameter_squared(n, s_g, I)
    except ArithmeticError as exc:
        return {"command": "bundle", "error": str(exc)}, EXIT_COUNTEREXAMPLE
    ric = circle_bundle.bundle_ricci(n, s_g, I, a2)
    report = {
        "command": "bundle",
        "n": n,
        "s_g": fraction_str(s_g),
        "I": I,
        "a_squared": str(a2),
        "connection_square": str(circle_bundle.connection_square(n, s_g, I)),
        "r_tangent": fraction_str(ric.r_tangent),
        "r_fiber": fraction_str(ric.r_fiber),
        "r_mixed": fraction_str(ric.r_mixed),
        "einstein": ric.einstein,
        "scalar": fraction_str(ric.scalar(n)),
    }
    ok = ric.einstein
    if I <= n + 1:
        vb = circle_bundle.volume_bound(n, I)
        report["volume_ratio_bound"] = fraction_str(vb.ratio)
        report["degree_bound"] = fraction_str(vb.degree)
    if n <= 3:
        check = circle_bundle.lemma_cross_check(n, s_g, I, a2)
        report["explicit_curvature_check"] = check.ok
        ok = ok and check.ok
    return report, EXIT_OK if ok else EXIT_COUNTEREXAMPLE


_SPHERE_LABEL = re.compile(r"unit-S(\d+)-functions")


def cmd_heattrace(args) -> tuple[dict, int]:
    try:
        fixture = heat_trace.load_fixture(args.fixture)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    grid = heat_trace.geometric_grid((args.t_min, args.t_max), args.points)
    fit = heat_trace.fit_expansion(fixture, args.order, grid)
    report = {
        "command": "heattrace",
        "fixture": fixture.label,
        "m": fixture.m,
        "p": fixture.p,
        "order": fit.order,
        "window": [args.t_min, args.t_max],
        "points": args.points,
        "coefficients": [repr(c) for c in fit.coefficients],
        "residual": repr(fit.residual),
        "tail_bound": repr(fit.tail_bound),
        "coef_error_bound": repr(fit.coef_error_bound),
        "condition": repr(fit.condition),
    }
    code = EXIT_OK
    match = _SPHERE_LABEL.fullmatch(fixture.label)
    if match and int(match.group(1)) == fixture.m and fixture.p == 0:
        targets = heat_trace.patodi_targets(fixture.m, 0, heat_trace.sphere_constants(fixture.m))
        rows = []
        for i, coef in enumerate(fit.coefficients):
            target = float(targets[i])
            err = abs(coef - target) / abs(target)
            rows.append({"i": i, "target": str(targets[i]), "relative_error": repr(err), "tolerance": HEAT_TOLERANCES[i], "ok": err < HEAT_TOLERANCES[i]})
        report["targets"] = rows
        if not all(r["ok"] for r in rows):
            code = EXIT_COUNTEREXAMPLE
    return report, code


# ---------------------------------------------------------------- output

def dumps_report(report: dict) -> str:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def render_text(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"{indent}{key}:")
            for item in value:
                lines.append(f"{indent}  - " + ", ".join(f"{k}={_fmt(v)}" for k, v in item.items()))
        elif isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(render_text(value, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{key}: {_fmt(value)}")
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


# ---------------------------------------------------------------- parser

def _positive_fraction(s):
    try:
        q = Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None
    return q


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="canonical machine-readable output")

    parser = argparse.ArgumentParser(prog="rigidity", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambdas", parents=[common], help="exact heat-coefficient weights at (m, p)")
    p.add_argument("m", type=int)
    p.add_argument("p", type=int)
    p.set_defaults(func=cmd_lambdas)

    p = sub.add_parser("certify", parents=[common], help="exhaustive exact certification runs")
    p.add_argument("kind", choices=["key-positivity", "lambda1", "closed-forms", "identity"])
    p.add_argument("lo", type=int, help="m_min (n_min for identity)")
    p.add_argument("hi", type=int, help="m_max (n_max for identity)")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("exceptional", parents=[common], help="even-p degeneracy pairs")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--count", type=int)
    g.add_argument("--max-n", type=int)
    p.add_argument("--brute-force", action="store_true", help="cross-check with an independent scan")
    p.set_defaults(func=cmd_exceptional)

    p = sub.add_parser("classify", parents=[common], help="which dimensions stay open for p-forms")
    p.add_argument("p", type=int)
    p.add_argument("--n-max", type=int, help="list verdicts for every n up to this bound")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("curvature", help="curvature identity checks")
    csub = p.add_subparsers(dest="action", required=True)
    c = csub.add_parser("selftest", parents=[common])
    c.add_argument("--n", type=int, default=3)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--tol", type=float, default=curvature.IDENTITY_TOL)
    c.set_defaults(func=cmd_curvature)

    p = sub.add_parser("bundle", parents=[common], help="Einstein circle bundle over a Kähler–Einstein base")
    p.add_argument("n", type=int)
    p.add_argument("s_g", type=_positive_fraction)
    p.add_argument("I", type=int)
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("heattrace", parents=[common], help="fit the small-t heat expansion of a fixture")
    p.add_argument("fixture")
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--t-min", type=float, default=heat_trace.DEFAULT_WINDOW[0])
    p.add_argument("--t-max", type=float, default=heat_trace.DEFAULT_WINDOW[1])
    p.add_argument("--points", type=int, default=heat_trace.DEFAULT_POINTS)
    p.set_defaults(func=cmd_heattrace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, code = args.func(args)
    except (DomainError, UsageError) as exc:
        print(f"rigidity: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CertificationError as exc:
        report, code = {"command": args.command, "error": str(exc), "witness": repr(exc.witness)}, EXIT_COUNTEREXAMPLE
    sys.stdout.write(dumps_report(report) if args.json else render_text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
