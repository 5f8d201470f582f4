import json
import subprocess
import sys
from pathlib import Path

import pytest

from cpn_rigidity.cli import (
    COVERED,
    EXCEPTIONAL,
    MIDDLE,
    OUT_OF_RANGE,
    RigidityVerdict,
    dumps_report,
    main,
    rigidity_verdict,
)
from cpn_rigidity.heat_coefficients import a1_coefficient, key_combination, patodi_lambdas

FIXTURE = str(Path(__file__).resolve().parents[1] / "fixtures" / "s2_p0.txt")


def run(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_lambdas_16_2(capsys):
    code, rep, _ = run(capsys, "lambdas", "16", "2")
    assert code == 0 and rep["lambda1"] == "0"


def test_lambdas_4_0(capsys):
    code, rep, _ = run(capsys, "lambdas", "4", "0")
    assert (rep["lambda1"], rep["lambda2"], rep["lambda3"]) == ("1/180", "-1/180", "1/72")
    assert rep["key_combination"] is None


def test_lambdas_10_4_matches_library(capsys):
    _, rep, _ = run(capsys, "lambdas", "10", "4")
    lam = patodi_lambdas(10, 4)
    assert rep["lambda2"] == str(lam.lambda2)
    assert rep["key_combination"] == str(key_combination(5, 4))
    assert rep["a1_coefficient"] == str(a1_coefficient(10, 4))


@pytest.mark.parametrize("argv", [["lambdas", "7", "2"], ["lambdas", "10", "11"], ["classify", "5"], ["bundle", "1", "0", "1"]])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["certify", "bogus", "1", "2"])
    assert exc.value.code == 2


def test_certify_lambda1(capsys):
    code, rep, _ = run(capsys, "certify", "lambda1", "4", "200")
    assert code == 0 and rep["ok"]
    assert rep["equality_set"] == [[2, 16], [14, 16]]


def test_certify_key_positivity(capsys):
    code, rep, _ = run(capsys, "certify", "key-positivity", "4", "200")
    assert code == 0 and rep["equality_set"] == [] and rep["negative"] == []


def test_certify_identity_and_closed_forms(capsys):
    assert run(capsys, "certify", "identity", "2", "60")[0] == 0
    assert run(capsys, "certify", "closed-forms", "4", "60")[0] == 0


def test_certify_counterexample_exits_1(capsys, monkeypatch):
    import cpn_rigidity.positivity as pos

    real = pos.sweep_m

    def tampered(m):
        c = real(m)
        if m == 8:
            c.key_negative.append((4, 8))
        return c

    monkeypatch.setattr(pos, "sweep_m", tampered)
    code, rep, _ = run(capsys, "certify", "key-positivity", "4", "10")
    assert code == 1 and rep["negative"] == [[4, 8]]


def test_exceptional_count(capsys):
    _, rep, _ = run(capsys, "exceptional", "--count", "3")
    assert [(q["n"], q["p"]) for q in rep["pairs"]] == [(48, 20), (9408, 3976), (1825200, 771420)]
    _, rep, _ = run(capsys, "exceptional", "--count", "1")
    assert rep["pairs"][0]["mirror"] == 76


def test_exceptional_brute_force(capsys):
    code, rep, _ = run(capsys, "exceptional", "--max-n", "47", "--brute-force")
    assert code == 0 and rep["pairs"] == [] and rep["brute_force"]["agrees"]
    code, rep, _ = run(capsys, "exceptional", "--max-n", "10000", "--brute-force")
    assert code == 0 and rep["brute_force"]["solutions"] == [[48, 20], [48, 76], [9408, 3976], [9408, 14840]]


def test_exceptional_brute_force_mismatch(capsys, monkeypatch):
    import cpn_rigidity.pell as pell

    monkeypatch.setattr(pell, "brute_force_scan", lambda n_max, n_min=1: [])
    code, rep, _ = run(capsys, "exceptional", "--count", "1", "--brute-force")
    assert code == 1 and not rep["brute_force"]["agrees"]


@pytest.mark.parametrize("p,unresolved", [(2, [1]), (20, [10, 48]), (6, [3])])
def test_classify(capsys, p, unresolved):
    code, rep, _ = run(capsys, "classify", str(p))
    assert code == 0 and rep["unresolved"] == unresolved
    by_n = {v["n"]: v["classification"] for v in rep["verdicts"]}
    assert by_n[p // 2] == MIDDLE
    assert by_n[p // 2 + 1] == COVERED


def test_verdict_exceptional_pair():
    v = rigidity_verdict(48, 76)
    assert v.classification == EXCEPTIONAL and not v.a1_nonzero and v.key_positive
    assert rigidity_verdict(3, 1).classification == OUT_OF_RANGE
    assert rigidity_verdict(2, 6).classification == OUT_OF_RANGE


def test_verdict_lambda1_zero():
    assert rigidity_verdict(8, 2).lambda1_sign == "zero"
    assert rigidity_verdict(8, 4).lambda1_sign == "positive"


def test_verdict_invariant_enforced():
    with pytest.raises(ArithmeticError):
        RigidityVerdict(5, 4, False, True, "positive", COVERED)


def test_verdict_matches_exact_coefficients():
    for n in range(2, 30):
        for p in range(2, 2 * n - 1, 2):
            v = rigidity_verdict(n, p)
            assert v.a1_nonzero == (a1_coefficient(2 * n, p) != 0)
            assert v.key_positive == (key_combination(n, p) > 0)


def test_curvature_selftest(capsys):
    code, rep, _ = run(capsys, "curvature", "selftest", "--n", "3", "--trials", "100", "--seed", "7")
    assert code == 0 and rep["ok"] and rep["seed"] == 7


def test_bundle_1_8_2(capsys):
    code, rep, _ = run(capsys, "bundle", "1", "8", "2")
    assert code == 0 and rep["einstein"] and rep["explicit_curvature_check"]
    assert rep["a_squared"] == "4 * pi^2"
    assert rep["r_tangent"] == rep["r_fiber"] == "2"


def test_heattrace(capsys):
    code, rep, _ = run(capsys, "heattrace", FIXTURE, "--order", "2")
    assert code == 0
    assert float(rep["targets"][0]["relative_error"]) < 0.01


def test_heattrace_wide_window_fails_a2(capsys):
    code, rep, _ = run(capsys, "heattrace", FIXTURE, "--t-min", "0.02", "--t-max", "0.2")
    assert code == 1 and not rep["targets"][2]["ok"]


def test_json_round_trip(capsys):
    for argv in (["classify", "20"], ["bundle", "2", "7/3", "1"], ["lambdas", "12", "4"], ["exceptional", "--count", "4"]):
        _, rep, out = run(capsys, *argv)
        assert dumps_report(json.loads(out)) == out


def test_text_output(capsys):
    assert main(["exceptional", "--count", "2"]) == 0
    out = capsys.readouterr().out
    assert "n=9408, p=3976, mirror=14840" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cpn_rigidity", "lambdas", "16", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and "lambda1: 0" in proc.stdout
