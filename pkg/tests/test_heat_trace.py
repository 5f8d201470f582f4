import math
from fractions import Fraction as F
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sklearn.base import clone

from cpn_rigidity.curvature import constant_curvature_tensor, curvature_norms
from cpn_rigidity.errors import DomainError
from cpn_rigidity.exact import PiScaled
from cpn_rigidity.heat_trace import (
    ConditioningError,
    HeatTraceExpansion,
    SpectrumFixture,
    bundled_fixture,
    counting_function,
    fit_expansion,
    geometric_grid,
    heat_trace,
    load_fixture,
    patodi_targets,
    save_fixture,
    scale_fixture,
    sphere_constants,
    sphere_fixture,
    sphere_volume,
)

ROOT = Path(__file__).resolve().parents[1]
S2 = sphere_fixture(2, 200)


def test_constant_fixture():
    f = SpectrumFixture(3, 0, 1, ((0, 1),))
    for t in (1e-3, 0.5, 40.0):
        assert heat_trace(f, t).value == 1


def test_s2_trace_matches_high_precision():
    mpmath.mp.dps = 40
    t = mpmath.mpf("0.1")
    oracle = mpmath.fsum((2 * k + 1) * mpmath.exp(-k * (k + 1) * t) for k in range(201))
    got = heat_trace(S2, 0.1)
    assert abs(got.value - float(oracle)) < 1e-12
    assert got.tail_bound < 1e-300 or got.tail_bound == 0


@pytest.mark.parametrize("m", [1, 2, 3, 4, 7])
def test_sphere_multiplicities(m):
    f = sphere_fixture(m, 12)
    # dimension of degree-k harmonic polynomials in m+1 variables
    expected = [1, m + 1] + [math.comb(k + m, m) - math.comb(k + m - 2, m) for k in range(2, 13)]
    assert [lam for lam, _ in f.entries] == [k * (k + m - 1) for k in range(13)]
    assert [mult for _, mult in f.entries] == expected


def test_weyl_count_s2():
    # N(lambda) ~ vol * lambda / (4 pi) = lambda for the unit 2-sphere
    for K in (50, 100, 199):
        lam = K * (K + 1)
        assert counting_function(S2, lam) == (K + 1) ** 2
        assert abs(counting_function(S2, lam) / lam - 1) < 2.5 / K


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 20.0), st.floats(1e-3, 2.0))
def test_scaling_invariance(lam, t):
    a = heat_trace(scale_fixture(S2, lam), t).value
    b = heat_trace(S2, lam * t).value
    assert abs(a - b) <= 1e-14 * max(1.0, abs(b))


def test_monotone_decreasing():
    values = [heat_trace(S2, t).value for t in np.geomspace(1e-3, 5, 200)]
    assert all(x > y for x, y in zip(values, values[1:]))


@pytest.mark.parametrize("t", [0, -0.1])
def test_nonpositive_t(t):
    with pytest.raises(DomainError):
        heat_trace(S2, t)


def test_zero_multiplicity_checked():
    with pytest.raises(DomainError):
        SpectrumFixture(2, 0, 2, ((0, 1), (2, 3)))
    with pytest.raises(DomainError):
        SpectrumFixture(2, 0, 1, ((0, 1), (6, 5), (2, 3)))
    with pytest.raises(DomainError):
        SpectrumFixture(2, 0, 0, ())


def test_fixture_file_round_trip(tmp_path):
    save_fixture(tmp_path / "f.txt", S2)
    assert load_fixture(tmp_path / "f.txt") == S2
    assert (tmp_path / "f.txt").read_text().splitlines()[0] == "2 0 1 unit-S2-functions 200"


def test_bundled_fixture_matches_generator():
    assert bundled_fixture() == S2
    assert load_fixture(ROOT / "fixtures" / "s2_p0.txt") == S2


def test_fixture_bad_b_p_on_load(tmp_path):
    (tmp_path / "f.txt").write_text("2 0 3 x 1\n0 1\n2 3\n")
    with pytest.raises(DomainError):
        load_fixture(tmp_path / "f.txt")


def test_s2_constants_from_curvature_oracle():
    norms = {k: F(v) for k, v in curvature_norms(constant_curvature_tensor(2)).items()}
    c = sphere_constants(2)
    vol = c["vol"]
    assert vol == PiScaled(4, 1)
    assert c["int_R2"] == norms["R"] * vol
    assert c["int_Ric2"] == norms["Ric"] * vol
    assert c["int_s2"] == norms["s"] ** 2 * vol


def test_sphere_volumes():
    for m in range(1, 9):
        exact = 2 * math.pi ** ((m + 1) / 2) / math.gamma((m + 1) / 2)
        assert float(sphere_volume(m)) == pytest.approx(exact, rel=1e-14)


def test_targets_s2():
    a0, a1, a2 = patodi_targets(2, 0, sphere_constants(2))
    assert (a0, a1, a2) == (PiScaled(4, 1), PiScaled(F(4, 3), 1), PiScaled(F(4, 15), 1))


def test_targets_p0_a1_is_sixth():
    for m in (2, 4, 9):
        c = {k: 1 for k in ("vol", "int_s", "int_R2", "int_Ric2", "int_s2")}
        assert patodi_targets(m, 0, c)[1] == F(1, 6)


def test_targets_s2_one_forms():
    assert patodi_targets(2, 1, sphere_constants(2))[0] == PiScaled(8, 1)


def test_targets_missing_constant():
    with pytest.raises(DomainError):
        patodi_targets(2, 0, {"vol": 1})


def test_fit_s2_accuracy():
    fit = fit_expansion(S2)
    targets = [float(x) for x in patodi_targets(2, 0, sphere_constants(2))]
    errs = [abs(a - b) / b for a, b in zip(fit.coefficients, targets)]
    assert errs[0] < 0.01 and errs[1] < 0.02 and errs[2] < 0.05
    assert fit.tail_bound < 1e-10 and fit.condition < 1e3


def test_fit_rescaled_fixture():
    base = fit_expansion(S2)
    grid = np.array(base.t_grid) / 4
    scaled = fit_expansion(scale_fixture(S2, 4), t_grid=grid)
    a0, a1, a2 = base.coefficients
    # eigenvalues times 4 is the metric divided by 4: a_i scales by 4^(i - m/2)
    assert scaled.coefficients[0] == pytest.approx(a0 / 4, rel=1e-9)
    assert scaled.coefficients[1] == pytest.approx(a1, rel=1e-9)
    assert scaled.coefficients[2] == pytest.approx(4 * a2, rel=1e-7)


def test_truncation_stress():
    short = fit_expansion(sphere_fixture(2, 50))
    full = fit_expansion(S2)
    assert short.tail_bound > 1e-10
    assert abs(short.coefficients[0] - full.coefficients[0]) <= short.coef_error_bound


def test_max_tail_rejects_short_fixture():
    with pytest.raises(DomainError):
        fit_expansion(sphere_fixture(2, 50), max_tail=1e-10)


def test_fit_grid_validation():
    with pytest.raises(DomainError):
        fit_expansion(S2, t_grid=np.linspace(0.01, 0.1, 10))
    with pytest.raises(DomainError):
        fit_expansion(S2, t_grid=[0.1, 0.01])
    with pytest.raises(DomainError):
        fit_expansion(S2, order=3)


def test_ill_conditioned_grid_rejected():
    with pytest.raises(ConditioningError) as exc:
        fit_expansion(S2, t_grid=geometric_grid((0.01, 0.0100001), 10))
    assert exc.value.condition > 1e8


def test_estimator_api():
    est = HeatTraceExpansion(m=2, order=1)
    assert est.get_params() == {"m": 2, "order": 1, "max_condition": 1e8}
    t = geometric_grid()
    y = np.array([heat_trace(S2, x).value for x in t])
    fitted = clone(est).set_params(order=2).fit(t.reshape(-1, 1), y)
    assert fitted.coef_.shape == (3,)
    assert fitted.score(t, y) > 0.999999
    assert np.allclose(fitted.predict(t), y, rtol=1e-6)


def test_estimator_unfitted_predict():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        HeatTraceExpansion().predict([0.1])
