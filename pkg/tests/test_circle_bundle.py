import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cpn_rigidity.circle_bundle import (
    BundleData,
    bundle_ricci,
    connection_square,
    einstein_parameter_ratio,
    einstein_parameter_squared,
    einstein_scalar,
    fs_base_tensor,
    lemma_cross_check,
    solve_einstein_a_squared,
    volume_bound,
    volume_relation,
)
from cpn_rigidity.curvature import fubini_study_tensor, realify
from cpn_rigidity.errors import DomainError
from cpn_rigidity.exact import PiScaled


def test_connection_square_example():
    assert connection_square(1, 4, 2) == PiScaled(F(-1, 16), -2)


def test_connection_square_homogeneous():
    for n, s, I in [(1, 4, 2), (3, F(5, 2), 1), (5, 9, 4)]:
        assert connection_square(n, 2 * s, I) == 4 * connection_square(n, s, I)


@pytest.mark.parametrize("args", [(1, 0, 1), (1, -3, 1), (1, 2, 0), (0, 2, 1)])
def test_connection_square_rejects(args):
    with pytest.raises(DomainError):
        connection_square(*args)


def test_einstein_parameter_n1():
    # 16 pi^2 * 2^2 * 1 / (8 * 2)
    assert einstein_parameter_squared(1, 8, 2) == PiScaled(4, 2)
    assert str(einstein_parameter_squared(1, 8, 2)) == "4 * pi^2"


def test_einstein_ricci_values():
    for n, s, I in [(1, 8, 2), (2, 12, 3), (4, F(7, 5), 2)]:
        ric = bundle_ricci(n, s, I, einstein_parameter_squared(n, s, I))
        assert ric.r_tangent == ric.r_fiber == F(s) / (2 * (n + 1))
        assert ric.scalar(n) == einstein_scalar(n, s)


def test_degenerate_fiber():
    ric = bundle_ricci(3, 6, 2, PiScaled(0, 2))
    assert ric.r_tangent == 1 and ric.r_fiber == 0


def test_substitution_oracle():
    rng = random.Random(4)
    n, s, I = 2, F(12), 3
    for _ in range(20):
        q = F(rng.randint(1, 50), rng.randint(1, 50))
        ric = bundle_ricci(n, s, I, PiScaled(q, 2))
        # a^2 (s/(8 n pi I))^2 with a^2 = q pi^2
        sig2 = (s / (8 * n * I)) ** 2
        assert ric.r_tangent == s / (2 * n) - 2 * q * sig2
        assert ric.r_fiber == s * s * q / (2 * n * 16 * I * I)


def test_pi_grading_mismatch():
    with pytest.raises(DomainError):
        bundle_ricci(1, 8, 2, PiScaled(4, 1))
    with pytest.raises(DomainError):
        BundleData.build(1, 8, 2, F(4))


pos = st.fractions(min_value=F(1, 20), max_value=50, max_denominator=30)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 20), pos, st.data())
def test_einstein_random(n, s, data):
    I = data.draw(st.integers(1, n + 1))
    a2 = einstein_parameter_squared(n, s, I)
    assert a2 == solve_einstein_a_squared(n, s, I)
    ric = bundle_ricci(n, s, I, a2)
    assert ric.r_tangent == ric.r_fiber == s / (2 * (n + 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), pos, st.integers(1, 5), pos, pos)
def test_homogeneity(n, s, I, q, t):
    a2 = PiScaled(q, 2)
    base = bundle_ricci(n, s, I, a2)
    scaled = bundle_ricci(n, t * s, I, a2 / t)
    assert scaled.r_tangent == t * base.r_tangent
    assert scaled.r_fiber == t * base.r_fiber


def test_sphere_scalar_consistency():
    for n in range(1, 6):
        s = F(4 * n * (n + 1))  # c = 1
        c = s / (4 * n * (n + 1))
        assert c * (2 * n + 1) * 2 * n == einstein_scalar(n, s)


def test_volume_bound():
    assert volume_bound(4, 5).ratio == 1
    vb = volume_bound(3, 1)
    assert vb.ratio == 4 and vb.degree == 4 * 4**3
    with pytest.raises(DomainError):
        volume_bound(3, 5)
    with pytest.raises(DomainError):
        volume_bound(3, 0)


def test_volume_relation():
    assert volume_relation(1, 1) == PiScaled(2, 1)
    assert volume_relation(0, PiScaled(3, 1)) == 0
    assert volume_relation(F(1, 2), PiScaled(3, 1)) == PiScaled(3, 2)
    with pytest.raises(DomainError):
        volume_relation(1, PiScaled(1, 2))


def test_volume_ratio_composition():
    for n in range(1, 8):
        for I in range(1, n + 2):
            assert einstein_parameter_ratio(n, F(17, 3), I) == F(n + 1, I)


def test_base_tensor_matches_realified_fs():
    n = 2
    sparse = fs_base_tensor(n, F(3, 2))
    dense = np.zeros((2 * n,) * 4)
    for (i, j, k, l), v in sparse.items():
        dense[i, j, l, k] = float(v)  # back to the R(X,Y,Y,X) convention
    assert np.max(np.abs(dense - realify(fubini_study_tensor(n, 1.5)).components)) < 1e-14


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lemma_cross_check_einstein(n):
    for I in range(1, n + 2):
        for s in (F(1), F(7, 3), F(40)):
            check = lemma_cross_check(n, s, I)
            assert check.ok and check.symmetry_defects == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lemma_cross_check_generic_a(n):
    for q in (F(1, 3), F(5), F(0)):
        assert lemma_cross_check(n, F(6), 1, PiScaled(q, 2)).ok
