import math

import pytest

from cpn_rigidity.errors import DomainError
from cpn_rigidity.pell import (
    DegeneracySolution,
    ExceptionalPair,
    brute_force_scan,
    classify_degree,
    degeneracy_solutions,
    exceptional_pairs,
    exceptional_pairs_up_to,
    pell_solutions,
    satisfies_degeneracy,
)


def test_first_pell_solutions():
    sols = pell_solutions(2)
    assert (sols[0].n_tilde, sols[0].r_tilde) == (3, 2)
    assert (sols[1].n_tilde, sols[1].r_tilde) == (48, 28)
    assert 97**2 - 12 * 28**2 == 1


def test_pell_invariant_and_power_form():
    sols = pell_solutions(25)
    # independent route: expand (7 + 2 sqrt 12)^k with integer pairs
    x, y = 1, 0
    for s in sols:
        x, y = 7 * x + 24 * y, 2 * x + 7 * y
        assert (2 * s.n_tilde + 1, s.r_tilde) == (x, y)
        assert (2 * s.n_tilde + 1) ** 2 - 12 * s.r_tilde**2 == 1


def test_degeneracy_start():
    d = degeneracy_solutions(2)
    assert (d[0].n_tilde, d[0].p_tilde, d[0].parity) == (3, 1, "odd")
    assert (d[1].n_tilde, d[1].p_tilde, d[1].parity) == (48, 20, "even")
    assert 1 - 6 + 5 == 0


def test_parity_alternates():
    for sol in degeneracy_solutions(20):
        assert sol.parity == ("odd" if sol.k % 2 else "even")


def test_pell_maps_to_degeneracy():
    for pell, deg in zip(pell_solutions(20), degeneracy_solutions(20)):
        assert (pell.n_tilde, pell.n_tilde - pell.r_tilde) == (deg.n_tilde, deg.p_tilde)


def test_exceptional_pairs_first_three():
    pairs = exceptional_pairs(3)
    assert [(q.n, q.p) for q in pairs] == [(48, 20), (9408, 3976), (1825200, 771420)]
    assert pairs[0].mirror == 76
    assert 265 * 48 - 168 * 20 + 48 == 9408


def test_exceptional_growth_and_invariants():
    pairs = exceptional_pairs(15)
    for a, b in zip(pairs, pairs[1:]):
        assert b.n > 190 * a.n
        assert b.p > a.mirror
    assert pairs[-1].n > 2**64


def test_invalid_records_rejected():
    with pytest.raises(ArithmeticError):
        DegeneracySolution(1, 4, 1)
    with pytest.raises(ArithmeticError):
        ExceptionalPair(1, 3, 1)


@pytest.mark.parametrize("count", [0, -1])
def test_count_validation(count):
    with pytest.raises(DomainError):
        exceptional_pairs(count)


def test_brute_force_small():
    assert brute_force_scan(47) == []
    assert brute_force_scan(10_000) == [(48, 20), (48, 76), (9408, 3976), (9408, 14840)]
    assert 48 * 49 // 3 == 784 == 28**2


def test_brute_force_excludes_odd_p_at_3():
    assert brute_force_scan(3) == []
    assert satisfies_degeneracy(3, 1) and satisfies_degeneracy(3, 5)


def test_oracle_equivalence_up_to_1e6():
    scanned = brute_force_scan(10**6)
    recursed = []
    for pair in exceptional_pairs_up_to(10**6):
        recursed += [(pair.n, pair.p), (pair.n, pair.mirror)]
    assert scanned == recursed


def test_brute_force_range_partition():
    whole = brute_force_scan(20_000)
    parts = brute_force_scan(9_000) + brute_force_scan(20_000, n_min=9_001)
    assert whole == parts


@pytest.mark.parametrize(
    "p,exceptional,unresolved",
    [
        (2, False, (1,)),
        (6, False, (3,)),
        (20, True, (10, 48)),
        (76, True, (38, 48)),
        (3976, True, (1988, 9408)),
        (14840, True, (7420, 9408)),
        (2878980, True, (1439490, 1825200)),
        (22, False, (11,)),
    ],
)
def test_classify_degree(p, exceptional, unresolved):
    c = classify_degree(p)
    assert c.exceptional is exceptional
    assert c.unresolved == unresolved


@pytest.mark.parametrize("p", [0, 3, -2])
def test_classify_domain(p):
    with pytest.raises(DomainError):
        classify_degree(p)


def test_classify_agrees_with_scan_for_small_p():
    hits = {p for _, p in brute_force_scan(10_000)}
    for p in range(2, 200, 2):
        assert classify_degree(p).exceptional == (p in hits)


def test_isqrt_exact_on_big_values():
    big = (10**40 + 7) ** 2
    assert math.isqrt(big) ** 2 == big
