from fractions import Fraction
from itertools import product as cartesian

import pytest

from ftgossip.combinatorics import (
    DyadicComposition,
    enumerate_F,
    lower_bound_link,
    min_chi,
    optimizer_shape,
)
from ftgossip.core import S, Schedule
from ftgossip.exact import Dyadic, chi
from ftgossip.schedules import build_asymmetric, build_hypercube, decompose


def brute_min_chi(n, e):
    """All n-tuples of k / 2^e, no composition machinery."""
    total = 1 << e
    best = None
    for parts in cartesian(range(1, total + 1), repeat=n):
        if sum(parts) != total:
            continue
        s = sum(chi(Dyadic(v, e)) for v in parts)
        best = s if best is None else min(best, s)
    return best


def test_enumeration_examples():
    assert [f.parts for f in enumerate_F(2, 1)] == [(Dyadic(1, 1), Dyadic(1, 1))]
    assert [f.parts for f in enumerate_F(1, 0)] == [(Dyadic(1),)]
    got = list(enumerate_F(3, 2))
    assert len(got) == 3
    assert {f.sorted().parts for f in got} == {(Dyadic(1, 1), Dyadic(1, 2), Dyadic(1, 2))}


@pytest.mark.parametrize("n,e", [(3, 3), (4, 3), (5, 3), (2, 4)])
def test_enumeration_is_exact_and_duplicate_free(n, e):
    seen = set()
    for f in enumerate_F(n, e):
        assert sum((p.to_fraction() for p in f.parts), Fraction(0)) == 1
        assert all(p.num % 2 == 1 or p.exp == 0 for p in f.parts)
        assert f.zeta <= e
        seen.add(f.parts)
    from math import comb

    assert len(seen) == comb(2**e - 1, n - 1)


def test_composition_validation():
    with pytest.raises(ValueError):
        DyadicComposition((Dyadic(1, 1), Dyadic(1, 2)))
    with pytest.raises(ValueError):
        DyadicComposition((Dyadic(3, 1), Dyadic(-1, 1)))


def test_min_chi_examples():
    r4 = min_chi(4)
    assert r4.value == 8 and r4.witness.parts == (Dyadic(1, 2),) * 4
    r3 = min_chi(3)
    assert r3.value == 5 and r3.witness.parts == (Dyadic(1, 1), Dyadic(1, 2), Dyadic(1, 2))
    r6 = min_chi(6)
    assert r6.value == 16
    assert r6.witness.parts == (Dyadic(1, 2),) * 2 + (Dyadic(1, 3),) * 4


@pytest.mark.parametrize("n", range(1, 7))
def test_min_chi_matches_brute_force(n):
    m, _ = decompose(n)
    for e in (m + 1, m + 2):
        if n <= 5 or e == m + 1:
            assert min_chi(n, e).value == brute_min_chi(n, e)


@pytest.mark.parametrize("n", range(1, 11))
def test_min_chi_formula(n):
    m, r = decompose(n)
    assert min_chi(n).value == m * n + 2 * r
    assert min_chi(n, m + 2).value == m * n + 2 * r


@pytest.mark.parametrize("n", range(1, 9))
def test_optimizer_structure(n):
    m, r = decompose(n)
    res = min_chi(n)
    assert res.optimizers
    for f in res.optimizers:
        assert f.chi_sum == res.value
        sh = optimizer_shape(f)
        assert sh.all_unit_numerators and sh.exponent_spread_ok
        assert sh.deep_count == 2 * r
        assert sh.zeta == (m + 1 if r else m)


def test_lower_bound_link_examples():
    link = lower_bound_link(build_asymmetric(3))
    assert link.diagonal == (Dyadic(1, 2), Dyadic(1, 1), Dyadic(1, 2))
    assert link.ok and link.chi_sum == link.cost == 5
    link = lower_bound_link(build_hypercube(2))
    assert link.ok and link.chi_sum == link.cost == 8
    padded = build_hypercube(2) + Schedule(4, [S(1, 2)])
    link = lower_bound_link(padded)
    assert link.ok and link.cost > link.chi_sum
    with pytest.raises(ValueError):
        lower_bound_link(Schedule(3, [S(1, 2)]))


@pytest.mark.parametrize("n", range(2, 17))
def test_lower_bound_link_on_constructions(n):
    link = lower_bound_link(build_asymmetric(n))
    assert link.ok and link.cost == link.chi_sum == link.floor
