import itertools
import random
from fractions import Fraction

import pytest

from ftgossip.core import (
    A,
    S,
    Schedule,
    is_consensus_matrix,
    node_update_cost,
    product,
    run,
    step_matrix,
)
from ftgossip.exact import Dyadic
from ftgossip.schedules import (
    BinaryLabel,
    asymmetric_stages,
    beta_report,
    build_asymmetric,
    build_hypercube,
    decompose,
    expected_beta_multiset,
    expected_cost,
    hypercube_graph_edges,
    hypercube_stages,
    summary,
)


def multiset(xs):
    out = {}
    for x in xs:
        out[x] = out.get(x, 0) + 1
    return out


def test_decompose():
    assert [decompose(n) for n in (1, 2, 3, 5, 8, 12)] == [(0, 0), (1, 0), (1, 1), (2, 1), (3, 0), (3, 4)]
    with pytest.raises(ValueError):
        decompose(0)


def test_labels_msb_first():
    assert str(BinaryLabel(1, 2)) == "00"
    assert str(BinaryLabel(3, 2)) == "10"
    assert BinaryLabel(6, 3).digit(1) == 1 and BinaryLabel(6, 3).digit(3) == 1


def test_hypercube_small():
    assert list(build_hypercube(0)) == []
    assert list(build_hypercube(1)) == [S(1, 2)]
    assert list(build_hypercube(2)) == [S(1, 3), S(2, 4), S(1, 2), S(3, 4)]
    assert summary(build_hypercube(2)) == (4, 8)


@pytest.mark.parametrize("m", range(0, 5))
def test_hypercube_reaches_uniform(m):
    psi = product(build_hypercube(m))
    assert all(x == Dyadic(1, m) for row in psi.rows for x in row)
    assert node_update_cost(build_hypercube(m)) == m * 2**m


@pytest.mark.parametrize("m", range(1, 5))
def test_hypercube_edges_are_the_cube(m):
    chosen = {frozenset((s.i, s.j)) for s in build_hypercube(m)}
    assert chosen == hypercube_graph_edges(m)
    assert len(chosen) == m * 2 ** (m - 1)


@pytest.mark.parametrize("m", [2, 3])
def test_stage_prefixes_shrink_value_count(m):
    rng = random.Random(m)
    n = 2**m
    for _ in range(5):
        x = [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(n)]
        for k, stage in enumerate(hypercube_stages(m), 1):
            x = run(Schedule(n, stage), x)
            assert len(set(x)) <= 2 ** (m - k)


@pytest.mark.parametrize("n", [4, 5, 7, 8, 11])
def test_steps_within_a_stage_commute(n):
    stages = hypercube_stages(n.bit_length() - 1) if n & (n - 1) == 0 else asymmetric_stages(n)
    for stage in stages:
        for a, b in itertools.combinations(stage, 2):
            P, Q = step_matrix(n, a), step_matrix(n, b)
            assert P @ Q == Q @ P
        base = product(Schedule(n, stage))
        assert product(Schedule(n, list(reversed(stage)))) == base


def test_mixed_examples():
    assert list(build_asymmetric(1)) == []
    assert list(build_asymmetric(2)) == [S(1, 2)]
    assert list(build_asymmetric(3)) == [S(1, 3), A(3, 2), S(1, 2)]
    assert list(build_asymmetric(5)) == [S(1, 5), A(5, 3), S(1, 3), S(2, 4), A(5, 2), S(1, 2), S(3, 4)]
    assert node_update_cost(build_asymmetric(3)) == 5
    assert node_update_cost(build_asymmetric(5)) == 12


def test_five_node_value_formula():
    sched = build_asymmetric(5)
    coeffs = [run(sched, [int(k == t) for k in range(5)])[0] for t in range(5)]
    assert coeffs == [Fraction(1, 8), Fraction(1, 4), Fraction(1, 4), Fraction(1, 4), Fraction(1, 8)]


@pytest.mark.parametrize("n", range(1, 17))
def test_mixed_schedule_converges_at_predicted_cost(n):
    sched = build_asymmetric(n)
    beta = is_consensus_matrix(product(sched))
    assert beta is not None
    assert node_update_cost(sched) == expected_cost(n)
    assert multiset(beta) == expected_beta_multiset(n)


def test_stage_split_covers_schedule():
    for n in range(2, 17):
        blocks = asymmetric_stages(n)
        assert [s for b in blocks for s in b] == list(build_asymmetric(n))


def test_beta_report_values():
    r4 = beta_report(4)
    assert r4.l1 == r4.l2_squared == r4.linf == r4.closed_form == 0
    r3 = beta_report(3)
    assert (r3.linf, r3.l1, r3.closed_form) == (Fraction(1, 6), Fraction(1, 3), Fraction(1, 24))
    r5 = beta_report(5)
    assert r5.linf == Fraction(3, 40) and r5.half_step == Fraction(1, 8)
    assert r5.inequality_holds


@pytest.mark.parametrize("n", range(1, 40))
def test_closed_form_is_squared_euclidean_distance(n):
    # observed identity, not a stated claim; kept as a regression guard
    rep = beta_report(n)
    assert rep.closed_form == rep.l2_squared
