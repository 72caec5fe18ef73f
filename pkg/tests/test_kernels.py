"""The compiled and pure kernels must agree bit for bit."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from ftgossip import _pykernels as py
from ftgossip import kernels
from ftgossip.core import Schedule, node_update_cost, product
from ftgossip.schedules import build_asymmetric, build_hypercube

needs_compiled = pytest.mark.skipif(kernels.compiled_backend is None, reason="extension not built")


def identity(n, bits):
    return tuple((1 << bits) if r == c else 0 for r in range(n) for c in range(n))


@st.composite
def reachable(draw, max_n=7, max_steps=9):
    n = draw(st.integers(2, max_n))
    bits = 12
    flat = identity(n, bits)
    for _ in range(draw(st.integers(0, max_steps))):
        kind = draw(st.integers(0, 1))
        i, j = draw(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True))
        flat = py.apply_move(flat, n, kind, i, j)
    return n, bits, flat


def relabel(flat, n, p):
    return tuple(flat[p[r] * n + p[c]] for r in range(n) for c in range(n))


@given(reachable(), st.randoms(use_true_random=False))
@settings(max_examples=150)
def test_canonical_is_a_relabelling_invariant(state, rng):
    n, _, flat = state
    p = list(range(n))
    rng.shuffle(p)
    key = py.canonical(flat, n)
    assert key == py.canonical(relabel(flat, n, p), n)
    assert sorted(key) == sorted(flat)


@needs_compiled
@given(reachable())
@settings(max_examples=150)
def test_backends_agree(state):
    n, bits, flat = state
    c = kernels.compiled_backend
    assert c.canonical(flat, n) == py.canonical(flat, n)
    assert c.is_consensus(flat, n) == py.is_consensus(flat, n)
    for cap in range(0, 14):
        assert c.lower_bound(flat, n, bits, cap) == py.lower_bound(flat, n, bits, cap)
    for asym in (False, True):
        assert c.children(flat, n, asym, 0, 12, True, bits) == py.children(flat, n, asym, 0, 12, True, bits)
        assert c.children(flat, n, asym, 3, 9, False, bits) == py.children(flat, n, asym, 3, 9, False, bits)


@needs_compiled
@pytest.mark.parametrize("n,e", [(1, 0), (2, 1), (3, 2), (5, 3), (6, 3), (7, 4), (9, 4), (10, 4), (4, 1)])
def test_chi_scan_backends_agree(n, e):
    assert kernels.compiled_backend.chi_scan(n, e) == py.chi_scan(n, e)


def _converging():
    out = [build_hypercube(m) for m in range(1, 4)]
    out += [build_asymmetric(n) for n in range(2, 12)]
    return out


@pytest.mark.parametrize("sched", _converging(), ids=lambda s: f"n{s.n}_{len(s)}")
def test_lower_bound_never_exceeds_remaining_cost(sched):
    # the bound must be admissible along any converging schedule, after any relabelling
    rng = random.Random(sched.n)
    n = sched.n
    bits = len(sched) + 1
    steps = list(sched)
    p = list(range(n))
    rng.shuffle(p)
    for k in range(len(steps) + 1):
        psi = product(Schedule(n, steps[:k]))
        flat = relabel(psi.scaled(bits), n, p)
        remaining = node_update_cost(Schedule(n, steps[k:]))
        assert py.lower_bound(flat, n, bits, 4 * n * n) <= remaining
        assert kernels.lower_bound(flat, n, bits, 4 * n * n) <= remaining


def test_root_bound_is_tight_for_small_n():
    assert py.lower_bound(identity(4, 10), 4, 10, 50) == 8
    assert py.lower_bound(identity(5, 14), 5, 14, 50) == 12
    assert py.lower_bound(identity(3, 8), 3, 8, 2) == 3  # clipped at cap + 1


def test_apply_move_is_exact_halving():
    flat = py.apply_move(identity(3, 2), 3, 1, 2, 1)
    assert flat == (4, 0, 0, 0, 4, 0, 0, 2, 2)
    assert py.apply_move(flat, 3, 0, 0, 2) == (2, 1, 1, 0, 4, 0, 2, 1, 1)


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.backend_for(99) == "python"
