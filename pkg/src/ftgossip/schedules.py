"""Constructive finite-time schedules.

Nodes carry the binary label of ``i - 1`` with digit 1 the most
significant bit.  The hypercube builder averages along one digit per
stage; the mixed builder first pairs the surplus ``r`` nodes with their
low-half twins and then lets them shadow the hypercube stages through
head-only updates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, List, Set, Tuple

from .core import A, GossipStep, S, Schedule, is_consensus_matrix, node_update_cost, product
from .exact import Dyadic


def decompose(n: int) -> Tuple[int, int]:
    """Return (m, r) with n = 2**m + r and 0 <= r < 2**m."""
    if n < 1:
        raise ValueError("n must be positive")
    m = n.bit_length() - 1
    return m, n - (1 << m)


@dataclass(frozen=True)
class BinaryLabel:
    """Fixed-width binary digits of ``node - 1``; ``bits[0]`` is digit D_1 (MSB)."""

    node: int
    width: int

    @property
    def bits(self) -> Tuple[int, ...]:
        v = self.node - 1
        return tuple((v >> (self.width - 1 - k)) & 1 for k in range(self.width))

    def digit(self, s: int) -> int:
        """Digit D_s, 1-based."""
        return self.bits[s - 1]

    def __str__(self) -> str:
        return "".join(map(str, self.bits))


def _flip(node: int, width: int, s: int) -> int:
    """Node whose label differs from ``node`` in digit s only."""
    return ((node - 1) ^ (1 << (width - s))) + 1


def hypercube_stage(m: int, s: int) -> List[Tuple[int, int]]:
    """Pairs differing exactly in digit s, ascending by (min, max)."""
    n = 1 << m
    pairs = set()
    for i in range(1, n + 1):
        j = _flip(i, m, s)
        pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


def build_hypercube(m: int) -> Schedule:
    if m < 0:
        raise ValueError("m must be nonnegative")
    steps = [S(i, j) for s in range(1, m + 1) for i, j in hypercube_stage(m, s)]
    return Schedule(1 << m, steps)


def hypercube_stages(m: int) -> List[List[GossipStep]]:
    return [[S(i, j) for i, j in hypercube_stage(m, s)] for s in range(1, m + 1)]


def hypercube_graph_edges(m: int) -> Set[FrozenSet[int]]:
    """Edges of the m-fold Cartesian product of K_2, relabelled to 1..2^m.

    Vertices of the product are bit tuples (first factor = most significant
    digit); two are adjacent when they differ in exactly one coordinate.
    """
    vertices: List[Tuple[int, ...]] = [()]
    edges: Set[FrozenSet[Tuple[int, ...]]] = set()
    for _ in range(m):
        new_vertices = [v + (b,) for v in vertices for b in (0, 1)]
        new_edges = set()
        for e in edges:  # copy old edges in each layer
            a, b = tuple(e)
            for bit in (0, 1):
                new_edges.add(frozenset((a + (bit,), b + (bit,))))
        for v in vertices:  # K_2 edges between the two layers
            new_edges.add(frozenset((v + (0,), v + (1,))))
        vertices, edges = new_vertices, new_edges

    def label(v: Tuple[int, ...]) -> int:
        out = 0
        for b in v:
            out = 2 * out + b
        return out + 1

    return {frozenset(label(v) for v in e) for e in edges}


def build_asymmetric(n: int) -> Schedule:
    if n < 1:
        raise ValueError("n must be positive")
    m, r = decompose(n)
    if n == 1:
        return Schedule(1, ())
    width = m + 1
    low = 1 << m
    steps: List[GossipStep] = []
    # stage 1: the r pairs split only by digit 1
    for t in range(1, r + 1):
        steps.append(S(t, t + low))
    for s in range(2, width + 1):
        # heads are the high nodes; partners sit in the low half with digit s flipped
        heads = [(h, _flip(h - low, width, s)) for h in range(low + 1, n + 1)]
        steps.extend(A(h, j) for h, j in sorted(heads))
        pairs = set()
        for i in range(1, low + 1):
            j = _flip(i, width, s)
            pairs.add((min(i, j), max(i, j)))
        steps.extend(S(i, j) for i, j in sorted(pairs))
    return Schedule(n, steps)


def asymmetric_stages(n: int) -> List[List[GossipStep]]:
    """Split :func:`build_asymmetric` into its commuting blocks."""
    m, r = decompose(n)
    sched = list(build_asymmetric(n))
    blocks = []
    if r:
        blocks.append(sched[:r])
        sched = sched[r:]
    half = (1 << m) // 2
    while sched:
        if r:
            blocks.append(sched[:r])
            sched = sched[r:]
        blocks.append(sched[:half])
        sched = sched[half:]
    return blocks


def expected_cost(n: int) -> int:
    m, r = decompose(n)
    return m * n + 2 * r


def expected_beta_multiset(n: int) -> Dict[Dyadic, int]:
    m, r = decompose(n)
    out: Dict[Dyadic, int] = {}
    if 2 * r:
        out[Dyadic(1, m + 1)] = 2 * r
    if n - 2 * r:
        out[Dyadic(1, m)] = n - 2 * r
    return out


@dataclass
class BetaReport:
    n: int
    m: int
    r: int
    beta: Tuple[Dyadic, ...]
    l1: Fraction
    l2_squared: Fraction
    linf: Fraction
    closed_form: Fraction
    half_step: Fraction  # 1 / 2^(m+1)

    @property
    def inequality_holds(self) -> bool:
        return self.linf < self.half_step < Fraction(1, self.n)


def beta_report(n: int) -> BetaReport:
    """Consensus weights of the mixed schedule and their distance to 1/n."""
    m, r = decompose(n)
    beta = is_consensus_matrix(product(build_asymmetric(n)))
    if beta is None:
        raise AssertionError(f"mixed schedule for n={n} did not reach consensus")
    avg = Fraction(1, n)
    dev = [b.to_fraction() - avg for b in beta]
    return BetaReport(
        n=n,
        m=m,
        r=r,
        beta=beta,
        l1=sum((abs(d) for d in dev), Fraction(0)),
        l2_squared=sum((d * d for d in dev), Fraction(0)),
        linf=max(abs(d) for d in dev),
        closed_form=Fraction((1 << m) - r, (1 << m) + r) * Fraction(2 * r, 4 ** (m + 1)),
        half_step=Fraction(1, 1 << (m + 1)),
    )


def summary(sched: Schedule) -> Tuple[int, int]:
    """(steps, node updates)."""
    return len(sched), node_update_cost(sched)


__all__ = [
    "BinaryLabel",
    "BetaReport",
    "asymmetric_stages",
    "beta_report",
    "build_asymmetric",
    "build_hypercube",
    "decompose",
    "expected_beta_multiset",
    "expected_cost",
    "hypercube_graph_edges",
    "hypercube_stage",
    "hypercube_stages",
    "summary",
]
