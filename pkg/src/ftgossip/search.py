"""Exhaustive schedule search on small networks.

States are prefix products Psi stored as integers scaled by 2**bits, where
``bits`` is the update budget (every step costs at least one update, so no
entry ever needs more precision).  Relabelling nodes maps schedules to
schedules of equal cost, so states are merged up to simultaneous row and
column permutation.  Search is uniform-cost by node updates with an
admissible lower bound and an increasing cost threshold.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import kernels
from ._pykernels import canonical as _py_canonical
from .core import A, S, Schedule, GossipStep, is_consensus_matrix, node_update_cost, product
from .exact import is_dyadic
from .schedules import decompose


class SearchMode(enum.Enum):
    SYM_ONLY = "sym"
    SYM_AND_ASYM = "asym"

    @classmethod
    def parse(cls, value) -> "SearchMode":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass
class SearchResult:
    n: int
    mode: SearchMode
    budget: int
    min_updates: Optional[int]
    witnesses: List[Schedule] = field(default_factory=list)
    explored: int = 0
    root_bound: int = 0
    backend: str = "python"

    def to_dict(self) -> dict:
        from .core import format_schedule

        return {
            "n": self.n,
            "mode": self.mode.value,
            "budget": self.budget,
            "min_updates": self.min_updates,
            "explored": self.explored,
            "root_bound": self.root_bound,
            "backend": self.backend,
            "witnesses": [format_schedule(w) for w in self.witnesses],
        }


def default_budget(n: int, mode) -> int:
    m, r = decompose(n)
    if SearchMode.parse(mode) is SearchMode.SYM_ONLY:
        return m * n + 2
    return m * n + 2 * r + 2


def _identity(n: int, bits: int) -> Tuple[int, ...]:
    one = 1 << bits
    return tuple(one if r == c else 0 for r in range(n) for c in range(n))


def _step_for(kind: int, i: int, j: int) -> GossipStep:
    if kind == 0:
        return S(min(i, j) + 1, max(i, j) + 1)
    return A(i + 1, j + 1)


def _raw_children(flat, n, asym, g, threshold, prune, bits):
    out = []
    for idx, (kind, i, j) in enumerate(kernels.moves(n, asym)):
        cost = 2 if kind == 0 else 1
        cap = threshold - g - cost
        if cap < 0:
            continue
        child = kernels.apply_move(flat, n, kind, i, j)
        if child == flat:
            continue
        if prune and kernels.lower_bound(child, n, bits, cap) > cap:
            continue
        out.append((idx, cost, child))
    return out


def _canonical_perm(flat, n) -> List[int]:
    """Permutation p with canonical(flat)[r][c] == flat[p[r]][p[c]]."""
    key = _py_canonical(flat, n)
    for p in itertools.permutations(range(n)):
        if all(flat[p[r] * n + p[c]] == key[r * n + c] for r in range(n) for c in range(n)):
            return list(p)
    raise AssertionError("canonical form is not a relabelling")  # pragma: no cover


def _threshold_pass(n, asym, threshold, prune, symmetry, bits):
    """One uniform-cost sweep; returns (cost, consensus keys, parents, explored)."""
    root = _identity(n, bits)
    key0 = kernels.canonical(root, n) if symmetry else root
    layers: Dict[int, Dict[tuple, None]] = {0: {key0: None}}
    best_g = {key0: 0}
    parent: Dict[tuple, Tuple[tuple, int]] = {}
    explored = 0
    g = 0
    while g <= threshold:
        layer = layers.pop(g, {})
        hits = [k for k in layer if kernels.is_consensus(k, n)]
        explored += len(layer)
        if hits:
            return g, hits, parent, explored
        for key in layer:
            if symmetry:
                kids = kernels.children(key, n, asym, g, threshold, prune, bits)
            else:
                kids = _raw_children(key, n, asym, g, threshold, prune, bits)
            for idx, cost, child in kids:
                ng = g + cost
                old = best_g.get(child)
                if old is not None and old <= ng:
                    continue
                if old is not None:
                    del layers[old][child]
                best_g[child] = ng
                parent[child] = (key, idx)
                layers.setdefault(ng, {})[child] = None
        g += 1
    return None, [], parent, explored


def _rebuild(n, asym, key, parent, symmetry, bits) -> Schedule:
    path = []
    while key in parent:
        prev, idx = parent[key]
        path.append((prev, idx))
        key = prev
    path.reverse()
    table = kernels.moves(n, asym)
    actual = _identity(n, bits)
    steps = []
    for prev, idx in path:
        kind, i, j = table[idx]
        if symmetry:
            p = _canonical_perm(actual, n)
            i, j = p[i], p[j]
        steps.append(_step_for(kind, i, j))
        actual = kernels.apply_move(actual, n, kind, i, j)
    return Schedule(n, steps)


def min_updates(
    n: int,
    mode="sym",
    budget: Optional[int] = None,
    prune: bool = True,
    symmetry: bool = True,
) -> SearchResult:
    """Least node-update cost of a schedule whose product is a consensus matrix.

    Returns ``min_updates=None`` when nothing within ``budget`` converges.
    ``prune=False`` drops the lower bound and ``symmetry=False`` keys states
    on the raw product; both exist for cross-checking on tiny n.
    """
    if n < 2:
        raise ValueError("search needs n >= 2")
    mode = SearchMode.parse(mode)
    if budget is None:
        budget = default_budget(n, mode)
    if budget < 0:
        raise ValueError("budget must be nonnegative")
    asym = mode is SearchMode.SYM_AND_ASYM
    bits = max(budget, 1)
    root = _identity(n, bits)
    start = kernels.lower_bound(root, n, bits, budget) if prune else 0
    result = SearchResult(n, mode, budget, None, root_bound=start,
                          backend=kernels.backend_for(n, bits) if symmetry else "python")
    threshold = start if prune else budget
    while threshold <= budget:
        cost, hits, parent, explored = _threshold_pass(n, asym, threshold, prune, symmetry, bits)
        result.explored = explored
        if cost is not None:
            result.min_updates = cost
            result.witnesses = [_rebuild(n, asym, k, parent, symmetry, bits) for k in sorted(hits)]
            return result
        threshold += 1
    return result


# the n = 4 endgame ---------------------------------------------------------

_PAIRS4 = [(a, b) for a in range(4) for b in range(a + 1, 4)]


def _pattern_perm(last4: Sequence[Tuple[int, int]]) -> Optional[Tuple[int, ...]]:
    """(a,b,c,d) with last4 == ({b,d}, {a,c}, {c,d}, {a,b}) in time order, 1-based."""
    want = [frozenset(p) for p in last4]
    for a, b, c, d in itertools.permutations(range(1, 5)):
        if want == [frozenset((b, d)), frozenset((a, c)), frozenset((c, d)), frozenset((a, b))]:
            return (a, b, c, d)
    return None


@dataclass
class UniquenessReport:
    minimal_length: Optional[int]
    counts: Dict[int, int]                 # first-hitting witnesses per length
    minimal_witnesses: List[Schedule]
    counterexamples: List[Schedule]
    max_length: int

    @property
    def ok(self) -> bool:
        return self.minimal_length is not None and not self.counterexamples


def matches_endgame(sched: Schedule) -> Optional[Tuple[int, ...]]:
    """Permutation (a,b,c,d) realising the last-four pattern, or None."""
    if sched.n != 4 or len(sched) < 4:
        return None
    tail = [(s.i, s.j) for s in list(sched)[-4:]]
    return _pattern_perm(tail)


def verify_uniqueness_n4(max_length: int = 8) -> UniquenessReport:
    """Check the last-four-steps pattern on every first-hitting n = 4 witness.

    Symmetric steps only, no step equal to its predecessor, consensus reached
    at the final step and not before.  Lengths up to the minimal one are
    enumerated sequence by sequence; longer lengths up to ``max_length`` are
    covered through a frontier of (product, last four steps) with
    multiplicities, and any tail violating the pattern is reported.
    """
    n, bits = 4, max_length
    one = _identity(n, bits)
    # frontier maps (matrix, tail of at most 4 moves) -> number of sequences
    frontier: Dict[Tuple[tuple, tuple], int] = {(one, ()): 1}
    counts: Dict[int, int] = {}
    minimal = None
    minimal_witnesses: List[Schedule] = []
    counterexamples: List[Schedule] = []
    # full sequences are kept only while at or below the first hitting length
    sequences: Optional[Dict[Tuple[tuple, tuple], List[tuple]]] = {(one, ()): [()]}
    for length in range(1, max_length + 1):
        nxt: Dict[Tuple[tuple, tuple], int] = {}
        nxt_seq: Dict[Tuple[tuple, tuple], List[tuple]] = {}
        hits = 0
        for (mat, tail), mult in frontier.items():
            for pi, (a, b) in enumerate(_PAIRS4):
                if tail and tail[-1] == pi:
                    continue
                child = kernels.apply_move(mat, n, 0, a, b)
                new_tail = (tail + (pi,))[-4:]
                if kernels.is_consensus(child, n):
                    hits += mult
                    pairs = [(_PAIRS4[t][0] + 1, _PAIRS4[t][1] + 1) for t in new_tail]
                    bad = len(new_tail) < 4 or _pattern_perm(pairs) is None
                    if sequences is not None:
                        for seq in sequences[(mat, tail)]:
                            full = seq + (pi,)
                            sched = Schedule(4, [S(_PAIRS4[t][0] + 1, _PAIRS4[t][1] + 1) for t in full])
                            if minimal is None or minimal == length:
                                minimal_witnesses.append(sched)
                            if bad:
                                counterexamples.append(sched)
                    elif bad:
                        counterexamples.append(Schedule(4, [S(*p) for p in pairs]))
                    continue
                key = (child, new_tail)
                nxt[key] = nxt.get(key, 0) + mult
                if sequences is not None:
                    nxt_seq.setdefault(key, []).extend(s + (pi,) for s in sequences[(mat, tail)])
        if hits:
            counts[length] = hits
            if minimal is None:
                minimal = length
        if minimal is not None:
            sequences = None  # past the minimal length only counts are tracked
        else:
            sequences = nxt_seq
        frontier = nxt
    return UniquenessReport(minimal, counts, minimal_witnesses, counterexamples, max_length)


# Parity obstruction ---------------------------------------------------------

@dataclass
class NonconvergenceReport:
    n: int
    depth: int
    n1: int
    n2: int
    exhaustive_none: bool
    explored: int
    required_value: Fraction
    required_dyadic: bool
    reachable_states: int
    reachable_all_integer: bool

    @property
    def ok(self) -> bool:
        return self.exhaustive_none and not self.required_dyadic and self.reachable_all_integer


def _split_two_power(n: int) -> Tuple[int, int]:
    n1 = (n & -n).bit_length() - 1
    return n1, n >> n1


def nonconvergence_certificate(n: int, depth: int) -> NonconvergenceReport:
    """Two independent certificates that symmetric gossip cannot average n nodes.

    (a) no symmetric schedule of at most ``depth`` steps has a consensus
    product, found by unpruned exhaustive search; (b) starting from 2**n1
    zeros and 2**(depth+1) elsewhere, every state reachable in depth + 1
    averagings is integral, yet the average is not even dyadic.
    """
    n1, n2 = _split_two_power(n)
    if n2 == 1:
        raise ValueError(f"n={n} is a power of two; no obstruction exists")
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    res = min_updates(n, SearchMode.SYM_ONLY, budget=2 * depth, prune=False)
    big = 1 << (depth + 1)
    x0 = tuple([0] * (1 << n1) + [big] * (n - (1 << n1)))
    required = Fraction(big * (n - (1 << n1)), n)
    assert required == Fraction(big * (1 << n1) * (n2 - 1), n)
    seen = {x0}
    frontier = {x0}
    integral = True
    for _ in range(depth + 1):
        nxt = set()
        for x in frontier:
            for i in range(n):
                for j in range(i + 1, n):
                    s = x[i] + x[j]
                    if s % 2:
                        integral = False
                        continue
                    y = list(x)
                    y[i] = y[j] = s // 2
                    y = tuple(y)
                    if y not in seen:
                        seen.add(y)
                        nxt.add(y)
        frontier = nxt
    return NonconvergenceReport(
        n=n,
        depth=depth,
        n1=n1,
        n2=n2,
        exhaustive_none=res.min_updates is None,
        explored=res.explored,
        required_value=required,
        required_dyadic=is_dyadic(required),
        reachable_states=len(seen),
        reachable_all_integer=integral,
    )


def check_witness(res: SearchResult) -> bool:
    """Every witness reaches consensus at exactly the reported cost."""
    return all(
        is_consensus_matrix(product(w)) is not None and node_update_cost(w) == res.min_updates
        for w in res.witnesses
    )


__all__ = [
    "NonconvergenceReport",
    "SearchMode",
    "SearchResult",
    "UniquenessReport",
    "check_witness",
    "default_budget",
    "matches_endgame",
    "min_updates",
    "nonconvergence_certificate",
    "verify_uniqueness_n4",
]
