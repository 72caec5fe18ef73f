"""Dyadic splittings of 1 and the chi lower bound on node updates.

A splitting f = (f_1..f_n) with every f_i = b_i / 2**c_i > 0 and sum 1 is
enumerated as a composition of 2**E into n positive integers.  Any
consensus product has such a splitting on its diagonal, and node i must
update at least chi(f_i) times.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, List, Optional, Tuple

from . import kernels
from .core import Schedule, active_counts, is_consensus_matrix, node_update_cost, product
from .exact import ONE, Dyadic, chi
from .schedules import decompose


@dataclass(frozen=True)
class DyadicComposition:
    parts: Tuple[Dyadic, ...]

    def __post_init__(self):
        if any(p.num <= 0 or p > ONE for p in self.parts):
            raise ValueError("parts must lie in (0, 1]")
        if sum(self.parts, Dyadic(0)) != ONE:
            raise ValueError("parts must sum to 1")

    @classmethod
    def from_integers(cls, parts, e: int) -> "DyadicComposition":
        return cls(tuple(Dyadic(v, e) for v in parts))

    @property
    def n(self) -> int:
        return len(self.parts)

    @property
    def zeta(self) -> int:
        """Largest exponent c_i."""
        return max(p.exp for p in self.parts)

    @property
    def chi_sum(self) -> int:
        return sum(chi(p) for p in self.parts)

    def sorted(self) -> "DyadicComposition":
        return DyadicComposition(tuple(sorted(self.parts, reverse=True)))

    def __str__(self) -> str:
        return "(" + ", ".join(map(str, self.parts)) + ")"


def _compositions(total: int, n: int) -> Iterator[Tuple[int, ...]]:
    # stars and bars over the n - 1 cut points
    for cuts in combinations(range(1, total), n - 1):
        prev = 0
        out = []
        for c in cuts + (total,):
            out.append(c - prev)
            prev = c
        yield tuple(out)


def enumerate_F(n: int, max_exp: int) -> Iterator[DyadicComposition]:
    """All splittings of 1 into n dyadic parts with every exponent <= max_exp."""
    if n < 1 or max_exp < 0:
        raise ValueError("need n >= 1 and max_exp >= 0")
    for comp in _compositions(1 << max_exp, n):
        yield DyadicComposition.from_integers(comp, max_exp)


@dataclass
class MinChiResult:
    n: int
    m: int
    r: int
    max_exp: int
    value: Optional[int]
    witness: Optional[DyadicComposition]
    optimizers: List[DyadicComposition]
    backend: str

    @property
    def expected(self) -> int:
        return self.m * self.n + 2 * self.r


def min_chi(n: int, max_exp: Optional[int] = None) -> MinChiResult:
    """Minimum of sum chi(f_i) over splittings with exponents <= max_exp.

    ``max_exp`` defaults to m + 1 for n = 2**m + r.  Every optimizer is
    returned; the witness is one of them with parts in descending order.
    """
    if n < 1:
        raise ValueError("n must be positive")
    m, r = decompose(n)
    e = m + 1 if max_exp is None else max_exp
    value, found = kernels.chi_scan(n, e)
    opts = [DyadicComposition.from_integers(p, e) for p in found]
    witness = min((o.sorted() for o in opts), key=lambda c: c.parts, default=None)
    return MinChiResult(n, m, r, e, value, witness, opts, kernels.chi_scan_backend(n, e))


@dataclass
class OptimizerShape:
    """Structure of one optimizer: all b_i = 1, exponents within one of zeta."""

    composition: DyadicComposition
    all_unit_numerators: bool
    exponent_spread_ok: bool
    top_count: int  # |{i : c_i = zeta}|
    zeta: int
    deep_count: int  # |{i : c_i = m + 1}|, where n = 2**m + r


def optimizer_shape(f: DyadicComposition) -> OptimizerShape:
    z = f.zeta
    m, _ = decompose(f.n)
    return OptimizerShape(
        composition=f,
        all_unit_numerators=all(p.num == 1 for p in f.parts),
        exponent_spread_ok=all(z - p.exp <= 1 for p in f.parts),
        top_count=sum(1 for p in f.parts if p.exp == z),
        zeta=z,
        deep_count=sum(1 for p in f.parts if p.exp == m + 1),
    )


@dataclass
class LowerBoundLink:
    diagonal: Tuple[Dyadic, ...]
    in_F: bool
    chi: Tuple[int, ...]
    active: Tuple[int, ...]
    per_node_ok: bool
    chi_sum: int
    cost: int
    floor: int  # m n + 2 r

    @property
    def ok(self) -> bool:
        return self.in_F and self.per_node_ok and self.cost >= self.chi_sum >= self.floor


def lower_bound_link(sched: Schedule) -> LowerBoundLink:
    """Tie a converging schedule's cost to the chi sum of its final diagonal."""
    psi = product(sched)
    if is_consensus_matrix(psi) is None:
        raise ValueError("schedule does not reach consensus")
    diag = psi.diagonal()
    in_F = all(d.num > 0 for d in diag) and sum(diag, Dyadic(0)) == ONE
    chis = tuple(chi(d) for d in diag)
    active = tuple(active_counts(sched))
    m, r = decompose(sched.n)
    return LowerBoundLink(
        diagonal=diag,
        in_F=in_F,
        chi=chis,
        active=active,
        per_node_ok=all(s >= c for s, c in zip(active, chis)),
        chi_sum=sum(chis),
        cost=node_update_cost(sched),
        floor=m * sched.n + 2 * r,
    )


__all__ = [
    "DyadicComposition",
    "LowerBoundLink",
    "MinChiResult",
    "OptimizerShape",
    "enumerate_F",
    "lower_bound_link",
    "min_chi",
    "optimizer_shape",
]
