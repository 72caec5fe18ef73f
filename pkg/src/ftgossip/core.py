"""Gossip steps, schedules, exact products and the node-update metric.

Nodes are numbered 1..n throughout.  A symmetric step ``S i j`` replaces
both x_i and x_j by their average; an asymmetric step ``A i j`` only
updates the head node i.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .exact import ONE, ZERO, Dyadic, chi, exact_rank, format_rational, parse_rational

NetworkState = Tuple[Fraction, ...]


class Mode(enum.Enum):
    SYMMETRIC = "S"
    ASYMMETRIC = "A"  # head node i is the only one that updates


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class GossipStep:
    i: int
    j: int
    mode: Mode = Mode.SYMMETRIC

    def __post_init__(self):
        if self.i == self.j:
            raise ScheduleError(f"step pairs node {self.i} with itself")
        if self.i < 1 or self.j < 1:
            raise ScheduleError(f"node indices are 1-based, got ({self.i}, {self.j})")

    @property
    def cost(self) -> int:
        return 2 if self.mode is Mode.SYMMETRIC else 1

    def active(self) -> Tuple[int, ...]:
        if self.mode is Mode.SYMMETRIC:
            return (self.i, self.j)
        return (self.i,)

    def __str__(self) -> str:
        return f"{self.mode.value} {self.i} {self.j}"


def S(i: int, j: int) -> GossipStep:
    return GossipStep(i, j, Mode.SYMMETRIC)


def A(i: int, j: int) -> GossipStep:
    return GossipStep(i, j, Mode.ASYMMETRIC)


@dataclass(frozen=True)
class Schedule:
    n: int
    steps: Tuple[GossipStep, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.n < 1:
            raise ScheduleError("a schedule needs at least one node")
        for s in self.steps:
            if s.i > self.n or s.j > self.n:
                raise ScheduleError(f"step {s} out of range for n={self.n}")

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[GossipStep]:
        return iter(self.steps)

    def prefix(self, h: int) -> "Schedule":
        return Schedule(self.n, self.steps[:h])

    def __add__(self, other: "Schedule") -> "Schedule":
        if other.n != self.n:
            raise ScheduleError("cannot concatenate schedules of different size")
        return Schedule(self.n, self.steps + other.steps)


class GossipMatrix:
    """Dense n x n matrix of :class:`Dyadic` entries."""

    __slots__ = ("n", "rows")

    def __init__(self, rows: Sequence[Sequence[Dyadic]]):
        self.rows: Tuple[Tuple[Dyadic, ...], ...] = tuple(tuple(r) for r in rows)
        self.n = len(self.rows)
        if any(len(r) != self.n for r in self.rows):
            raise ValueError("gossip matrices are square")

    @classmethod
    def identity(cls, n: int) -> "GossipMatrix":
        return cls([[ONE if r == c else ZERO for c in range(n)] for r in range(n)])

    @classmethod
    def from_scaled(cls, n: int, flat: Sequence[int], bits: int) -> "GossipMatrix":
        """Rebuild from row-major integers representing ``entry * 2**bits``."""
        return cls([[Dyadic(flat[r * n + c], bits) for c in range(n)] for r in range(n)])

    def __getitem__(self, rc: Tuple[int, int]) -> Dyadic:
        r, c = rc
        return self.rows[r - 1][c - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, GossipMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(x) for x in r) for r in self.rows)
        return f"GossipMatrix([{body}])"

    def __matmul__(self, other: "GossipMatrix") -> "GossipMatrix":
        cols = list(zip(*other.rows))
        out = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = ZERO
                for a, b in zip(r, c):
                    if a.num and b.num:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GossipMatrix(out)

    def left_step(self, step: GossipStep) -> "GossipMatrix":
        """Return ``P @ self`` for the step matrix P, using row operations."""
        i, j = step.i - 1, step.j - 1
        rows = list(self.rows)
        avg = tuple((a + b).half() for a, b in zip(rows[i], rows[j]))
        rows[i] = avg
        if step.mode is Mode.SYMMETRIC:
            rows[j] = avg
        return GossipMatrix(rows)

    def apply(self, x: Sequence[Fraction]) -> NetworkState:
        if len(x) != self.n:
            raise ValueError("dimension mismatch")
        fx = [Fraction(v) for v in x]
        return tuple(
            sum((a.to_fraction() * v for a, v in zip(r, fx) if a.num), Fraction(0))
            for r in self.rows
        )

    def transpose(self) -> "GossipMatrix":
        return GossipMatrix(list(zip(*self.rows)))

    def row_sums(self) -> Tuple[Dyadic, ...]:
        return tuple(_dsum(r) for r in self.rows)

    def col_sums(self) -> Tuple[Dyadic, ...]:
        return tuple(_dsum(c) for c in zip(*self.rows))

    def diagonal(self) -> Tuple[Dyadic, ...]:
        return tuple(self.rows[k][k] for k in range(self.n))

    def scaled(self, bits: int) -> Tuple[int, ...]:
        """Row-major integers ``entry * 2**bits``; entries must fit."""
        out = []
        for r in self.rows:
            for x in r:
                if x.exp > bits:
                    raise ValueError(f"entry {x} needs more than {bits} bits")
                out.append(x.num << (bits - x.exp))
        return tuple(out)

    def rank(self) -> int:
        return exact_rank(self.rows)

    def distinct_rows(self) -> int:
        return len(set(self.rows))

    def is_stochastic(self) -> bool:
        return all(x >= ZERO for r in self.rows for x in r) and all(
            s == ONE for s in self.row_sums()
        )


def _dsum(xs: Iterable[Dyadic]) -> Dyadic:
    acc = ZERO
    for x in xs:
        acc = acc + x
    return acc


def _check_pair(n: int, i: int, j: int) -> None:
    if not (1 <= i <= n and 1 <= j <= n):
        raise ScheduleError(f"node pair ({i}, {j}) out of range 1..{n}")
    if i == j:
        raise ScheduleError("i and j must differ")


def _unit(n: int, k: int) -> List[int]:
    return [1 if t == k else 0 for t in range(1, n + 1)]


def sym_matrix(n: int, i: int, j: int) -> GossipMatrix:
    """``I - (e_i - e_j)(e_i - e_j)^T / 2``."""
    _check_pair(n, i, j)
    v = [a - b for a, b in zip(_unit(n, i), _unit(n, j))]
    return GossipMatrix(
        [[Dyadic(2 * (r == c) - v[r] * v[c], 1) for c in range(n)] for r in range(n)]
    )


def asym_matrix(n: int, i: int, j: int) -> GossipMatrix:
    """``I - e_i (e_i - e_j)^T / 2``; only row i differs from the identity."""
    _check_pair(n, i, j)
    u = _unit(n, i)
    v = [a - b for a, b in zip(u, _unit(n, j))]
    return GossipMatrix(
        [[Dyadic(2 * (r == c) - u[r] * v[c], 1) for c in range(n)] for r in range(n)]
    )


def step_matrix(n: int, step: GossipStep) -> GossipMatrix:
    if step.mode is Mode.SYMMETRIC:
        return sym_matrix(n, step.i, step.j)
    return asym_matrix(n, step.i, step.j)


def apply_step(x: Sequence[Fraction], s: GossipStep) -> NetworkState:
    n = len(x)
    _check_pair(n, s.i, s.j)
    out = [Fraction(v) for v in x]
    avg = (out[s.i - 1] + out[s.j - 1]) / 2
    out[s.i - 1] = avg
    if s.mode is Mode.SYMMETRIC:
        out[s.j - 1] = avg
    return tuple(out)


def run(sched: Schedule, x0: Sequence[Fraction]) -> NetworkState:
    if len(x0) != sched.n:
        raise ValueError(f"state has {len(x0)} entries, schedule has n={sched.n}")
    x = tuple(Fraction(v) for v in x0)
    for s in sched:
        x = apply_step(x, s)
    return x


def prefix_products(sched: Schedule) -> Iterator[GossipMatrix]:
    """Yield Psi_0 = I, Psi_1, ..., Psi_T."""
    m = GossipMatrix.identity(sched.n)
    yield m
    for s in sched:
        m = m.left_step(s)
        yield m


def product(sched: Schedule) -> GossipMatrix:
    m = GossipMatrix.identity(sched.n)
    for s in sched:
        m = m.left_step(s)
    return m


def is_consensus_matrix(M: GossipMatrix) -> Optional[Tuple[Dyadic, ...]]:
    first = M.rows[0]
    if all(r == first for r in M.rows[1:]):
        return first
    return None


def node_update_cost(sched: Schedule) -> int:
    return sum(s.cost for s in sched)


def node_update_cost_l1(sched: Schedule) -> int:
    """Sum of ||I - P_k||_1 computed from the explicit step matrices."""
    n = sched.n
    eye = GossipMatrix.identity(n)
    total = ZERO
    for s in sched:
        p = step_matrix(n, s)
        for r1, r2 in zip(eye.rows, p.rows):
            for a, b in zip(r1, r2):
                total = total + abs(a - b)
    if total.exp:
        raise AssertionError("node-update norm is always an integer")
    return total.num


def active_counts(sched: Schedule, h: Optional[int] = None) -> Tuple[int, ...]:
    if h is None:
        h = len(sched)
    if not 0 <= h <= len(sched):
        raise ValueError(f"prefix length {h} outside 0..{len(sched)}")
    counts = [0] * sched.n
    for s in sched.steps[:h]:
        for v in s.active():
            counts[v - 1] += 1
    return tuple(counts)


@dataclass
class InvariantReport:
    prefixes: int = 0
    row_sums: bool = True
    diagonal_bound: bool = True
    column_sums: bool = True
    rank_dichotomy: bool = True
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.row_sums and self.diagonal_bound and self.column_sums and self.rank_dichotomy


def check_invariants(sched: Schedule, rank_check: bool = True) -> InvariantReport:
    """Check every prefix product against the structural facts of mixed gossip.

    Row sums are exactly 1, ``Psi_ii >= 2**-s_i``, column sums are positive,
    and a non-consensus prefix has at least two distinct rows and rank >= 2.
    """
    rep = InvariantReport()
    counts = [0] * sched.n
    for h, psi in enumerate(prefix_products(sched)):
        if h:
            for v in sched.steps[h - 1].active():
                counts[v - 1] += 1
        rep.prefixes += 1
        if any(s != ONE for s in psi.row_sums()):
            rep.row_sums = False
            rep.failures.append(f"prefix {h}: row sum differs from 1")
        for k, d in enumerate(psi.diagonal()):
            if d < Dyadic(1, counts[k]):
                rep.diagonal_bound = False
                rep.failures.append(f"prefix {h}: diagonal {k + 1} below 1/2^{counts[k]}")
        if any(c <= ZERO for c in psi.col_sums()):
            rep.column_sums = False
            rep.failures.append(f"prefix {h}: nonpositive column sum")
        if is_consensus_matrix(psi) is None:
            if psi.distinct_rows() < 2 or (rank_check and psi.rank() < 2):
                rep.rank_dichotomy = False
                rep.failures.append(f"prefix {h}: non-consensus product with rank < 2")
    return rep


# -- text formats -------------------------------------------------------------

def format_schedule(sched: Schedule, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(f"n {sched.n}")
    lines.extend(str(s) for s in sched)
    return "\n".join(lines) + "\n"


def parse_schedule(text: str, n: Optional[int] = None) -> Schedule:
    """Parse the line format: ``n <count>`` then ``S i j`` / ``A i j`` lines."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        try:
            if head == "n":
                if len(parts) != 2:
                    raise ValueError("expected 'n <count>'")
                if steps:
                    raise ValueError("header must precede steps")
                count = int(parts[1])
                if n is not None and n != count:
                    raise ValueError(f"header says n={count}, expected {n}")
                n = count
            elif head.upper() in ("S", "A"):
                if len(parts) != 3:
                    raise ValueError("expected '<S|A> i j'")
                mode = Mode.SYMMETRIC if head.upper() == "S" else Mode.ASYMMETRIC
                step = GossipStep(int(parts[1]), int(parts[2]), mode)
                if n is not None and max(step.i, step.j) > n:
                    raise ValueError(f"node index out of range 1..{n}")
                steps.append(step)
            else:
                raise ValueError(f"unknown directive {head!r}")
        except ValueError as exc:
            raise ScheduleError(f"line {lineno}: {exc}") from None
    if n is None:
        raise ScheduleError("missing 'n <count>' header")
    try:
        return Schedule(n, steps)
    except ScheduleError as exc:
        raise ScheduleError(f"invalid schedule: {exc}") from None


def parse_state(text: str) -> NetworkState:
    """One rational per line (commas also accepted as separators)."""
    vals = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for tok in line.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                vals.append(parse_rational(tok))
            except ValueError as exc:
                raise ScheduleError(f"line {lineno}: {exc}") from None
    return tuple(vals)


def format_state(x: Sequence[Fraction]) -> str:
    return "\n".join(format_rational(v) for v in x) + "\n"


def sym_pairs(n: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def all_steps(n: int, asymmetric: bool) -> List[GossipStep]:
    """Every admissible step in a fixed order: symmetric pairs, then heads."""
    steps = [S(i, j) for i, j in sym_pairs(n)]
    if asymmetric:
        steps += [A(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return steps


def chi_of_diagonal(M: GossipMatrix) -> Tuple[int, ...]:
    return tuple(chi(d) for d in M.diagonal())

