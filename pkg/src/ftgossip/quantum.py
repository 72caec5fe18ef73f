"""Swap-based quantum gossip and its classical shadow.

An n-qubit density matrix rho is 2^n x 2^n.  A swap of qubits i and j acts
as rho -> (rho + S rho S) / 2 with S a permutation matrix, so under
column-major vectorisation it is the classical step T = (I + S (x) S) / 2 on
4^n coordinates.  Each basis operator |q><p| is a node of that classical
network; qubit relabellings split the nodes into orbits, and each orbit is
an independent symmetric gossip network.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from .core import GossipMatrix, S, Schedule
from .exact import ONE, ZERO, HALF, exact_rank, parse_rational

DEFAULT_MAX_QUBITS = 3
HARD_MAX_QUBITS = 4

Matrix = Tuple[Tuple[Fraction, ...], ...]


def _check_n(n: int, cap: int = HARD_MAX_QUBITS) -> None:
    if not 1 <= n <= cap:
        raise ValueError(f"qubit count must be in 1..{cap}, got {n}")


# basis ---------------------------------------------------------------------

@dataclass(frozen=True)
class BasisElement:
    """The operator |ket><bra|; ket[0] is qubit 1."""

    ket: str
    bra: str

    def __post_init__(self):
        if len(self.ket) != len(self.bra) or set(self.ket + self.bra) - {"0", "1"}:
            raise ValueError(f"bad basis element |{self.ket}><{self.bra}|")

    @property
    def n(self) -> int:
        return len(self.ket)

    @property
    def index(self) -> int:
        """Position in vec(rho): row + column * 2^n."""
        return int(self.ket, 2) + int(self.bra, 2) * (1 << self.n)

    @classmethod
    def from_index(cls, n: int, v: int) -> "BasisElement":
        d = 1 << n
        return cls(format(v % d, f"0{n}b"), format(v // d, f"0{n}b"))

    def joint_type(self) -> Tuple[int, int, int, int]:
        """How many qubits carry (q, p) = 00, 01, 10, 11."""
        counts = [0, 0, 0, 0]
        for q, p in zip(self.ket, self.bra):
            counts[2 * int(q) + int(p)] += 1
        return tuple(counts)

    def __str__(self) -> str:
        return f"|{self.ket}><{self.bra}|"


def swap_index(n: int, x: int, i: int, j: int) -> int:
    """Basis state x with qubits i and j (1-based, qubit 1 = MSB) exchanged."""
    bi = (x >> (n - i)) & 1
    bj = (x >> (n - j)) & 1
    if bi == bj:
        return x
    return x ^ ((1 << (n - i)) | (1 << (n - j)))


def vec_swap(n: int, v: int, i: int, j: int) -> int:
    """Image of vec coordinate v under S (x) S, i.e. |q><p| -> |sq><sp|."""
    d = 1 << n
    return swap_index(n, v % d, i, j) + swap_index(n, v // d, i, j) * d


# orbits ----------------------------------------------------------------------

@dataclass
class OrbitTable:
    n: int
    orbit_of: Dict[BasisElement, int]
    types: List[Tuple[int, int, int, int]]
    sizes: List[int]

    @property
    def tau0(self) -> int:
        return len(self.sizes)

    def members(self, orbit: int) -> List[BasisElement]:
        return sorted((b for b, o in self.orbit_of.items() if o == orbit), key=lambda b: b.index)

    def partition(self) -> List[frozenset]:
        """Orbits as sets of vec indices."""
        groups: Dict[int, set] = {}
        for b, o in self.orbit_of.items():
            groups.setdefault(o, set()).add(b.index)
        return [frozenset(groups[o]) for o in range(self.tau0)]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "tau0": self.tau0,
            "orbits": [
                {"type": list(t), "size": s, "members": [str(b) for b in self.members(k)]}
                for k, (t, s) in enumerate(zip(self.types, self.sizes))
            ],
        }


def orbit_decompose(n: int) -> OrbitTable:
    """Orbits of simultaneous qubit relabelling on the 4^n basis operators."""
    _check_n(n)
    elems = [BasisElement.from_index(n, v) for v in range(4 ** n)]
    types = sorted({b.joint_type() for b in elems})
    tid = {t: k for k, t in enumerate(types)}
    orbit_of = {b: tid[b.joint_type()] for b in elems}
    sizes = [0] * len(types)
    for o in orbit_of.values():
        sizes[o] += 1
    return OrbitTable(n, orbit_of, types, sizes)


def tau0_closed_form(n: int) -> int:
    return comb(n + 3, 3)


def diagonal_sector_sizes(table: OrbitTable) -> List[int]:
    """Orbit sizes among operators |0..0><p|, ordered by the weight of p."""
    n = table.n
    zero = "0" * n
    found: Dict[int, int] = {}
    for b, o in table.orbit_of.items():
        if b.ket == zero:
            found[b.bra.count("1")] = table.sizes[o]
    return [found[w] for w in range(n + 1)]


# vectorised dynamics -----------------------------------------------------------

def build_T(n: int, i: int, j: int) -> Tuple[GossipMatrix, Schedule]:
    """T = (I + S (x) S) / 2 for the swap of qubits i < j, plus its pair schedule.

    The schedule lists one symmetric step per non-fixed pair {v, swap(v)}
    over 4^n nodes; the steps have disjoint supports.
    """
    _check_n(n)
    if not 1 <= i < j <= n:
        raise ValueError(f"need 1 <= i < j <= {n}, got ({i}, {j})")
    N = 4 ** n
    rows = []
    for v in range(N):
        w = vec_swap(n, v, i, j)
        row = [ZERO] * N
        if w == v:
            row[v] = ONE
        else:
            row[v] = HALF
            row[w] = HALF
        rows.append(row)
    steps = [S(v + 1, w + 1) for v in range(N) for w in [vec_swap(n, v, i, j)] if v < w]
    return GossipMatrix(rows), Schedule(N, steps)


def all_swaps(n: int) -> List[Tuple[int, int]]:
    return list(combinations(range(1, n + 1), 2))


def induced_edges(T: GossipMatrix) -> set:
    return {
        frozenset((r, c))
        for r in range(T.n)
        for c in range(r + 1, T.n)
        if T.rows[r][c]
    }


def union_graph(n: int) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(range(4 ** n))
    for i, j in all_swaps(n):
        for v in range(4 ** n):
            w = vec_swap(n, v, i, j)
            if w != v:
                g.add_edge(v, w)
    return g


def component_partition(n: int) -> List[frozenset]:
    return [frozenset(c) for c in nx.connected_components(union_graph(n))]


def fixed_space_dimension(n: int) -> int:
    """dim {v : T v = v for every swap}, by exact rank of the stacked T - I."""
    _check_n(n)
    N = 4 ** n
    stacked = []
    for i, j in all_swaps(n):
        T, _ = build_T(n, i, j)
        for r in range(N):
            stacked.append([T.rows[r][c] - (ONE if r == c else ZERO) for c in range(N)])
    if not stacked:
        return N
    return N - exact_rank(stacked)


@dataclass
class BlockCheck:
    swap: Tuple[int, int]
    component_sizes: List[int]
    off_block_zero: bool
    blocks_are_pair_averagings: bool

    @property
    def ok(self) -> bool:
        return self.off_block_zero and self.blocks_are_pair_averagings


def block_structure(n: int) -> List[BlockCheck]:
    """Check every T is block diagonal over the components, each block a
    product of disjoint pairwise averagings inside that component."""
    comps = sorted(component_partition(n), key=lambda c: (len(c), min(c)))
    where = {v: k for k, c in enumerate(comps) for v in c}
    order = [v for c in comps for v in sorted(c)]
    out = []
    for i, j in all_swaps(n):
        T, _ = build_T(n, i, j)
        P = [[T.rows[a][b] for b in order] for a in order]  # P* T P*^-1
        pos = {v: k for k, v in enumerate(order)}
        off_zero = all(
            not P[a][b]
            for a in range(len(order))
            for b in range(len(order))
            if where[order[a]] != where[order[b]]
        )
        pairs_ok = True
        for c in comps:
            idx = [pos[v] for v in sorted(c)]
            for a in idx:
                nz = [b for b in idx if P[a][b]]
                if nz == [a]:
                    pairs_ok &= P[a][a] == ONE
                elif len(nz) == 2:
                    b = nz[0] if nz[1] == a else nz[1]
                    pairs_ok &= P[a][a] == HALF and P[a][b] == HALF and P[b][a] == HALF
                else:
                    pairs_ok = False
        out.append(BlockCheck((i, j), [len(c) for c in comps], off_zero, pairs_ok))
    return out


# states ----------------------------------------------------------------------

@dataclass(frozen=True)
class QuantumState:
    """Density matrix with exact complex entries re + i*im."""

    n: int
    re: Matrix
    im: Matrix

    def __post_init__(self):
        d = 1 << self.n
        for part in (self.re, self.im):
            if len(part) != d or any(len(row) != d for row in part):
                raise ValueError(f"rho must be {d}x{d}")

    @classmethod
    def from_parts(cls, n, re, im=None) -> "QuantumState":
        d = 1 << n
        re = tuple(tuple(Fraction(x) for x in row) for row in re)
        if im is None:
            im = tuple((Fraction(0),) * d for _ in range(d))
        im = tuple(tuple(Fraction(x) for x in row) for row in im)
        return cls(n, re, im)

    @classmethod
    def maximally_mixed(cls, n: int) -> "QuantumState":
        d = 1 << n
        w = Fraction(1, d)
        return cls.from_parts(n, [[w if r == c else 0 for c in range(d)] for r in range(d)])

    @classmethod
    def projector(cls, ket: str) -> "QuantumState":
        n = len(ket)
        d = 1 << n
        k = int(ket, 2)
        return cls.from_parts(n, [[1 if r == c == k else 0 for c in range(d)] for r in range(d)])

    def entry(self, r: int, c: int) -> Tuple[Fraction, Fraction]:
        return self.re[r][c], self.im[r][c]

    def trace(self) -> Tuple[Fraction, Fraction]:
        d = 1 << self.n
        return sum(self.re[k][k] for k in range(d)), sum(self.im[k][k] for k in range(d))

    def is_hermitian(self) -> bool:
        d = 1 << self.n
        return all(
            self.re[r][c] == self.re[c][r] and self.im[r][c] == -self.im[c][r]
            for r in range(d)
            for c in range(d)
        )

    def validate(self) -> "QuantumState":
        if not self.is_hermitian():
            raise ValueError("rho is not Hermitian")
        if self.trace() != (1, 0):
            raise ValueError(f"rho has trace {self.trace()[0]} + {self.trace()[1]}i, expected 1")
        return self

    def vec(self) -> Tuple[List[Fraction], List[Fraction]]:
        d = 1 << self.n
        return (
            [self.re[v % d][v // d] for v in range(d * d)],
            [self.im[v % d][v // d] for v in range(d * d)],
        )

    @classmethod
    def from_vec(cls, n: int, re: Sequence[Fraction], im: Sequence[Fraction]) -> "QuantumState":
        d = 1 << n
        return cls.from_parts(
            n,
            [[re[r + c * d] for c in range(d)] for r in range(d)],
            [[im[r + c * d] for c in range(d)] for r in range(d)],
        )

    def terms(self) -> List[Tuple[BasisElement, Fraction, Fraction]]:
        d = 1 << self.n
        out = []
        for r in range(d):
            for c in range(d):
                if self.re[r][c] or self.im[r][c]:
                    out.append((BasisElement(format(r, f"0{self.n}b"), format(c, f"0{self.n}b")),
                                self.re[r][c], self.im[r][c]))
        return out


def swap_step(rho: QuantumState, i: int, j: int) -> QuantumState:
    """rho -> (rho + S rho S) / 2 computed directly on the matrix."""
    n = rho.n
    d = 1 << n
    sw = [swap_index(n, x, i, j) for x in range(d)]
    half = Fraction(1, 2)
    re = [[(rho.re[r][c] + rho.re[sw[r]][sw[c]]) * half for c in range(d)] for r in range(d)]
    im = [[(rho.im[r][c] + rho.im[sw[r]][sw[c]]) * half for c in range(d)] for r in range(d)]
    return QuantumState.from_parts(n, re, im)


def quantum_simulate(n: int, swaps: Sequence[Tuple[int, int]], rho0: QuantumState) -> QuantumState:
    """Apply the swap gossip steps in order, exactly."""
    _check_n(n)
    if rho0.n != n:
        raise ValueError(f"rho0 is on {rho0.n} qubits, expected {n}")
    rho0.validate()
    rho = rho0
    for i, j in swaps:
        if not (1 <= i <= n and 1 <= j <= n and i != j):
            raise ValueError(f"bad swap ({i}, {j}) for {n} qubits")
        rho = swap_step(rho, i, j)
    return rho


def vectorized_simulate(n: int, swaps: Sequence[Tuple[int, int]], rho0: QuantumState) -> QuantumState:
    """Same dynamics through vec(rho) -> T vec(rho); real and imaginary parts separately."""
    re, im = rho0.vec()
    cache: Dict[Tuple[int, int], GossipMatrix] = {}
    for i, j in swaps:
        key = (min(i, j), max(i, j))
        if key not in cache:
            cache[key] = build_T(n, *key)[0]
        T = cache[key]
        re, im = list(T.apply(re)), list(T.apply(im))
    return QuantumState.from_vec(n, re, im)


# state literals --------------------------------------------------------------

_TERM = re.compile(r"^\s*(?:(?P<coef>[^|*]+?)\s*\*?\s*)?\|(?P<ket>[01]+)>\s*<(?P<bra>[01]+)\|\s*$")


def _split_terms(text: str) -> List[str]:
    # '+' separates terms; a leading sign on a coefficient stays attached
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "|":
            depth ^= 1
        if ch == "+" and depth == 0 and cur.strip():
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    parts.append(cur)
    return [p for p in parts if p.strip()]


def parse_rho(text: str, n: Optional[int] = None) -> QuantumState:
    """Parse a state literal.

    ``mixed`` is I / 2^n.  Otherwise a '+'-separated list of terms
    ``[coef[*]]|q><p|`` where coef is a rational, optionally ending in ``i``
    for an imaginary weight.  Without any coefficients the terms get equal
    weight.  A ``diag:`` prefix additionally requires every term to have
    q == p.
    """
    text = text.strip()
    if text == "mixed":
        if n is None:
            raise ValueError("'mixed' needs the qubit count")
        return QuantumState.maximally_mixed(n)
    diag = text.startswith("diag:")
    if diag:
        text = text[len("diag:"):]
    terms = []
    for raw in _split_terms(text):
        m = _TERM.match(raw)
        if not m:
            raise ValueError(f"cannot parse term {raw.strip()!r}")
        ket, bra = m.group("ket"), m.group("bra")
        if len(ket) != len(bra):
            raise ValueError(f"ket and bra lengths differ in {raw.strip()!r}")
        if diag and ket != bra:
            raise ValueError(f"diag: term {raw.strip()!r} is off-diagonal")
        coef = m.group("coef")
        imag = False
        if coef is not None:
            coef = coef.strip()
            if coef.endswith("i"):
                imag, coef = True, coef[:-1].strip()
            coef = parse_rational(coef) if coef not in ("", "+", "-") else Fraction(-1 if coef == "-" else 1)
        terms.append((ket, bra, coef, imag))
    if not terms:
        raise ValueError("empty state literal")
    widths = {len(t[0]) for t in terms}
    if len(widths) != 1 or (n is not None and widths != {n}):
        raise ValueError("inconsistent qubit count in state literal")
    n = widths.pop()
    d = 1 << n
    weights = [t[2] for t in terms]
    if all(w is None for w in weights):
        weights = [Fraction(1, len(terms))] * len(terms)
    elif any(w is None for w in weights):
        raise ValueError("give a coefficient on every term or on none")
    re_m = [[Fraction(0)] * d for _ in range(d)]
    im_m = [[Fraction(0)] * d for _ in range(d)]
    for (ket, bra, _, imag), w in zip(terms, weights):
        target = im_m if imag else re_m
        target[int(ket, 2)][int(bra, 2)] += w
    return QuantumState.from_parts(n, re_m, im_m).validate()


def format_rho(rho: QuantumState) -> str:
    from .exact import format_rational

    parts = []
    for b, re_v, im_v in rho.terms():
        coef = []
        if re_v:
            coef.append(format_rational(re_v))
        if im_v:
            coef.append(format_rational(im_v) + "i")
        parts.append("(" + " + ".join(coef) + ")" + str(b))
    return " + ".join(parts) if parts else "0"


# the obstruction ---------------------------------------------------------------

def _is_power_of_two(k: int) -> bool:
    return k > 0 and k & (k - 1) == 0


@dataclass
class ImpossibilityReport:
    n: int
    sector_sizes: List[int]
    binomials: List[int]
    flagged: List[int]
    conclusion: str
    certificates: List[object]

    @property
    def obstructed(self) -> bool:
        return bool(self.flagged)


def impossibility_report(n: int, confirm_depth: Optional[int] = None) -> ImpossibilityReport:
    """Component sizes of the |0..0><p| sector and which of them block averaging.

    A component whose size is not a power of two runs a decoupled classical
    symmetric gossip that can never average exactly in finitely many steps.
    With ``confirm_depth`` each flagged size also gets a bounded exhaustive
    certificate.
    """
    _check_n(n)
    table = orbit_decompose(n)
    sizes = diagonal_sector_sizes(table)
    binom = [comb(n, k) for k in range(n + 1)]
    flagged = sorted({s for s in sizes if not _is_power_of_two(s)})
    if flagged:
        conclusion = (
            f"components of size {', '.join(map(str, flagged))} are not powers of two; "
            "symmetric gossip on them cannot reach exact averaging in finite time"
        )
    else:
        conclusion = "every diagonal-sector component has power-of-two size; no obstruction here"
    certs = []
    if confirm_depth is not None:
        from .search import nonconvergence_certificate

        certs = [nonconvergence_certificate(s, confirm_depth) for s in flagged]
    return ImpossibilityReport(n, sizes, binom, flagged, conclusion, certs)


__all__ = [
    "BasisElement",
    "BlockCheck",
    "ImpossibilityReport",
    "OrbitTable",
    "QuantumState",
    "all_swaps",
    "block_structure",
    "build_T",
    "component_partition",
    "diagonal_sector_sizes",
    "fixed_space_dimension",
    "format_rho",
    "impossibility_report",
    "induced_edges",
    "orbit_decompose",
    "parse_rho",
    "quantum_simulate",
    "swap_index",
    "swap_step",
    "tau0_closed_form",
    "union_graph",
    "vec_swap",
    "vectorized_simulate",
]
