"""Exact dyadic and rational arithmetic.

Every gossip product has entries of the form b/2^c, so matrices carry
:class:`Dyadic` values.  Network states may start from arbitrary rationals
and use :class:`fractions.Fraction` directly.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Sequence, Union

Rational = Fraction

__all__ = [
    "Dyadic",
    "Rational",
    "dyadic_normalize",
    "dyadic_add",
    "dyadic_mul",
    "dyadic_cmp",
    "chi",
    "chi_scan",
    "is_dyadic",
    "parse_rational",
    "format_rational",
    "exact_rank",
]


def _twos(x: int) -> int:
    """Number of trailing zero bits of a nonzero integer."""
    return (x & -x).bit_length() - 1


@total_ordering
class Dyadic:
    """An exact dyadic rational ``num / 2**exp`` kept in normalized form.

    ``num`` is odd, or the value is zero and then ``num == exp == 0``.

    >>> Dyadic(4, 3)
    Dyadic(1, 1)
    >>> str(Dyadic(3, 2) + Dyadic(1, 2))
    '1'
    """

    __slots__ = ("num", "exp")

    def __init__(self, num: int = 0, exp: int = 0):
        if exp < 0:
            raise ValueError("exponent must be nonnegative")
        num = int(num)
        if num == 0:
            exp = 0
        else:
            shift = min(_twos(num), exp)
            num >>= shift
            exp -= shift
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __setattr__(self, key, value):
        raise AttributeError("Dyadic is immutable")

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.exp)

    def half(self) -> "Dyadic":
        if self.num == 0:
            return self
        return Dyadic(self.num, self.exp + 1)

    def __add__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            return NotImplemented
        e = max(self.exp, other.exp)
        return Dyadic((self.num << (e - self.exp)) + (other.num << (e - other.exp)), e)

    def __sub__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.num, self.exp)

    def __abs__(self) -> "Dyadic":
        return Dyadic(abs(self.num), self.exp)

    def __mul__(self, other: "Dyadic") -> "Dyadic":
        if not isinstance(other, Dyadic):
            return NotImplemented
        return Dyadic(self.num * other.num, self.exp + other.exp)

    def _key(self, other: "Dyadic"):
        e = max(self.exp, other.exp)
        return self.num << (e - self.exp), other.num << (e - other.exp)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, Dyadic):
            a, b = self._key(other)
            return a < b
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __bool__(self) -> bool:
        return self.num != 0

    def __repr__(self) -> str:
        return f"Dyadic({self.num}, {self.exp})"

    def __str__(self) -> str:
        if self.exp == 0:
            return str(self.num)
        return f"{self.num}/2^{self.exp}"


ZERO = Dyadic(0, 0)
ONE = Dyadic(1, 0)
HALF = Dyadic(1, 1)


def dyadic_normalize(num: int, exp: int) -> Dyadic:
    return Dyadic(num, exp)


def dyadic_add(a: Dyadic, b: Dyadic) -> Dyadic:
    return a + b


def dyadic_mul(a: Dyadic, b: Dyadic) -> Dyadic:
    return a * b


def dyadic_cmp(a: Dyadic, b: Dyadic) -> int:
    """Three-way comparison: -1, 0 or 1."""
    x, y = a._key(b)
    return (x > y) - (x < y)


def chi(f: Union[Dyadic, Fraction]) -> int:
    """Smallest integer ``d`` with ``f >= 1/2**d``, for ``0 < f <= 1``.

    For ``f = b/2^c`` this is ``c - floor(log2 b)``.
    """
    if not isinstance(f, Dyadic):
        f = Dyadic.from_fraction(Fraction(f))
    if f.num <= 0 or f > ONE:
        raise ValueError(f"chi is defined on (0, 1], got {f}")
    return f.exp - (f.num.bit_length() - 1)


def chi_scan(f: Union[Dyadic, Fraction]) -> int:
    """Reference version of :func:`chi` by scanning d = 0, 1, 2, ..."""
    q = f.to_fraction() if isinstance(f, Dyadic) else Fraction(f)
    if q <= 0 or q > 1:
        raise ValueError(f"chi is defined on (0, 1], got {q}")
    d = 0
    while q < Fraction(1, 1 << d):
        d += 1
    return d


def is_dyadic(q: Fraction) -> bool:
    den = Fraction(q).denominator
    return den & (den - 1) == 0


_RAT = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(?:(\d+)|2\s*\^\s*(\d+)))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``p``, ``p/q`` or ``p/2^c``."""
    m = _RAT.match(text)
    if not m:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    if m.group(2) is not None:
        den = int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(num, den)
    if m.group(3) is not None:
        return Fraction(num, 1 << int(m.group(3)))
    return Fraction(num)


def format_rational(q: Union[Fraction, Dyadic, int]) -> str:
    """Canonical exact rendering; power-of-two denominators print as ``p/2^c``."""
    if isinstance(q, Dyadic):
        return str(q)
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    if is_dyadic(q):
        return f"{q.numerator}/2^{q.denominator.bit_length() - 1}"
    return f"{q.numerator}/{q.denominator}"


def exact_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination.

    Entries may be ints, Fractions or Dyadics.  Each row is first cleared of
    denominators, which does not change the rank.
    """
    mat = []
    for row in rows:
        fr = [x.to_fraction() if isinstance(x, Dyadic) else Fraction(x) for x in row]
        lcm = math.lcm(*(x.denominator for x in fr)) if fr else 1
        mat.append([int(x * lcm) for x in fr])
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        for r in range(rank + 1, nrows):
            a = mat[r][col]
            row_r, row_p = mat[r], mat[rank]
            mat[r] = [(p * row_r[k] - a * row_p[k]) // prev for k in range(ncols)]
        prev = p
        rank += 1
        if rank == nrows:
            break
    return rank

