"""Backend selection for the hot loops.

The compiled module is used when it imports and the problem fits its fixed
buffers; ``FTGOSSIP_PURE=1`` forces the Python fallback everywhere.
"""
from __future__ import annotations

import os

from . import _pykernels as _py

try:
    if os.environ.get("FTGOSSIP_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _kernels as _c
except ImportError:
    _c = None

BACKEND = "cython" if _c is not None else "python"


def _fits(n: int, bits: int = 0) -> bool:
    return _c is not None and n <= _c.MAX_N and bits <= _c.MAX_BITS


def backend_for(n: int, bits: int = 0) -> str:
    return "cython" if _fits(n, bits) else "python"


def canonical(flat, n):
    return (_c if _fits(n) else _py).canonical(tuple(flat), n)


def is_consensus(flat, n):
    return (_c if _fits(n) else _py).is_consensus(tuple(flat), n)


def apply_move(flat, n, kind, i, j):
    return (_c if _fits(n) else _py).apply_move(tuple(flat), n, kind, i, j)


def lower_bound(flat, n, bits, cap):
    return (_c if _fits(n, bits) else _py).lower_bound(tuple(flat), n, bits, cap)


def children(flat, n, asym, g, threshold, prune, bits):
    mod = _c if _fits(n, bits) else _py
    return mod.children(tuple(flat), n, asym, g, threshold, prune, bits)


def chi_scan_backend(n: int, e: int) -> str:
    return "cython" if _c is not None and n <= 64 and e <= 62 else "python"


def chi_scan(n, e):
    if chi_scan_backend(n, e) == "cython":
        return _c.chi_scan(n, e)
    return _py.chi_scan(n, e)


moves = _py.moves
python_backend = _py
compiled_backend = _c
