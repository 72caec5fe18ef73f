"""Pure-Python hot loops.  ``_kernels.pyx`` mirrors every function here.

Matrices are row-major tuples of ints holding ``entry * 2**bits``.
"""
from __future__ import annotations

MODULUS = 2147483647  # rank is taken modulo this prime; rank_p <= rank over Q


def moves(n, asym):
    """Move table ``(kind, i, j)`` with 0-based nodes; kind 0 symmetric, 1 head-only."""
    out = [(0, i, j) for i in range(n) for j in range(i + 1, n)]
    if asym:
        out += [(1, i, j) for i in range(n) for j in range(n) if i != j]
    return out


def apply_move(flat, n, kind, i, j):
    m = list(flat)
    ri, rj = i * n, j * n
    for c in range(n):
        a = (m[ri + c] + m[rj + c]) >> 1
        m[ri + c] = a
        if kind == 0:
            m[rj + c] = a
    return tuple(m)


def is_consensus(flat, n):
    first = flat[:n]
    return all(flat[r * n:(r + 1) * n] == first for r in range(1, n))


def _invariants(flat, n):
    inv = []
    for v in range(n):
        row = flat[v * n:(v + 1) * n]
        col = flat[v::n]
        inv.append((flat[v * n + v], sum(col), sum(1 for x in row if x), sum(1 for x in col if x)))
    return inv


def canonical(flat, n):
    """Representative of ``flat`` under simultaneous row/column relabelling.

    Nodes are first ordered by a relabelling-invariant signature; ties are
    broken by the lexicographically least sequence of "shells" (diagonal
    entry, then the new row/column entries against earlier positions).
    """
    inv = _invariants(flat, n)
    order = sorted(range(n), key=lambda v: inv[v])
    slot_key = [inv[v] for v in order]
    best = [None]
    best_perm = [None]
    perm = [0] * n
    used = [False] * n

    def shell(k):
        pk = perm[k]
        out = [flat[pk * n + pk]]
        for t in range(k):
            pt = perm[t]
            out.append(flat[pk * n + pt])
            out.append(flat[pt * n + pk])
        return out

    def rec(k, seq, tied):
        if k == n:
            if best[0] is None or seq < best[0]:
                best[0] = list(seq)
                best_perm[0] = list(perm)
            return
        for v in range(n):
            if used[v] or inv[v] != slot_key[k]:
                continue
            perm[k] = v
            sh = shell(k)
            start = len(seq)
            now_tied = tied
            if tied and best[0] is not None:
                ref = best[0][start:start + len(sh)]
                if sh > ref:
                    continue
                now_tied = sh == ref
            used[v] = True
            seq.extend(sh)
            rec(k + 1, seq, now_tied)
            del seq[start:]
            used[v] = False

    rec(0, [], True)
    p = best_perm[0]
    return tuple(flat[p[r] * n + p[c]] for r in range(n) for c in range(n))


def _rank_mod(flat, n):
    p = MODULUS
    a = [[x % p for x in flat[r * n:(r + 1) * n]] for r in range(n)]
    rank = 0
    for c in range(n):
        piv = -1
        for r in range(rank, n):
            if a[r][c]:
                piv = r
                break
        if piv < 0:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        inv = pow(a[rank][c], p - 2, p)
        for r in range(rank + 1, n):
            f = a[r][c]
            if f:
                f = f * inv % p
                row_p = a[rank]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], row_p)]
        rank += 1
    return rank


def lower_bound(flat, n, bits, cap):
    """Admissible lower bound on the node updates still needed, clipped at cap + 1.

    max of: nodes outside the largest block of equal rows; the fewest
    halvings of the diagonal that bring its sum to <= 1; twice the rank
    drop still required (only symmetric steps lose rank).
    """
    rows = [flat[r * n:(r + 1) * n] for r in range(n)]
    counts = {}
    for row in rows:
        counts[row] = counts.get(row, 0) + 1
    if len(counts) == 1:
        return 0
    h = n - max(counts.values())
    if h > cap:
        return cap + 1
    rk = 2 * (_rank_mod(flat, n) - 1)
    if rk > h:
        h = rk
        if h > cap:
            return cap + 1
    vals = [flat[k * n + k] << cap for k in range(n)]
    target = (1 << bits) << cap
    total = sum(vals)
    k = 0
    while total > target:
        k += 1
        if k > cap:
            return cap + 1
        idx = max(range(n), key=vals.__getitem__)
        half = vals[idx] >> 1
        total -= vals[idx] - half
        vals[idx] = half
    return max(h, k)


def children(flat, n, asym, g, threshold, prune, bits):
    """Canonical successors reachable within ``threshold`` total node updates.

    Returns ``(move_index, cost, child)`` for every surviving move.
    """
    out = []
    for idx, (kind, i, j) in enumerate(moves(n, asym)):
        cost = 2 if kind == 0 else 1
        cap = threshold - g - cost
        if cap < 0:
            continue
        child = apply_move(flat, n, kind, i, j)
        if child == flat:
            continue
        if prune and lower_bound(child, n, bits, cap) > cap:
            continue
        out.append((idx, cost, canonical(child, n)))
    return out


def chi_scan(n, e):
    """Least sum of chi over compositions of 2**e into n positive parts.

    A part v stands for v / 2**e, whose chi is e - floor(log2 v).  Returns
    ``(minimum, optimal_compositions)``.
    """
    total = 1 << e
    if n > total:
        return None, []
    best = [None]
    found = []
    parts = [0] * n

    def rec(pos, remaining, acc):
        k = n - pos
        if k == 1:
            s = acc + e - remaining.bit_length() + 1
            if best[0] is None or s < best[0]:
                best[0] = s
                found.clear()
            if s == best[0]:
                parts[pos] = remaining
                found.append(tuple(parts))
            return
        if best[0] is not None:
            lb = k * (e - (remaining - k + 1).bit_length() + 1)
            if acc + lb > best[0]:
                return
        for v in range(1, remaining - k + 2):
            parts[pos] = v
            rec(pos + 1, remaining - v, acc + e - v.bit_length() + 1)

    rec(0, total, 0)
    return best[0], found
