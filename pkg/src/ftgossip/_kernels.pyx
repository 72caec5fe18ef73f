# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the loops in ``_pykernels``; results are identical."""

from libc.string cimport memcpy

cdef enum:
    MAXN = 16
    MAXN2 = 256

MAX_N = MAXN
MAX_BITS = 29  # keeps diagonal << cap inside int64 for n <= 16
cdef long long MODULUS = 2147483647


def moves(int n, bint asym):
    out = [(0, i, j) for i in range(n) for j in range(i + 1, n)]
    if asym:
        out += [(1, i, j) for i in range(n) for j in range(n) if i != j]
    return out


cdef inline void _load(tuple flat, int n, long long *m):
    cdef int k
    for k in range(n * n):
        m[k] = flat[k]


cdef inline tuple _dump(long long *m, int n):
    return tuple([m[k] for k in range(n * n)])


def apply_move(tuple flat, int n, int kind, int i, int j):
    cdef long long m[MAXN2]
    _load(flat, n, m)
    _apply(m, n, kind, i, j)
    return _dump(m, n)


cdef inline void _apply(long long *m, int n, int kind, int i, int j):
    cdef int c
    cdef long long a
    for c in range(n):
        a = (m[i * n + c] + m[j * n + c]) >> 1
        m[i * n + c] = a
        if kind == 0:
            m[j * n + c] = a


cdef inline bint _rows_equal(long long *m, int n, int a, int b):
    cdef int c
    for c in range(n):
        if m[a * n + c] != m[b * n + c]:
            return False
    return True


def is_consensus(tuple flat, int n):
    cdef long long m[MAXN2]
    cdef int r
    _load(flat, n, m)
    for r in range(1, n):
        if not _rows_equal(m, n, 0, r):
            return False
    return True


# canonical form ----------------------------------------------------------

cdef struct Canon:
    int n
    long long *m
    long long inv[MAXN][4]
    int slot[MAXN]          # node index giving the signature required at slot k
    int perm[MAXN]
    int best_perm[MAXN]
    int used[MAXN]
    long long seq[MAXN2]
    long long best[MAXN2]
    bint have_best


cdef inline int _inv_cmp(Canon *st, int a, int b):
    cdef int t
    for t in range(4):
        if st.inv[a][t] < st.inv[b][t]:
            return -1
        if st.inv[a][t] > st.inv[b][t]:
            return 1
    return 0


cdef void _rec(Canon *st, int k, bint tied):
    cdef int n = st.n
    cdef int v, t, pk, pt, off, ln, cmp
    cdef long long *m = st.m
    if k == n:
        if not st.have_best:
            cmp = -1
        else:
            cmp = 0
            for t in range(n * n):
                if st.seq[t] != st.best[t]:
                    cmp = -1 if st.seq[t] < st.best[t] else 1
                    break
        if cmp < 0:
            memcpy(st.best, st.seq, n * n * sizeof(long long))
            memcpy(st.best_perm, st.perm, n * sizeof(int))
            st.have_best = True
        return
    off = k * k
    ln = 2 * k + 1
    for v in range(n):
        if st.used[v] or _inv_cmp(st, v, st.slot[k]) != 0:
            continue
        st.perm[k] = v
        pk = v
        st.seq[off] = m[pk * n + pk]
        for t in range(k):
            pt = st.perm[t]
            st.seq[off + 1 + 2 * t] = m[pk * n + pt]
            st.seq[off + 2 + 2 * t] = m[pt * n + pk]
        cmp = 0
        if tied and st.have_best:
            for t in range(off, off + ln):
                if st.seq[t] != st.best[t]:
                    cmp = -1 if st.seq[t] < st.best[t] else 1
                    break
            if cmp > 0:
                continue
        st.used[v] = 1
        _rec(st, k + 1, tied and cmp == 0)
        st.used[v] = 0


cdef void _canonical(long long *m, int n, long long *out):
    cdef Canon st
    cdef int v, c, a, b, tmp
    cdef long long cs, rnz, cnz
    st.n = n
    st.m = m
    st.have_best = False
    for v in range(n):
        cs = 0
        rnz = 0
        cnz = 0
        for c in range(n):
            cs += m[c * n + v]
            if m[v * n + c]:
                rnz += 1
            if m[c * n + v]:
                cnz += 1
        st.inv[v][0] = m[v * n + v]
        st.inv[v][1] = cs
        st.inv[v][2] = rnz
        st.inv[v][3] = cnz
        st.used[v] = 0
        st.slot[v] = v
    # insertion sort of node indices by signature (stable, like sorted())
    for a in range(1, n):
        tmp = st.slot[a]
        b = a - 1
        while b >= 0 and _inv_cmp(&st, st.slot[b], tmp) > 0:
            st.slot[b + 1] = st.slot[b]
            b -= 1
        st.slot[b + 1] = tmp
    _rec(&st, 0, True)
    for a in range(n):
        for c in range(n):
            out[a * n + c] = m[st.best_perm[a] * n + st.best_perm[c]]


def canonical(tuple flat, int n):
    cdef long long m[MAXN2]
    cdef long long out[MAXN2]
    _load(flat, n, m)
    _canonical(m, n, out)
    return _dump(out, n)


# bounds ------------------------------------------------------------------

cdef long long _powmod(long long b, long long e):
    cdef long long r = 1
    b %= MODULUS
    while e:
        if e & 1:
            r = r * b % MODULUS
        b = b * b % MODULUS
        e >>= 1
    return r


cdef int _rank_mod(long long *m, int n):
    cdef long long a[MAXN2]
    cdef int r, c, rank = 0, piv, t
    cdef long long inv, f, x
    for t in range(n * n):
        a[t] = m[t] % MODULUS
        if a[t] < 0:
            a[t] += MODULUS
    for c in range(n):
        piv = -1
        for r in range(rank, n):
            if a[r * n + c]:
                piv = r
                break
        if piv < 0:
            continue
        if piv != rank:
            for t in range(n):
                x = a[rank * n + t]
                a[rank * n + t] = a[piv * n + t]
                a[piv * n + t] = x
        inv = _powmod(a[rank * n + c], MODULUS - 2)
        for r in range(rank + 1, n):
            f = a[r * n + c]
            if f:
                f = f * inv % MODULUS
                for t in range(n):
                    x = (a[r * n + t] - f * a[rank * n + t]) % MODULUS
                    if x < 0:
                        x += MODULUS
                    a[r * n + t] = x
        rank += 1
    return rank


cdef int _lower_bound(long long *m, int n, int bits, int cap):
    cdef int r, s, best, cnt, h, k, idx
    cdef int seen[MAXN]
    cdef long long vals[MAXN]
    cdef long long target, total, half
    for r in range(n):
        seen[r] = 0
    best = 0
    for r in range(n):
        if seen[r]:
            continue
        cnt = 0
        for s in range(r, n):
            if not seen[s] and _rows_equal(m, n, r, s):
                seen[s] = 1
                cnt += 1
        if cnt > best:
            best = cnt
    if best == n:
        return 0
    h = n - best
    if h > cap:
        return cap + 1
    k = 2 * (_rank_mod(m, n) - 1)
    if k > h:
        h = k
        if h > cap:
            return cap + 1
    total = 0
    for r in range(n):
        vals[r] = m[r * n + r] << cap
        total += vals[r]
    target = (<long long>1 << bits) << cap
    k = 0
    while total > target:
        k += 1
        if k > cap:
            return cap + 1
        idx = 0
        for r in range(1, n):
            if vals[r] > vals[idx]:
                idx = r
        half = vals[idx] >> 1
        total -= vals[idx] - half
        vals[idx] = half
    return h if h > k else k


def lower_bound(tuple flat, int n, int bits, int cap):
    cdef long long m[MAXN2]
    _load(flat, n, m)
    return _lower_bound(m, n, bits, cap)


def children(tuple flat, int n, bint asym, int g, int threshold, bint prune, int bits):
    cdef long long m[MAXN2]
    cdef long long child[MAXN2]
    cdef long long canon[MAXN2]
    cdef int idx = 0, kind, i, j, cost, cap, t
    cdef bint same
    cdef list out = []
    _load(flat, n, m)
    for kind, i, j in moves(n, asym):
        cost = 2 if kind == 0 else 1
        cap = threshold - g - cost
        if cap >= 0:
            memcpy(child, m, n * n * sizeof(long long))
            _apply(child, n, kind, i, j)
            same = True
            for t in range(n * n):
                if child[t] != m[t]:
                    same = False
                    break
            if not same and not (prune and _lower_bound(child, n, bits, cap) > cap):
                _canonical(child, n, canon)
                out.append((idx, cost, _dump(canon, n)))
        idx += 1
    return out


# compositions ------------------------------------------------------------

cdef inline int _bitlen(long long v):
    cdef int b = 0
    while v:
        b += 1
        v >>= 1
    return b


cdef struct Scan:
    int n
    int e
    long long best
    bint have
    long long parts[64]


cdef void _scan(Scan *st, list found, int pos, long long remaining, long long acc):
    cdef int k = st.n - pos
    cdef long long s, lb, v
    if k == 1:
        s = acc + st.e - _bitlen(remaining) + 1
        if not st.have or s < st.best:
            st.best = s
            st.have = True
            del found[:]
        if s == st.best:
            st.parts[pos] = remaining
            found.append(tuple([st.parts[t] for t in range(st.n)]))
        return
    if st.have:
        lb = k * (st.e - _bitlen(remaining - k + 1) + 1)
        if acc + lb > st.best:
            return
    v = 1
    while v <= remaining - k + 1:
        st.parts[pos] = v
        _scan(st, found, pos + 1, remaining - v, acc + st.e - _bitlen(v) + 1)
        v += 1


def chi_scan(int n, int e):
    cdef Scan st
    cdef list found = []
    if n > 64 or e > 62:
        raise OverflowError("chi_scan kernel limited to n <= 64, e <= 62")
    if n > (1 << e):
        return None, []
    st.n = n
    st.e = e
    st.have = False
    st.best = 0
    _scan(&st, found, 0, <long long>1 << e, 0)
    return st.best, found
