"""Compiled inner loops.

Large-instance kernels work on bit-packed ``(n, W)`` uint64 rows as produced
by :func:`tcperc.edgeset.pack`.  The exhaustive small-instance kernels
(``n <= 16``) use one int64 bitmask per vertex instead.
"""

import numpy as np
from numba import njit

NEVER = np.int32(np.iinfo(np.int32).max)

_ONE = np.uint64(1)
_ZERO = np.uint64(0)
_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> _ONE) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@njit(cache=True, inline="always")
def _ctz(x):
    # x must be nonzero
    return _popcount((x & (~x + _ONE)) - _ONE)


@njit(cache=True, inline="always")
def _bit(j):
    return _ONE << np.uint64(j & 63)


@njit(cache=True)
def transpose_bits(bits, n):
    w = bits.shape[1]
    out = np.zeros((n, w), dtype=np.uint64)
    for i in range(n):
        bi = _bit(i)
        iw = i >> 6
        for ww in range(w):
            m = bits[i, ww]
            while m != _ZERO:
                j = ww * 64 + _ctz(m)
                m &= m - _ONE
                out[j, iw] |= bi
    return out


@njit(cache=True)
def count_bits(bits):
    total = 0
    for i in range(bits.shape[0]):
        for w in range(bits.shape[1]):
            total += _popcount(bits[i, w])
    return total


@njit(cache=True, nogil=True)
def closure_times(e0, opn, n):
    """Parallel-round transitive closure restricted to open edges.

    Returns ``(time, t_max)``; ``time[i, j]`` is the round at which ``i->j``
    is first occupied, ``NEVER`` otherwise.
    """
    w = e0.shape[1]
    occ = e0.copy()
    occ_t = transpose_bits(e0, n)
    rem = opn & ~e0
    rem_t = transpose_bits(rem, n)
    time = np.full((n, n), NEVER, dtype=np.int32)
    total = count_bits(e0) + count_bits(rem)
    qi = np.empty(total, dtype=np.int32)
    qj = np.empty(total, dtype=np.int32)
    q = 0
    for i in range(n):
        for ww in range(w):
            m = e0[i, ww]
            while m != _ZERO:
                j = ww * 64 + _ctz(m)
                m &= m - _ONE
                time[i, j] = 0
                qi[q] = i
                qj[q] = j
                q += 1
    start = 0
    t = 0
    t_max = 0
    while start < q:
        end = q
        nt = np.int32(t + 1)
        for idx in range(start, end):
            i = qi[idx]
            k = qj[idx]
            # i->k occupied: close i->k->j for open i->j
            for ww in range(w):
                m = rem[i, ww] & occ[k, ww]
                while m != _ZERO:
                    j = ww * 64 + _ctz(m)
                    m &= m - _ONE
                    rem[i, ww] &= ~_bit(j)
                    rem_t[j, i >> 6] &= ~_bit(i)
                    time[i, j] = nt
                    qi[q] = i
                    qj[q] = j
                    q += 1
            # h->i occupied: close h->i->k for open h->k
            for ww in range(w):
                m = occ_t[i, ww] & rem_t[k, ww]
                while m != _ZERO:
                    h = ww * 64 + _ctz(m)
                    m &= m - _ONE
                    rem_t[k, ww] &= ~_bit(h)
                    rem[h, k >> 6] &= ~_bit(k)
                    time[h, k] = nt
                    qi[q] = h
                    qj[q] = k
                    q += 1
        if q > end:
            t_max = t + 1
        for idx in range(end, q):
            i = qi[idx]
            j = qj[idx]
            occ[i, j >> 6] |= _bit(j)
            occ_t[j, i >> 6] |= _bit(i)
        start = end
        t += 1
    return time, t_max


@njit(cache=True, nogil=True)
def step_bits(occ, opn, n):
    """One parallel round from an arbitrary occupied set."""
    w = occ.shape[1]
    occ_t = transpose_bits(occ, n)
    out = occ.copy()
    for i in range(n):
        for ww in range(w):
            m = opn[i, ww] & ~occ[i, ww]
            while m != _ZERO:
                j = ww * 64 + _ctz(m)
                m &= m - _ONE
                for x in range(w):
                    if occ[i, x] & occ_t[j, x]:
                        out[i, ww] |= _bit(j)
                        break
    return out


@njit(cache=True, nogil=True)
def slowed_times(e0, opn, n, draws, lexicographic):
    """Occupy one occupiable open edge per tick.

    ``draws`` holds one uniform in ``[0, 1)`` per potential tick; the chosen
    candidate is ``floor(u * len(candidates))`` of the current candidate
    list.  With ``lexicographic`` the smallest ``(i, j)`` is taken instead.
    """
    w = e0.shape[1]
    occ = e0.copy()
    occ_t = transpose_bits(e0, n)
    rem = opn & ~e0
    rem_t = transpose_bits(rem, n)
    cand = np.zeros((n, w), dtype=np.uint64)
    total = count_bits(rem)
    ci = np.empty(total + 1, dtype=np.int32)
    cj = np.empty(total + 1, dtype=np.int32)
    nc = 0
    time = np.full((n, n), NEVER, dtype=np.int32)
    for i in range(n):
        for ww in range(w):
            m = e0[i, ww]
            while m != _ZERO:
                j = ww * 64 + _ctz(m)
                m &= m - _ONE
                time[i, j] = 0
    # seed candidates from every initial edge
    for a in range(n):
        for ww in range(w):
            m0 = e0[a, ww]
            while m0 != _ZERO:
                b = ww * 64 + _ctz(m0)
                m0 &= m0 - _ONE
                nc = _discover(a, b, occ, occ_t, rem, rem_t, cand, ci, cj, nc, w)
    tick = 0
    while nc > 0:
        if lexicographic:
            found = False
            i = -1
            j = -1
            for r in range(n):
                for ww in range(w):
                    if cand[r, ww] != _ZERO:
                        i = r
                        j = ww * 64 + _ctz(cand[r, ww])
                        found = True
                        break
                if found:
                    break
            # drop (i, j) from the candidate list
            for r in range(nc):
                if ci[r] == i and cj[r] == j:
                    ci[r] = ci[nc - 1]
                    cj[r] = cj[nc - 1]
                    break
        else:
            r = np.int64(draws[tick] * nc)
            if r >= nc:
                r = nc - 1
            i = ci[r]
            j = cj[r]
            ci[r] = ci[nc - 1]
            cj[r] = cj[nc - 1]
        nc -= 1
        tick += 1
        cand[i, j >> 6] &= ~_bit(j)
        time[i, j] = tick
        occ[i, j >> 6] |= _bit(j)
        occ_t[j, i >> 6] |= _bit(i)
        nc = _discover(i, j, occ, occ_t, rem, rem_t, cand, ci, cj, nc, w)
    return time, tick


@njit(cache=True, inline="always")
def _discover(i, k, occ, occ_t, rem, rem_t, cand, ci, cj, nc, w):
    for ww in range(w):
        m = rem[i, ww] & occ[k, ww]
        while m != _ZERO:
            j = ww * 64 + _ctz(m)
            m &= m - _ONE
            rem[i, ww] &= ~_bit(j)
            rem_t[j, i >> 6] &= ~_bit(i)
            cand[i, ww] |= _bit(j)
            ci[nc] = i
            cj[nc] = j
            nc += 1
    for ww in range(w):
        m = occ_t[i, ww] & rem_t[k, ww]
        while m != _ZERO:
            h = ww * 64 + _ctz(m)
            m &= m - _ONE
            rem_t[k, ww] &= ~_bit(h)
            rem[h, k >> 6] &= ~_bit(k)
            cand[h, k >> 6] |= _bit(k)
            ci[nc] = h
            cj[nc] = k
            nc += 1
    return nc


@njit(cache=True, inline="always")
def _next_bit(row, start, n):
    if start >= n:
        return -1
    w = row.shape[0]
    ww = start >> 6
    m = row[ww] & ~(_bit(start) - _ONE)
    while True:
        if m != _ZERO:
            x = ww * 64 + _ctz(m)
            return x if x < n else -1
        ww += 1
        if ww >= w:
            return -1
        m = row[ww]


@njit(cache=True)
def _has_clique(common, k, occ, n, stack, pos):
    """Whether ``common`` contains ``k`` pairwise-adjacent vertices."""
    if k <= 0:
        return True
    w = occ.shape[1]
    for ww in range(w):
        stack[0, ww] = common[ww]
    pos[0] = 0
    level = 0
    while level >= 0:
        x = _next_bit(stack[level], pos[level], n)
        if x < 0:
            level -= 1
            continue
        pos[level] = x + 1
        if level == k - 1:
            return True
        for ww in range(w):
            stack[level + 1, ww] = stack[level, ww] & occ[x, ww]
        pos[level + 1] = x + 1
        level += 1
    return False


@njit(cache=True, nogil=True)
def kd_times(e0, opn, n, d):
    """K_d-completion on symmetric inputs, in parallel rounds."""
    w = e0.shape[1]
    occ = e0.copy()
    time = np.full((n, n), NEVER, dtype=np.int32)
    ru = []
    rv = []
    for i in range(n):
        for j in range(n):
            if (e0[i, j >> 6] >> np.uint64(j & 63)) & _ONE:
                time[i, j] = 0
            elif i < j and (opn[i, j >> 6] >> np.uint64(j & 63)) & _ONE:
                ru.append(i)
                rv.append(j)
    cu = np.array(ru, dtype=np.int64)
    cv = np.array(rv, dtype=np.int64)
    alive = np.ones(cu.shape[0], dtype=np.bool_)
    hit = np.zeros(cu.shape[0], dtype=np.bool_)
    common = np.zeros(w, dtype=np.uint64)
    stack = np.zeros((max(d, 1), w), dtype=np.uint64)
    pos = np.zeros(max(d, 1), dtype=np.int64)
    t = 0
    while True:
        any_hit = False
        for e in range(cu.shape[0]):
            hit[e] = False
            if not alive[e]:
                continue
            u = cu[e]
            v = cv[e]
            nz = False
            for ww in range(w):
                common[ww] = occ[u, ww] & occ[v, ww]
                if common[ww] != _ZERO:
                    nz = True
            if not nz:
                continue
            if _has_clique(common, d - 2, occ, n, stack, pos):
                hit[e] = True
                any_hit = True
        if not any_hit:
            break
        t += 1
        for e in range(cu.shape[0]):
            if hit[e]:
                u = cu[e]
                v = cv[e]
                alive[e] = False
                occ[u, v >> 6] |= _bit(v)
                occ[v, u >> 6] |= _bit(u)
                time[u, v] = t
                time[v, u] = t
    return time, t


@njit(cache=True, inline="always")
def _any_above(row, j, n):
    return _next_bit(row, j + 1, n) >= 0


@njit(cache=True, inline="always")
def _any_below(row, i):
    # any set bit at position < i
    full = i >> 6
    for ww in range(full):
        if row[ww] != _ZERO:
            return True
    if i & 63:
        return (row[full] & (_bit(i) - _ONE)) != _ZERO
    return False


@njit(cache=True, nogil=True)
def tilde_times(opn, n):
    """Rightward-only process with middle, overshoot and undershoot rules."""
    w = opn.shape[1]
    occ = np.zeros((n, w), dtype=np.uint64)
    occ_t = np.zeros((n, w), dtype=np.uint64)
    time = np.full((n, n), NEVER, dtype=np.int32)
    for i in range(n - 1):
        occ[i, (i + 1) >> 6] |= _bit(i + 1)
        occ_t[i + 1, i >> 6] |= _bit(i)
        time[i, i + 1] = 0
    ri = []
    rj = []
    for i in range(n):
        for j in range(i + 2, n):
            if (opn[i, j >> 6] >> np.uint64(j & 63)) & _ONE:
                ri.append(i)
                rj.append(j)
    ci = np.array(ri, dtype=np.int64)
    cj = np.array(rj, dtype=np.int64)
    alive = np.ones(ci.shape[0], dtype=np.bool_)
    hit = np.zeros(ci.shape[0], dtype=np.bool_)
    t = 0
    while True:
        any_hit = False
        for e in range(ci.shape[0]):
            hit[e] = False
            if not alive[e]:
                continue
            i = ci[e]
            j = cj[e]
            ok = False
            for ww in range(w):
                if occ[i, ww] & occ_t[j, ww]:
                    ok = True
                    break
            if not ok:
                ok = _any_above(occ[i], j, n)
            if not ok:
                ok = _any_below(occ_t[j], i)
            if ok:
                hit[e] = True
                any_hit = True
        if not any_hit:
            break
        t += 1
        for e in range(ci.shape[0]):
            if hit[e]:
                i = ci[e]
                j = cj[e]
                alive[e] = False
                occ[i, j >> 6] |= _bit(j)
                occ_t[j, i >> 6] |= _bit(i)
                time[i, j] = t
    return time, t


# -- exhaustive small-instance kernels (n <= 16) -----------------------------

@njit(cache=True, inline="always")
def _small_closure(e0m, openm, s, n, occ):
    """Fixpoint of the dynamics induced on vertex mask ``s``; fills ``occ``."""
    for i in range(n):
        if (s >> i) & 1:
            occ[i] = e0m[i] & s
        else:
            occ[i] = 0
    changed = True
    while changed:
        changed = False
        for i in range(n):
            if not (s >> i) & 1:
                continue
            cand = openm[i] & s & ~occ[i]
            while cand:
                j = _ctz(np.uint64(cand))
                cand &= cand - 1
                row = occ[i]
                while row:
                    k = _ctz(np.uint64(row))
                    row &= row - 1
                    if (occ[k] >> j) & 1:
                        occ[i] |= np.int64(1) << j
                        changed = True
                        break


@njit(cache=True, inline="always")
def _lex_less(a, b):
    # equal popcounts: sorted-tuple order is decided by the lowest differing bit
    d = a ^ b
    if d == 0:
        return False
    low = d & -d
    return (a & low) != 0


@njit(cache=True, nogil=True)
def witness_masks(e0m, openm, n):
    """Minimum-cardinality witness vertex mask for every edge, ``-1`` if none.

    Ties between equal-size masks resolve to the lexicographically smallest
    sorted vertex tuple.
    """
    best = np.full((n, n), -1, dtype=np.int64)
    best_card = np.full((n, n), 1 << 30, dtype=np.int64)
    occ = np.zeros(n, dtype=np.int64)
    for s in range(1, 1 << n):
        card = _popcount(np.uint64(s))
        if card < 2:
            continue
        _small_closure(e0m, openm, s, n, occ)
        for i in range(n):
            row = occ[i]
            while row:
                j = _ctz(np.uint64(row))
                row &= row - 1
                bc = best_card[i, j]
                if card < bc or (card == bc and _lex_less(s, best[i, j])):
                    best_card[i, j] = card
                    best[i, j] = s
    return best


@njit(cache=True, nogil=True)
def closure_mask(e0m, openm, s, n):
    occ = np.zeros(n, dtype=np.int64)
    _small_closure(e0m, openm, s, n, occ)
    return occ


@njit(cache=True)
def minimal_open_subsets(e0m, ei, ej, target_i, target_j, n):
    """All inclusion-minimal subsets of the listed open edges occupying a target.

    Open edge ``k`` is ``ei[k] -> ej[k]``; subsets are bitmasks over ``k``.
    """
    m = ei.shape[0]
    full = (1 << n) - 1
    occupies = np.zeros(1 << m, dtype=np.bool_)
    openm = np.zeros(n, dtype=np.int64)
    occ = np.zeros(n, dtype=np.int64)
    for a in range(1 << m):
        for v in range(n):
            openm[v] = 0
        x = a
        while x:
            k = _ctz(np.uint64(x))
            x &= x - 1
            openm[ei[k]] |= np.int64(1) << ej[k]
        _small_closure(e0m, openm, full, n, occ)
        occupies[a] = ((occ[target_i] >> target_j) & 1) == 1
    out = []
    for a in range(1 << m):
        if not occupies[a]:
            continue
        minimal = True
        x = a
        while x:
            low = x & -x
            x &= x - 1
            if occupies[a & ~low]:
                minimal = False
                break
        if minimal:
            out.append(a)
    return np.array(out, dtype=np.int64)
