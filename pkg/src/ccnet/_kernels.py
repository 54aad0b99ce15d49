"""Compiled graph kernels.

Everything in here operates on integer-indexed CSR adjacency and is kept
free of Python objects so numba can compile it. The hot paths are the
bounded cycle enumeration and the arc-swap randomizer; both are called
many times per analysis run.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_EMPTY = np.int64(-1)
_TOMB = np.int64(-2)

# splitmix64 constants (Steele et al.); the swap randomizer documents this
# algorithm id in its output metadata.
_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, nogil=True, inline="always")
def _next_u64(state):
    state = state + _GAMMA
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True, nogil=True, inline="always")
def _slot(key, mask):
    h = np.uint64(key) * _GAMMA
    h = h ^ (h >> np.uint64(29))
    return np.int64(h & np.uint64(mask))


@njit(cache=True, nogil=True)
def _ht_contains(table, mask, key):
    s = _slot(key, mask)
    while True:
        v = table[s]
        if v == key:
            return True
        if v == _EMPTY:
            return False
        s = (s + 1) & mask


@njit(cache=True, nogil=True)
def _ht_insert(table, mask, key):
    # caller guarantees the key is absent
    s = _slot(key, mask)
    while True:
        v = table[s]
        if v == _EMPTY or v == _TOMB:
            table[s] = key
            return
        s = (s + 1) & mask


@njit(cache=True, nogil=True)
def _ht_remove(table, mask, key):
    s = _slot(key, mask)
    while True:
        v = table[s]
        if v == key:
            table[s] = _TOMB
            return
        if v == _EMPTY:
            return
        s = (s + 1) & mask


@njit(cache=True, nogil=True)
def rewire_arcs(src, dst, n_nodes, attempts, seed):
    """Directed double-edge swaps on a simple digraph, in place.

    Picks two arcs (a->b), (c->d) and proposes (a->d), (c->b); the proposal
    is rejected if it would create a self-loop or a duplicate arc. In- and
    out-degree sequences are preserved exactly. Returns the number of
    accepted swaps.
    """
    m = src.shape[0]
    if m < 2:
        return 0
    cap = 4
    while cap < 4 * m:
        cap <<= 1
    mask = cap - 1
    table = np.full(cap, _EMPTY, np.int64)
    for k in range(m):
        _ht_insert(table, mask, src[k] * n_nodes + dst[k])
    tombs = 0
    state = np.uint64(seed)
    accepted = 0
    for _ in range(attempts):
        state, r1 = _next_u64(state)
        state, r2 = _next_u64(state)
        i = np.int64(r1 % np.uint64(m))
        j = np.int64(r2 % np.uint64(m))
        if i == j:
            continue
        a = src[i]
        b = dst[i]
        c = src[j]
        d = dst[j]
        if a == d or c == b:
            continue
        k1 = a * n_nodes + d
        k2 = c * n_nodes + b
        if _ht_contains(table, mask, k1) or _ht_contains(table, mask, k2):
            continue
        _ht_remove(table, mask, a * n_nodes + b)
        _ht_remove(table, mask, c * n_nodes + d)
        _ht_insert(table, mask, k1)
        _ht_insert(table, mask, k2)
        dst[i] = d
        dst[j] = b
        accepted += 1
        tombs += 2
        if tombs * 4 > cap:
            # tombstones degrade probing; rebuild from the live arc list
            table[:] = _EMPTY
            for k in range(m):
                _ht_insert(table, mask, src[k] * n_nodes + dst[k])
            tombs = 0
    return accepted


@njit(cache=True, nogil=True)
def tarjan_scc(indptr, indices):
    """Iterative Tarjan; returns (component id per node, component count)."""
    n = indptr.shape[0] - 1
    order = np.full(n, -1, np.int64)
    low = np.zeros(n, np.int64)
    on_stack = np.zeros(n, np.bool_)
    comp = np.full(n, -1, np.int64)
    scc_stack = np.empty(n, np.int64)
    stop = 0
    wnode = np.empty(n, np.int64)
    wptr = np.empty(n, np.int64)
    counter = 0
    ncomp = 0
    for root in range(n):
        if order[root] != -1:
            continue
        wnode[0] = root
        wptr[0] = indptr[root]
        wtop = 1
        order[root] = counter
        low[root] = counter
        counter += 1
        scc_stack[stop] = root
        stop += 1
        on_stack[root] = True
        while wtop > 0:
            v = wnode[wtop - 1]
            p = wptr[wtop - 1]
            if p < indptr[v + 1]:
                wptr[wtop - 1] = p + 1
                w = indices[p]
                if order[w] == -1:
                    order[w] = counter
                    low[w] = counter
                    counter += 1
                    scc_stack[stop] = w
                    stop += 1
                    on_stack[w] = True
                    wnode[wtop] = w
                    wptr[wtop] = indptr[w]
                    wtop += 1
                elif on_stack[w]:
                    if order[w] < low[v]:
                        low[v] = order[w]
            else:
                wtop -= 1
                if wtop > 0:
                    pv = wnode[wtop - 1]
                    if low[v] < low[pv]:
                        low[pv] = low[v]
                if low[v] == order[v]:
                    while True:
                        w = scc_stack[stop - 1]
                        stop -= 1
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp, ncomp


@njit(cache=True, nogil=True)
def reach_mask(indptr, indices, seeds):
    """BFS closure: all nodes reachable from the seed mask (seeds included)."""
    n = indptr.shape[0] - 1
    vis = seeds.copy()
    queue = np.empty(n, np.int64)
    qt = 0
    for v in range(n):
        if vis[v]:
            queue[qt] = v
            qt += 1
    qh = 0
    while qh < qt:
        u = queue[qh]
        qh += 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if not vis[w]:
                vis[w] = True
                queue[qt] = w
                qt += 1
    return vis


@njit(cache=True, nogil=True)
def weak_components(indptr, indices):
    """Component id per node on an undirected CSR."""
    n = indptr.shape[0] - 1
    comp = np.full(n, -1, np.int64)
    queue = np.empty(n, np.int64)
    c = 0
    for s in range(n):
        if comp[s] != -1:
            continue
        comp[s] = c
        queue[0] = s
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if comp[w] == -1:
                    comp[w] = c
                    queue[qt] = w
                    qt += 1
        c += 1
    return comp, c


@njit(cache=True, nogil=True)
def cycle_census_kernel(indptr, indices, rindptr, rindices, max_len, cap):
    """Count simple directed cycles of exact lengths 2..max_len.

    Anchored enumeration: each cycle is discovered exactly once from its
    smallest node, and the DFS only walks nodes above the anchor. A
    reverse-BFS distance bound from the anchor prunes branches that cannot
    close in the remaining budget. Stops after `cap` cycles.

    Returns (counts[4], participation[4, n], total, completed) where the
    first axis is cycle length minus two.
    """
    n = indptr.shape[0] - 1
    counts = np.zeros(4, np.int64)
    part = np.zeros((4, n), np.int64)
    rdist = np.zeros(n, np.int64)
    rstamp = np.full(n, -1, np.int64)
    on_path = np.zeros(n, np.bool_)
    queue = np.empty(n, np.int64)
    path = np.empty(max_len, np.int64)
    ptrs = np.empty(max_len, np.int64)
    total = 0
    for a in range(n):
        # reverse BFS from the anchor over nodes > a, bounded by max_len-1
        rstamp[a] = a
        rdist[a] = 0
        queue[0] = a
        qh = 0
        qt = 1
        while qh < qt:
            u = queue[qh]
            qh += 1
            du = rdist[u]
            if du >= max_len - 1:
                continue
            for k in range(rindptr[u], rindptr[u + 1]):
                v = rindices[k]
                if v > a and rstamp[v] != a:
                    rstamp[v] = a
                    rdist[v] = du + 1
                    queue[qt] = v
                    qt += 1
        if qt == 1:
            continue
        depth = 0
        path[0] = a
        ptrs[0] = indptr[a]
        on_path[a] = True
        while depth >= 0:
            u = path[depth]
            p = ptrs[depth]
            if p >= indptr[u + 1]:
                on_path[u] = False
                depth -= 1
                continue
            ptrs[depth] = p + 1
            v = indices[p]
            length = depth + 1  # edges used after stepping to v
            if v == a:
                if length >= 2:
                    li = length - 2
                    counts[li] += 1
                    for t in range(depth + 1):
                        part[li, path[t]] += 1
                    total += 1
                    if total >= cap:
                        return counts, part, total, False
                continue
            if v <= a or on_path[v]:
                continue
            if rstamp[v] != a or length + rdist[v] > max_len:
                continue
            depth += 1
            path[depth] = v
            ptrs[depth] = indptr[v]
            on_path[v] = True
    return counts, part, total, True


@njit(cache=True, nogil=True, inline="always")
def _has_arc(optr, oidx, a, b):
    lo = optr[a]
    hi = optr[a + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        if oidx[mid] < b:
            lo = mid + 1
        else:
            hi = mid
    return lo < optr[a + 1] and oidx[lo] == b


@njit(cache=True, nogil=True, inline="always")
def _strongly_connected_triple(optr, oidx, a, b, c):
    ab = _has_arc(optr, oidx, a, b)
    ba = _has_arc(optr, oidx, b, a)
    ac = _has_arc(optr, oidx, a, c)
    ca = _has_arc(optr, oidx, c, a)
    bc = _has_arc(optr, oidx, b, c)
    cb = _has_arc(optr, oidx, c, b)
    # on three nodes, reachability needs at most two hops
    if not (ab or (ac and cb)):
        return False
    if not (ba or (bc and ca)):
        return False
    if not (ac or (ab and bc)):
        return False
    if not (ca or (cb and ba)):
        return False
    if not (bc or (ba and ac)):
        return False
    if not (cb or (ca and ab)):
        return False
    return True


@njit(cache=True, nogil=True)
def triangle_census(fptr, fidx, optr, oidx):
    """Per-node triangle and strongly-connected-triplet counts.

    fptr/fidx is the degree-ordered forward adjacency of the undirected
    projection (each undirected edge stored once, low rank -> high rank),
    so every triangle is found exactly once. optr/oidx is the directed
    out-adjacency used to classify the triple's orientation.
    """
    n = fptr.shape[0] - 1
    tri = np.zeros(n, np.int64)
    sct = np.zeros(n, np.int64)
    for u in range(n):
        for a in range(fptr[u], fptr[u + 1]):
            v = fidx[a]
            i = fptr[u]
            j = fptr[v]
            iend = fptr[u + 1]
            jend = fptr[v + 1]
            while i < iend and j < jend:
                x = fidx[i]
                y = fidx[j]
                if x == y:
                    tri[u] += 1
                    tri[v] += 1
                    tri[x] += 1
                    if _strongly_connected_triple(optr, oidx, u, v, x):
                        sct[u] += 1
                        sct[v] += 1
                        sct[x] += 1
                    i += 1
                    j += 1
                elif x < y:
                    i += 1
                else:
                    j += 1
    return tri, sct


def warmup() -> None:
    """Force-compile the kernels on a toy graph (cache-backed, one-off cost)."""
    indptr = np.array([0, 1, 2], dtype=np.int64)
    indices = np.array([1, 0], dtype=np.int64)
    tarjan_scc(indptr, indices)
    reach_mask(indptr, indices, np.array([True, False]))
    weak_components(indptr, indices)
    cycle_census_kernel(indptr, indices, indptr, indices, 5, 10)
    triangle_census(indptr, indices, indptr, indices)
    rewire_arcs(np.array([0, 1], dtype=np.int64), np.array([1, 0], dtype=np.int64), 2, 4, 1)
