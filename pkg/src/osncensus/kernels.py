"""Hot loops over CSR graphs and edge arrays.

Every kernel exists in two flavours: a numba-compiled loop (``*_numba``)
and a numpy path (``*_numpy``). The unsuffixed names dispatch on
:data:`osncensus._accel.USE_JIT`. Random numbers are always drawn by the
caller and passed in, so both flavours consume identical streams and
return identical results.

Graphs are CSR: ``indptr`` (n+1,) and ``indices`` (2m,), int64, neighbour
lists sorted. Distances use :data:`UNREACHABLE` for vertices not reached.
"""
import numpy as np

from ._accel import USE_JIT, njit

UNREACHABLE = -1


# ---------------------------------------------------------------- BFS

@njit
def bfs_numba(indptr, indices, source):
    n = indptr.shape[0] - 1
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[source] = 0
    queue[0] = source
    head = 0
    tail = 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u] + 1
        for p in range(indptr[u], indptr[u + 1]):
            v = indices[p]
            if dist[v] < 0:
                dist[v] = du
                queue[tail] = v
                tail += 1
    return dist


def _gather_neighbors(indptr, indices, frontier):
    starts = indptr[frontier]
    lens = indptr[frontier + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return indices[:0]
    # position of each gathered slot inside its own neighbour list
    base = np.repeat(starts - (np.cumsum(lens) - lens), lens)
    return indices[base + np.arange(total)]


def bfs_numpy(indptr, indices, source):
    """Level-synchronous BFS, one vectorised gather per level."""
    n = indptr.shape[0] - 1
    dist = np.full(n, UNREACHABLE, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        nbrs = _gather_neighbors(indptr, indices, frontier)
        nbrs = np.unique(nbrs[dist[nbrs] == UNREACHABLE])
        dist[nbrs] = level
        frontier = nbrs
    return dist


@njit
def source_path_sums_numba(indptr, indices, sources):
    n = indptr.shape[0] - 1
    k = sources.shape[0]
    sums = np.zeros(k, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    maxs = np.zeros(k, dtype=np.int64)
    mins = np.zeros(k, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(k):
        src = sources[s]
        dist[src] = 0
        queue[0] = src
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            du = dist[u] + 1
            for p in range(indptr[u], indptr[u + 1]):
                v = indices[p]
                if dist[v] < 0:
                    dist[v] = du
                    queue[tail] = v
                    tail += 1
        total = 0
        hi = 0
        lo = 0
        for q in range(1, tail):
            d = dist[queue[q]]
            total += d
            if d > hi:
                hi = d
            if lo == 0 or d < lo:
                lo = d
        sums[s] = total
        counts[s] = tail - 1
        maxs[s] = hi
        mins[s] = lo
        # reset only what this source touched
        for q in range(tail):
            dist[queue[q]] = -1
    return sums, counts, maxs, mins


def source_path_sums_numpy(indptr, indices, sources):
    k = len(sources)
    sums = np.zeros(k, dtype=np.int64)
    counts = np.zeros(k, dtype=np.int64)
    maxs = np.zeros(k, dtype=np.int64)
    mins = np.zeros(k, dtype=np.int64)
    for s, src in enumerate(sources):
        dist = bfs_numpy(indptr, indices, int(src))
        reached = dist[dist > 0]
        if reached.size:
            sums[s] = reached.sum()
            counts[s] = reached.size
            maxs[s] = reached.max()
            mins[s] = reached.min()
    return sums, counts, maxs, mins


# ------------------------------------------------- preferential attachment

@njit
def ba_attach_numba(n, m, uniforms):
    """Grow a BA graph from a clique on ``m`` vertices.

    Returns ``(edges, used)`` where ``used`` is the number of uniforms
    consumed, or -1 when the buffer ran dry before the graph was complete.
    """
    n_edges = m * (m - 1) // 2 + (n - m) * m
    edges = np.empty((n_edges, 2), dtype=np.int64)
    targets = np.empty(2 * n_edges, dtype=np.int64)
    e = 0
    t = 0
    for i in range(m):
        for j in range(i + 1, m):
            edges[e, 0] = i
            edges[e, 1] = j
            e += 1
            targets[t] = i
            targets[t + 1] = j
            t += 2
    chosen = np.empty(m, dtype=np.int64)
    pos = 0
    n_uniforms = uniforms.shape[0]
    for v in range(m, n):
        c = 0
        while c < m:
            if pos >= n_uniforms:
                return edges, -1
            u = uniforms[pos]
            pos += 1
            if t == 0:
                # no degree mass yet (m == 1 seed): uniform over existing vertices
                cand = int(u * v)
            else:
                cand = targets[int(u * t)]
            fresh = True
            for q in range(c):
                if chosen[q] == cand:
                    fresh = False
                    break
            if fresh:
                chosen[c] = cand
                c += 1
        for q in range(m):
            edges[e, 0] = chosen[q]
            edges[e, 1] = v
            e += 1
            targets[t] = chosen[q]
            targets[t + 1] = v
            t += 2
    return edges, pos


ba_attach_numpy = ba_attach_numba.py_func


# -------------------------------------------------------- edge swapping

@njit
def metropolis_swaps_numba(edges, n, gender, age, log_cross, log_same,
                           inv_scale, uniforms):
    """Degree-preserving double-edge swaps with Metropolis acceptance.

    ``edges`` (E, 2) holds dense vertex indices and is rewritten in place.
    Each row of ``uniforms`` (S, 4) drives one proposal. Returns the number
    of accepted swaps.
    """
    n_edges = edges.shape[0]
    # Edge keys lo*n+hi live in a linear-probing table with backward-shift
    # deletion. No tombstones build up, however many swaps are accepted
    # (numba's own set degrades under that churn).
    cap = 8
    while cap < 4 * n_edges:
        cap *= 2
    mask = cap - 1
    table = np.full(cap, -1, dtype=np.int64)
    for e in range(n_edges):
        key = edges[e, 0] * n + edges[e, 1]
        h = (key ^ (key >> 16) ^ (key >> 32)) & mask
        while table[h] != -1:
            h = (h + 1) & mask
        table[h] = key
    accepted = 0
    for s in range(uniforms.shape[0]):
        i = int(uniforms[s, 0] * n_edges)
        j = int(uniforms[s, 1] * n_edges)
        if i == j:
            continue
        a = edges[i, 0]
        b = edges[i, 1]
        c = edges[j, 0]
        d = edges[j, 1]
        if uniforms[s, 2] < 0.5:
            c, d = d, c
        # proposal: (a,b),(c,d) -> (a,d),(c,b)
        if a == d or c == b:
            continue
        k1 = min(a, d) * n + max(a, d)
        k2 = min(c, b) * n + max(c, b)
        if k1 == k2:
            continue
        clash = False
        for key in (k1, k2):
            h = (key ^ (key >> 16) ^ (key >> 32)) & mask
            while table[h] != -1:
                if table[h] == key:
                    clash = True
                    break
                h = (h + 1) & mask
            if clash:
                break
        if clash:
            continue
        delta = 0.0
        # +new edges, -old edges; log weight = gender term - age gap / scale
        for x, y, sign in ((a, d, 1.0), (c, b, 1.0), (a, b, -1.0), (c, d, -1.0)):
            w = log_cross if gender[x] != gender[y] else log_same
            delta += sign * (w - abs(age[x] - age[y]) * inv_scale)
        if delta < 0.0 and uniforms[s, 3] >= np.exp(delta):
            continue
        for key in (edges[i, 0] * n + edges[i, 1], edges[j, 0] * n + edges[j, 1]):
            h = (key ^ (key >> 16) ^ (key >> 32)) & mask
            while table[h] != key:
                h = (h + 1) & mask
            table[h] = -1
            q = h
            while True:
                q = (q + 1) & mask
                kq = table[q]
                if kq == -1:
                    break
                home = (kq ^ (kq >> 16) ^ (kq >> 32)) & mask
                # move kq into the hole if the hole lies on its probe path
                if ((q - home) & mask) >= ((q - h) & mask):
                    table[h] = kq
                    table[q] = -1
                    h = q
        for key in (k1, k2):
            h = (key ^ (key >> 16) ^ (key >> 32)) & mask
            while table[h] != -1:
                h = (h + 1) & mask
            table[h] = key
        edges[i, 0] = min(a, d)
        edges[i, 1] = max(a, d)
        edges[j, 0] = min(c, b)
        edges[j, 1] = max(c, b)
        accepted += 1
    return accepted


metropolis_swaps_numpy = metropolis_swaps_numba.py_func


if USE_JIT:
    bfs = bfs_numba
    source_path_sums = source_path_sums_numba
    ba_attach = ba_attach_numba
    metropolis_swaps = metropolis_swaps_numba
else:
    bfs = bfs_numpy
    source_path_sums = source_path_sums_numpy
    ba_attach = ba_attach_numpy
    metropolis_swaps = metropolis_swaps_numpy
