"""numba kernels. All graph kernels take CSR ``indptr``/``indices`` arrays of an
undirected graph with sorted column indices and no self-loops."""
import numpy as np

from .._backend import njit


@njit(cache=True)
def bfs_distances(indptr, indices, sources):
    n = indptr.shape[0] - 1
    out = np.full((sources.shape[0], n), -1, dtype=np.int32)
    queue = np.empty(n, dtype=np.int64)
    for row in range(sources.shape[0]):
        dist = out[row]
        s = sources[row]
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            dv = dist[v] + 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dv
                    queue[tail] = w
                    tail += 1
    return out


@njit(cache=True)
def distance_sums(indptr, indices):
    """Per node: sum of hop distances to reachable nodes and reachable count
    (the node itself included)."""
    n = indptr.shape[0] - 1
    totals = np.zeros(n, dtype=np.int64)
    reach = np.zeros(n, dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        acc = 0
        while head < tail:
            v = queue[head]
            head += 1
            acc += dist[v]
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
        totals[s] = acc
        reach[s] = tail
    return totals, reach


@njit(cache=True)
def betweenness(indptr, indices):
    n = indptr.shape[0] - 1
    bc = np.zeros(n, dtype=np.float64)
    sigma = np.empty(n, dtype=np.float64)
    delta = np.empty(n, dtype=np.float64)
    dist = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    for s in range(n):
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[:] = -1
        sigma[s] = 1.0
        dist[s] = 0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        # predecessors of w are neighbours one level closer to s
        for pos in range(tail - 1, 0, -1):
            w = order[pos]
            coef = (1.0 + delta[w]) / sigma[w]
            for e in range(indptr[w], indptr[w + 1]):
                v = indices[e]
                if dist[v] == dist[w] - 1:
                    delta[v] += sigma[v] * coef
            bc[w] += delta[w]
    return bc / 2.0


@njit(cache=True)
def triangles(indptr, indices):
    n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n, dtype=np.bool_)
    for u in range(n):
        for e in range(indptr[u], indptr[u + 1]):
            mark[indices[e]] = True
        t = 0
        for e in range(indptr[u], indptr[u + 1]):
            v = indices[e]
            for f in range(indptr[v], indptr[v + 1]):
                if mark[indices[f]]:
                    t += 1
        for e in range(indptr[u], indptr[u + 1]):
            mark[indices[e]] = False
        out[u] = t // 2
    return out


@njit(cache=True)
def hungarian(cost):
    """Shortest augmenting path Hungarian method, O(k^3).

    Duals start from row then column reduction and a greedy matching on the
    zero reduced-cost pairs; remaining rows are inserted one augmenting path
    at a time. Returns ``(row_to_col, u, v)`` with ``cost[i, j] - u[i] - v[j]
    >= 0`` everywhere and equality on matched pairs.
    """
    k = cost.shape[0]
    u = np.zeros(k + 1)
    v = np.zeros(k + 1)
    p = np.zeros(k + 1, dtype=np.int64)
    way = np.zeros(k + 1, dtype=np.int64)
    minv = np.empty(k + 1)
    used = np.empty(k + 1, dtype=np.bool_)
    for i in range(1, k + 1):
        best = np.inf
        for j in range(k):
            if cost[i - 1, j] < best:
                best = cost[i - 1, j]
        u[i] = best
    for j in range(1, k + 1):
        best = np.inf
        for i in range(1, k + 1):
            r = cost[i - 1, j - 1] - u[i]
            if r < best:
                best = r
        v[j] = best
    row_done = np.zeros(k + 1, dtype=np.bool_)
    for i in range(1, k + 1):
        for j in range(1, k + 1):
            if p[j] == 0 and cost[i - 1, j - 1] - u[i] - v[j] == 0.0:
                p[j] = i
                row_done[i] = True
                break
    for i in range(1, k + 1):
        if row_done[i]:
            continue
        p[0] = i
        j0 = 0
        minv[:] = np.inf
        used[:] = False
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, k + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(k + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    row_to_col = np.empty(k, dtype=np.int64)
    for j in range(1, k + 1):
        row_to_col[p[j] - 1] = j - 1
    return row_to_col, u[1:].copy(), v[1:].copy()


@njit(cache=True)
def lex_smallest_tight_matching(cost, u, v, row_to_col, tol):
    """Lexicographically smallest perfect matching among the tight pairs
    ``cost - u - v <= tol``. Every optimal assignment lives in that subgraph,
    so this is the lex-smallest optimal permutation."""
    k = cost.shape[0]
    # tight pairs as CSR, columns ascending per row
    ptr = np.zeros(k + 1, dtype=np.int64)
    for i in range(k):
        cnt = 0
        for j in range(k):
            if cost[i, j] - u[i] - v[j] <= tol:
                cnt += 1
        ptr[i + 1] = ptr[i] + cnt
    adj = np.empty(ptr[k], dtype=np.int64)
    for i in range(k):
        pos = ptr[i]
        for j in range(k):
            if cost[i, j] - u[i] - v[j] <= tol:
                adj[pos] = j
                pos += 1
    r2c = row_to_col.copy()
    c2r = np.empty(k, dtype=np.int64)
    for i in range(k):
        c2r[r2c[i]] = i
    col_fixed = np.zeros(k, dtype=np.bool_)
    parent_row = np.empty(k, dtype=np.int64)
    seen = np.zeros(k, dtype=np.int64)
    stamp = 0
    queue = np.empty(k, dtype=np.int64)
    for i in range(k):
        for e in range(ptr[i], ptr[i + 1]):
            j = adj[e]
            if col_fixed[j]:
                continue
            if j == r2c[i]:
                col_fixed[j] = True
                break
            # row r holding j must reach the column i frees, through tight
            # pairs of unfixed rows and columns
            target = r2c[i]
            r = c2r[j]
            stamp += 1
            seen[j] = stamp
            queue[0] = r
            head = 0
            tail = 1
            found = False
            while head < tail and not found:
                row = queue[head]
                head += 1
                for f in range(ptr[row], ptr[row + 1]):
                    c = adj[f]
                    if seen[c] == stamp or col_fixed[c]:
                        continue
                    seen[c] = stamp
                    parent_row[c] = row
                    if c == target:
                        found = True
                        break
                    queue[tail] = c2r[c]
                    tail += 1
            if not found:
                continue
            c = target
            while True:
                row = parent_row[c]
                prev = r2c[row]
                r2c[row] = c
                c2r[c] = row
                if row == r:
                    break
                c = prev
            r2c[i] = j
            c2r[j] = i
            col_fixed[j] = True
            break
    return r2c


@njit(cache=True)
def louvain_local_move(indptr, indices, weights, order, comm, eps):
    """One Louvain local-moving phase on a weighted graph whose diagonal
    entries hold twice the internal weight. ``comm`` is updated in place.
    Returns the number of moves made."""
    n = indptr.shape[0] - 1
    k = np.zeros(n)
    m2 = 0.0
    for i in range(n):
        for e in range(indptr[i], indptr[i + 1]):
            k[i] += weights[e]
        m2 += k[i]
    tot = np.zeros(n)
    for i in range(n):
        tot[comm[i]] += k[i]
    link = np.zeros(n)
    touched = np.empty(n, dtype=np.int64)
    is_touched = np.zeros(n, dtype=np.bool_)
    total_moves = 0
    while True:
        moves = 0
        for pos in range(n):
            i = order[pos]
            ci = comm[i]
            nt = 0
            for e in range(indptr[i], indptr[i + 1]):
                j = indices[e]
                if j == i:
                    continue
                c = comm[j]
                if not is_touched[c]:
                    is_touched[c] = True
                    touched[nt] = c
                    nt += 1
                link[c] += weights[e]
            tot[ci] -= k[i]
            stay = link[ci] - tot[ci] * k[i] / m2
            best = -1
            best_gain = -np.inf
            for t in range(nt):
                c = touched[t]
                if c == ci:
                    continue
                gain = link[c] - tot[c] * k[i] / m2
                if best < 0 or gain > best_gain + eps:
                    best = c
                    best_gain = gain
                elif gain >= best_gain - eps and c < best:
                    best = c
            target = ci
            if best >= 0 and best_gain > stay + eps:
                target = best
                moves += 1
            tot[target] += k[i]
            comm[i] = target
            for t in range(nt):
                c = touched[t]
                link[c] = 0.0
                is_touched[c] = False
        total_moves += moves
        if moves == 0:
            break
    return total_moves
