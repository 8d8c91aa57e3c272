"""numpy/scipy fallbacks for the numba kernels.

Traversals run level-synchronously as sparse products over batches of
sources; the Hungarian inner loop is vectorised over columns. Louvain local
moving is inherently sequential and runs as plain Python.
"""
import numpy as np
import scipy.sparse as sp

_BATCH = 256


def _csr(indptr, indices):
    n = indptr.shape[0] - 1
    data = np.ones(indices.shape[0], dtype=np.float64)
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


def bfs_distances(indptr, indices, sources):
    adj = _csr(indptr, indices)
    n = adj.shape[0]
    sources = np.asarray(sources, dtype=np.int64)
    out = np.full((sources.shape[0], n), -1, dtype=np.int32)
    for start in range(0, sources.shape[0], _BATCH):
        batch = sources[start:start + _BATCH]
        b = batch.shape[0]
        dist = out[start:start + b].T  # n x b view
        frontier = np.zeros((n, b))
        frontier[batch, np.arange(b)] = 1.0
        dist[batch, np.arange(b)] = 0
        level = 0
        while frontier.any():
            level += 1
            reached = (adj @ frontier) > 0
            new = reached & (dist < 0)
            dist[new] = level
            frontier = new.astype(np.float64)
    return out


def distance_sums(indptr, indices):
    n = indptr.shape[0] - 1
    totals = np.zeros(n, dtype=np.int64)
    reach = np.zeros(n, dtype=np.int64)
    for start in range(0, n, _BATCH):
        src = np.arange(start, min(n, start + _BATCH))
        d = bfs_distances(indptr, indices, src)
        ok = d >= 0
        totals[src] = np.where(ok, d, 0).sum(axis=1)
        reach[src] = ok.sum(axis=1)
    return totals, reach


def betweenness(indptr, indices):
    adj = _csr(indptr, indices)
    n = adj.shape[0]
    bc = np.zeros(n)
    for start in range(0, n, _BATCH):
        batch = np.arange(start, min(n, start + _BATCH))
        b = batch.shape[0]
        cols = np.arange(b)
        dist = np.full((n, b), -1, dtype=np.int64)
        sigma = np.zeros((n, b))
        dist[batch, cols] = 0
        sigma[batch, cols] = 1.0
        frontier = sigma.copy()
        level = 0
        while frontier.any():
            level += 1
            counts = adj @ frontier
            new = (counts > 0) & (dist < 0)
            dist[new] = level
            sigma[new] = counts[new]
            frontier = np.where(new, sigma, 0.0)
        delta = np.zeros((n, b))
        with np.errstate(divide="ignore", invalid="ignore"):
            for lv in range(level - 1, 0, -1):
                at = dist == lv
                coef = np.where(at, (1.0 + delta) / sigma, 0.0)
                pull = adj @ coef
                delta += np.where(dist == lv - 1, sigma * pull, 0.0)
        delta[batch, cols] = 0.0
        bc += delta.sum(axis=1)
    return bc / 2.0


def triangles(indptr, indices):
    adj = _csr(indptr, indices)
    closed = (adj @ adj).multiply(adj)
    return (np.asarray(closed.sum(axis=1)).ravel() / 2).round().astype(np.int64)


def hungarian(cost):
    cost = np.asarray(cost, dtype=np.float64)
    k = cost.shape[0]
    u = np.zeros(k + 1)
    v = np.zeros(k + 1)
    p = np.zeros(k + 1, dtype=np.int64)
    way = np.zeros(k + 1, dtype=np.int64)
    u[1:] = cost.min(axis=1)
    v[1:] = (cost - u[1:, None]).min(axis=0)
    reduced_zero = (cost - u[1:, None]) - v[None, 1:] == 0.0
    done = np.zeros(k + 1, dtype=bool)
    taken = np.zeros(k, dtype=bool)
    for i in range(k):
        free = np.flatnonzero(reduced_zero[i] & ~taken)
        if free.size:
            taken[free[0]] = True
            p[free[0] + 1] = i + 1
            done[i + 1] = True
    for i in range(1, k + 1):
        if done[i]:
            continue
        p[0] = i
        j0 = 0
        minv = np.full(k + 1, np.inf)
        used = np.zeros(k + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_to_col = np.empty(k, dtype=np.int64)
    row_to_col[p[1:] - 1] = np.arange(k)
    return row_to_col, u[1:].copy(), v[1:].copy()


def lex_smallest_tight_matching(cost, u, v, row_to_col, tol):
    k = cost.shape[0]
    tight = (cost - u[:, None] - v[None, :]) <= tol
    r2c = row_to_col.copy()
    c2r = np.empty(k, dtype=np.int64)
    c2r[r2c] = np.arange(k)
    col_fixed = np.zeros(k, dtype=bool)
    for i in range(k):
        for j in np.flatnonzero(tight[i] & ~col_fixed):
            if j == r2c[i]:
                col_fixed[j] = True
                break
            target = r2c[i]
            start = c2r[j]
            seen = col_fixed.copy()
            seen[j] = True
            parent_row = np.full(k, -1, dtype=np.int64)
            rows = [start]
            found = False
            while rows and not found:
                nxt = []
                for row in rows:
                    hit = np.flatnonzero(tight[row] & ~seen)
                    seen[hit] = True
                    parent_row[hit] = row
                    if parent_row[target] >= 0:
                        found = True
                        break
                    nxt.extend(c2r[hit].tolist())
                rows = nxt
            if not found:
                continue
            c = target
            while True:
                row = parent_row[c]
                prev = r2c[row]
                r2c[row] = c
                c2r[c] = row
                if row == start:
                    break
                c = prev
            r2c[i] = j
            c2r[j] = i
            col_fixed[j] = True
            break
    return r2c


def louvain_local_move(indptr, indices, weights, order, comm, eps):
    from . import _numba

    fn = getattr(_numba.louvain_local_move, "py_func", _numba.louvain_local_move)
    return fn(indptr, indices, weights, order, comm, eps)
