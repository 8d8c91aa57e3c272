"""Slow, obviously-correct reference implementations used as test oracles.

Nothing here imports the package's kernels: each oracle recomputes its
quantity from definitions (exhaustive search, exact rationals, dense linear
algebra) so agreement is meaningful.
"""
from fractions import Fraction
from itertools import permutations

import numpy as np


def adjacency_lists(edges, n):
    nb = [set() for _ in range(n)]
    for u, v in edges:
        nb[u].add(v)
        nb[v].add(u)
    return [sorted(s) for s in nb]


def bfs(nb, s):
    dist = {s: 0}
    frontier = [s]
    while frontier:
        nxt = []
        for v in frontier:
            for w in nb[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    nxt.append(w)
        frontier = nxt
    return dist


def brute_force_assignment(cost):
    """(best cost, lexicographically smallest optimal permutation)."""
    k = len(cost)
    best, best_perm = None, None
    for perm in permutations(range(k)):  # generated in lexicographic order
        total = sum(cost[i][perm[i]] for i in range(k))
        if best is None or total < best:
            best, best_perm = total, perm
    return best, list(best_perm)


def path_counting_betweenness(edges, n):
    """Exact betweenness from shortest-path counts with Fractions:
    ``sum_{s<t} sigma_st(v) / sigma_st`` where ``sigma_st(v) =
    sigma_sv * sigma_vt`` when ``d(s,v) + d(v,t) = d(s,t)``."""
    nb = adjacency_lists(edges, n)
    dist = [bfs(nb, s) for s in range(n)]
    sigma = [[0] * n for _ in range(n)]
    for s in range(n):
        order = sorted(dist[s], key=dist[s].get)
        sigma[s][s] = 1
        for v in order:
            for w in nb[v]:
                if dist[s].get(w) == dist[s][v] + 1:
                    sigma[s][w] += sigma[s][v]
    bc = [Fraction(0)] * n
    for s in range(n):
        for t in range(s + 1, n):
            if t not in dist[s]:
                continue
            for v in range(n):
                if v in (s, t) or v not in dist[s] or t not in dist[v]:
                    continue
                if dist[s][v] + dist[v][t] == dist[s][t]:
                    bc[v] += Fraction(sigma[s][v] * sigma[v][t], sigma[s][t])
    return bc


def ecdf_ks_statistic(a, b):
    """Double loop over every candidate point; ECDFs counted by hand."""
    best = 0.0
    for x in list(a) + list(b):
        fa = sum(1 for v in a if v <= x) / len(a)
        fb = sum(1 for v in b if v <= x) / len(b)
        best = max(best, abs(fa - fb))
    return best


def katz_dense_solve(adj, alpha):
    """Closed form ``(I - alpha A)^-1`` of the convergent Katz series."""
    n = adj.shape[0]
    return np.linalg.solve(np.eye(n) - alpha * adj, np.eye(n))


def walk_enumeration_jacobian(edges, n, u, w, k):
    """Sum over every length-``k`` walk ``u = v0, ..., vk = w`` of
    ``1 / sqrt(d_u d_w) * prod_{inner} 1 / d_vi``, inner products exact.

    Returns ``(rational part, sqrt argument)`` so the value is
    ``rational / sqrt(d_u d_w)`` evaluated only at the very end.
    """
    nb = adjacency_lists(edges, n)
    deg = [len(x) for x in nb]
    total = Fraction(0)
    # depth-first over walks
    stack = [(u, 0, Fraction(1))]
    while stack:
        v, depth, weight = stack.pop()
        if depth == k:
            if v == w:
                total += weight
            continue
        for x in nb[v]:
            inner = Fraction(1, deg[x]) if depth + 1 < k else Fraction(1)
            stack.append((x, depth + 1, weight * inner))
    return total, deg[u] * deg[w]



def augmented_star(extra_per_leaf):
    """Hub 0 with one leaf per entry of ``extra_per_leaf``; leaf ``i`` gets
    that many private pendant nodes, so leaf degrees differ while every leaf
    sees the hub in exactly the same way.

    Returns ``(edges, n, leaves)``.
    """
    edges, leaves = [], []
    nxt = 1
    for extra in extra_per_leaf:
        leaf = nxt
        nxt += 1
        leaves.append(leaf)
        edges.append((0, leaf))
        for _ in range(extra):
            edges.append((leaf, nxt))
            nxt += 1
    return edges, nxt, leaves
