"""Small synthetic graph generators used by tests, benchmarks and desk-scale
experiments."""
from __future__ import annotations

import numpy as np

from .graph import Graph


def _sample_pairs(rng, rows, cols, count):
    """``count`` distinct unordered pairs from rows x cols."""
    chosen = set()
    out = []
    while len(out) < count:
        need = count - len(out)
        a = rng.choice(rows, size=2 * need + 8)
        b = rng.choice(cols, size=2 * need + 8)
        for u, v in zip(a.tolist(), b.tolist()):
            if u == v:
                continue
            key = (u, v) if u < v else (v, u)
            if key in chosen:
                continue
            chosen.add(key)
            out.append(key)
            if len(out) == count:
                break
    return out


def stochastic_block_model(sizes, probs, seed=None, features=None, labels=True) -> Graph:
    """Undirected SBM. ``probs`` is a symmetric block-probability matrix.

    Edge counts per block pair are drawn from the exact binomial, then that
    many distinct pairs are sampled uniformly, so the law matches the
    independent-edge model.
    """
    rng = np.random.default_rng(seed)
    sizes = np.asarray(sizes, dtype=np.int64)
    probs = np.asarray(probs, dtype=np.float64)
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    n = int(bounds[-1])
    edges = []
    for a in range(sizes.size):
        for b in range(a, sizes.size):
            ra = np.arange(bounds[a], bounds[a + 1])
            rb = np.arange(bounds[b], bounds[b + 1])
            total = sizes[a] * (sizes[a] - 1) // 2 if a == b else sizes[a] * sizes[b]
            if total == 0 or probs[a, b] <= 0:
                continue
            count = rng.binomial(total, probs[a, b])
            if a == b and count > total // 2:
                iu = np.triu_indices(sizes[a], 1)
                keep = rng.random(iu[0].size) < probs[a, b]
                edges.extend(zip((ra[iu[0][keep]]).tolist(), (ra[iu[1][keep]]).tolist()))
                continue
            edges.extend(_sample_pairs(rng, ra, rb, count))
    block = np.repeat(np.arange(sizes.size), sizes)
    return Graph.from_edges(n, edges, features=features, labels=block if labels else None)


def planted_sbm(n_nodes, n_blocks, avg_degree, mixing, seed=None, **kwargs) -> Graph:
    """Equal-size SBM with a target average degree; ``mixing`` is the
    expected fraction of a node's edges that leave its block."""
    sizes = np.full(n_blocks, n_nodes // n_blocks)
    sizes[: n_nodes - sizes.sum()] += 1
    s = n_nodes / n_blocks
    p_in = avg_degree * (1 - mixing) / max(s - 1, 1)
    p_out = avg_degree * mixing / max(n_nodes - s, 1)
    probs = np.full((n_blocks, n_blocks), p_out)
    np.fill_diagonal(probs, p_in)
    return stochastic_block_model(sizes, probs, seed=seed, **kwargs)


def block_features(labels, n_features, signal, seed=None, density=0.05) -> np.ndarray:
    """Sparse binary bag-of-words style features correlated with the block.

    Each class owns a slice of the vocabulary; a node's words come from its
    class slice with probability ``signal`` and uniformly otherwise.
    """
    rng = np.random.default_rng(seed)
    labels = np.asarray(labels)
    n_classes = int(labels.max()) + 1
    per_class = n_features // n_classes
    words = max(1, int(round(density * n_features)))
    x = np.zeros((labels.size, n_features))
    for i, c in enumerate(labels):
        own = rng.random(words) < signal
        idx = np.where(own, c * per_class + rng.integers(0, per_class, words), rng.integers(0, n_features, words))
        x[i, idx] = 1.0
    return x


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, 1)
    return Graph.from_edges(n, np.column_stack(iu))


def gnp_graph(n: int, p: float, seed=None) -> Graph:
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))


def joined_cliques(size: int, count: int = 2) -> Graph:
    """``count`` cliques of ``size`` nodes chained by single bridge edges."""
    edges = []
    for c in range(count):
        base = c * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size)]
        if c:
            edges.append((base - 1, base))
    return Graph.from_edges(size * count, edges)


def degree_corrected_sbm(n_nodes, n_blocks, avg_degree, mixing, exponent=2.5, seed=None,
                         max_propensity=None, labels=True) -> Graph:
    """Equal-size SBM whose nodes carry power-law degree propensities.

    Pair ``(i, j)`` is linked with probability ``min(1, t_i t_j p)`` where
    ``p`` is the planted within/between-block probability and ``t`` is drawn
    from a Pareto law with tail ``exponent`` (capped at ``sqrt(n)`` by
    default) and rescaled to mean 1 inside each block, so the expected
    degrees follow ``t`` while the block mixing stays as planted.
    """
    rng = np.random.default_rng(seed)
    sizes = np.full(n_blocks, n_nodes // n_blocks)
    sizes[: n_nodes - sizes.sum()] += 1
    block = np.repeat(np.arange(n_blocks), sizes)
    cap = max_propensity if max_propensity is not None else np.sqrt(n_nodes)
    t = np.minimum((1.0 - rng.random(n_nodes)) ** (-1.0 / (exponent - 1.0)), cap)
    for b in range(n_blocks):
        t[block == b] /= t[block == b].mean()
    s = n_nodes / n_blocks
    p_in = avg_degree * (1 - mixing) / max(s - 1, 1)
    p_out = avg_degree * mixing / max(n_nodes - s, 1)
    edges = []
    for i in range(n_nodes - 1):
        j = np.arange(i + 1, n_nodes)
        p = np.where(block[j] == block[i], p_in, p_out) * t[i] * t[j]
        hit = j[rng.random(j.size) < np.minimum(p, 1.0)]
        edges.extend((i, int(v)) for v in hit)
    return Graph.from_edges(n_nodes, edges, labels=block if labels else None)
