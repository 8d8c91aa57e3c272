"""Pairwise structural similarity between two node lists.

Every builder returns a :class:`SimilarityMatrix` over ``rows x cols``. For
``katz``, ``community`` and ``random`` larger values mean more similar; the
``distance`` matrix stores hop distances, so larger means less similar.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .graph import Graph

log = logging.getLogger(__name__)

MEASURES = ("katz", "community", "distance", "random")
ABBREVIATIONS = {"KATZ": "katz", "COMM": "community", "DIST": "distance", "RND": "random"}

KATZ_ALPHA = 0.85
KATZ_ITERATIONS = 100
_KATZ_BLOCK = 512


class KatzDivergenceWarning(RuntimeWarning):
    """alpha times the spectral radius is >= 1, so the series diverges."""


def canonical_measure(name: str) -> str:
    key = name.strip()
    if key.upper() in ABBREVIATIONS:
        return ABBREVIATIONS[key.upper()]
    if key.lower() in MEASURES:
        return key.lower()
    raise ValueError(f"unknown similarity measure {name!r}")


@dataclass(frozen=True)
class SimilarityMatrix:
    measure: str
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    higher_is_similar: bool = True
    diverged: bool = False

    def matching_cost(self) -> np.ndarray:
        """Cost whose minimisation links the least similar pairs."""
        return self.values if self.higher_is_similar else -self.values

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("," + ",".join(str(c) for c in self.cols) + "\n")
            for r, row in zip(self.rows, self.values):
                fh.write(f"{r}," + ",".join(repr(float(x)) for x in row) + "\n")


@dataclass(frozen=True)
class CommunityAssignment:
    community_of: np.ndarray
    community_count: int
    density: np.ndarray
    modularity: float
    levels: int


def modularity(graph: Graph, community_of) -> float:
    m = graph.m
    if m == 0:
        return 0.0
    comm = np.asarray(community_of)
    e = graph.edges()
    internal = np.bincount(comm[e[:, 0]][comm[e[:, 0]] == comm[e[:, 1]]], minlength=comm.max() + 1)
    tot = np.bincount(comm, weights=graph.degrees, minlength=comm.max() + 1)
    return float((internal / m).sum() - ((tot / (2.0 * m)) ** 2).sum())


def _relabel_by_first_member(labels: np.ndarray) -> np.ndarray:
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[inverse]


def community_density(graph: Graph, community_of: np.ndarray, count: int) -> np.ndarray:
    """Edge density between (and within) communities.

    Off-diagonal: edges between i and j over ``|i| |j|``. Diagonal: internal
    edges over ``|i| (|i| - 1) / 2``; singletons get 0.
    """
    sizes = np.bincount(community_of, minlength=count).astype(np.float64)
    e = graph.edges()
    counts = np.zeros((count, count))
    if e.size:
        a, b = community_of[e[:, 0]], community_of[e[:, 1]]
        np.add.at(counts, (a, b), 1.0)
        np.add.at(counts, (b, a), 1.0)
    # internal edges were added twice on the diagonal
    internal = np.diag(counts) / 2.0
    pairs = np.outer(sizes, sizes)
    dens = np.divide(counts, pairs, out=np.zeros_like(counts), where=pairs > 0)
    within = sizes * (sizes - 1) / 2.0
    np.fill_diagonal(dens, np.divide(internal, within, out=np.zeros(count), where=within > 0))
    return dens


def louvain_communities(graph: Graph, seed: int | None = None, shuffle: bool = False,
                        max_levels: int = 64) -> CommunityAssignment:
    """Louvain modularity optimisation.

    Nodes are visited in ascending id order and a node moves to the best-gain
    neighbouring community (ties to the smallest community id) only when the
    gain strictly beats staying. ``shuffle=True`` visits nodes in a seeded
    random order instead.
    """
    n = graph.n
    if graph.m == 0:
        comm = np.arange(n, dtype=np.int64)
        return CommunityAssignment(comm, n, np.zeros((n, n)), 0.0, 0)
    rng = np.random.default_rng(seed)
    membership = np.arange(n, dtype=np.int64)
    level_adj = graph.adjacency.astype(np.float64).tocsr()
    levels = 0
    while levels < max_levels:
        size = level_adj.shape[0]
        order = rng.permutation(size) if shuffle else np.arange(size)
        comm = np.arange(size, dtype=np.int64)
        moves = kernels.louvain_local_move(level_adj.indptr, level_adj.indices, level_adj.data, order, comm)
        if moves == 0:
            break
        levels += 1
        comm = _relabel_by_first_member(comm)
        membership = comm[membership]
        count = int(comm.max()) + 1
        agg = sp.csr_matrix((np.ones(size), (np.arange(size), comm)), shape=(size, count))
        level_adj = (agg.T @ level_adj @ agg).tocsr()
        level_adj.sort_indices()
    membership = _relabel_by_first_member(membership)
    count = int(membership.max()) + 1
    return CommunityAssignment(
        membership, count, community_density(graph, membership, count), modularity(graph, membership), levels
    )


def community_similarity(graph: Graph, seed, rows, cols, communities: CommunityAssignment | None = None,
                         ) -> SimilarityMatrix:
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    if rows.size == 0 or cols.size == 0:
        raise ValueError("similarity needs non-empty node lists")
    if communities is None:
        communities = louvain_communities(graph, seed)
    c = communities.community_of
    values = communities.density[np.ix_(c[rows], c[cols])]
    return SimilarityMatrix("community", rows, cols, values)


def distance_similarity(graph: Graph, rows, cols) -> SimilarityMatrix:
    """Hop distances ``rows x cols``; unreachable pairs get ``n``."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    dist = kernels.bfs_distances(graph.indptr, graph.indices, rows)[:, cols].astype(np.int64)
    dist[dist < 0] = graph.n
    return SimilarityMatrix("distance", rows, cols, dist.astype(np.float64), higher_is_similar=False)


def spectral_radius(graph: Graph) -> float:
    if graph.m == 0:
        return 0.0
    adj = graph.adjacency.astype(np.float64)
    if graph.n <= 64:
        return float(np.max(np.abs(np.linalg.eigvalsh(adj.toarray()))))
    from scipy.sparse.linalg import eigsh

    val = eigsh(adj, k=1, which="LA", return_eigenvectors=False, v0=np.ones(graph.n), tol=1e-6)
    return float(val[0])


def katz_similarity(graph: Graph, rows, cols, alpha: float = KATZ_ALPHA,
                    iterations: int = KATZ_ITERATIONS, spectral_rescale: bool = False) -> SimilarityMatrix:
    """Truncated Katz series ``sum_{i=0..t} (alpha A)^i`` restricted to rows x cols.

    Uses the recurrence ``S <- I + alpha A S`` on the columns selected by
    ``cols`` only, so memory stays ``O(n * len(cols))``. With
    ``spectral_rescale`` alpha becomes ``alpha / lambda_max``. A divergent
    alpha is allowed and only warned about.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    lam = spectral_radius(graph)
    if spectral_rescale and lam > 0:
        alpha = alpha / lam
    diverged = alpha * lam >= 1.0
    if diverged:
        warnings.warn(f"Katz series diverges: alpha * lambda_max = {alpha * lam:.3f} >= 1; "
                      f"returning the {iterations}-term truncation", KatzDivergenceWarning, stacklevel=2)
    adj = (alpha * graph.adjacency.astype(np.float64)).tocsr()
    out = np.empty((rows.size, cols.size))
    for start in range(0, cols.size, _KATZ_BLOCK):
        block = cols[start:start + _KATZ_BLOCK]
        seed_cols = np.zeros((graph.n, block.size))
        seed_cols[block, np.arange(block.size)] = 1.0
        s = seed_cols.copy()
        for it in range(1, iterations + 1):
            s = adj @ s
            s += seed_cols
            if not np.isfinite(s).all():
                raise FloatingPointError(f"Katz series overflowed at iteration {it}")
        out[:, start:start + block.size] = s[rows]
    return SimilarityMatrix("katz", rows, cols, out, diverged=diverged)


def random_similarity(k: int, seed=None, rows=None, cols=None) -> SimilarityMatrix:
    if k < 1:
        raise ValueError("k must be >= 1")
    values = np.random.default_rng(seed).random((k, k))
    rows = np.arange(k) if rows is None else np.asarray(rows, dtype=np.int64)
    cols = np.arange(k) if cols is None else np.asarray(cols, dtype=np.int64)
    return SimilarityMatrix("random", rows, cols, values)


def similarity_matrix(graph: Graph, measure: str, rows, cols, seed=None, **options) -> SimilarityMatrix:
    measure = canonical_measure(measure)
    if measure == "katz":
        return katz_similarity(graph, rows, cols, **options)
    if measure == "community":
        return community_similarity(graph, seed, rows, cols)
    if measure == "distance":
        return distance_similarity(graph, rows, cols)
    return random_similarity(len(rows), seed, rows, cols)
