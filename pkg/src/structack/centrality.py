"""Node centrality measures and lowest-centrality selection."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Graph

log = logging.getLogger(__name__)

MEASURES = ("degree", "eigenvector", "pagerank", "betweenness", "closeness", "random")

ABBREVIATIONS = {
    "DG": "degree",
    "EV": "eigenvector",
    "PR": "pagerank",
    "BT": "betweenness",
    "CL": "closeness",
    "RND": "random",
}

TOL = 1e-6
MAX_ITER = 100
DAMPING = 0.85


def canonical_measure(name: str) -> str:
    key = name.strip()
    if key.upper() in ABBREVIATIONS:
        return ABBREVIATIONS[key.upper()]
    if key.lower() in MEASURES:
        return key.lower()
    raise ValueError(f"unknown centrality measure {name!r}")


@dataclass(frozen=True)
class CentralityScores:
    measure: str
    scores: np.ndarray
    seed: int | None = None
    converged: bool = True

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("node_id,score\n")
            for i, s in enumerate(self.scores):
                fh.write(f"{i},{float(s)!r}\n")


def pagerank(graph: Graph, damping: float = DAMPING, tol: float = TOL, max_iter: int = MAX_ITER):
    """Power iteration; dangling mass is spread uniformly.

    Returns ``(scores, converged)``; stops once the L1 change drops below ``tol``.
    """
    n = graph.n
    d = graph.degrees.astype(np.float64)
    inv = np.divide(1.0, d, out=np.zeros(n), where=d > 0)
    walk = graph.adjacency.astype(np.float64).T.multiply(inv).tocsr()  # column-stochastic
    dangling = d == 0
    x = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        nxt = damping * (walk @ x) + (damping * x[dangling].sum() + 1.0 - damping) / n
        err = np.abs(nxt - x).sum()
        x = nxt
        if err < tol:
            return x, True
    return x, False


def eigenvector(graph: Graph, tol: float = TOL, max_iter: int = MAX_ITER):
    """Principal eigenvector of A by power iteration on ``A + I``.

    The shift keeps bipartite graphs from oscillating without changing the
    eigenvectors. Starts from the all-ones vector; on disconnected graphs the
    components not carrying the dominant eigenvalue decay towards 0.
    """
    n = graph.n
    adj = graph.adjacency.astype(np.float64)
    x = np.full(n, 1.0 / np.sqrt(n))
    for _ in range(max_iter):
        nxt = adj @ x + x
        norm = np.linalg.norm(nxt)
        if norm == 0:
            return x, True
        nxt /= norm
        err = np.abs(nxt - x).sum()
        x = nxt
        if err < tol:
            return np.abs(x), True
    return np.abs(x), False


def closeness(graph: Graph) -> np.ndarray:
    """Closeness with the Wasserman-Faust correction for disconnected graphs."""
    n = graph.n
    totals, reach = kernels.distance_sums(graph.indptr, graph.indices)
    out = np.zeros(n)
    ok = (totals > 0) & (n > 1)
    r = (reach[ok] - 1).astype(np.float64)
    out[ok] = (r / totals[ok]) * (r / (n - 1))
    return out


def betweenness(graph: Graph) -> np.ndarray:
    """Unnormalised betweenness (Brandes), each unordered pair counted once."""
    return kernels.betweenness(graph.indptr, graph.indices)


def compute_centrality(graph: Graph, measure: str, seed: int | None = None) -> CentralityScores:
    if graph.n == 0:
        raise ValueError("centrality of an empty graph")
    measure = canonical_measure(measure)
    converged = True
    if measure == "degree":
        scores = graph.degrees.astype(np.float64)
    elif measure == "eigenvector":
        scores, converged = eigenvector(graph)
    elif measure == "pagerank":
        scores, converged = pagerank(graph)
    elif measure == "betweenness":
        scores = betweenness(graph)
    elif measure == "closeness":
        scores = closeness(graph)
    else:
        scores = np.random.default_rng(seed).random(graph.n)
    if not converged:
        log.warning("%s centrality did not converge in %d iterations", measure, MAX_ITER)
    return CentralityScores(measure, scores, seed if measure == "random" else None, converged)


def lowest_centrality_nodes(scores, count: int) -> np.ndarray:
    """The ``count`` lowest-scoring nodes, ascending by (score, node id)."""
    values = scores.scores if isinstance(scores, CentralityScores) else np.asarray(scores)
    if count > values.shape[0]:
        raise ValueError(f"requested {count} nodes from a graph with {values.shape[0]}")
    if count <= 0:
        return np.empty(0, dtype=np.int64)
    # stable sort keeps ascending ids among equal scores
    return np.argsort(values, kind="stable")[:count].astype(np.int64)
