"""Immutable undirected graphs, loaders and basic structural statistics."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse as sp

from . import kernels

log = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised for malformed edge, feature or label input."""


@dataclass(frozen=True)
class EdgeSet:
    """Ordered collection of distinct unordered node pairs.

    Pairs keep the orientation they were given in; ``(u, v)`` and ``(v, u)``
    count as the same pair. Self-pairs and duplicates raise.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        normalized = []
        seen = set()
        for u, v in self.pairs:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-pair ({u}, {v}) in edge set")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate pair {key} in edge set")
            seen.add(key)
            normalized.append((u, v))
        object.__setattr__(self, "pairs", tuple(normalized))
        object.__setattr__(self, "_keys", frozenset(seen))

    @classmethod
    def from_array(cls, arr) -> "EdgeSet":
        arr = np.asarray(arr, dtype=np.int64).reshape(-1, 2)
        return cls(tuple(map(tuple, arr.tolist())))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __contains__(self, pair) -> bool:
        u, v = pair
        return ((u, v) if u < v else (v, u)) in self._keys

    def isdisjoint(self, other: "EdgeSet") -> bool:
        return self._keys.isdisjoint(other._keys)

    def to_array(self) -> np.ndarray:
        return np.array(self.pairs, dtype=np.int64).reshape(-1, 2)


class Graph:
    """Undirected, unweighted, simple graph backed by a CSR adjacency matrix.

    Parameters
    ----------
    adjacency : scipy sparse matrix
        Symmetric 0/1 matrix without diagonal entries.
    features : array (n, f), optional
    labels : int array (n,), optional
    node_ids : int array (n,), optional
        Original identifiers of the dense ids ``0..n-1``.
    """

    __slots__ = ("_adj", "_degrees", "features", "labels", "node_ids", "n_labels")

    def __init__(self, adjacency, features=None, labels=None, node_ids=None, n_labels=None):
        adj = sp.csr_matrix(adjacency, dtype=np.int8)
        adj.sum_duplicates()
        adj.sort_indices()
        if adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be square")
        if adj.diagonal().any():
            raise ValueError("adjacency has self-loops")
        if (adj != adj.T).nnz:
            raise ValueError("adjacency is not symmetric")
        if adj.nnz and adj.data.max() != 1:
            raise ValueError("adjacency must be 0/1")
        n = adj.shape[0]
        for arr in (adj.indptr, adj.indices, adj.data):
            arr.flags.writeable = False
        self._adj = adj
        self._degrees = np.diff(adj.indptr).astype(np.int64)
        self._degrees.flags.writeable = False
        if features is not None:
            features = _frozen(features, np.float64)
            if features.ndim != 2 or features.shape[0] != n:
                raise GraphFormatError(f"features must have {n} rows, got shape {features.shape}")
        if labels is not None:
            labels = _frozen(labels, np.int64).ravel()
            if labels.shape[0] != n:
                raise GraphFormatError(f"labels must have {n} entries, got {labels.shape[0]}")
            if labels.size and labels.min() < 0:
                raise GraphFormatError("labels must be non-negative")
            if n_labels is None:
                n_labels = int(labels.max()) + 1 if labels.size else 0
            elif labels.size and labels.max() >= n_labels:
                raise GraphFormatError("label value outside label set")
        if node_ids is None:
            node_ids = np.arange(n, dtype=np.int64)
        node_ids = _frozen(node_ids, np.int64)
        self.features = features
        self.labels = labels
        self.node_ids = node_ids
        self.n_labels = n_labels if labels is not None else None

    @classmethod
    def from_edges(cls, n: int, edges, **kwargs) -> "Graph":
        """Build from an ``(m, 2)`` array-like of pairs; duplicates and
        reversed pairs collapse, self-pairs are rejected."""
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise IndexError("edge endpoint out of range")
        if (e[:, 0] == e[:, 1]).any():
            raise ValueError("self-loops are not allowed")
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        adj = sp.coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
        adj.data[:] = 1
        return cls(adj, **kwargs)

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def m(self) -> int:
        return self._adj.nnz // 2

    @property
    def adjacency(self) -> sp.csr_matrix:
        return self._adj

    @property
    def degrees(self) -> np.ndarray:
        return self._degrees

    @property
    def indptr(self) -> np.ndarray:
        return self._adj.indptr

    @property
    def indices(self) -> np.ndarray:
        return self._adj.indices

    def neighbors(self, u: int) -> np.ndarray:
        return self._adj.indices[self._adj.indptr[u]:self._adj.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        pos = np.searchsorted(nb, v)
        return bool(pos < nb.size and nb[pos] == v)

    def edges(self) -> np.ndarray:
        """``(m, 2)`` array of edges with ``u < v``, sorted."""
        coo = sp.triu(self._adj, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        return np.column_stack([coo.row[order], coo.col[order]]).astype(np.int64)

    def with_adjacency(self, adjacency) -> "Graph":
        return Graph(adjacency, features=self.features, labels=self.labels,
                     node_ids=self.node_ids, n_labels=self.n_labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph) or self.n != other.n or self.m != other.m:
            return False
        if (self._adj != other._adj).nnz:
            return False
        return _opt_equal(self.features, other.features) and _opt_equal(self.labels, other.labels)

    __hash__ = None

    def __repr__(self) -> str:
        extra = ""
        if self.features is not None:
            extra += f", f={self.features.shape[1]}"
        if self.labels is not None:
            extra += f", labels={self.n_labels}"
        return f"Graph(n={self.n}, m={self.m}{extra})"


def _frozen(arr, dtype) -> np.ndarray:
    """Read-only array; already-frozen arrays of the right dtype are shared."""
    if isinstance(arr, np.ndarray) and arr.dtype == dtype and not arr.flags.writeable:
        return arr
    out = np.array(arr, dtype=dtype)
    out.flags.writeable = False
    return out


def _opt_equal(a, b) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a.shape == b.shape and np.array_equal(a, b)


def _read_lines(source) -> Iterable[str]:
    if isinstance(source, (str, os.PathLike)) and os.path.exists(source):
        with open(source) as fh:
            yield from fh
    elif isinstance(source, str):
        yield from source.splitlines()
    else:
        yield from source


def _parse_edges(source):
    pairs = []
    for lineno, raw in enumerate(_read_lines(source), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {raw.strip()!r}")
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node id in {raw.strip()!r}") from None
    return np.array(pairs, dtype=np.int64).reshape(-1, 2)


def _parse_matrix(source) -> np.ndarray:
    rows = []
    for lineno, raw in enumerate(_read_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            rows.append([float(x) for x in line.replace(",", " ").split()])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-numeric value") from None
    if len({len(r) for r in rows}) > 1:
        raise GraphFormatError("feature rows have differing lengths")
    return np.array(rows, dtype=np.float64)


def load_edge_list(edges, features=None, labels=None, n: int | None = None) -> Graph:
    """Load a graph from whitespace- or comma-separated ``u v`` lines.

    ``edges``, ``features`` and ``labels`` may each be a path, a string of
    text, or an iterable of lines. Node ids are remapped to ``0..n-1`` in
    ascending order of the original ids; ``Graph.node_ids`` keeps the
    mapping. When ``n`` is given, ids must already lie in ``0..n-1`` and no
    remapping happens (isolated nodes are kept).
    """
    pairs = _parse_edges(edges)
    loops = pairs[:, 0] == pairs[:, 1]
    if loops.any():
        log.warning("dropped %d self-loop line(s)", int(loops.sum()))
        pairs = pairs[~loops]
    if n is None:
        node_ids, dense = np.unique(pairs, return_inverse=True)
        dense = dense.reshape(-1, 2)
    else:
        node_ids = np.arange(n, dtype=np.int64)
        dense = pairs
    x = _parse_matrix(features) if features is not None else None
    y = None
    if labels is not None:
        y = _parse_matrix(labels).ravel()
        if not np.all(y == np.round(y)):
            raise GraphFormatError("labels must be integers")
        y = y.astype(np.int64)
    return Graph.from_edges(len(node_ids), dense, features=x, labels=y, node_ids=node_ids)


def load_npz(path) -> Graph:
    """Load the sparse ``.npz`` layout used by common Cora/Citeseer releases
    (``adj_data/adj_indices/adj_indptr/adj_shape``, optional ``attr_*`` and
    ``labels``). The adjacency is symmetrised and binarised, the diagonal
    dropped."""
    with np.load(path, allow_pickle=True) as f:
        adj = sp.csr_matrix((f["adj_data"], f["adj_indices"], f["adj_indptr"]), shape=tuple(f["adj_shape"]))
        x = None
        if "attr_data" in f:
            x = sp.csr_matrix((f["attr_data"], f["attr_indices"], f["attr_indptr"]),
                              shape=tuple(f["attr_shape"])).toarray()
        elif "attr_matrix" in f:
            x = np.asarray(f["attr_matrix"])
        y = np.asarray(f["labels"]) if "labels" in f else None
    adj = adj + adj.T
    adj.setdiag(0)
    adj.eliminate_zeros()
    adj.data[:] = 1
    return Graph(adj, features=x, labels=y)


def load_linqs(content, cites) -> Graph:
    """Load the raw ``.content`` / ``.cites`` layout of the citation datasets.

    Each content line is ``<document id> <binary features...> <class name>``;
    each cites line is a pair of document ids. Ids may be arbitrary strings;
    citations naming documents absent from the content file are skipped. Nodes
    follow content-file order and class names are numbered in sorted order.
    """
    ids, rows, names = [], [], []
    for lineno, raw in enumerate(_read_lines(content), start=1):
        parts = raw.split()
        if not parts:
            continue
        if len(parts) < 3:
            raise GraphFormatError(f"content line {lineno}: expected id, features and label")
        ids.append(parts[0])
        try:
            rows.append([float(v) for v in parts[1:-1]])
        except ValueError:
            raise GraphFormatError(f"content line {lineno}: non-numeric feature") from None
        names.append(parts[-1])
    if len({len(r) for r in rows}) > 1:
        raise GraphFormatError("content rows have differing feature counts")
    index = {pid: i for i, pid in enumerate(ids)}
    if len(index) != len(ids):
        raise GraphFormatError("duplicate document id in content file")
    pairs, skipped = [], 0
    for raw in _read_lines(cites):
        parts = raw.split()
        if len(parts) < 2:
            continue
        a, b = index.get(parts[0]), index.get(parts[1])
        if a is None or b is None:
            skipped += 1
        elif a != b:
            pairs.append((min(a, b), max(a, b)))
    if skipped:
        log.warning("skipped %d citation(s) to documents without content", skipped)
    classes, y = np.unique(np.array(names), return_inverse=True)
    pairs = sorted(set(pairs))
    return Graph.from_edges(len(ids), pairs, features=np.array(rows), labels=y,
                            n_labels=len(classes))


def save_edge_list(graph: Graph, path) -> None:
    with open(path, "w") as fh:
        for u, v in graph.edges():
            fh.write(f"{graph.node_ids[u]} {graph.node_ids[v]}\n")


def connected_components(graph: Graph) -> np.ndarray:
    """Component id per node; components numbered by their smallest node."""
    from scipy.sparse.csgraph import connected_components as cc

    _, labels = cc(graph.adjacency, directed=False)
    _, first = np.unique(labels, return_index=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first)] = np.arange(first.size)
    return rank[labels]


def subgraph(graph: Graph, nodes) -> Graph:
    nodes = np.sort(np.asarray(nodes, dtype=np.int64))
    adj = graph.adjacency[nodes][:, nodes]
    return Graph(
        adj,
        features=None if graph.features is None else graph.features[nodes],
        labels=None if graph.labels is None else graph.labels[nodes],
        node_ids=graph.node_ids[nodes],
        n_labels=graph.n_labels,
    )


def extract_lcc(graph: Graph) -> Graph:
    """Induced subgraph on the largest connected component.

    Ties go to the component containing the smallest node id.
    """
    comp = connected_components(graph)
    sizes = np.bincount(comp)
    # components are numbered by smallest member, so argmax picks that tie
    keep = np.flatnonzero(comp == int(np.argmax(sizes)))
    if keep.size == graph.n:
        return graph
    return subgraph(graph, keep)


def add_edges(graph: Graph, edge_set) -> Graph:
    """New graph with ``edge_set`` added; pairs already present are no-ops."""
    e = edge_set.to_array() if isinstance(edge_set, EdgeSet) else np.asarray(edge_set, dtype=np.int64).reshape(-1, 2)
    if e.size == 0:
        return graph
    if e.min() < 0 or e.max() >= graph.n:
        raise IndexError("edge endpoint out of range")
    if (e[:, 0] == e[:, 1]).any():
        raise ValueError("self-loops are not allowed")
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    extra = sp.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=graph.adjacency.shape)
    adj = (graph.adjacency + extra).tocsr()
    adj.data[:] = 1
    return graph.with_adjacency(adj)


def remove_edges(graph: Graph, edge_set) -> Graph:
    """New graph with ``edge_set`` removed; absent pairs are no-ops."""
    e = edge_set.to_array() if isinstance(edge_set, EdgeSet) else np.asarray(edge_set, dtype=np.int64).reshape(-1, 2)
    if e.size == 0:
        return graph
    if e.min() < 0 or e.max() >= graph.n:
        raise IndexError("edge endpoint out of range")
    adj = graph.adjacency.tolil(copy=True)
    adj[e[:, 0], e[:, 1]] = 0
    adj[e[:, 1], e[:, 0]] = 0
    adj = adj.tocsr()
    adj.eliminate_zeros()
    return graph.with_adjacency(adj)


def degree_sequence(graph: Graph) -> np.ndarray:
    return graph.degrees.copy()


def local_clustering_coefficients(graph: Graph) -> np.ndarray:
    """``2 * triangles(u) / (d_u (d_u - 1))``; nodes with degree < 2 get 0."""
    tri = kernels.triangles(graph.indptr, graph.indices).astype(np.float64)
    d = graph.degrees.astype(np.float64)
    wedges = d * (d - 1)
    out = np.zeros(graph.n)
    ok = wedges > 0
    out[ok] = 2.0 * tri[ok] / wedges[ok]
    return out
