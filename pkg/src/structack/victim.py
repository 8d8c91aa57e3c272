"""Linearized graph-convolution victim ``softmax(Â^K X W)`` and the Jacobian
tools that relate neighbour influence to node degree."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .graph import Graph

WITH_SELF_LOOPS = "with_self_loops"
PLAIN_NEIGHBORS = "plain_neighbors"
VARIANTS = (WITH_SELF_LOOPS, PLAIN_NEIGHBORS)


@dataclass(frozen=True)
class NormalizedOperator:
    """Symmetrically normalized adjacency, either with self-loops added
    (``D̃^-1/2 (A + I) D̃^-1/2``) or over plain neighbours (``D^-1/2 A D^-1/2``)."""
    variant: str
    matrix: sp.csr_matrix

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def normalized_adjacency(graph: Graph, variant: str = WITH_SELF_LOOPS) -> NormalizedOperator:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    a = graph.adjacency.astype(np.float64)
    if variant == WITH_SELF_LOOPS:
        a = a + sp.identity(graph.n, format="csr")
    deg = np.asarray(a.sum(axis=1)).ravel()
    with np.errstate(divide="ignore"):
        inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(deg), 0.0)
    d = sp.diags(inv_sqrt)
    return NormalizedOperator(variant, sp.csr_matrix(d @ a @ d))


def propagate(operator: NormalizedOperator, x, k: int) -> np.ndarray:
    """``Â^K X`` by ``K`` sparse-dense products."""
    x = np.asarray(x, dtype=np.float64)
    if k < 0:
        raise ValueError("K must be non-negative")
    if x.shape[0] != operator.n:
        raise ValueError(f"X has {x.shape[0]} rows, operator has {operator.n}")
    h = x.copy()
    for _ in range(k):
        h = operator.matrix @ h
    return h


def normalize_rows_l1(x) -> np.ndarray:
    """Rows scaled to unit L1 norm; all-zero rows are left as zeros."""
    x = np.asarray(x, dtype=np.float64)
    s = np.abs(x).sum(axis=1, keepdims=True)
    return np.divide(x, s, out=np.zeros_like(x), where=s > 0)


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        t, v, s = (np.asarray(a, dtype=bool) for a in (self.train, self.val, self.test))
        if not (t.shape == v.shape == s.shape):
            raise ValueError("masks differ in length")
        if ((t.astype(int) + v + s) != 1).any():
            raise ValueError("masks must be disjoint and cover every node")
        object.__setattr__(self, "train", t)
        object.__setattr__(self, "val", v)
        object.__setattr__(self, "test", s)

    @property
    def n(self) -> int:
        return self.train.size

    def to_dict(self) -> dict:
        return {name: np.flatnonzero(getattr(self, name)).tolist() for name in ("train", "val", "test")}

    @classmethod
    def from_dict(cls, d: dict, n: int) -> "Split":
        masks = []
        for name in ("train", "val", "test"):
            m = np.zeros(n, dtype=bool)
            m[np.asarray(d[name], dtype=np.int64)] = True
            masks.append(m)
        return cls(*masks)


def random_split(n: int, seed=None, train: float = 0.1, val: float = 0.1) -> Split:
    """Seeded random split; the test set takes whatever remains."""
    perm = np.random.default_rng(seed).permutation(n)
    n_train, n_val = int(round(train * n)), int(round(val * n))
    if n_train == 0:
        raise ValueError("empty training set")
    masks = [np.zeros(n, dtype=bool) for _ in range(3)]
    masks[0][perm[:n_train]] = True
    masks[1][perm[n_train:n_train + n_val]] = True
    masks[2][perm[n_train + n_val:]] = True
    return Split(*masks)


@dataclass(frozen=True)
class VictimConfig:
    k: int = 2
    learning_rate: float = 0.2
    weight_decay: float = 1e-5
    epochs: int = 300
    patience: int = 30
    normalize_features: bool = True

    @classmethod
    def from_dict(cls, d: dict | None) -> "VictimConfig":
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown victim hyperparameters: {sorted(unknown)}")
        return cls(**d)


@dataclass
class VictimParams:
    w: np.ndarray
    config: VictimConfig
    split: Split
    metrics: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return self.config.k

    def to_json(self) -> str:
        return json.dumps({
            "shape": list(self.w.shape),
            "w": self.w.ravel().tolist(),
            "config": asdict(self.config),
            "split": self.split.to_dict(),
            "metrics": self.metrics,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "VictimParams":
        d = json.loads(text)
        w = np.asarray(d["w"], dtype=np.float64).reshape(d["shape"])
        split = Split.from_dict(d["split"], sum(len(v) for v in d["split"].values()))
        return cls(w, VictimConfig(**d["config"]), split, d["metrics"])


@dataclass(frozen=True)
class Prediction:
    z: np.ndarray
    predicted: np.ndarray


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def loss_and_grad(h: np.ndarray, w: np.ndarray, y, idx, weight_decay: float = 0.0):
    """Mean cross-entropy over ``idx`` plus ``weight_decay / 2 * ||W||^2``,
    and its gradient with respect to ``W``."""
    hi = h[idx]
    yi = np.asarray(y)[idx]
    z = softmax(hi @ w)
    rows = np.arange(yi.size)
    picked = np.clip(z[rows, yi], np.finfo(float).tiny, None)
    loss = -np.log(picked).mean() + 0.5 * weight_decay * float((w * w).sum())
    z[rows, yi] -= 1.0
    grad = hi.T @ z / yi.size + weight_decay * w
    return float(loss), grad


def prepare_features(graph: Graph, x, config: VictimConfig) -> np.ndarray:
    """Row normalization (if enabled) followed by ``K``-step propagation."""
    if x is None:
        raise ValueError("victim needs node features")
    x = normalize_rows_l1(x) if config.normalize_features else np.asarray(x, dtype=np.float64)
    return propagate(normalized_adjacency(graph, WITH_SELF_LOOPS), x, config.k)


def init_weights(n_features: int, n_labels: int, seed=None) -> np.ndarray:
    s = np.sqrt(6.0 / (n_features + n_labels))
    return np.random.default_rng(seed).uniform(-s, s, size=(n_features, n_labels))


def fit(h: np.ndarray, y, split: Split, config: VictimConfig, seed=None, n_labels: int | None = None):
    """Full-batch Adam on precomputed propagated features ``h``.

    Early stopping keeps the weights of the best validation accuracy seen
    (earliest on ties) and halts after ``patience`` epochs without a strict
    improvement. Returns ``(W, metrics)``.
    """
    y = np.asarray(y, dtype=np.int64)
    train_idx = np.flatnonzero(split.train)
    val_idx = np.flatnonzero(split.val)
    if train_idx.size == 0:
        raise ValueError("training mask is empty")
    n_labels = int(n_labels if n_labels is not None else y.max() + 1)
    w = init_weights(h.shape[1], n_labels, seed)
    m1 = np.zeros_like(w)
    m2 = np.zeros_like(w)
    b1, b2, eps = 0.9, 0.999, 1e-8
    best_w, best_acc, best_epoch, since = w.copy(), -1.0, 0, 0
    history = []
    epoch = 0
    for epoch in range(1, config.epochs + 1):
        loss, grad = loss_and_grad(h, w, y, train_idx, config.weight_decay)
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite training loss at epoch {epoch}")
        history.append(loss)
        m1 = b1 * m1 + (1 - b1) * grad
        m2 = b2 * m2 + (1 - b2) * grad * grad
        step = config.learning_rate * (m1 / (1 - b1 ** epoch)) / (np.sqrt(m2 / (1 - b2 ** epoch)) + eps)
        w = w - step
        sel = val_idx if val_idx.size else train_idx
        acc = float(((h[sel] @ w).argmax(axis=1) == y[sel]).mean())
        if acc > best_acc:
            best_w, best_acc, best_epoch, since = w.copy(), acc, epoch, 0
        else:
            since += 1
            if since >= config.patience:
                break
    metrics = {"epochs_run": epoch, "best_epoch": best_epoch, "val_accuracy": best_acc,
               "final_train_loss": history[-1] if history else None}
    return best_w, metrics


def train_victim(graph: Graph, x, y, split: Split, config: VictimConfig | None = None, seed=None,
                 n_labels: int | None = None) -> VictimParams:
    config = config or VictimConfig()
    if y is None:
        raise ValueError("victim needs node labels")
    if split.n != graph.n:
        raise ValueError("split does not match the graph size")
    h = prepare_features(graph, x, config)
    n_labels = n_labels if n_labels is not None else graph.n_labels
    w, metrics = fit(h, y, split, config, seed, n_labels)
    y = np.asarray(y)
    metrics["test_accuracy"] = float(((h[split.test] @ w).argmax(axis=1) == y[split.test]).mean()) \
        if split.test.any() else None
    return VictimParams(w, config, split, metrics)


def predict(params: VictimParams, graph: Graph, x) -> Prediction:
    z = softmax(prepare_features(graph, x, params.config) @ params.w)
    return Prediction(z, z.argmax(axis=1))


def evaluate_accuracy(params: VictimParams, graph: Graph, x, y, mask) -> float:
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty evaluation mask")
    pred = predict(params, graph, x).predicted
    return float((pred[mask] == np.asarray(y)[mask]).mean())


def _check_endpoints(graph: Graph, *nodes):
    deg = graph.degrees
    for v in nodes:
        if deg[v] == 0:
            raise ZeroDivisionError(f"node {v} is isolated; the plain-neighbour operator is undefined there")


def jacobian_closed_form(graph: Graph, u: int, w: int, k: int) -> float:
    """Sensitivity of ``h_u^(K)`` to ``h_w^(0)`` (per feature component) in
    the linear plain-neighbour propagation: entry ``(u, w)`` of
    ``(D^-1/2 A D^-1/2)^K``, i.e. the sum over length-``K`` walks from ``u``
    to ``w`` of ``1/sqrt(d_u d_w)`` times the inverse degrees of the inner
    walk nodes."""
    if k < 1:
        raise ValueError("K must be at least 1")
    _check_endpoints(graph, u, w)
    p = normalized_adjacency(graph, PLAIN_NEIGHBORS).matrix
    vec = np.zeros(graph.n)
    vec[w] = 1.0
    for _ in range(k):
        vec = p @ vec
    return float(vec[u])


def jacobian_finite_difference(graph: Graph, x, u: int, w: int, k: int, epsilon: float = 1e-4,
                               component: int = 0) -> float:
    """Central difference of ``(P^K X)[u, component]`` with respect to
    ``X[w, component]`` for the plain-neighbour operator ``P``."""
    _check_endpoints(graph, u, w)
    op = normalized_adjacency(graph, PLAIN_NEIGHBORS)
    x = np.array(x, dtype=np.float64)
    plus, minus = x.copy(), x.copy()
    plus[w, component] += epsilon
    minus[w, component] -= epsilon
    hp = propagate(op, plus, k)[u, component]
    hm = propagate(op, minus, k)[u, component]
    return float((hp - hm) / (2 * epsilon))
