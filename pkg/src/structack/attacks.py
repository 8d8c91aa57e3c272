"""Edge-injection attacks: the centrality x similarity attack, the Random and
DICE baselines, and the degree/distance quantile injection experiments."""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .assignment import min_cost_assignment
from .centrality import ABBREVIATIONS as CENTRALITY_ABBR
from .centrality import canonical_measure as canonical_centrality
from .centrality import compute_centrality, lowest_centrality_nodes
from .graph import EdgeSet, Graph, add_edges, remove_edges
from .similarity import ABBREVIATIONS as SIMILARITY_ABBR
from .similarity import canonical_measure as canonical_similarity
from .similarity import similarity_matrix

log = logging.getLogger(__name__)

QUANTILES = 10
# exhaustive pair enumeration below this many candidate pairs, rejection above
_ENUMERATE_LIMIT = 2_000_000


class BudgetError(ValueError):
    """The graph cannot accommodate the requested number of perturbations."""


@dataclass(frozen=True)
class AttackPlan:
    attack_name: str
    edges_to_add: EdgeSet
    edges_to_remove: EdgeSet
    budget_k: int
    rate_r: float
    seed: int | None
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.edges_to_add) + len(self.edges_to_remove) > self.budget_k:
            raise BudgetError(f"{self.attack_name}: plan exceeds budget {self.budget_k}")
        if not self.edges_to_add.isdisjoint(self.edges_to_remove):
            raise ValueError("an edge is both added and removed")

    def apply(self, graph: Graph) -> Graph:
        return add_edges(remove_edges(graph, self.edges_to_remove), self.edges_to_add)

    def to_dict(self) -> dict:
        return {
            "attack_name": self.attack_name,
            "k": self.budget_k,
            "r": self.rate_r,
            "seed": self.seed,
            "add": [list(p) for p in self.edges_to_add],
            "remove": [list(p) for p in self.edges_to_remove],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "AttackPlan":
        return cls(d["attack_name"], EdgeSet(tuple(map(tuple, d["add"]))),
                   EdgeSet(tuple(map(tuple, d["remove"]))), int(d["k"]), float(d["r"]), d["seed"])

    @classmethod
    def from_json(cls, text: str) -> "AttackPlan":
        return cls.from_dict(json.loads(text))


def budget(rate: float, m: int) -> int:
    """``floor(rate * m)``, robust to representation error in ``rate``."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    return int(math.floor(round(rate * m, 9)))


def _empty(name, k, rate, seed, **info) -> AttackPlan:
    return AttackPlan(name, EdgeSet(), EdgeSet(), k, rate, seed, info)


def structack(graph: Graph, centrality: str, similarity: str, rate: float, seed: int | None = 0,
              name: str | None = None, **similarity_options) -> AttackPlan:
    """Link the lowest-centrality nodes so the total similarity of linked pairs
    is minimal.

    The ``2k`` lowest-centrality nodes are split in rank order into ``U1``
    (first ``k``) and ``U2`` (next ``k``); a min-cost assignment on the
    ``U1 x U2`` similarity gives the pairs. A matched pair that is already an
    edge is re-matched to the least similar freed ``U2`` node it is not yet
    adjacent to, or dropped when none is left.
    """
    centrality = canonical_centrality(centrality)
    similarity = canonical_similarity(similarity)
    name = name or attack_label(centrality, similarity)
    if rate <= 0:
        raise ValueError("rate must be positive")
    k = budget(rate, graph.m)
    if k == 0:
        return _empty(name, 0, rate, seed)
    if 2 * k > graph.n:
        raise BudgetError(f"budget k={k} needs {2 * k} distinct nodes, graph has {graph.n}")
    scores = compute_centrality(graph, centrality, seed=seed)
    selected = lowest_centrality_nodes(scores, 2 * k)
    u1, u2 = selected[:k], selected[k:]
    sim = similarity_matrix(graph, similarity, u1, u2, seed=seed, **similarity_options)
    cost = sim.matching_cost()
    match = min_cost_assignment(cost)
    pairs, dropped = _repair_collisions(graph, u1, u2, cost, match.permutation)
    info = {"matching_cost": match.total_cost, "dropped": dropped,
            "centrality_converged": scores.converged, "similarity_diverged": sim.diverged}
    if dropped:
        log.info("%s: %d matched pair(s) dropped, no edge-free partner left", name, dropped)
    return AttackPlan(name, EdgeSet(tuple(pairs)), EdgeSet(), k, rate, seed, info)


def _repair_collisions(graph, u1, u2, cost, perm):
    collide = [i for i in range(len(u1)) if graph.has_edge(u1[i], u2[perm[i]])]
    if not collide:
        return [(int(u1[i]), int(u2[perm[i]])) for i in range(len(u1))], 0
    free = sorted(int(perm[i]) for i in collide)
    repaired = {}
    for i in collide:
        candidates = [j for j in free if not graph.has_edge(u1[i], u2[j])]
        if not candidates:
            continue
        # least similar = lowest cost; ties to the lowest U2 position
        j = min(candidates, key=lambda c: (cost[i, c], c))
        free.remove(j)
        repaired[i] = j
    pairs = []
    for i in range(len(u1)):
        j = repaired.get(i) if i in collide else int(perm[i])
        if j is not None:
            pairs.append((int(u1[i]), int(u2[j])))
    return pairs, len(collide) - len(repaired)


def attack_label(centrality: str, similarity: str) -> str:
    c = {v: k for k, v in CENTRALITY_ABBR.items()}[canonical_centrality(centrality)]
    s = {"katz": "Katz", "community": "Comm", "distance": "Dist", "random": "RND"}[canonical_similarity(similarity)]
    return f"{c}*{s}"


def parse_attack_name(name: str) -> dict:
    """``"DG*Katz"`` -> structack spec, ``"Random"``/``"DICE"`` -> baselines."""
    key = name.strip()
    if key.lower() == "random":
        return {"type": "random"}
    if key.lower() == "dice":
        return {"type": "dice"}
    for sep in ("*", "x", "×", "."):
        if sep in key:
            c, s = key.split(sep, 1)
            if c.strip().upper() in CENTRALITY_ABBR or c.strip().lower() in CENTRALITY_ABBR.values():
                return {"type": "structack", "centrality": canonical_centrality(c),
                        "similarity": canonical_similarity(s)}
    raise ValueError(f"cannot parse attack name {name!r}")


def build_attack(name: str, graph: Graph, rate: float, seed: int | None = 0, **options) -> AttackPlan:
    spec = parse_attack_name(name)
    if spec["type"] == "random":
        return random_attack(graph, rate, seed)
    if spec["type"] == "dice":
        return dice_attack(graph, graph.labels, rate, seed)
    return structack(graph, spec["centrality"], spec["similarity"], rate, seed, name=name, **options)


class _AbsentPairSampler:
    """Uniform sampling without replacement of node pairs that are not edges,
    optionally restricted by a pair predicate."""

    def __init__(self, graph: Graph, rng, accept=None):
        self.graph = graph
        self.rng = rng
        self.accept = accept
        self.taken = set()
        n = graph.n
        self._pool = None
        if n * (n - 1) // 2 <= _ENUMERATE_LIMIT:
            iu, ju = np.triu_indices(n, 1)
            ok = ~np.asarray(graph.adjacency[iu, ju]).ravel().astype(bool)
            if accept is not None:
                ok &= accept(iu, ju)
            self._pool = list(zip(iu[ok].tolist(), ju[ok].tolist()))
            self._order = None

    def available(self) -> int | None:
        if self._pool is None:
            return None
        return len(self._pool) - len(self.taken)

    def draw(self):
        if self._pool is not None:
            if self.available() <= 0:
                return None
            while True:
                pair = self._pool[int(self.rng.integers(len(self._pool)))]
                if pair not in self.taken:
                    self.taken.add(pair)
                    return pair
        n = self.graph.n
        for _ in range(10_000):
            u, v = (int(x) for x in self.rng.integers(n, size=2))
            if u == v:
                continue
            pair = (u, v) if u < v else (v, u)
            if pair in self.taken or self.graph.has_edge(*pair):
                continue
            if self.accept is not None and not self.accept(np.array([pair[0]]), np.array([pair[1]]))[0]:
                continue
            self.taken.add(pair)
            return pair
        return None


def random_attack(graph: Graph, rate: float, seed: int | None = 0) -> AttackPlan:
    """``k`` node pairs drawn uniformly from the absent pairs."""
    k = budget(rate, graph.m)
    if k == 0:
        return _empty("Random", 0, rate, seed)
    rng = np.random.default_rng(seed)
    sampler = _AbsentPairSampler(graph, rng)
    absent = graph.n * (graph.n - 1) // 2 - graph.m
    if absent < k:
        raise BudgetError(f"only {absent} absent pairs for budget {k}")
    pairs = []
    if sampler._pool is not None:
        idx = rng.choice(len(sampler._pool), size=k, replace=False)
        pairs = [sampler._pool[i] for i in idx.tolist()]
    else:
        while len(pairs) < k:
            pair = sampler.draw()
            if pair is None:
                raise BudgetError("could not sample enough absent pairs")
            pairs.append(pair)
    return AttackPlan("Random", EdgeSet(tuple(pairs)), EdgeSet(), k, rate, seed)


def dice_attack(graph: Graph, labels, rate: float, seed: int | None = 0) -> AttackPlan:
    """Remove intra-label edges and add inter-label pairs, one fair coin per
    perturbation; an exhausted side falls back to the other."""
    if labels is None:
        raise ValueError("DICE needs node labels")
    labels = np.asarray(labels)
    k = budget(rate, graph.m)
    if k == 0:
        return _empty("DICE", 0, rate, seed)
    rng = np.random.default_rng(seed)
    e = graph.edges()
    intra = [tuple(p) for p in e[labels[e[:, 0]] == labels[e[:, 1]]].tolist()]
    removable = list(intra)
    sampler = _AbsentPairSampler(graph, rng, accept=lambda a, b: labels[a] != labels[b])
    class_sizes = np.bincount(labels)
    inter_pairs = (class_sizes.sum() ** 2 - (class_sizes ** 2).sum()) // 2
    inter_absent = int(inter_pairs) - int((labels[e[:, 0]] != labels[e[:, 1]]).sum())
    adds, removes = [], []
    for _ in range(k):
        can_remove = len(removable) > 0
        can_add = inter_absent - len(adds) > 0
        if not (can_remove or can_add):
            break
        heads = rng.random() < 0.5
        if (heads and can_remove) or not can_add:
            pos = int(rng.integers(len(removable)))
            removable[pos], removable[-1] = removable[-1], removable[pos]
            removes.append(removable.pop())
        else:
            pair = sampler.draw()
            if pair is None:
                break
            adds.append(pair)
    return AttackPlan("DICE", EdgeSet(tuple(adds)), EdgeSet(tuple(removes)), k, rate, seed)


def quantile_groups(values: np.ndarray, groups: int = QUANTILES) -> list[np.ndarray]:
    """Nodes sorted by (value, id) cut into near-equal groups, remainder to the
    lower groups."""
    order = np.lexsort((np.arange(values.size), values))
    return np.array_split(order, groups)


def degree_quantile_injection(graph: Graph, decile_i: int, decile_j: int, rate: float,
                              seed: int | None = 0) -> AttackPlan:
    """``k`` new edges between uniformly random pairs drawn from degree decile
    ``decile_i`` and degree decile ``decile_j`` (1-based)."""
    if graph.n < QUANTILES:
        raise ValueError(f"need at least {QUANTILES} nodes")
    if not (1 <= decile_i <= QUANTILES and 1 <= decile_j <= QUANTILES):
        raise ValueError("deciles are 1-based and at most 10")
    name = f"degree-q{decile_i}-q{decile_j}"
    k = budget(rate, graph.m)
    if k == 0:
        return _empty(name, 0, rate, seed)
    groups = quantile_groups(graph.degrees)
    a, b = groups[decile_i - 1], groups[decile_j - 1]
    aa, bb = np.meshgrid(a, b, indexing="ij")
    aa, bb = aa.ravel(), bb.ravel()
    lo, hi = np.minimum(aa, bb), np.maximum(aa, bb)
    keep = lo != hi
    cand = np.unique(np.column_stack([lo[keep], hi[keep]]), axis=0)
    if cand.size:
        present = np.asarray(graph.adjacency[cand[:, 0], cand[:, 1]]).ravel().astype(bool)
        cand = cand[~present]
    if cand.shape[0] < k:
        raise BudgetError(f"{name}: {cand.shape[0]} candidate pairs for budget {k}")
    rng = np.random.default_rng(seed)
    pick = cand[rng.choice(cand.shape[0], size=k, replace=False)]
    return AttackPlan(name, EdgeSet.from_array(pick), EdgeSet(), k, rate, seed)


def distance_decile(graph: Graph, u: int, trial_i: int) -> np.ndarray:
    """Nodes of distance decile ``trial_i`` (1-based) as seen from ``u``:
    the other nodes sorted by (hop distance, id), unreachable ones counted
    at distance ``n``."""
    dist = kernels.bfs_distances(graph.indptr, graph.indices, np.array([u]))[0].astype(np.int64)
    dist[dist < 0] = graph.n
    others = np.delete(np.arange(graph.n), u)
    return others[quantile_groups(dist[others])[trial_i - 1]]


def distance_quantile_injection(graph: Graph, trial_i: int, rate: float, seed: int | None = 0,
                                max_tries: int = 100) -> AttackPlan:
    """Per edge: pick a random node, rank the others by hop distance (ties by
    id, unreachable last) and link it to a random node of decile ``trial_i``."""
    if not 1 <= trial_i <= QUANTILES:
        raise ValueError("trial is 1-based and at most 10")
    name = f"distance-q{trial_i}"
    k = budget(rate, graph.m)
    if k == 0:
        return _empty(name, 0, rate, seed)
    if graph.n - 1 < QUANTILES:
        raise ValueError(f"need at least {QUANTILES + 1} nodes")
    rng = np.random.default_rng(seed)
    chosen: list[tuple[int, int]] = []
    taken = set()
    for _ in range(k):
        for attempt in range(max_tries):
            u = int(rng.integers(graph.n))
            group = distance_decile(graph, u, trial_i)
            v = int(group[int(rng.integers(group.size))])
            key = (u, v) if u < v else (v, u)
            if key in taken or graph.has_edge(u, v):
                continue
            taken.add(key)
            chosen.append((u, v))
            break
        else:
            raise BudgetError(f"{name}: no new edge after {max_tries} tries")
    return AttackPlan(name, EdgeSet(tuple(chosen)), EdgeSet(), k, rate, seed)
