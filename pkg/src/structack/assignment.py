"""Square min-cost assignment (Hungarian method) with a deterministic tie-break."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class AssignmentResult:
    permutation: np.ndarray
    total_cost: float


def min_cost_assignment(cost) -> AssignmentResult:
    """Optimal assignment of rows to columns.

    Among all optimal permutations the lexicographically smallest is
    returned: every optimal assignment uses only pairs with zero reduced cost
    under the final dual potentials, and a greedy row-by-row pass over that
    subgraph (with augmenting-path feasibility checks) picks the smallest
    column each row can take.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {c.shape}")
    if not np.isfinite(c).all():
        raise ValueError("cost matrix has non-finite entries")
    k = c.shape[0]
    if k == 0:
        return AssignmentResult(np.empty(0, dtype=np.int64), 0.0)
    perm, u, v = kernels.hungarian(c)
    scale = float(np.abs(c).max())
    tol = 1e-9 * max(1.0, scale)
    perm = kernels.lex_smallest_tight_matching(c, u, v, perm, tol)
    return AssignmentResult(perm, float(c[np.arange(k), perm].sum()))
