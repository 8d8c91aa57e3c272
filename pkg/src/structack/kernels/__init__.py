"""Backend-dispatching entry points for the hot kernels.

Each public function forwards to the numba or numpy implementation chosen by
:func:`structack._backend.active_backend`. Inputs are normalised here so the
two implementations see identical dtypes.
"""
import numpy as np

from .._backend import active_backend
from . import _numpy

def _impl(name):
    if active_backend() == "numba":
        from . import _numba

        return getattr(_numba, name)
    return getattr(_numpy, name)


def _csr_arrays(indptr, indices):
    return np.ascontiguousarray(indptr, dtype=np.int64), np.ascontiguousarray(indices, dtype=np.int64)


def bfs_distances(indptr, indices, sources):
    """Hop distances, shape ``(len(sources), n)``; ``-1`` marks unreachable."""
    indptr, indices = _csr_arrays(indptr, indices)
    sources = np.ascontiguousarray(sources, dtype=np.int64)
    return _impl("bfs_distances")(indptr, indices, sources)


def distance_sums(indptr, indices):
    indptr, indices = _csr_arrays(indptr, indices)
    return _impl("distance_sums")(indptr, indices)


def betweenness(indptr, indices):
    indptr, indices = _csr_arrays(indptr, indices)
    return _impl("betweenness")(indptr, indices)


def triangles(indptr, indices):
    indptr, indices = _csr_arrays(indptr, indices)
    return _impl("triangles")(indptr, indices)


def hungarian(cost):
    return _impl("hungarian")(np.ascontiguousarray(cost, dtype=np.float64))


def lex_smallest_tight_matching(cost, u, v, row_to_col, tol):
    return _impl("lex_smallest_tight_matching")(
        np.ascontiguousarray(cost, dtype=np.float64),
        np.ascontiguousarray(u, dtype=np.float64),
        np.ascontiguousarray(v, dtype=np.float64),
        np.ascontiguousarray(row_to_col, dtype=np.int64),
        float(tol),
    )


def louvain_local_move(indptr, indices, weights, order, comm, eps=1e-10):
    indptr, indices = _csr_arrays(indptr, indices)
    return _impl("louvain_local_move")(
        indptr,
        indices,
        np.ascontiguousarray(weights, dtype=np.float64),
        np.ascontiguousarray(order, dtype=np.int64),
        comm,
        float(eps),
    )
