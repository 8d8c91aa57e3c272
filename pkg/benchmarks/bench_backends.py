"""Time the numba kernels against their numpy fallbacks.

Each kernel runs once per backend to warm up (so JIT compilation is not
timed), then ``--repeat`` times; the best time is reported together with a
check that both backends return the same result.

    python3 benchmarks/bench_backends.py --nodes 3000 --avg-degree 6
"""
import argparse
import time

import numpy as np

from structack import kernels
from structack._backend import BACKENDS, HAVE_NUMBA, use_backend
from structack.generators import gnp_graph


def _best_time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-9, atol=1e-12)


def build_cases(n, avg_degree, k, seed):
    g = gnp_graph(n, avg_degree / (n - 1), seed=seed)
    indptr, indices = g.adjacency.indptr, g.adjacency.indices
    rng = np.random.default_rng(seed)
    sources = rng.choice(n, size=min(k, n), replace=False)
    cost = rng.integers(0, 50, size=(k, k)).astype(float)
    return g, {
        "bfs_distances": lambda: kernels.bfs_distances(indptr, indices, sources),
        "distance_sums": lambda: kernels.distance_sums(indptr, indices),
        "betweenness": lambda: kernels.betweenness(indptr, indices),
        "triangles": lambda: kernels.triangles(indptr, indices),
        "hungarian": lambda: kernels.hungarian(cost),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--nodes", type=int, default=2000)
    p.add_argument("--avg-degree", type=float, default=6.0)
    p.add_argument("--assignment-size", type=int, default=300)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    g, cases = build_cases(args.nodes, args.avg_degree, args.assignment_size, args.seed)
    print(f"graph: n={g.n} m={g.m}; assignment {args.assignment_size}x{args.assignment_size}")
    print(f"{'kernel':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}  match")
    for name, fn in cases.items():
        times, outs = {}, {}
        for backend in BACKENDS:
            with use_backend(backend):
                fn()  # warm-up / compile
                times[backend], outs[backend] = _best_time(fn, args.repeat)
        speedup = times["numpy"] / times["numba"] if times["numba"] > 0 else float("inf")
        print(f"{name:<16}{times['numba']:>12.4f}{times['numpy']:>12.4f}{speedup:>10.1f}  "
              f"{_same(outs['numba'], outs['numpy'])}")


if __name__ == "__main__":
    main()
