import numpy as np
import pytest

from structack._backend import BACKENDS, HAVE_NUMBA, use_backend
from structack.graph import Graph


@pytest.fixture(params=BACKENDS)
def backend(request):
    if request.param == "numba" and not HAVE_NUMBA:
        pytest.skip("numba not installed")
    with use_backend(request.param):
        yield request.param


def random_graph(n, p, seed):
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, 1)
    keep = rng.random(iu[0].size) < p
    edges = np.column_stack([iu[0][keep], iu[1][keep]])
    return Graph.from_edges(n, edges), [tuple(e) for e in edges.tolist()]


@pytest.fixture
def make_random_graph():
    return random_graph


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
