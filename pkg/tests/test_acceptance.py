"""Acceptance checks, one test per criterion.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL|NOT RUN`` line (also
collected into the terminal summary by ``conftest.py``). Criteria that need
the Cora and Citeseer citation datasets look for them under the directory in
``STRUCTACK_DATA`` (``cora.npz`` / ``citeseer.npz`` in the sparse npz layout,
or ``cora/`` / ``citeseer/`` holding ``*.content`` and ``*.cites``) and are
skipped when absent.

Run directly with ``python3 tests/test_acceptance.py`` to get only the lines.
"""
import json
import math
import os
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from structack.assignment import min_cost_assignment
from structack.attacks import build_attack
from structack.centrality import compute_centrality
from structack.generators import gnp_graph, planted_sbm
from structack.graph import Graph
from structack.harness import ExperimentConfig, run_experiment
from structack.noticeability import RATE_GRID, ks_statistic
from structack.similarity import katz_similarity, spectral_radius
from structack.victim import jacobian_closed_form, jacobian_finite_difference, train_victim, random_split

sys.path.insert(0, str(Path(__file__).parent))
from conftest import random_graph  # noqa: E402
from oracles import (augmented_star, brute_force_assignment, ecdf_ks_statistic, katz_dense_solve,  # noqa: E402
                     path_counting_betweenness, walk_enumeration_jacobian)

RESULTS = []


def report(number, ok, detail):
    status = "NOT RUN" if ok is None else ("PASS" if ok else "FAIL")
    line = f"ACCEPTANCE {number} {status}: {detail}"
    RESULTS.append(line)
    print(line, flush=True)
    return ok


def _dataset(name):
    root = os.environ.get("STRUCTACK_DATA")
    if not root:
        return None
    for candidate in (os.path.join(root, f"{name}.npz"), os.path.join(root, name)):
        if os.path.exists(candidate):
            return candidate
    return None


# 1 -------------------------------------------------------------------------

def test_criterion_1_jacobian_theory():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_oracle = worst_fd = 0.0
    cases = 0
    while cases < 200:
        n = int(rng.integers(2, 13))
        g, edges = random_graph(n, float(rng.uniform(0.2, 0.6)), int(rng.integers(1 << 30)))
        live = np.flatnonzero(g.degrees > 0)
        if live.size == 0:
            continue
        u, w = (int(v) for v in rng.choice(live, 2))
        k = int(rng.integers(1, 5))
        j = jacobian_closed_form(g, u, w, k)
        total, dd = walk_enumeration_jacobian(edges, n, u, w, k)
        ref = float(total) / math.sqrt(dd)
        worst_oracle = max(worst_oracle, abs(j - ref))
        x = rng.normal(size=(n, 2))
        worst_fd = max(worst_fd, abs(jacobian_finite_difference(g, x, u, w, k) - j))
        cases += 1
    elapsed = time.perf_counter() - t0
    ok = worst_oracle <= 1e-12 and worst_fd <= 1e-6 and elapsed < 30
    report(1, ok, f"200 graphs, max |closed-oracle|={worst_oracle:.1e} (<=1e-12), "
                  f"max |closed-fd|={worst_fd:.1e} (<=1e-6), {elapsed:.1f}s (<30s)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_criterion_2_degree_impact_direction():
    rng = np.random.default_rng(7)
    violations = comparisons = 0
    for _ in range(100):
        extra = rng.integers(0, 8, size=int(rng.integers(2, 8))).tolist()
        edges, n, leaves = augmented_star(extra)
        g = Graph.from_edges(n, edges)
        for a in leaves:
            for b in leaves:
                if g.degrees[a] < g.degrees[b]:
                    comparisons += 1
                    if not jacobian_closed_form(g, 0, a, 1) > jacobian_closed_form(g, 0, b, 1):
                        violations += 1
    ok = violations == 0 and comparisons > 0
    report(2, ok, f"100 star variants, {comparisons} neighbour pairs, {violations} exceptions")
    assert ok


# 3 -------------------------------------------------------------------------

def test_criterion_3_oracle_equivalences():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    hung_bad = 0
    for _ in range(200):
        k = int(rng.integers(1, 8))
        cost = rng.integers(-9, 10, size=(k, k))
        best, lex = brute_force_assignment(cost.tolist())
        r = min_cost_assignment(cost)
        hung_bad += int(r.total_cost != best or r.permutation.tolist() != lex)
    brandes_err = 0.0
    for s in range(20):
        n = int(rng.integers(3, 26))
        g = gnp_graph(n, float(rng.uniform(0.1, 0.4)), seed=s)
        ref = np.array([float(x) for x in path_counting_betweenness(g.edges().tolist(), n)])
        got = compute_centrality(g, "betweenness").scores
        brandes_err = max(brandes_err, float(np.max(np.abs(got - ref) / np.maximum(1.0, np.abs(ref)))))
    ks_bad = 0
    for _ in range(50):
        a = rng.integers(0, 12, int(rng.integers(1, 60))).tolist()
        b = rng.integers(0, 12, int(rng.integers(1, 60))).tolist()
        ks_bad += int(ks_statistic(a, b) != ecdf_ks_statistic(a, b))
    katz_err = 0.0
    for s in range(10):
        g = gnp_graph(30, 0.2, seed=100 + s)
        alpha = 0.9 / spectral_radius(g)
        nodes = np.arange(g.n)
        got = katz_similarity(g, nodes, nodes, alpha=alpha, iterations=400).values
        ref = katz_dense_solve(g.adjacency.toarray().astype(float), alpha)
        katz_err = max(katz_err, float(np.abs(got - ref).max()))
    elapsed = time.perf_counter() - t0
    ok = hung_bad == 0 and brandes_err <= 1e-12 and ks_bad == 0 and katz_err <= 1e-5 and elapsed < 120
    report(3, ok, f"hungarian mismatches {hung_bad}/200, brandes rel err {brandes_err:.1e}, "
                  f"KS mismatches {ks_bad}/50, katz err {katz_err:.1e} (<=1e-5), {elapsed:.1f}s (<120s)")
    assert ok


# 4 -------------------------------------------------------------------------

SBM_SETTINGS = {"n_nodes": 400, "n_blocks": 2, "avg_degree": 8, "mixing": 0.05}
SBM_FEATURES = {"n_features": 200, "signal": 0.1, "density": 0.025}


def _sbm_spec(seed):
    return {"name": f"sbm{seed}", "generator": "planted_sbm", "params": dict(SBM_SETTINGS, seed=seed),
            "features": dict(SBM_FEATURES, seed=seed)}


def _quantile_matrices(mode, seeds):
    out = []
    for s in seeds:
        cfg = ExperimentConfig.from_dict({"datasets": [_sbm_spec(s)], "mode": mode, "rates": [0.05],
                                          "split_seeds": [s], "init_seeds": [0, 1, 2, 3, 4], "lcc": True})
        rep = run_experiment(cfg)
        assert not rep.failures, rep.failures
        out.append(np.array(rep.summary["matrix"][f"sbm{s}"], dtype=float))
    return np.mean(out, axis=0)


def test_criterion_4_quantile_trends_on_sbm():
    t0 = time.perf_counter()
    seeds = range(5)
    deg = _quantile_matrices("quantile-degree", seeds)
    dist = _quantile_matrices("quantile-distance", seeds)
    elapsed = time.perf_counter() - t0
    deg_gap = 100 * (deg[9, 9] - deg[0, 0])
    dist_gap = 100 * (dist[0] - dist[9])
    ok = deg_gap >= 1.0 and dist_gap >= 1.0 and elapsed < 600
    report(4, ok, f"degree acc(10,10)-acc(1,1) = {deg_gap:+.2f} pts, distance acc(t1)-acc(t10) = "
                  f"{dist_gap:+.2f} pts (each >= 1), {elapsed:.0f}s (<600s)")
    assert ok


# 5 -------------------------------------------------------------------------

def _effectiveness(path, attacks):
    cfg = ExperimentConfig.from_dict({"datasets": {"ds": path}, "attacks": attacks, "rates": [0.05],
                                      "lcc": True, "mode": "effectiveness"})
    rep = run_experiment(cfg)
    assert not rep.failures, rep.failures
    acc = rep.summary["accuracy"]
    return {name: 100 * acc[f"ds|{name}|{0.0 if name == 'Clean' else 0.05}"]["mean"]
            for name in ["Clean", *attacks]}


def test_criterion_5_citation_effectiveness():
    cora, citeseer = _dataset("cora"), _dataset("citeseer")
    if cora is None or citeseer is None:
        report(5, None, "Cora/Citeseer not found (set STRUCTACK_DATA)")
        pytest.skip("Cora/Citeseer not available")
    t0 = time.perf_counter()
    c = _effectiveness(cora, ["Random", "DG*Katz"])
    s = _effectiveness(citeseer, ["Random", "PR*Katz"])
    elapsed = time.perf_counter() - t0
    ok = (abs(c["Clean"] - 83.4) <= 3.0 and c["DG*Katz"] <= c["Random"] - 1.0
          and s["PR*Katz"] <= s["Random"] - 1.0 and elapsed < 1800)
    report(5, ok, f"Cora clean {c['Clean']:.2f} (83.4+-3), DGxKatz {c['DG*Katz']:.2f} vs Random "
                  f"{c['Random']:.2f}; Citeseer PRxKatz {s['PR*Katz']:.2f} vs Random {s['Random']:.2f} "
                  f"(attack <= Random-1), {elapsed:.0f}s (<1800s)")
    assert ok


# 6 -------------------------------------------------------------------------

def _within_one_step(value, target):
    grid = list(RATE_GRID)
    return value in grid and abs(grid.index(value) - grid.index(target)) <= 1


def test_criterion_6_noticeability_ordering():
    cora = _dataset("cora")
    if cora is None:
        report(6, None, "Cora not found (set STRUCTACK_DATA)")
        pytest.skip("Cora not available")
    t0 = time.perf_counter()
    cfg = ExperimentConfig.from_dict({"datasets": {"cora": cora}, "attacks": ["DG*Katz", "Random"],
                                      "rates": list(RATE_GRID), "split_seeds": [0], "lcc": True,
                                      "mode": "noticeability"})
    rep = run_experiment(cfg)
    assert not rep.failures, rep.failures
    crit = rep.summary["r_critical"]
    katz, rnd = crit["cora|DG*Katz"][0], crit["cora|Random"][0]
    elapsed = time.perf_counter() - t0
    ok = katz < rnd and _within_one_step(katz, 0.0075) and _within_one_step(rnd, 0.025) and elapsed < 900
    report(6, ok, f"r_critical DGxKatz={katz} (0.0075+-1 step) < Random={rnd} (0.025+-1 step), "
                  f"{elapsed:.0f}s (<900s)")
    assert ok


# 7 -------------------------------------------------------------------------

def test_criterion_7_efficiency_ranking():
    g = planted_sbm(20000, 10, 4.5, 0.1, seed=0)
    times = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for name in ("DG*Comm", "DG*Dist", "DG*Katz"):
            t0 = time.perf_counter()
            build_attack(name, g, 0.05, seed=0)
            times[name] = time.perf_counter() - t0
    ok = times["DG*Comm"] < 300 and times["DG*Comm"] < times["DG*Dist"] < times["DG*Katz"]
    report(7, ok, f"n={g.n} m={g.m}: Comm {times['DG*Comm']:.1f}s < Dist {times['DG*Dist']:.1f}s < "
                  f"Katz {times['DG*Katz']:.1f}s, Comm < 300s")
    assert ok


# 8 -------------------------------------------------------------------------

def _cli_run(out_dir, hash_seed):
    spec = json.dumps(_sbm_spec(11) | {"params": dict(SBM_SETTINGS, n_nodes=150, seed=11)})
    env = dict(os.environ, PYTHONHASHSEED=str(hash_seed))
    cmd = [sys.executable, "-m", "structack", "run", "--dataset", spec, "--attack", "Random",
           "--attack", "DICE", "--attack", "DG*Katz", "--attack", "BT*Comm", "--attack", "PR*Dist",
           "--rate", "0.05,0.1", "--seeds", "0,1", "--init-seeds", "0,1", "--out", str(out_dir)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rep = json.loads((out_dir / "report.json").read_text())
    for row in rep["rows"]:
        row.pop("wall_time_ms")
        row.pop("peak_mem_estimate")
    plans = {p.name: p.read_bytes() for p in sorted((out_dir / "plans").iterdir())}
    return rep, plans, (out_dir / "summary.json").read_bytes()


def test_criterion_8_determinism(tmp_path):
    a = _cli_run(tmp_path / "a", 1)
    b = _cli_run(tmp_path / "b", 2)
    reports_equal = a[0] == b[0]
    plans_equal = a[1] == b[1] and len(a[1]) == 5 * 2 * 2
    summary_equal = a[2] == b[2]
    g = planted_sbm(200, 2, 6, 0.1, seed=5)
    x = np.random.default_rng(5).random((200, 30))
    split = random_split(200, seed=5)
    w1 = train_victim(g, x, g.labels, split, seed=3).w
    w2 = train_victim(g, x, g.labels, split, seed=3).w
    training_equal = w1.tobytes() == w2.tobytes()
    ok = reports_equal and plans_equal and summary_equal and training_equal
    report(8, ok, f"two CLI runs (different hash seeds): report rows equal={reports_equal}, "
                  f"{len(a[1])} plan files byte-equal={plans_equal}, summary equal={summary_equal}, "
                  f"victim weights bit-equal={training_equal}")
    assert ok


if __name__ == "__main__":
    import tempfile

    for fn in (test_criterion_1_jacobian_theory, test_criterion_2_degree_impact_direction,
               test_criterion_3_oracle_equivalences, test_criterion_4_quantile_trends_on_sbm,
               test_criterion_5_citation_effectiveness, test_criterion_6_noticeability_ordering,
               test_criterion_7_efficiency_ranking):
        try:
            fn()
        except (AssertionError, pytest.skip.Exception):
            pass
    with tempfile.TemporaryDirectory() as tmp:
        try:
            test_criterion_8_determinism(Path(tmp))
        except AssertionError:
            pass
