"""Configuration-driven experiment runner: effectiveness, efficiency,
noticeability and the degree/distance quantile grids."""
from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import time
import tracemalloc
import warnings
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import generators
from .attacks import (QUANTILES, build_attack, degree_quantile_injection, distance_quantile_injection,
                      parse_attack_name)
from .graph import Graph, extract_lcc, load_edge_list, load_linqs, load_npz
from .noticeability import ALPHA, critical_rate
from .victim import VictimConfig, fit, prepare_features, random_split

log = logging.getLogger(__name__)

MODES = ("effectiveness", "efficiency", "noticeability", "quantile-degree", "quantile-distance")
COLUMNS = ("dataset", "attack", "rate", "split_seed", "init_seed", "accuracy", "wall_time_ms",
           "peak_mem_estimate", "D_deg", "p_deg", "D_cc", "p_cc", "unnoticeable")
# columns that depend on the machine and load rather than the configuration
TIMING_COLUMNS = ("wall_time_ms", "peak_mem_estimate")
CLEAN = "Clean"


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    datasets: dict
    attacks: list = field(default_factory=list)
    rates: list = field(default_factory=lambda: [0.05])
    split_seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    init_seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    victim: dict = field(default_factory=dict)
    mode: str = "effectiveness"
    out: str | None = None
    workers: int = 1
    alpha: float = ALPHA
    lcc: bool = False
    attack_options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "datasets" not in d:
            raise ConfigError("config needs a 'datasets' entry")
        if isinstance(d["datasets"], (list, tuple)):
            d["datasets"] = {_dataset_name(spec): spec for spec in d["datasets"]}
        elif isinstance(d["datasets"], str):
            d["datasets"] = {_dataset_name(d["datasets"]): d["datasets"]}
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> "ExperimentConfig":
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.datasets:
            raise ConfigError("no datasets given")
        for name, spec in self.datasets.items():
            for path in _dataset_files(spec):
                if not os.path.exists(path):
                    raise ConfigError(f"dataset {name!r}: file not found: {path}")
        if not self.split_seeds or not self.init_seeds:
            raise ConfigError("seed lists must be non-empty")
        if not self.rates or any(not (0 < r <= 1) for r in self.rates):
            raise ConfigError("rates must be non-empty and lie in (0, 1]")
        if self.mode == "noticeability" and list(self.rates) != sorted(self.rates):
            raise ConfigError("noticeability rates must be ascending")
        if self.mode in ("effectiveness", "efficiency", "noticeability"):
            for a in self.attacks:
                try:
                    parse_attack_name(a)
                except ValueError as exc:
                    raise ConfigError(str(exc)) from exc
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        try:
            VictimConfig.from_dict(self.victim)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"victim: {exc}") from exc
        return self


def _dataset_name(spec) -> str:
    if isinstance(spec, dict):
        return spec.get("name") or spec.get("generator") or "dataset"
    base = os.path.basename(os.path.normpath(str(spec)))
    return base.split(".")[0]


def _dataset_files(spec) -> list[str]:
    if isinstance(spec, str):
        return [spec]
    if "generator" in spec:
        return []
    return [spec[k] for k in ("edges", "features", "labels", "content", "cites", "path")
            if isinstance(spec.get(k), str)]


def load_dataset(spec) -> Graph:
    """Build a graph from a dataset spec.

    A string is a path: ``.npz`` files use the sparse npz layout, a directory
    holding ``*.content`` and ``*.cites`` uses the raw citation layout, and
    anything else is read as an edge list. A dict may name ``edges`` /
    ``features`` / ``labels`` files, ``content`` / ``cites`` files, or a
    synthetic ``generator`` with its ``params`` (plus optional
    ``features: {n_features, signal, density}``).
    """
    if isinstance(spec, str):
        if spec.endswith(".npz"):
            return load_npz(spec)
        if os.path.isdir(spec):
            content = [f for f in sorted(os.listdir(spec)) if f.endswith(".content")]
            cites = [f for f in sorted(os.listdir(spec)) if f.endswith(".cites")]
            if not content or not cites:
                raise ConfigError(f"{spec}: directory needs a .content and a .cites file")
            return load_linqs(os.path.join(spec, content[0]), os.path.join(spec, cites[0]))
        return load_edge_list(spec)
    if "path" in spec:
        return load_dataset(spec["path"])
    if "content" in spec:
        return load_linqs(spec["content"], spec["cites"])
    if "edges" in spec:
        return load_edge_list(spec["edges"], spec.get("features"), spec.get("labels"))
    if "generator" in spec:
        gen = getattr(generators, spec["generator"], None)
        if gen is None or spec["generator"].startswith("_"):
            raise ConfigError(f"unknown generator {spec['generator']!r}")
        g = gen(**spec.get("params", {}))
        feat = spec.get("features")
        if feat is not None:
            if g.labels is None:
                raise ConfigError("synthetic features need block labels")
            fseed = feat.get("seed", spec.get("params", {}).get("seed"))
            x = generators.block_features(g.labels, feat["n_features"], feat["signal"], seed=fseed,
                                          density=feat.get("density", 0.05))
            g = Graph(g.adjacency, features=x, labels=g.labels, n_labels=g.n_labels)
        return g
    raise ConfigError(f"cannot interpret dataset spec {spec!r}")


def attack_seed(split_seed: int, attack: str) -> int:
    """Stable per-(split, attack) seed so attacks vary across splits."""
    return zlib.crc32(f"{split_seed}:{attack}".encode())


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    mode: str = "effectiveness"

    def deterministic_view(self) -> dict:
        """Everything except wall-clock and memory fields."""
        rows = [{k: v for k, v in r.items() if k not in TIMING_COLUMNS} for r in self.rows]
        return {"rows": rows, "failures": self.failures, "summary": self.summary, "mode": self.mode}

    def to_json(self) -> str:
        return json.dumps({"mode": self.mode, "rows": self.rows, "failures": self.failures,
                           "summary": self.summary}, sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        d = json.loads(text)
        return cls(d["rows"], d["failures"], d["summary"], d["mode"])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_csv_cell(r.get(c)) for c in COLUMNS])
        return buf.getvalue()


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "nan" if math.isnan(v) else f"{v:.4f}"
    return str(v)


def emit_report(report: ExperimentReport, path, fmt: str | None = None) -> str:
    """Write ``report`` as csv or json (inferred from the suffix if ``fmt``
    is not given); returns the path."""
    fmt = fmt or os.path.splitext(str(path))[1].lstrip(".").lower()
    if fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    text = report.to_csv() if fmt == "csv" else report.to_json()
    with open(path, "w") as fh:
        fh.write(text)
    return str(path)


def _row(dataset, attack, rate, split_seed, init_seed=None, **extra) -> dict:
    row = dict.fromkeys(COLUMNS)
    row.update(dataset=dataset, attack=attack, rate=rate, split_seed=split_seed, init_seed=init_seed)
    row.update(extra)
    return row


# ---- cells ---------------------------------------------------------------

_GRAPH_CACHE: dict = {}


def _graph_for(name, spec, lcc) -> Graph:
    key = (name, json.dumps(spec, sort_keys=True), lcc)
    if key not in _GRAPH_CACHE:
        g = load_dataset(spec)
        _GRAPH_CACHE[key] = extract_lcc(g) if lcc else g
    return _GRAPH_CACHE[key]


def _accuracies(graph, clean, split, victim, init_seeds):
    """Test accuracy per init seed on ``graph`` (features and labels from
    ``clean``)."""
    h = prepare_features(graph, clean.features, victim)
    y = clean.labels
    test = split.test
    out = []
    for s in init_seeds:
        w, _ = fit(h, y, split, victim, seed=s, n_labels=clean.n_labels)
        out.append(float(((h[test] @ w).argmax(axis=1) == y[test]).mean()))
    return out


def _timed_plan(name, graph, rate, seed, options, trace_memory):
    if trace_memory:
        tracemalloc.start()
    t0 = time.perf_counter()
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            plan = build_attack(name, graph, rate, seed, **options)
        ms = (time.perf_counter() - t0) * 1000.0
        peak = tracemalloc.get_traced_memory()[1] / 2**20 if trace_memory else None
    finally:
        if trace_memory:
            tracemalloc.stop()
    return plan, ms, peak


def _attack_options(name, options):
    spec = parse_attack_name(name)
    if spec["type"] == "structack" and spec["similarity"] == "katz":
        return dict(options.get("katz", {}))
    return {}


def _run_cell(cell):
    """One unit of work. Returns ``(rows, plans)``; raises on failure."""
    kind, ds, spec, lcc, victim_d, split_seed, init_seeds, payload = cell
    graph = _graph_for(ds, spec, lcc)
    victim = VictimConfig.from_dict(victim_d)
    if kind == "clean":
        split = random_split(graph.n, split_seed)
        accs = _accuracies(graph, graph, split, victim, init_seeds)
        return [_row(ds, CLEAN, 0.0, split_seed, s, accuracy=a) for s, a in zip(init_seeds, accs)], []
    if kind in ("effectiveness", "efficiency"):
        name, rate, options = payload
        seed = attack_seed(split_seed, name)
        plan, ms, peak = _timed_plan(name, graph, rate, seed, _attack_options(name, options),
                                     trace_memory=(kind == "efficiency"))
        if kind == "efficiency":
            return [_row(ds, name, rate, split_seed, wall_time_ms=ms, peak_mem_estimate=peak)], \
                [(ds, name, rate, split_seed, plan.to_dict())]
        split = random_split(graph.n, split_seed)
        accs = _accuracies(plan.apply(graph), graph, split, victim, init_seeds)
        rows = [_row(ds, name, rate, split_seed, s, accuracy=a, wall_time_ms=ms)
                for s, a in zip(init_seeds, accs)]
        return rows, [(ds, name, rate, split_seed, plan.to_dict())]
    if kind == "noticeability":
        name, rates, alpha, options = payload
        seed = attack_seed(split_seed, name)
        opts = _attack_options(name, options)

        def factory(g, r, s):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return build_attack(name, g, r, s, **opts)

        res = critical_rate(graph, factory, rates, alpha, seed)
        rows = [_row(ds, name, r, split_seed, **v.as_row()) for r, v in zip(res.rates_tested, res.verdicts)]
        return rows, []
    if kind in ("quantile-degree", "quantile-distance"):
        label, rate, qargs = payload
        seed = attack_seed(split_seed, label)
        if kind == "quantile-degree":
            plan = degree_quantile_injection(graph, qargs[0], qargs[1], rate, seed)
        else:
            plan = distance_quantile_injection(graph, qargs[0], rate, seed)
        split = random_split(graph.n, split_seed)
        accs = _accuracies(plan.apply(graph), graph, split, victim, init_seeds)
        return [_row(ds, label, rate, split_seed, s, accuracy=a) for s, a in zip(init_seeds, accs)], []
    raise ValueError(f"unknown cell kind {kind}")


def _cells(config: ExperimentConfig):
    for ds, spec in config.datasets.items():
        base = (ds, spec, config.lcc, config.victim)
        for split_seed in config.split_seeds:
            inits = list(config.init_seeds)
            if config.mode == "effectiveness":
                yield ("clean", *base, split_seed, inits, None)
                for name in config.attacks:
                    for rate in config.rates:
                        yield ("effectiveness", *base, split_seed, inits, (name, rate, config.attack_options))
            elif config.mode == "efficiency":
                for name in config.attacks:
                    for rate in config.rates:
                        yield ("efficiency", *base, split_seed, inits, (name, rate, config.attack_options))
            elif config.mode == "noticeability":
                for name in config.attacks:
                    yield ("noticeability", *base, split_seed, inits,
                           (name, list(config.rates), config.alpha, config.attack_options))
            elif config.mode == "quantile-degree":
                for i in range(1, QUANTILES + 1):
                    for j in range(1, QUANTILES + 1):
                        yield ("quantile-degree", *base, split_seed, inits,
                               (f"degree-q{i}-q{j}", config.rates[0], (i, j)))
            else:
                for i in range(1, QUANTILES + 1):
                    yield ("quantile-distance", *base, split_seed, inits,
                           (f"distance-q{i}", config.rates[0], (i,)))


def _safe_cell(cell):
    try:
        return _run_cell(cell), None
    except Exception as exc:  # recorded, the run continues
        kind, ds, _, _, _, split_seed, _, payload = cell
        label = CLEAN if kind == "clean" else payload[0]
        return None, {"dataset": ds, "attack": label, "split_seed": split_seed, "kind": kind,
                      "error": f"{type(exc).__name__}: {exc}"}


def run_experiment(config: ExperimentConfig, plan_sink=None) -> ExperimentReport:
    """Execute every cell of ``config``. Results are assembled in cell order,
    so the report does not depend on the worker count. ``plan_sink`` (if
    given) receives ``(dataset, attack, rate, split_seed, plan_dict)`` for
    every attack plan built."""
    config.validate()
    cells = list(_cells(config))
    if config.workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(_safe_cell, cells))
    else:
        results = [_safe_cell(c) for c in cells]
    report = ExperimentReport(mode=config.mode)
    for out, failure in results:
        if failure is not None:
            log.error("cell failed: %s", failure)
            report.failures.append(failure)
            continue
        rows, plans = out
        report.rows.extend(rows)
        if plan_sink is not None:
            for p in plans:
                plan_sink(*p)
    report.summary = summarize(report, config)
    return report


def summarize(report: ExperimentReport, config: ExperimentConfig) -> dict:
    groups: dict = {}
    out: dict = {}
    if report.mode == "noticeability":
        for r in report.rows:
            key = (r["dataset"], r["attack"], r["split_seed"])
            groups.setdefault(key, [])
            if r["unnoticeable"]:
                groups[key].append(r["rate"])
        crit: dict = {}
        for (ds, att, _), ok in groups.items():
            crit.setdefault(f"{ds}|{att}", []).append(max(ok) if ok else 0.0)
        return {"r_critical": crit}
    field_name = "wall_time_ms" if report.mode == "efficiency" else "accuracy"
    for r in report.rows:
        groups.setdefault((r["dataset"], r["attack"], r["rate"]), []).append(r[field_name])
    stats = {f"{ds}|{att}|{rate}": {"mean": float(np.mean(v)), "std": float(np.std(v)), "n": len(v)}
             for (ds, att, rate), v in groups.items()}
    out[field_name] = stats
    if report.mode in ("quantile-degree", "quantile-distance"):
        for ds in config.datasets:
            def mean_of(label, ds=ds):
                hit = stats.get(f"{ds}|{label}|{config.rates[0]}")
                return hit["mean"] if hit else None
            if report.mode == "quantile-degree":
                grid = [[mean_of(f"degree-q{i}-q{j}") for j in range(1, QUANTILES + 1)]
                        for i in range(1, QUANTILES + 1)]
            else:
                grid = [mean_of(f"distance-q{i}") for i in range(1, QUANTILES + 1)]
            out.setdefault("matrix", {})[ds] = grid
    return out


def write_outputs(report: ExperimentReport, out_dir, plans=None) -> list[str]:
    """Report as csv and json, summary json, quantile matrices as csv and
    attack plans as json files under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    written = [emit_report(report, os.path.join(out_dir, "report.csv")),
               emit_report(report, os.path.join(out_dir, "report.json"))]
    path = os.path.join(out_dir, "summary.json")
    with open(path, "w") as fh:
        json.dump(report.summary, fh, sort_keys=True, indent=1)
    written.append(path)
    for ds, grid in report.summary.get("matrix", {}).items():
        path = os.path.join(out_dir, f"{ds}_{report.mode}_matrix.csv")
        with open(path, "w") as fh:
            rows = grid if isinstance(grid[0], list) else [grid]
            for row in rows:
                fh.write(",".join("" if v is None else f"{v:.4f}" for v in row) + "\n")
        written.append(path)
    if plans:
        plan_dir = os.path.join(out_dir, "plans")
        os.makedirs(plan_dir, exist_ok=True)
        for ds, name, rate, split_seed, plan in plans:
            safe = name.replace("*", "x")
            path = os.path.join(plan_dir, f"{ds}_{safe}_r{rate}_s{split_seed}.json")
            with open(path, "w") as fh:
                json.dump(plan, fh, sort_keys=True)
            written.append(path)
    return written
