"""Command line entry point: ``structack attack|run|notice|quantile``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings

from .attacks import build_attack
from .graph import extract_lcc
from .harness import ConfigError, ExperimentConfig, load_dataset, run_experiment, write_outputs
from .noticeability import RATE_GRID

EXIT_OK, EXIT_CONFIG, EXIT_PARTIAL = 0, 1, 2


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _dataset_arg(text):
    """Path, or an inline JSON dataset spec."""
    return json.loads(text) if text.lstrip().startswith("{") else text


def _add_experiment_flags(p, default_mode=None):
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--dataset", action="append", type=_dataset_arg,
                   help="dataset path or inline JSON spec (repeatable; replaces config datasets)")
    p.add_argument("--attack", action="append", help="attack name, e.g. DG*Katz, Random, DICE (repeatable)")
    p.add_argument("--rate", type=_floats, help="comma-separated perturbation rates")
    p.add_argument("--seeds", type=_ints, help="comma-separated split seeds")
    p.add_argument("--init-seeds", type=_ints, help="comma-separated weight-init seeds")
    if default_mode is None:
        p.add_argument("--mode", help="effectiveness, efficiency, noticeability, quantile-degree or quantile-distance")
    p.add_argument("--out", help="output directory")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--lcc", action="store_true", default=None, help="restrict datasets to the largest component")
    p.add_argument("--katz-spectral-rescale", action="store_true",
                   help="rescale the Katz decay by the spectral radius so the series converges")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="structack", description="Structure-only edge-injection attacks on node classification.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("attack", help="build one attack plan and print or save it as JSON")
    p.add_argument("--dataset", required=True, type=_dataset_arg)
    p.add_argument("--attack", required=True)
    p.add_argument("--rate", required=True, type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lcc", action="store_true")
    p.add_argument("--katz-spectral-rescale", action="store_true")
    p.add_argument("--out", help="write the plan here instead of stdout")

    _add_experiment_flags(sub.add_parser("run", help="run an experiment config"))
    _add_experiment_flags(sub.add_parser("notice", help="critical-rate sweep"), default_mode="noticeability")
    p = sub.add_parser("quantile", help="degree or distance quantile grids")
    _add_experiment_flags(p, default_mode="quantile")
    p.add_argument("--kind", choices=("degree", "distance"), default="degree")
    return parser


def config_from_args(args) -> ExperimentConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    if args.dataset:
        base["datasets"] = args.dataset
    for flag, key in (("attack", "attacks"), ("rate", "rates"), ("seeds", "split_seeds"),
                      ("init_seeds", "init_seeds"), ("out", "out"), ("workers", "workers"), ("lcc", "lcc")):
        value = getattr(args, flag, None)
        if value is not None:
            base[key] = value
    if args.command == "notice":
        base["mode"] = "noticeability"
        base.setdefault("rates", list(RATE_GRID))
    elif args.command == "quantile":
        base["mode"] = f"quantile-{args.kind}"
    elif getattr(args, "mode", None):
        base["mode"] = args.mode
    if args.katz_spectral_rescale:
        base.setdefault("attack_options", {}).setdefault("katz", {})["spectral_rescale"] = True
    return ExperimentConfig.from_dict(base).validate()


def _cmd_attack(args) -> int:
    graph = load_dataset(args.dataset)
    if args.lcc:
        graph = extract_lcc(graph)
    options = {"spectral_rescale": True} if args.katz_spectral_rescale else {}
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        plan = build_attack(args.attack, graph, args.rate, args.seed,
                            **(options if "katz" in args.attack.lower() else {}))
    text = plan.to_json()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    config = config_from_args(args)
    plans = []
    report = run_experiment(config, plan_sink=lambda *p: plans.append(p))
    if config.out:
        for path in write_outputs(report, config.out, plans):
            logging.info("wrote %s", path)
    else:
        sys.stdout.write(report.to_csv())
    print(json.dumps(report.summary, sort_keys=True, indent=1), file=sys.stderr)
    for f in report.failures:
        print(f"cell failed: {f}", file=sys.stderr)
    return EXIT_PARTIAL if report.failures else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "attack":
            return _cmd_attack(args)
        return _cmd_experiment(args)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
