"""``mpattr``: run, list and validate experiments.

Exit codes: 0 when every assertion passes, 1 on an assertion failure or a lab
error, 2 on an invalid configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from mpattractors.errors import AttractorError, ConfigError
from mpattractors.harness.config import load_config, validate
from mpattractors.harness.experiments import REGISTRY, list_experiments
from mpattractors.harness.runner import run_experiment


def _raw_config(args) -> dict:
    if args.config:
        raw = load_config(args.config)
    elif getattr(args, "experiment", None):
        raw = {"experiment": args.experiment}
    else:
        raise ConfigError("need --config or --experiment", key="config")
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    if args.threads is not None:
        raw["threads"] = args.threads
    return raw


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mpattr", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("run", "validate"):
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--experiment", help="run an experiment with its default params")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
    p = sub.add_parser("list")
    p.add_argument("--json", action="store_true", help="machine-readable listing")
    return ap


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "list":
        rows = list_experiments()
        if args.json:
            print(json.dumps([{"name": n, "description": d, "params": p} for n, d, p in rows], indent=1))
        else:
            for name, desc, params in rows:
                print(f"{name}\t{desc}\t{','.join(params)}")
        return 0
    try:
        cfg = validate(_raw_config(args), REGISTRY)
        if args.command == "validate":
            print(f"ok {cfg.experiment} {cfg.hash}")
            return 0
        report = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}" + (f" (key: {exc.key})" if exc.key else ""), file=sys.stderr)
        return 2
    except AttractorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    for name, ok in report.assertions.items():
        print(f"{'PASS' if ok else 'FAIL'} {report.experiment}.{name}")
    print(f"{'PASS' if report.passed else 'FAIL'} {report.experiment} ({report.wall_time:.1f}s) -> {report.out_dir}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
