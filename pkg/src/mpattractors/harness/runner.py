"""Run one experiment: outputs under ``out_dir``, a content-hashed ``report.json``."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mpattractors.errors import AttractorError
from mpattractors.harness.config import ExperimentConfig, rng_for, validate
from mpattractors.harness.plotdata import emit_profile_plotdata

log = logging.getLogger(__name__)


def _clean(obj):
    """Plain JSON types; non-finite floats become strings so the output stays strict JSON."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class RunContext:
    """What an experiment sees: its seed, worker count, RNG streams and an artifact writer."""

    def __init__(self, config: ExperimentConfig, out: Path, scratch: Path):
        self.config = config
        self.seed = config.seed
        self.threads = config.threads
        self.out = out
        self.scratch = scratch
        self.artifacts: list[Path] = []

    def rng(self, name: str) -> np.random.Generator:
        return rng_for(self.seed, self.config.experiment, name)

    def write_text(self, name: str, text: str) -> Path:
        path = self.out / name
        path.write_text(text, encoding="utf-8", newline="")
        self.artifacts.append(path)
        return path

    def write_json(self, name: str, obj) -> Path:
        return self.write_text(name, dumps(obj))

    def write_fields(self, name: str, u) -> None:
        self.artifacts.extend(u.save(self.out / name))

    def profile(self, name: str, prof) -> None:
        self.artifacts.extend(emit_profile_plotdata(prof, self.out / name))


@dataclass
class RunReport:
    experiment: str
    config_hash: str
    passed: bool
    assertions: dict
    metrics: dict
    artifacts: dict
    out_dir: Path
    wall_time: float

    def to_dict(self) -> dict:
        return {"experiment": self.experiment, "config_hash": self.config_hash, "passed": self.passed,
                "assertions": self.assertions, "metrics": self.metrics, "artifacts": self.artifacts}


def run_experiment(config, registry=None, threads: int | None = None) -> RunReport:
    """Validate (if given a mapping), run, and write ``report.json`` plus ``timing.txt``.

    ``report.json`` holds only deterministic content, so two runs of the same
    configuration produce identical bytes; wall time lives in ``timing.txt``.
    """
    from mpattractors.harness.experiments import REGISTRY

    registry = registry or REGISTRY
    if not isinstance(config, ExperimentConfig):
        raw = dict(config)
        if threads is not None:
            raw["threads"] = threads
        config = validate(raw, registry)
    out = Path(config.out_dir or Path("runs") / config.experiment)
    out.mkdir(parents=True, exist_ok=True)
    exp = registry[config.experiment]
    log.info("running %s (config %s) into %s", config.experiment, config.hash, out)
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory(prefix="mpattr-") as scratch:
        ctx = RunContext(config, out, Path(scratch))
        ctx.write_json("config.json", config.canonical())
        try:
            outcome = exp.run(config.params, ctx)
        except AttractorError as exc:
            exc.args = (f"[{config.experiment}] {exc}",) + exc.args[1:]
            raise
    wall = time.perf_counter() - t0
    artifacts = {str(p.relative_to(out)): sha256_file(p) for p in sorted(set(ctx.artifacts))}
    assertions = {k: bool(v) for k, v in outcome.assertions.items()}
    report = RunReport(config.experiment, config.hash, all(assertions.values()), assertions,
                       _clean(outcome.metrics), artifacts, out, wall)
    (out / "report.json").write_text(dumps(report.to_dict()), encoding="utf-8", newline="")
    (out / "timing.txt").write_text(f"wall_time_seconds {wall:.3f}\n", encoding="utf-8")
    log.info("%s %s in %.1fs", config.experiment, "passed" if report.passed else "FAILED", wall)
    return report
