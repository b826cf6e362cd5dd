"""Experiment configuration: validation against per-experiment defaults, hashing, seeding."""

from __future__ import annotations

import copy
import hashlib
import json
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mpattractors.errors import ConfigError

TOP_LEVEL = ("experiment", "params", "seed", "out_dir", "threads")
SEED_MAX = 2**64 - 1

# keys whose values are free-form mappings validated elsewhere
_OPEN_KEYS = {"domain", "boundary_data", "nonlinearity", "solver", "params"}


@dataclass
class ExperimentConfig:
    experiment: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    out_dir: str | None = None
    threads: int = 1

    def canonical(self) -> dict:
        """Everything that determines the outputs (not where they go or how many workers run)."""
        return {"experiment": self.experiment, "params": self.params, "seed": self.seed}

    @property
    def hash(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def to_dict(self) -> dict:
        return {**self.canonical(), "out_dir": self.out_dir, "threads": self.threads}


def _merge(defaults: dict, given: dict, path: str) -> dict:
    out = copy.deepcopy(defaults)
    for key, val in given.items():
        where = f"{path}.{key}" if path else key
        if key not in defaults:
            raise ConfigError(f"unknown config key {where!r}", key=key)
        if isinstance(defaults[key], dict) and key not in _OPEN_KEYS:
            if not isinstance(val, dict):
                raise ConfigError(f"{where!r} must be a mapping", key=key)
            out[key] = _merge(defaults[key], val, where)
        elif isinstance(defaults[key], dict):
            if not isinstance(val, dict):
                raise ConfigError(f"{where!r} must be a mapping", key=key)
            out[key] = copy.deepcopy(val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def validate(raw: dict, registry) -> ExperimentConfig:
    """Check ``raw`` against the registry; unknown keys raise :class:`ConfigError` naming the key."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    for key in raw:
        if key not in TOP_LEVEL:
            raise ConfigError(f"unknown config key {key!r}", key=key)
    name = raw.get("experiment")
    if name is None:
        raise ConfigError("missing 'experiment'", key="experiment")
    if name not in registry:
        raise ConfigError(f"unknown experiment {name!r}", key="experiment")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed <= SEED_MAX:
        raise ConfigError("seed must be an integer in [0, 2^64)", key="seed")
    threads = raw.get("threads", 1)
    if isinstance(threads, bool) or not isinstance(threads, int) or threads < 1:
        raise ConfigError("threads must be a positive integer", key="threads")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError("'params' must be a mapping", key="params")
    exp = registry[name]
    merged = _merge(exp.defaults, params, "params")
    exp.check(merged)
    return ExperimentConfig(name, merged, int(seed), raw.get("out_dir"), int(threads))


def load_config(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def rng_for(seed: int, *names: str) -> np.random.Generator:
    """Independent counter-based stream for ``(seed, names)``; same inputs, same numbers."""
    key = tuple(zlib.crc32(n.encode()) for n in names)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=key)))
