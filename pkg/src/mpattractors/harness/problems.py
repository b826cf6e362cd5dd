"""Elliptic problem specs: {domain, spacing, nonlinearity, boundary_data, solver} -> problem objects."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from mpattractors.errors import ConfigError
from mpattractors.labs.elliptic import (
    EllipticProblem,
    SolverOptions,
    constant_data,
    fourier_data,
    piecewise_data,
)
from mpattractors.labs.nonlinearity import Nonlinearity
from mpattractors.phase import GridDomain, annulus, dumbbell, from_mask, strip

_DOMAINS = {
    "annulus": {"r_in", "r_out"},
    "strip": {"width", "length", "periodic_length"},
    "dumbbell": {"side", "corridor_cells", "corridor_length"},
    "mask_file": {"path"},
}
_DATA = {
    "constant": {"value"},
    "piecewise": {"values", "axis", "splits"},
    "fourier": {"mean", "terms", "inner_terms", "split_radius"},
}
_NONLIN = {"cubic": set(), "plateau": {"N"}, "custom": {"coefficients", "factors", "leading"}}
_SOLVER = {"dt", "newton_tol", "max_iters"}


def _check_keys(given: dict, allowed: set, where: str) -> None:
    for key in given:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}", key=key)


def check_problem_spec(spec: dict) -> None:
    _check_keys(spec, {"domain", "spacing", "nonlinearity", "boundary_data", "solver"}, "problem")
    dom = spec.get("domain", {})
    kind = dom.get("kind")
    if kind not in _DOMAINS:
        raise ConfigError(f"unknown domain kind {kind!r}", key="kind")
    _check_keys(dom, {"kind", "params"}, "domain")
    _check_keys(dom.get("params", {}), _DOMAINS[kind], f"domain.params ({kind})")
    if not isinstance(spec.get("spacing"), (int, float)) or not spec["spacing"] > 0:
        raise ConfigError("spacing must be a positive number", key="spacing")
    nl = spec.get("nonlinearity", {})
    if nl.get("kind") not in _NONLIN:
        raise ConfigError(f"unknown nonlinearity {nl.get('kind')!r}", key="kind")
    _check_keys(nl, {"kind"} | _NONLIN[nl["kind"]], "nonlinearity")
    bd = spec.get("boundary_data", {})
    if bd.get("kind") not in _DATA:
        raise ConfigError(f"unknown boundary data kind {bd.get('kind')!r}", key="kind")
    _check_keys(bd, {"kind", "params"}, "boundary_data")
    _check_keys(bd.get("params", {}), _DATA[bd["kind"]], f"boundary_data.params ({bd['kind']})")
    _check_keys(spec.get("solver", {}), _SOLVER, "solver")


def build_domain(spec: dict, spacing: float | None = None) -> GridDomain:
    h = float(spacing if spacing is not None else spec["spacing"])
    kind = spec["domain"]["kind"]
    prm = spec["domain"].get("params", {})
    try:
        if kind == "annulus":
            return annulus(float(prm["r_in"]), float(prm["r_out"]), h)
        if kind == "strip":
            return strip(float(prm["width"]), float(prm["length"]), h, bool(prm.get("periodic_length", True)))
        if kind == "dumbbell":
            return dumbbell(float(prm["side"]), int(prm["corridor_cells"]), float(prm["corridor_length"]), h)
        inside = np.load(Path(prm["path"]))
        return from_mask(inside.astype(bool), h)
    except KeyError as exc:
        raise ConfigError(f"domain parameter {exc.args[0]!r} missing", key=exc.args[0]) from None


def build_boundary(spec: dict, domain: GridDomain) -> np.ndarray:
    kind = spec["boundary_data"]["kind"]
    prm = spec["boundary_data"].get("params", {})
    if kind == "constant":
        return constant_data(domain, float(prm.get("value", 0.0)))
    if kind == "piecewise":
        return piecewise_data(domain, prm["values"], int(prm.get("axis", 0)), tuple(prm.get("splits", (0.0,))))
    return fourier_data(domain, float(prm.get("mean", 0.0)), prm.get("terms", []), prm.get("inner_terms"),
                        prm.get("split_radius"))


def build_problem(spec: dict, spacing: float | None = None) -> EllipticProblem:
    check_problem_spec(spec)
    dom = build_domain(spec, spacing)
    return EllipticProblem(dom, build_boundary(spec, dom), Nonlinearity.from_config(spec["nonlinearity"]))


def solver_options(spec: dict) -> SolverOptions:
    s = spec.get("solver", {})
    base = SolverOptions()
    return SolverOptions(dt=float(s.get("dt", base.dt)), newton_tol=float(s.get("newton_tol", base.newton_tol)),
                         max_iters=int(s.get("max_iters", base.max_iters)))
