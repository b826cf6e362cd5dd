"""The experiment registry: one named experiment per acceptance property."""

from __future__ import annotations

import hashlib
import math
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from mpattractors.engine import (
    DirectionSpec,
    PointSet,
    attraction_profile,
    ball_sample,
    directional_uniformity,
    hausdorff,
    linear_contraction,
    omega_estimate,
    rotation_contraction,
    semigroup_law_defect,
    shift_semigroup,
)
from mpattractors.engine.omega import _map
from mpattractors.errors import ConfigError
from mpattractors.harness.problems import build_problem, check_problem_spec, solver_options
from mpattractors.labs.elliptic import (
    CERT_TOL,
    ConstantGuess,
    EllipticProblem,
    Given,
    HarmonicExtension,
    attraction_profile_elliptic,
    constant_data,
    interior_bound_check,
    plateau_assign,
    profile_monotone_check,
    prolong,
    solve,
    stencil_residual,
    subharmonic_defect,
)
from mpattractors.labs.nonlinearity import Nonlinearity, equilibrium_set
from mpattractors.labs.parabolic import (
    ParabolicProblem,
    comparison_bound,
    evolve,
    extended_semigroup,
    logistic_solution,
    shift,
)
from mpattractors.phase import Field, annulus, periodic_box

PUBLISHED_BOUND = 1.07541  # five-digit truncation of the comparison bound at t = 1


@dataclass
class Outcome:
    assertions: dict[str, bool]
    metrics: dict


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    defaults: dict
    run: Callable
    check: Callable = lambda params: None

    @property
    def required_params(self) -> list[str]:
        return sorted(self.defaults)


# --------------------------------------------------------------------------
# Elliptic solve cache (experiments share solutions within a process)

_SOLVES: dict = {}


def clear_solution_cache() -> None:
    _SOLVES.clear()


def _init_from(cfg: dict):
    kind = cfg.get("kind", "harmonic")
    if kind == "harmonic":
        return HarmonicExtension()
    if kind == "constant":
        return ConstantGuess(float(cfg.get("value", 0.0)))
    raise ConfigError(f"unknown init kind {kind!r}", key="kind")


def _cached_solve(p: EllipticProblem, init, spec: dict, tag: str = ""):
    opts = solver_options(spec)
    key = (p.hash, repr(init) if not isinstance(init, Given) else tag, opts)
    if key not in _SOLVES:
        _SOLVES[key] = solve(p, init, opts)
    return _SOLVES[key]


def _check_elliptic(params: dict) -> None:
    check_problem_spec(params["problem"])
    _init_from(params["init"])


# --------------------------------------------------------------------------
# 1. absorption


def run_ode_comparison(params: dict, ctx) -> Outcome:
    dom = periodic_box(int(params["N"]), float(params["L"]))
    p = ParabolicProblem(dom, Nonlinearity.cubic(), float(params["dt"]))
    t = float(params["t"])
    rng = ctx.rng("seeds")
    groups = []
    for R, count in params["groups"]:
        for _ in range(int(count)):
            v = rng.uniform(-1.0, 1.0, dom.extents)
            groups.append((float(R), Field(dom, float(R) * v / np.abs(v).max())))
    norms = _map(lambda s: evolve(p, s[1], t).sup_norm(), groups, ctx.threads)
    bound = comparison_bound(t)
    per_radius = {}
    for (R, _), n in zip(groups, norms):
        per_radius[f"{R:g}"] = max(per_radius.get(f"{R:g}", 0.0), n)
    max_norm = max(norms)
    metrics = {"bound": bound, "max_norm": max_norm, "max_norm_by_radius": per_radius, "t": t,
               "seed_count": len(groups), "tol": float(params["tol"])}
    ctx.write_json("result.json", metrics)
    return Outcome({"absorbed": max_norm <= bound + float(params["tol"]),
                    "bound_matches_published": math.floor(bound * 1e5) / 1e5 == PUBLISHED_BOUND}, metrics)


# --------------------------------------------------------------------------
# 2. constant data


def run_constant_exactness(params: dict, ctx) -> Outcome:
    dom = periodic_box(int(params["N"]), float(params["L"]))
    p = ParabolicProblem(dom, Nonlinearity.cubic(), float(params["dt"]))
    y0 = float(params["y0"])
    errs = {}
    for t in params["times"]:
        u = evolve(p, Field.constant(dom, y0), float(t))
        errs[f"{float(t):g}"] = float(np.abs(u.values - float(logistic_solution(y0, float(t)))).max())
    e = params["elliptic"]
    adom = annulus(float(e["r_in"]), float(e["r_out"]), float(e["spacing"]))
    f = Nonlinearity.plateau(int(e["N"]))
    ell = {}
    exact = True
    for k in range(int(e["N"]) + 1):
        prob = EllipticProblem(adom, constant_data(adom, k), f)
        res = solve(prob, HarmonicExtension())
        same = bool(np.array_equal(res.field.values[adom.active], np.full(int(adom.active.sum()), float(k))))
        ell[str(k)] = {"exact": same, "residual": res.residual, "oracle_residual": stencil_residual(prob, res.field)}
        exact &= same and res.residual == 0.0
    metrics = {"logistic_errors": errs, "elliptic": ell}
    ctx.write_json("result.json", metrics)
    return Outcome({"logistic_match": max(errs.values()) <= float(params["tol"]), "elliptic_exact": exact}, metrics)


# --------------------------------------------------------------------------
# 3. commutation and semigroup law


def run_semigroup_law(params: dict, ctx) -> Outcome:
    rng = ctx.rng("fields")
    commute, laws, shifts = {}, {}, {}
    for shape in params["shapes"]:
        shape = tuple(int(n) for n in shape)
        dom = periodic_box(shape, float(params["L"]))
        p = ParabolicProblem(dom, Nonlinearity.cubic(), float(params["dt"]))
        u = Field(dom, rng.uniform(-2.0, 2.0, shape))
        s = tuple(int(k) for k in params["shift"][: len(shape)])
        t = float(params["t"])
        a = evolve(p, shift(u, s), t)
        b = shift(evolve(p, u, t), s)
        label = "x".join(map(str, shape))
        commute[label] = float(np.abs(a.values - b.values).max())
        S = extended_semigroup(p)
        h1, h2 = (np.asarray(h[: 1 + len(shape)], dtype=float) for h in params["split"])
        laws[label] = semigroup_law_defect(S, h1, h2, u)
        T = shift_semigroup(dom)
        shifts[label] = semigroup_law_defect(T, np.asarray(s, float), -2.0 * np.asarray(s, float), u)
    metrics = {"commutation_defect": commute, "law_defect": laws, "shift_law_defect": shifts}
    ctx.write_json("result.json", metrics)
    return Outcome({
        "commutation": max(commute.values()) <= float(params["commute_tol"]),
        "extended_law": max(laws.values()) <= float(params["law_tol"]),
        "shift_law_exact": max(shifts.values()) == 0.0,
    }, metrics)


# --------------------------------------------------------------------------
# 4. toy attractor


def disk_oracle(n: int = 400) -> np.ndarray:
    g = np.linspace(-1.0, 1.0, n)
    X, Y = np.meshgrid(g, g)
    inside = X**2 + Y**2 <= 1.0
    ang = np.linspace(0.0, 2 * np.pi, 4 * n, endpoint=False)
    return np.vstack([np.column_stack([X[inside], Y[inside]]), np.column_stack([np.cos(ang), np.sin(ang)])])


def _ball_seeds(params: dict, ctx) -> np.ndarray:
    R = float(params["radius"])
    rng = ctx.rng("ball")
    n = int(params["random_seeds"])
    r = R * np.sqrt(rng.uniform(0.0, 1.0, n))
    a = rng.uniform(0.0, 2 * np.pi, n)
    return np.vstack([ball_sample(R), np.column_stack([r * np.cos(a), r * np.sin(a)])])


def run_toy_attractor(params: dict, ctx) -> Outcome:
    S = rotation_contraction()
    eps = float(params["eps"])
    times = [tuple(map(float, h)) for h in params["invariance_times"]]
    est = omega_estimate(S, _ball_seeds(params, ctx), params["D_list"], eps, invariance_times=times,
                         threads=ctx.threads)
    dist = hausdorff(S, est.points, disk_oracle())
    ctx.write_json("estimate.json", est.to_dict())

    lin = linear_contraction()
    pr = float(params["profile_radius"])
    prof = attraction_profile(lin, np.linspace(-pr, pr, 41)[:, None], PointSet([np.zeros(1)]), params["profile_D"],
                              direction_id="whole-cone")
    ctx.profile("linear_profile.csv", prof)
    rel = [abs(s - pr * math.exp(-2 * D)) / (pr * math.exp(-2 * D)) for D, s in zip(prof.depths, prof.sup_dists)]
    metrics = {"hausdorff_to_disk": dist, "net_size": len(est), "invariance_defect": est.invariance_defect,
               "profile_rel_errors": rel, "eps": eps}
    ctx.write_json("result.json", metrics)
    return Outcome({
        "disk_recovered": dist <= float(params["hausdorff_tol"]),
        "strictly_invariant": est.invariance_defect <= 2 * eps,
        "profile_closed_form": max(rel) <= float(params["profile_rel_tol"]),
    }, metrics)


# --------------------------------------------------------------------------
# 5. directions


def run_directional_uniformity(params: dict, ctx) -> Outcome:
    S = rotation_contraction()
    eps = float(params["eps"])
    dirs = [DirectionSpec.of(v) for v in params["directions"]]
    rep = directional_uniformity(S, dirs, _ball_seeds(params, ctx), params["tau_list"], eps, threads=ctx.threads)
    to_disk = [hausdorff(S, net.points, disk_oracle()) for net in rep["nets"]]
    metrics = {k: rep[k] for k in ("directions", "eps", "pairwise", "to_full", "max_distance")}
    metrics["to_disk"] = to_disk
    metrics["net_sizes"] = [len(n) for n in rep["nets"]]
    ctx.write_json("result.json", metrics)
    return Outcome({"enough_directions": len(dirs) >= 4, "uniform": rep["pass"]}, metrics)


# --------------------------------------------------------------------------
# 6-8. elliptic plateaus


def _solve_and_record(params: dict, ctx, name: str):
    spec = params["problem"]
    p = build_problem(spec)
    res = _cached_solve(p, _init_from(params["init"]), spec)
    oracle = stencil_residual(p, res.field)
    ctx.write_fields(f"{name}.bin", res.field)
    ctx.write_json(f"{name}.certificate.json", {**res.certificate(), "oracle_residual": oracle,
                                                 "unknowns": p.unknowns, "problem_hash": p.hash})
    return p, res, oracle


def run_annulus_plateau(params: dict, ctx) -> Outcome:
    p, res, oracle = _solve_and_record(params, ctx, "solution")
    K = equilibrium_set(p.nonlinearity)
    mono = profile_monotone_check(res.field, K, params["D_list"])
    prof = mono["profile"]
    ctx.profile("profile.csv", prof)
    Dp = float(params["D_plateau"])
    at = dict(zip(prof.depths, prof.sup_dists)).get(Dp, math.inf)
    pa = plateau_assign(res.field, K, Dp, float(params["tol"]))
    ctx.write_text("plateau.json", pa.to_json())
    bound = interior_bound_check(res.field, p.nonlinearity)
    metrics = {"residual": oracle, "profile_at_plateau_depth": at, "components": len(pa.components),
               "N_u": pa.values, "monotone_violations": mono["violations"], "interior_bound": bound}
    ctx.write_json("result.json", metrics)
    return Outcome({
        "certified": oracle <= CERT_TOL,
        "profile_monotone": mono["pass"],
        "profile_small": at <= float(params["profile_tol"]),
        "single_component": len(pa.components) == 1,
        "plateau_resolved": all(c.resolved for c in pa.components),
        "interior_bound": bound["pass"],
    }, metrics)


def run_dumbbell_plateau(params: dict, ctx) -> Outcome:
    p, res, oracle = _solve_and_record(params, ctx, "solution")
    K = equilibrium_set(p.nonlinearity)
    D = float(params["D"])
    pa = plateau_assign(res.field, K, D, float(params["tol"]))
    ctx.write_text("plateau.json", pa.to_json())
    prof = attraction_profile_elliptic(res.field, K, params["D_list"])
    ctx.profile("profile.csv", prof)
    metrics = {"residual": oracle, "components": len(pa.components), "N_u": pa.values,
               "plateaus_differ": len(set(pa.values)) > 1}
    ctx.write_json("result.json", metrics)
    return Outcome({
        "certified": oracle <= CERT_TOL,
        "two_components": len(pa.components) == 2,
        "all_resolved": all(c.resolved for c in pa.components),
    }, metrics)


def run_subharmonicity(params: dict, ctx) -> Outcome:
    out = {}
    checks = {}
    for name in sorted(params["cases"]):
        case = params["cases"][name]
        spec = case["problem"]
        check_problem_spec(spec)
        coarse_p = build_problem(spec)
        coarse = _cached_solve(coarse_p, _init_from(case["init"]), spec)
        fine_p = build_problem(spec, float(spec["spacing"]) / int(params["refine"]))
        fine = _cached_solve(fine_p, Given(prolong(coarse.field, fine_p.domain)), spec,
                             tag=f"prolong:{coarse_p.hash}")
        D = float(params["D"])
        dc, df = subharmonic_defect(coarse.field, D), subharmonic_defect(fine.field, D)
        # u Lap_h u differs from u f(u) >= 0 by u * residual: the certified round-off band
        floor_c = 2.0 * coarse.field.sup_norm() * coarse.residual
        floor_f = 2.0 * fine.field.sup_norm() * fine.residual
        vc, vf = max(0.0, -dc), max(0.0, -df)
        h = float(spec["spacing"])
        out[name] = {"spacing": h, "defect": dc, "refined_defect": df, "violation": vc, "refined_violation": vf,
                     "residual_band": floor_c, "refined_residual_band": floor_f,
                     "c_estimate": vc / h**2, "refined_residual": fine.residual}
        checks[f"{name}_bounded"] = dc >= -float(params["bound"])
        checks[f"{name}_refines"] = vf <= vc + floor_f
        checks[f"{name}_refined_certified"] = fine.residual <= CERT_TOL
    ctx.write_json("result.json", out)
    return Outcome(checks, out)


# --------------------------------------------------------------------------
# 9. determinism


def _tree_hashes(root: Path) -> dict:
    return {str(p.relative_to(root)): hashlib.sha256(p.read_bytes()).hexdigest()
            for p in sorted(root.rglob("*")) if p.is_file() and p.suffix in (".json", ".csv")}


def run_determinism(params: dict, ctx) -> Outcome:
    from mpattractors.harness.runner import run_experiment

    hashes = {}
    checks = {}
    for name in params["experiments"]:
        runs = []
        for i in range(2):
            clear_solution_cache()
            sub = ctx.scratch / f"{name}-{i}"
            run_experiment({"experiment": name, "seed": ctx.seed, "out_dir": str(sub)}, threads=ctx.threads)
            runs.append(_tree_hashes(sub))
            shutil.rmtree(sub, ignore_errors=True)
        hashes[name] = runs[0]
        checks[f"{name}_identical"] = runs[0] == runs[1] and bool(runs[0])
    ctx.write_json("result.json", hashes)
    return Outcome(checks, {"experiments": list(params["experiments"])})


def _check_determinism(params: dict) -> None:
    for name in params["experiments"]:
        if name not in REGISTRY or name == "determinism":
            raise ConfigError(f"cannot replay experiment {name!r}", key="experiments")


# --------------------------------------------------------------------------
# Registry

ANNULUS_PROBLEM = {
    "domain": {"kind": "annulus", "params": {"r_in": 1.0, "r_out": 40.0}},
    "spacing": 0.1,
    "nonlinearity": {"kind": "plateau", "N": 2},
    "boundary_data": {"kind": "fourier", "params": {"mean": 1.0, "terms": [[3, 1.5, 0.0]],
                                                    "inner_terms": [[1, 1.5, 0.5]], "split_radius": 10.0}},
    "solver": {},
}
DUMBBELL_PROBLEM = {
    "domain": {"kind": "dumbbell", "params": {"side": 60.0, "corridor_cells": 3, "corridor_length": 4.0}},
    "spacing": 0.1,
    "nonlinearity": {"kind": "plateau", "N": 2},
    "boundary_data": {"kind": "piecewise", "params": {"values": [0.0, 2.0], "axis": 0, "splits": [0.0]}},
    "solver": {},
}
LIGHT = ["constant-exactness", "directional-uniformity", "ode-comparison", "semigroup-law", "toy-attractor"]
DIRECTIONS = [[1.0, 1.0], [2.0, 1.0], [1.0, 0.0], [1.0, -1.0], [1.0, 2.0]]


def _check_subharmonic(params: dict) -> None:
    for case in params["cases"].values():
        check_problem_spec(case["problem"])
        _init_from(case["init"])


REGISTRY: dict[str, Experiment] = {e.name: e for e in [
    Experiment("ode-comparison", "sup-norm absorption at t=1 against the logistic comparison bound",
               {"N": 1024, "L": 32.0, "dt": 0.01, "t": 1.0, "tol": 0.02, "groups": [[10.0, 20], [100.0, 5]]},
               run_ode_comparison),
    Experiment("constant-exactness", "constant data: logistic formula (parabolic) and exact plateaus (elliptic)",
               {"N": 256, "L": 32.0, "dt": 0.01, "y0": 3.0, "times": [0.5, 1.0, 2.0], "tol": 1e-6,
                "elliptic": {"r_in": 1.0, "r_out": 6.0, "spacing": 0.25, "N": 2}},
               run_constant_exactness),
    Experiment("semigroup-law", "shift/evolve commutation and the extended semigroup law",
               {"shapes": [[128], [32, 24]], "L": 32.0, "dt": 0.01, "t": 0.5, "shift": [5, -3],
                "split": [[0.5, 1.0, 0.0], [0.5, 0.0, 1.0]], "commute_tol": 1e-12, "law_tol": 1e-8},
               run_semigroup_law),
    Experiment("toy-attractor", "rotation-contraction attractor is the unit disk; linear contraction profile",
               {"eps": 0.03, "radius": 3.0, "random_seeds": 2000, "D_list": [2.0, 3.0, 4.0],
                "invariance_times": [[1.0, 0.7], [0.5, -1.3], [2.0, 3.0]], "hausdorff_tol": 0.05,
                "profile_D": [1.0, 2.0, 3.0], "profile_radius": 2.0, "profile_rel_tol": 0.01},
               run_toy_attractor),
    Experiment("directional-uniformity", "directional omega-nets agree with each other and the full net",
               {"eps": 0.03, "radius": 3.0, "random_seeds": 2000, "tau_list": [3.0, 4.0, 5.0],
                "directions": DIRECTIONS},
               run_directional_uniformity),
    Experiment("annulus-plateau", "annulus solution converges to one integer plateau away from the boundary",
               {"problem": ANNULUS_PROBLEM, "init": {"kind": "constant", "value": 0.0},
                "D_list": [float(d) for d in range(1, 16)], "D_plateau": 15.0, "tol": 1e-2, "profile_tol": 1e-3},
               run_annulus_plateau, _check_elliptic),
    Experiment("dumbbell-plateau", "disconnected deep region: independent plateaus per component",
               {"problem": DUMBBELL_PROBLEM, "init": {"kind": "harmonic", "value": 0.0}, "D": 20.0, "tol": 1e-2,
                "D_list": [1.0, 2.0, 5.0, 10.0, 15.0, 20.0]},
               run_dumbbell_plateau, _check_elliptic),
    Experiment("subharmonicity", "discrete Laplacian of u^2 on certified solutions, with one refinement",
               {"cases": {"annulus": {"problem": ANNULUS_PROBLEM, "init": {"kind": "constant", "value": 0.0}},
                          "dumbbell": {"problem": DUMBBELL_PROBLEM, "init": {"kind": "harmonic", "value": 0.0}}},
                "refine": 2, "D": 2.0, "bound": 1e-4},
               run_subharmonicity, _check_subharmonic),
    Experiment("determinism", "replays experiments twice and compares CSV/JSON artifacts byte for byte",
               {"experiments": LIGHT}, run_determinism, _check_determinism),
]}


def list_experiments() -> list[tuple[str, str, list[str]]]:
    return [(e.name, e.description, e.required_params) for e in sorted(REGISTRY.values(), key=lambda e: e.name)]
