"""The nine acceptance criteria, each run through the experiment registry at its stated tolerance.

Every test prints one ``CRITERION n PASS|FAIL`` line; ``conftest.py`` repeats
them in the terminal summary so they show without ``-s``.
"""

import json
import math

import pytest

from mpattractors.harness import clear_solution_cache, run_experiment
from mpattractors.harness.experiments import ANNULUS_PROBLEM
from mpattractors.harness.problems import build_boundary, build_domain

RUNS = {}
LINES = []

LIMITS = {1: 30.0, 2: 5.0, 3: 10.0, 4: 20.0, 5: 30.0, 6: 300.0, 7: 300.0, 8: 600.0}
NAMES = {1: "ode-comparison", 2: "constant-exactness", 3: "semigroup-law", 4: "toy-attractor",
         5: "directional-uniformity", 6: "annulus-plateau", 7: "dumbbell-plateau", 8: "subharmonicity"}
SEED = 20240601


@pytest.fixture(scope="module")
def root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def _report(n, ok, detail):
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {detail}"
    LINES.append(line)
    print(line)
    return ok


def _run(n, root):
    clear_solution_cache()
    rep = run_experiment({"experiment": NAMES[n], "seed": SEED, "out_dir": str(root / f"c{n}")})
    RUNS[n] = rep
    return rep


def _check(n, rep, extra_ok=True, detail=""):
    fast = rep.wall_time < LIMITS[n]
    failed = [k for k, v in rep.assertions.items() if not v]
    ok = rep.passed and fast and extra_ok
    msg = f"{NAMES[n]} {rep.wall_time:.1f}s/{LIMITS[n]:g}s {detail}" + (f" failed={failed}" if failed else "")
    assert _report(n, ok, msg), msg


def test_criterion_1_absorption(root):
    rep = _run(1, root)
    m = rep.metrics
    ok = math.floor(m["bound"] * 1e5) / 1e5 == 1.07541 and m["max_norm"] <= 1.07541 + 0.02 and m["seed_count"] == 25
    _check(1, rep, ok, f"max_norm={m['max_norm']:.5f} bound={m['bound']:.7f}")


def test_criterion_2_constant_exactness(root):
    rep = _run(2, root)
    m = rep.metrics
    worst = max(m["logistic_errors"].values())
    exact = all(v["exact"] and v["residual"] == 0.0 for v in m["elliptic"].values())
    _check(2, rep, worst <= 1e-6 and exact, f"logistic_err={worst:.2e} elliptic_exact={exact}")


def test_criterion_3_commutation_and_law(root):
    rep = _run(3, root)
    m = rep.metrics
    comm, law = max(m["commutation_defect"].values()), max(m["law_defect"].values())
    _check(3, rep, comm <= 1e-12 and law <= 1e-8, f"commutation={comm:.2e} law={law:.2e}")


def test_criterion_4_toy_attractor(root):
    rep = _run(4, root)
    m = rep.metrics
    ok = m["hausdorff_to_disk"] <= 0.05 and m["invariance_defect"] <= 2 * m["eps"] and max(m["profile_rel_errors"]) <= 0.01
    _check(4, rep, ok, f"hausdorff={m['hausdorff_to_disk']:.4f} invariance={m['invariance_defect']:.4f} "
                       f"profile_rel={max(m['profile_rel_errors']):.1e}")


def test_criterion_5_directional_uniformity(root):
    rep = _run(5, root)
    m = rep.metrics
    ok = len(m["directions"]) >= 4 and m["max_distance"] <= 2 * m["eps"]
    _check(5, rep, ok, f"directions={len(m['directions'])} max_distance={m['max_distance']:.4f}")


def test_criterion_6_annulus_plateau(root):
    dom = build_domain(ANNULUS_PROBLEM)
    g = build_boundary(ANNULUS_PROBLEM, dom)[dom.boundary]
    assert g.min() >= -0.5 - 1e-12 and g.max() <= 2.5 + 1e-12 and g.max() - g.min() > 2.9
    rep = _run(6, root)
    m = rep.metrics
    ok = (m["residual"] <= 1e-8 and m["profile_at_plateau_depth"] <= 1e-3 and m["components"] == 1
          and len(m["N_u"]) == 1 and m["N_u"][0] in (0.0, 1.0, 2.0) and not m["monotone_violations"])
    _check(6, rep, ok, f"residual={m['residual']:.1e} profile(15)={m['profile_at_plateau_depth']:.1e} "
                       f"N_u={m['N_u']}")


def test_criterion_7_dumbbell(root):
    rep = _run(7, root)
    m = rep.metrics
    plateaus = json.loads((root / "c7" / "plateau.json").read_text())["components"]
    ok = (m["residual"] <= 1e-8 and len(plateaus) == 2
          and all(c["N_u"] is not None and c["deviation"] <= 1e-2 for c in plateaus))
    _check(7, rep, ok, f"residual={m['residual']:.1e} N_u={m['N_u']} differ={m['plateaus_differ']}")


def test_criterion_8_subharmonicity(root):
    rep = _run(8, root)
    m = rep.metrics
    ok = True
    parts = []
    for name in ("annulus", "dumbbell"):
        c = m[name]
        ok &= c["defect"] >= -1e-4
        # refined violation no larger than the coarse one beyond the certified residual band
        ok &= c["refined_violation"] <= c["violation"] + c["refined_residual_band"]
        parts.append(f"{name}: defect={c['defect']:.1e} refined={c['refined_defect']:.1e} "
                     f"band={c['refined_residual_band']:.1e}")
    _check(8, rep, ok, "; ".join(parts))


def test_criterion_9_determinism(root):
    missing = [n for n in NAMES if n not in RUNS]
    if missing:
        pytest.skip(f"criteria {missing} did not run in this session")
    diffs = []
    for n in sorted(NAMES):
        clear_solution_cache()
        again = run_experiment({"experiment": NAMES[n], "seed": SEED, "out_dir": str(root / f"again{n}")})
        first = RUNS[n].artifacts
        keep = [k for k in first if k.endswith((".json", ".csv"))]
        if not keep or any(first[k] != again.artifacts.get(k) for k in keep) or set(first) != set(again.artifacts):
            diffs.append(NAMES[n])
        a = (root / f"c{n}" / "report.json").read_bytes()
        b = (root / f"again{n}" / "report.json").read_bytes()
        if a != b:
            diffs.append(f"{NAMES[n]}/report.json")
    ok = not diffs
    assert _report(9, ok, "byte-identical CSV/JSON for criteria 1-8" if ok else f"differs: {diffs}"), diffs

