"""Omega-limit estimation, invariance and representation checks, attraction profiles."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.spatial import cKDTree

from mpattractors.engine.semigroup import FIELD, VECTOR, DirectionSpec, SemigroupHandle, directional_semigroup
from mpattractors.errors import NonFiniteState, NotOnAttractor
from mpattractors.phase import Field

log = logging.getLogger(__name__)


# --------------------------------------------------------------------------
# Result types


@dataclass
class AttractorEstimate:
    points: list
    epsilon: float
    depths_used: list[float]
    invariance: list[tuple[list[float], float]] = field(default_factory=list)
    provenance: str = ""
    max_state_norm: float = 0.0
    phase: str = VECTOR
    support: list | None = field(default=None, repr=False)

    @property
    def invariance_defect(self) -> float:
        return max((d for _, d in self.invariance), default=0.0)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> dict:
        if self.phase == VECTOR:
            pts = [list(map(float, np.atleast_1d(p))) for p in self.points]
        else:
            pts = [{"sup_norm": p.sup_norm(), "domain_hash": p.domain.hash,
                    "values": p.values[p.domain.active].tolist()} for p in self.points]
        return {
            "phase": self.phase,
            "epsilon": self.epsilon,
            "depths_used": list(map(float, self.depths_used)),
            "invariance": [{"h": h, "defect": d} for h, d in self.invariance],
            "invariance_defect": self.invariance_defect,
            "max_state_norm": self.max_state_norm,
            "provenance": self.provenance,
            "support_size": len(self.support) if self.support is not None else len(self.points),
            "points": pts,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


@dataclass
class RateProfile:
    """Empirical attraction rate: sup distance to a target as a function of depth."""

    entries: list[tuple[float, float, str | None]]
    target: str = ""

    def __post_init__(self):
        self.entries = sorted(((float(D), float(s), d) for D, s, d in self.entries), key=lambda e: (e[0], e[2] or ""))
        if any(s < 0 for _, s, _ in self.entries):
            raise ValueError("sup distances must be nonnegative")

    @property
    def depths(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries])

    @property
    def sup_dists(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries])

    def to_dict(self) -> dict:
        return {"target": self.target,
                "entries": [{"D": D, "sup_dist": s, "direction_id": d} for D, s, d in self.entries]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["D", "sup_dist", "direction_id"])
        for D, s, d in self.entries:
            w.writerow([f"{D:.9g}", f"{s:.9g}", "" if d is None else d])
        return buf.getvalue()


# --------------------------------------------------------------------------
# Targets


@dataclass(frozen=True)
class PointSet:
    """A finite target set; distance is the minimum over its points."""

    points: Sequence
    label: str = "finite set"

    def distance(self, S: SemigroupHandle, x) -> float:
        return float(S.distances_to(x, self.points).min())


@dataclass(frozen=True)
class NormBall:
    """Closed ball of given radius around 0 (Euclidean for vectors, sup-norm for fields)."""

    radius: float

    @property
    def label(self) -> str:
        return f"ball(radius={self.radius:g})"

    def distance(self, S: SemigroupHandle, x) -> float:
        n = x.sup_norm() if isinstance(x, Field) else float(np.linalg.norm(x))
        return max(0.0, n - self.radius)


@dataclass(frozen=True)
class ConstantFields:
    """Constant fields with the given values, measured with ``metric.distance_values``."""

    values: Sequence[float]
    metric: Callable

    @property
    def label(self) -> str:
        return f"constants{list(map(float, self.values))}"

    def distance(self, S: SemigroupHandle, x) -> float:
        return min(self.metric.distance_values(x.values, float(k)) for k in self.values)


# --------------------------------------------------------------------------
# Helpers


def _map(fn, items, threads: int):
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _evolve(S: SemigroupHandle, h: np.ndarray, seeds, threads: int = 1):
    """Apply S(h) to every seed; returns an array (vectors) or list of fields."""
    if S.phase == VECTOR:
        out = np.asarray(S.apply(h, np.asarray(seeds, dtype=float)), dtype=float)
        if not np.all(np.isfinite(out)):
            raise NonFiniteState(f"{S.name}: non-finite state at time {h.tolist()}")
        return out
    return _map(lambda u: S.apply(h, u), list(seeds), threads)


def _norm(S: SemigroupHandle, states) -> float:
    if S.phase == VECTOR:
        return float(np.linalg.norm(np.atleast_2d(states), axis=1).max(initial=0.0))
    return max((u.sup_norm() for u in states), default=0.0)


def _canonical_order(S: SemigroupHandle, points) -> list[int]:
    if S.phase == VECTOR:
        arr = np.atleast_2d(points)
        return list(np.lexsort(arr.T[::-1]))
    keys = [(round(p.sup_norm(), 12), round(float(p.values.sum()), 9), p.values.tobytes()) for p in points]
    return sorted(range(len(points)), key=lambda i: keys[i])


def eps_net(S: SemigroupHandle, points, eps: float) -> list:
    """Greedy farthest-point thinning: every input point ends within ``eps`` of the net.

    Starts from the first point in canonical (lexicographic) order; ties pick
    the earliest point in that order, so the result does not depend on input order.
    """
    if len(points) == 0:
        return []
    order = _canonical_order(S, points)
    if S.phase == FIELD:
        pts = [points[i] for i in order]
        chosen = [0]
        mind = S.distances_to(pts[0], pts)
        while True:
            j = int(np.argmax(mind))
            if mind[j] <= eps:
                break
            chosen.append(j)
            mind = np.minimum(mind, S.distances_to(pts[j], pts))
        return [pts[j] for j in chosen]

    pts = np.atleast_2d(np.asarray(points, dtype=float))[order]
    tree = cKDTree(pts)
    chosen = [0]
    mind = np.linalg.norm(pts - pts[0], axis=1)
    while True:
        j = int(np.argmax(mind))
        r = mind[j]
        if r <= eps:
            break
        chosen.append(j)
        # only points closer to the new centre than the current covering radius can improve
        near = np.asarray(tree.query_ball_point(pts[j], r), dtype=np.int64)
        if near.size:
            mind[near] = np.minimum(mind[near], np.linalg.norm(pts[near] - pts[j], axis=1))
        mind[j] = 0.0
    return [pts[j] for j in chosen]


def set_distance(S: SemigroupHandle, A, B) -> float:
    """Directed distance sup_{a in A} inf_{b in B} d(a, b)."""
    if len(A) == 0:
        return 0.0
    if S.phase == VECTOR:
        tree = cKDTree(np.atleast_2d(np.asarray(B, dtype=float)))
        d, _ = tree.query(np.atleast_2d(np.asarray(A, dtype=float)))
        return float(d.max())
    return max(float(S.distances_to(a, B).min()) for a in A)


def hausdorff(S: SemigroupHandle, A, B) -> float:
    return max(set_distance(S, A, B), set_distance(S, B, A))


# --------------------------------------------------------------------------
# Operations


def strict_invariance_defect(A: AttractorEstimate, S: SemigroupHandle, h) -> float:
    """max(forward-inclusion defect of S(h)A in A, surjectivity defect of A in S(h)A).

    The surjectivity part maps the estimate's support sample (the unthinned
    deep states, when recorded) rather than the net itself: S(h) may expand
    distances, and the image of a coarse net then leaves gaps that say
    nothing about the attractor.
    """
    h = S.check_time(h)
    pts = A.as_array() if S.phase == VECTOR else list(A.points)
    images = _evolve(S, h, pts)
    forward = set_distance(S, images, pts)
    if A.support is not None:
        sup = np.asarray(A.support) if S.phase == VECTOR else list(A.support)
        images = _evolve(S, h, sup)
    return max(forward, set_distance(S, pts, images))


def omega_estimate(S: SemigroupHandle, seeds, D_list: Sequence[float], eps: float, keep_last: int = 2,
                   invariance_times: Sequence | None = None, threads: int = 1) -> AttractorEstimate:
    """Approximate the omega-limit set of ``seeds`` by an ``eps``-net of deeply evolved states.

    Every seed is evolved by the deep time and the probe spread of each depth
    in ``D_list``; the states of the last ``keep_last`` depths are thinned to
    an ``eps``-net. Invariance defects are recorded for ``invariance_times``
    (default: the cone's interior witness).
    """
    D_list = [float(D) for D in D_list]
    if not D_list or any(b <= a for a, b in zip(D_list, D_list[1:])):
        raise ValueError("D_list must be a nonempty increasing sequence")
    S.arrow.deep_time(D_list[-1])
    if S.phase == FIELD:
        seeds = list(seeds)
    collected = []
    max_norm = 0.0
    keep_from = max(0, len(D_list) - keep_last)
    for i, D in enumerate(D_list):
        for h in S.arrow.probe_times(D):
            states = _evolve(S, h, seeds, threads)
            max_norm = max(max_norm, _norm(S, states))
            if i >= keep_from:
                collected.extend(list(states))
    if S.phase == VECTOR:
        collected = np.unique(np.asarray(collected), axis=0)
    net = eps_net(S, collected, eps)
    est = AttractorEstimate(net, float(eps), D_list[keep_from:], provenance=f"{S.name}: {len(seeds)} seeds",
                            max_state_norm=max_norm, phase=S.phase, support=collected)
    times = invariance_times if invariance_times is not None else [S.cone.interior_witness]
    for h in times:
        est.invariance.append((list(map(float, h)), strict_invariance_defect(est, S, h)))
    log.debug("omega estimate %s: %d net points, invariance %.3g", S.name, len(net), est.invariance_defect)
    return est


def attraction_profile(S: SemigroupHandle, seeds, K, D_list: Sequence[float], direction_id: str | None = None,
                       threads: int = 1) -> RateProfile:
    """Sup over seeds and probe times of depth >= D of the distance to the target ``K``."""
    if not hasattr(K, "distance"):
        K = PointSet(list(K))
    S.arrow.deep_time(max(D_list))
    if S.phase == FIELD:
        seeds = list(seeds)
    entries = []
    for D in D_list:
        worst = 0.0
        for h in S.arrow.probe_times(D):
            states = _evolve(S, h, seeds, threads)
            for x in (states if S.phase == FIELD else np.atleast_2d(states)):
                worst = max(worst, K.distance(S, x))
        entries.append((D, worst, direction_id))
    return RateProfile(entries, getattr(K, "label", "target"))


def directional_compare(S: SemigroupHandle, l1: DirectionSpec, l2: DirectionSpec, seeds, tau_list, eps: float,
                        full: AttractorEstimate | None = None, quantize: Callable | None = None,
                        threads: int = 1) -> dict:
    """Hausdorff distances between the omega-nets of two directional semigroups and the full one."""
    return directional_uniformity(S, [l1, l2], seeds, tau_list, eps, full, quantize, threads)


def directional_uniformity(S: SemigroupHandle, directions: Sequence[DirectionSpec], seeds, tau_list, eps: float,
                           full: AttractorEstimate | None = None, quantize: Callable | None = None,
                           threads: int = 1) -> dict:
    """Pairwise comparison of directional omega-nets with each other and with the full net."""
    for l in directions:
        l.check_interior(S.cone)
    if full is None:
        full = omega_estimate(S, seeds, tau_list, eps, threads=threads)
    nets = []
    for l in directions:
        Sl = directional_semigroup(S, l, quantize)
        nets.append(omega_estimate(Sl, seeds, tau_list, eps, threads=threads))
    pair = {}
    to_full = {}
    for i, a in enumerate(nets):
        to_full[i] = hausdorff(S, a.points, full.points)
        for j in range(i + 1, len(nets)):
            pair[(i, j)] = hausdorff(S, a.points, nets[j].points)
    worst = max(list(pair.values()) + list(to_full.values()))
    return {
        "directions": [list(l.l) for l in directions],
        "eps": eps,
        "pairwise": {f"{i}-{j}": d for (i, j), d in pair.items()},
        "to_full": {str(i): d for i, d in to_full.items()},
        "max_distance": worst,
        "pass": bool(worst <= 2 * eps),
        "nets": nets,
        "full": full,
    }


def backward_extension(A: AttractorEstimate, S: SemigroupHandle, u0, h_step, n_steps: int):
    """Greedy chain of predecessors within the net; returns ``(chain, max one-step defect)``.

    Each step picks the net point ``v`` whose image ``S(h_step) v`` is closest
    to the current point, a numerical witness of complete trajectories through ``u0``.
    """
    h = S.check_time(h_step)
    if not S.cone.boundary_distance(h) > 0:
        raise ValueError("h_step must be interior to the cone")
    pts = A.as_array() if S.phase == VECTOR else list(A.points)
    d0 = float(S.distances_to(u0, pts).min())
    if d0 > 2 * A.epsilon:
        raise NotOnAttractor(f"start point is {d0:.3g} from the attractor estimate (eps {A.epsilon:g})")
    images = _evolve(S, h, pts)
    chain = [u0]
    current = u0
    defect = 0.0
    for _ in range(n_steps):
        d = S.distances_to(current, images)
        k = int(np.argmin(d))
        defect = max(defect, float(d[k]))
        current = pts[k]
        chain.append(current)
    return chain, defect
