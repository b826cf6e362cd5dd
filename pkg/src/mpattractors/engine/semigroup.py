"""Evaluatable multi-parameter semigroups and a few exactly solvable examples."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from mpattractors.errors import DirectionNotInterior, TimeOutsideCone
from mpattractors.phase import Bornology, Cone, GridDomain, LocMetric, TimeArrow, as_time

VECTOR, FIELD = "vector", "field"


@dataclass(frozen=True, eq=False)
class SemigroupHandle:
    """An operator family S(h), h in a cone, acting on vectors or fields.

    ``apply(h, x)`` must accept a stacked ``(n, dim)`` array for vector
    phases. ``distance`` defaults to the Euclidean norm for vectors and to a
    :class:`LocMetric` centred at the deepest cell for fields.
    """

    arrow: TimeArrow
    apply: Callable
    phase: str = VECTOR
    dim: int | None = None
    domain: GridDomain | None = None
    bornology: Bornology = field(default_factory=Bornology)
    distance: Callable | None = None
    name: str = "semigroup"

    def __post_init__(self):
        if self.phase not in (VECTOR, FIELD):
            raise ValueError(f"unknown phase kind {self.phase!r}")
        if self.phase == FIELD and self.domain is None:
            raise ValueError("field phases need a domain")
        if self.distance is None:
            if self.phase == VECTOR:
                dist = lambda a, b: float(np.linalg.norm(np.asarray(a) - np.asarray(b)))
            else:
                dist = LocMetric(self.domain)
            object.__setattr__(self, "distance", dist)

    @property
    def cone(self) -> Cone:
        return self.arrow.cone

    def __call__(self, h, x):
        return self.apply(as_time(h, self.cone.dim), x)

    def check_time(self, h) -> np.ndarray:
        h = as_time(h, self.cone.dim)
        if not self.cone.contains(h):
            raise TimeOutsideCone(f"time {h} is outside the cone")
        return h

    def distances_to(self, x, points) -> np.ndarray:
        """Distances from ``x`` to each element of ``points``."""
        if self.phase == VECTOR:
            pts = np.atleast_2d(np.asarray(points, dtype=float))
            if pts.size == 0:
                return np.zeros(0)
            return np.linalg.norm(pts - np.asarray(x, dtype=float), axis=1)
        return np.array([self.distance(x, p) for p in points])


def semigroup_law_defect(S: SemigroupHandle, h1, h2, u) -> float:
    """Distance between S(h1 + h2) u and S(h1) S(h2) u."""
    h1, h2 = S.check_time(h1), S.check_time(h2)
    return float(S.distance(S.apply(h1 + h2, u), S.apply(h1, S.apply(h2, u))))


# --------------------------------------------------------------------------
# Directions


@dataclass(frozen=True)
class DirectionSpec:
    l: tuple[float, ...]

    @classmethod
    def of(cls, vec) -> "DirectionSpec":
        v = np.asarray(vec, dtype=float)
        return cls(tuple(v / np.linalg.norm(v)))

    @property
    def vector(self) -> np.ndarray:
        return np.asarray(self.l)

    @property
    def kappa(self) -> float:
        return float(self.l[0])

    def check_interior(self, cone: Cone, margin: float = 1e-9) -> None:
        v = self.vector
        if abs(np.linalg.norm(v) - 1) > 1e-12:
            raise DirectionNotInterior("direction is not a unit vector")
        if not cone.contains(v) or cone.boundary_distance(v) <= margin:
            raise DirectionNotInterior(f"direction {self.l} is not interior to the cone")


def directional_semigroup(S: SemigroupHandle, l: DirectionSpec, quantize: Callable | None = None) -> SemigroupHandle:
    """The one-parameter semigroup tau -> S(tau l) over R_+.

    ``quantize`` maps the real time ``tau l`` to an admissible time of ``S``
    (used by lattice-shift semigroups).
    """
    l.check_interior(S.cone)
    vec = l.vector
    q = quantize or (lambda h: h)

    def apply(tau, x):
        return S.apply(q(float(tau[0]) * vec), x)

    return SemigroupHandle(TimeArrow.whole_cone(Cone.orthant(1, 0), S.arrow.probe_step), apply, S.phase, S.dim,
                           S.domain, S.bornology, S.distance, f"{S.name}[l={np.round(vec, 4).tolist()}]")


# --------------------------------------------------------------------------
# Exactly solvable examples


def linear_contraction(p: int = 2) -> SemigroupHandle:
    """S(h) x = exp(-(h_1 + ... + h_p)) x on the orthant R_+^p."""

    def apply(h, x):
        return np.exp(-float(np.sum(h))) * np.asarray(x, dtype=float)

    return SemigroupHandle(TimeArrow.whole_cone(Cone.orthant(p, 0)), apply, VECTOR, 1, name="linear-contraction")


def radial_logistic(r0, t):
    """Closed-form solution of r' = r (1 - r^2)."""
    r0 = np.asarray(r0, dtype=float)
    e2 = np.exp(2.0 * t)
    return r0 * np.exp(t) / np.sqrt(1.0 + r0 * r0 * (e2 - 1.0))


def rotation_contraction() -> SemigroupHandle:
    """Rotation by angle ``s`` composed with the radial flow r' = r(1 - r^2) for time ``t``.

    Times are ``(t, s)`` in R_+ x R; the attractor is the closed unit disk.
    """

    def apply(h, x):
        t, s = float(h[0]), float(h[1])
        x = np.asarray(x, dtype=float)
        pts = np.atleast_2d(x)
        r = np.hypot(pts[:, 0], pts[:, 1])
        with np.errstate(invalid="ignore", divide="ignore"):
            scale = np.where(r > 0, radial_logistic(r, t) / np.where(r > 0, r, 1.0), np.exp(t))
        c, sn = np.cos(s), np.sin(s)
        y = np.column_stack([c * pts[:, 0] - sn * pts[:, 1], sn * pts[:, 0] + c * pts[:, 1]]) * scale[:, None]
        return y.reshape(x.shape)

    return SemigroupHandle(TimeArrow.whole_cone(Cone.orthant(1, 1)), apply, VECTOR, 2, name="rotation-contraction")


def shift_semigroup(domain: GridDomain) -> SemigroupHandle:
    """Integer-cell cyclic shifts (S(s) u)(x) = u(x + s) on a periodic grid."""
    from mpattractors.labs.parabolic import shift

    def apply(h, u):
        return shift(u, np.rint(h).astype(int))

    return SemigroupHandle(TimeArrow.whole_cone(Cone.orthant(0, domain.ndim)), apply, FIELD, domain=domain,
                           name="shift")


def ball_sample(radius: float, dim: int = 2, n_radii: int = 200, n_angles: int = 96,
                r_min_fraction: float = 1e-8) -> np.ndarray:
    """Deterministic sample of the closed ball, geometrically refined towards the centre.

    Includes the centre, ``n_radii`` log-spaced radii down to
    ``radius * r_min_fraction`` and ``n_angles`` directions (dim 2) or the two
    endpoints (dim 1).
    """
    radii = radius * np.logspace(np.log10(r_min_fraction), 0.0, n_radii)
    if dim == 1:
        pts = np.concatenate([[0.0], radii, -radii])[:, None]
        return pts
    if dim != 2:
        raise ValueError("ball_sample supports dim 1 or 2")
    ang = 2 * np.pi * np.arange(n_angles) / n_angles
    pts = (radii[:, None, None] * np.stack([np.cos(ang), np.sin(ang)], axis=-1)[None]).reshape(-1, 2)
    return np.vstack([np.zeros((1, 2)), pts])
