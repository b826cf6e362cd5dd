"""Closed cones of multidimensional time and time-point helpers."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from mpattractors.errors import DimensionMismatch

MAX_TIME_DIM = 4


def as_time(h, dim: int | None = None) -> np.ndarray:
    """Validate and convert ``h`` to a finite 1-d float array."""
    arr = np.atleast_1d(np.asarray(h, dtype=float))
    if arr.ndim != 1:
        raise DimensionMismatch(f"time point must be a vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"time point has non-finite components: {arr}")
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"expected time dimension {dim}, got {arr.shape[0]}")
    return arr


@dataclass(frozen=True)
class Cone:
    """A closed cone in R^m.

    Two families are supported: ``orthant`` cones R_+^p x R^q (the first ``p``
    coordinates are constrained) and ``halfspace`` cones {h : <h, n> >= 0}.
    Use the :meth:`orthant` and :meth:`halfspace` constructors.
    """

    kind: str
    p: int = 0
    q: int = 0
    normal: tuple[float, ...] = ()
    _unit: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "orthant":
            if self.p < 0 or self.q < 0 or not 1 <= self.p + self.q <= MAX_TIME_DIM:
                raise ValueError(f"unsupported orthant product dimensions p={self.p}, q={self.q}")
            unit = np.zeros(0)
        elif self.kind == "halfspace":
            n = np.asarray(self.normal, dtype=float)
            if not 1 <= n.size <= MAX_TIME_DIM or not np.linalg.norm(n) > 0:
                raise ValueError("half-space normal must be a nonzero vector of length 1..4")
            unit = n / np.linalg.norm(n)
        else:
            raise ValueError(f"unknown cone kind {self.kind!r}")
        object.__setattr__(self, "_unit", unit)

    @classmethod
    def orthant(cls, p: int, q: int = 0) -> "Cone":
        return cls("orthant", p=int(p), q=int(q))

    @classmethod
    def halfspace(cls, normal) -> "Cone":
        return cls("halfspace", normal=tuple(float(x) for x in normal))

    @property
    def dim(self) -> int:
        return self.p + self.q if self.kind == "orthant" else len(self.normal)

    def contains(self, h) -> bool:
        h = as_time(h, self.dim)
        if self.kind == "orthant":
            return bool(np.all(h[: self.p] >= 0.0))
        return bool(np.dot(h, self.normal) >= 0.0)

    def boundary_distance(self, h) -> float:
        """Euclidean distance from a point of the cone to the cone boundary.

        The whole space (``p == 0``) has empty boundary, so the distance is
        infinite there.
        """
        h = as_time(h, self.dim)
        if self.kind == "orthant":
            if self.p == 0:
                return float("inf")
            return float(max(np.min(h[: self.p]), 0.0))
        return float(max(np.dot(h, self._unit), 0.0))

    @property
    def interior_witness(self) -> np.ndarray:
        """A point at distance exactly 1 from the boundary."""
        if self.kind == "orthant":
            w = np.zeros(self.dim)
            w[: self.p] = 1.0
            return w
        return self._unit.copy()

    def frame(self) -> tuple[np.ndarray, int]:
        """Orthonormal frame whose first ``k`` columns span the constrained directions.

        Returns ``(Q, k)``: orthant cones use the identity with ``k = p``, a
        half-space uses its unit normal followed by a tangent basis with ``k = 1``.
        """
        if self.kind == "orthant":
            return np.eye(self.dim), self.p
        m = self.dim
        basis = np.column_stack([self._unit, np.eye(m)])
        q, _ = np.linalg.qr(basis)
        q = q[:, :m]
        if np.dot(q[:, 0], self._unit) < 0:
            q[:, 0] = -q[:, 0]
        return q, 1

    def deep_point(self, depth: float) -> np.ndarray:
        q, k = self.frame()
        return depth * q[:, :k].sum(axis=1) if k else np.zeros(self.dim)

    def spread_offsets(self, count: int = 8, step: float = 1.0) -> list[np.ndarray]:
        """Deterministic nonzero offsets that keep depth from decreasing.

        Offsets are enumerated lexicographically from {0, 1} on constrained
        directions times {-1, 0, 1} on free directions, then repeated at
        multiples of ``step`` until ``count`` are collected.
        """
        q, k = self.frame()
        choices = [(0, 1)] * k + [(-1, 0, 1)] * (self.dim - k)
        base = [np.array(c, dtype=float) for c in itertools.product(*choices) if any(c)]
        out: list[np.ndarray] = []
        mult = 1
        while len(out) < count:
            for c in base:
                off = q @ (c * step * mult)
                if self.kind == "halfspace":
                    # tangent offsets must not dip below the boundary through rounding
                    off = off + max(0.0, -float(np.dot(off, self._unit))) * self._unit
                out.append(off)
                if len(out) == count:
                    break
            mult += 1
        return out


def cone_contains(cone: Cone, h) -> bool:
    return cone.contains(h)
