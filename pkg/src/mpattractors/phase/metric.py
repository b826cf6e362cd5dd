"""Metrics on field phase spaces: the local-uniform metric and windowed sup distances."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from mpattractors.errors import DomainMismatch
from mpattractors.phase.grid import Field, GridDomain, same_domain


def _cell_offsets(domain: GridDomain, center) -> np.ndarray:
    """Euclidean distance, in cells, from ``center`` to every cell (minimum image on periodic axes)."""
    sq = np.zeros(domain.extents)
    for ax, (n, c) in enumerate(zip(domain.extents, center)):
        d = np.abs(np.arange(n) - c)
        if domain.periodic[ax]:
            d = np.minimum(d, n - d)
        shape = [1] * domain.ndim
        shape[ax] = n
        sq = sq + (d.reshape(shape) ** 2)
    return np.sqrt(sq)


@dataclass(frozen=True, eq=False)
class LocMetric:
    """Capped weighted-sup metric of local uniform convergence.

    ``d(u, v) = sum_k 2^-k min(1, sup_{|x - center| <= k cells} |u - v|)`` for
    ``k = 1, 2, ...``; balls beyond the grid contribute the global sup.
    """

    domain: GridDomain
    center: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", self.domain.deepest_cell())
        if len(self.center) != self.domain.ndim or not self.domain.in_bounds(self.center):
            raise DomainMismatch(f"metric centre {self.center} outside the domain grid")

    @cached_property
    def _levels(self) -> tuple[np.ndarray, int]:
        lev = np.ceil(_cell_offsets(self.domain, self.center) - 1e-12).astype(np.int64)
        lev = lev[self.domain.active]
        return lev, int(lev.max(initial=0))

    @property
    def radii(self) -> np.ndarray:
        return np.arange(1, self._levels[1] + 1)

    def distance_values(self, a: np.ndarray, b: np.ndarray) -> float:
        diff = np.abs(np.asarray(a) - np.asarray(b))[self.domain.active]
        lev, kmax = self._levels
        kmax = max(kmax, 1)
        per_level = np.zeros(kmax + 1)
        np.maximum.at(per_level, lev, diff)
        ball_sup = np.maximum.accumulate(per_level)[1:]
        k = np.arange(1, kmax + 1)
        total = np.sum(np.ldexp(np.minimum(1.0, ball_sup), -k))
        return float(total + np.ldexp(min(1.0, ball_sup[-1]), -kmax))

    def __call__(self, u: Field, v: Field) -> float:
        same_domain(u, v)
        if u.domain.hash != self.domain.hash:
            raise DomainMismatch("metric and fields live on different domains")
        return self.distance_values(u.values, v.values)


def loc_distance(metric: LocMetric, u: Field, v: Field) -> float:
    return metric(u, v)


def window_cells(domain: GridDomain, radius: float = 1.0) -> int:
    """Radius in cells of the discrete ball of physical radius ``radius``."""
    return int(np.ceil(radius / domain.spacing - 1e-12))


@dataclass(frozen=True, eq=False)
class WindowedSup:
    """Sup distance over the discrete unit ball around ``center`` (active cells only)."""

    domain: GridDomain
    center: tuple[int, ...] = field(default=None)
    radius: float = 1.0

    def __post_init__(self):
        if self.center is None:
            object.__setattr__(self, "center", self.domain.deepest_cell())

    @cached_property
    def window(self) -> np.ndarray:
        r = window_cells(self.domain, self.radius)
        return (_cell_offsets(self.domain, self.center) <= r + 1e-12) & self.domain.active

    def distance_values(self, a: np.ndarray, b) -> float:
        w = self.window
        return float(np.abs(np.asarray(a)[w] - (np.asarray(b)[w] if np.ndim(b) else b)).max(initial=0.0))

    def __call__(self, u: Field, v: Field) -> float:
        same_domain(u, v)
        return self.distance_values(u.values, v.values)
