"""Time arrows: admissible sets of times and their depth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mpattractors.errors import NoDeepTime, NotInSigma
from mpattractors.phase.cone import Cone, as_time
from mpattractors.phase.grid import GridDomain

PROBE_COUNT = 8


@dataclass(frozen=True, eq=False)
class TimeArrow:
    """Admissible set Sigma inside a cone.

    With ``domain=None`` the arrow is the whole cone and depth is the distance
    to the cone boundary. With a domain, Sigma is the domain itself inside
    C = R^d and depth is the distance to its Boundary cells.
    """

    cone: Cone
    domain: GridDomain | None = None
    probe_step: float = 1.0

    def __post_init__(self):
        if self.domain is not None:
            d = self.domain.ndim
            if self.cone.kind != "orthant" or self.cone.p != 0 or self.cone.q != d:
                raise ValueError("a domain arrow requires the whole-space cone R^d")

    @classmethod
    def whole_cone(cls, cone: Cone, probe_step: float = 1.0) -> "TimeArrow":
        return cls(cone, None, probe_step)

    @classmethod
    def domain_arrow(cls, domain: GridDomain) -> "TimeArrow":
        return cls(Cone.orthant(0, domain.ndim), domain)

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def capacity(self) -> float:
        """Largest depth the arrow can deliver (infinite for whole cones)."""
        return float("inf") if self.domain is None else self.domain.max_depth

    def _cell(self, h: np.ndarray) -> tuple[int, ...]:
        cell = self.domain.cell_of(h)
        if not self.domain.in_bounds(cell) or not self.domain.active[cell]:
            raise NotInSigma(f"time {h} is not in the admissible domain")
        return cell

    def contains(self, h) -> bool:
        h = as_time(h, self.dim)
        if self.domain is None:
            return self.cone.contains(h)
        try:
            self._cell(h)
        except NotInSigma:
            return False
        return True

    def depth(self, h) -> float:
        h = as_time(h, self.dim)
        if self.domain is None:
            if not self.cone.contains(h):
                raise NotInSigma(f"time {h} lies outside the cone")
            return self.cone.boundary_distance(h)
        return float(self.domain.depth[self._cell(h)])

    def deep_time(self, depth: float) -> np.ndarray:
        """Deterministic admissible time of depth at least ``depth``."""
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if self.domain is None:
            return self.cone.deep_point(depth)
        if depth > self.domain.max_depth:
            raise NoDeepTime(depth, self.domain.max_depth)
        return self.domain.position(self.domain.deepest_cell())

    def probe_times(self, depth: float, count: int = PROBE_COUNT) -> list[np.ndarray]:
        """The deep time plus ``count`` deterministic admissible times of depth >= ``depth``."""
        base = self.deep_time(depth)
        if self.domain is None:
            return [base] + [base + off for off in self.cone.spread_offsets(count, self.probe_step)]
        dom = self.domain
        cells = np.argwhere(dom.depth >= depth)
        pick = np.unique(np.linspace(0, len(cells) - 1, num=min(count, len(cells))).round().astype(int))
        return [base] + [dom.position(cells[i]) for i in pick]


def depth(arrow: TimeArrow, h) -> float:
    return arrow.depth(h)


def deep_time_sampler(arrow: TimeArrow, D: float) -> np.ndarray:
    return arrow.deep_time(D)
