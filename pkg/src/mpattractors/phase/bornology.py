"""Bornologies: intensional families of "bounded" sets checked on finite samples."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class Bornology:
    """Sets whose members have sup-norm at most ``norm_bound`` and pass ``constraint``.

    ``constraint`` is ``None`` or a callable returning the residual of a
    member (for instance the elliptic stencil residual); members with residual
    above ``residual_tol`` are rejected.
    """

    norm_bound: float = float("inf")
    constraint: Callable | None = None
    constraint_name: str = "none"
    residual_tol: float = 1e-8

    def __post_init__(self):
        if not self.norm_bound > 0:
            raise ValueError("norm bound must be positive")

    def member_ok(self, u) -> bool:
        vals = getattr(u, "values", u)
        if float(np.abs(np.asarray(vals)).max(initial=0.0)) > self.norm_bound:
            return False
        if self.constraint is not None and self.constraint(u) > self.residual_tol:
            return False
        return True

    def contains(self, sample: Sequence) -> bool:
        return all(self.member_ok(u) for u in sample)
