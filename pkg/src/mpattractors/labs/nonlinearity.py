"""Polynomial nonlinearities f with the superlinearity certificate f(u) u >= -C + |u|^(2 + eps)."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as P

from mpattractors.errors import UnsupportedNonlinearity

CERT_SAMPLE_RANGE = 100.0


@dataclass(frozen=True)
class Nonlinearity:
    """A polynomial reaction term.

    Build with :meth:`cubic` (``u^3 - u``), :meth:`plateau` (``u prod_k (u - k)^2``)
    or :meth:`custom`. ``coefficients`` are in increasing degree order. A custom
    nonlinearity may carry ``factors`` (root, multiplicity) pairs; without them
    its equilibria are not computed.
    """

    kind: str
    coefficients: tuple[float, ...]
    N: int = 0
    factors: tuple[tuple[float, int], ...] | None = None
    certificate: tuple[float, float] | None = field(default=None, compare=False)

    @classmethod
    def cubic(cls) -> "Nonlinearity":
        return cls("cubic", (0.0, -1.0, 0.0, 1.0), factors=((-1.0, 1), (0.0, 1), (1.0, 1)),
                   certificate=(1.1, 1.0))

    @classmethod
    def plateau(cls, N: int) -> "Nonlinearity":
        if N < 1:
            raise ValueError("plateau polynomial needs N >= 1")
        coef = np.array([0.0, 1.0])
        for k in range(1, N + 1):
            coef = P.polymul(coef, P.polypow([-float(k), 1.0], 2))
        factors = ((0.0, 1),) + tuple((float(k), 2) for k in range(1, N + 1))
        return cls("plateau", tuple(float(c) for c in coef), N=N, factors=factors)

    @classmethod
    def custom(cls, coefficients=None, factors=None, leading: float = 1.0) -> "Nonlinearity":
        if factors is not None:
            coef = np.array([float(leading)])
            for root, mult in factors:
                coef = P.polymul(coef, P.polypow([-float(root), 1.0], int(mult)))
            facs = tuple((float(r), int(m)) for r, m in factors)
            return cls("custom", tuple(float(c) for c in coef), factors=facs)
        if coefficients is None:
            raise ValueError("custom nonlinearity needs coefficients or factors")
        return cls("custom", tuple(float(c) for c in np.trim_zeros(np.asarray(coefficients, float), "b")))

    @classmethod
    def from_config(cls, cfg: dict) -> "Nonlinearity":
        kind = cfg.get("kind", "cubic")
        if kind == "cubic":
            return cls.cubic()
        if kind == "plateau":
            return cls.plateau(int(cfg["N"]))
        if kind == "custom":
            return cls.custom(cfg.get("coefficients"), cfg.get("factors"), cfg.get("leading", 1.0))
        raise ValueError(f"unknown nonlinearity kind {kind!r}")

    def to_config(self) -> dict:
        if self.kind == "plateau":
            return {"kind": "plateau", "N": self.N}
        if self.kind == "custom":
            return {"kind": "custom", "coefficients": list(self.coefficients)}
        return {"kind": self.kind}

    # evaluation -----------------------------------------------------------
    @cached_property
    def _deriv(self) -> np.ndarray:
        return P.polyder(np.asarray(self.coefficients))

    def __call__(self, u):
        if self.kind == "cubic":
            return u * u * u - u
        return P.polyval(u, self.coefficients)

    def derivative(self, u):
        if self.kind == "cubic":
            return 3.0 * u * u - 1.0
        return P.polyval(u, self._deriv)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    # superlinearity --------------------------------------------------------
    def derived_certificate(self, eps: float = 1.0) -> tuple[float, float]:
        """Smallest sampled C (rounded up) with f(u) u >= -C + |u|^(2+eps) on |u| <= 100."""
        u = np.linspace(-CERT_SAMPLE_RANGE, CERT_SAMPLE_RANGE, 400_001)
        gap = np.abs(u) ** (2 + eps) - self(u) * u
        return float(np.ceil(max(gap.max(), 0.0) * 10 + 1) / 10), eps

    def verify_superlinearity(self, certificate: tuple[float, float] | None = None) -> bool:
        """Check the certificate by sampling on |u| <= 100 and by the leading term beyond."""
        C, eps = certificate or self.certificate or self.derived_certificate()
        if eps <= 0:
            return False
        u = np.linspace(-CERT_SAMPLE_RANGE, CERT_SAMPLE_RANGE, 400_001)
        if np.any(self(u) * u < -C + np.abs(u) ** (2 + eps) - 1e-9 * (1 + np.abs(u) ** (2 + eps))):
            return False
        # f(u) u has degree deg + 1; it dominates |u|^(2+eps) at infinity iff that degree
        # is even, exceeds 2 + eps and the leading coefficient is positive
        deg = self.degree + 1
        lead = self.coefficients[-1]
        return deg % 2 == 0 and deg > 2 + eps and lead > 0

    def equilibria(self) -> np.ndarray:
        if self.factors is None:
            raise UnsupportedNonlinearity("custom nonlinearity without factored form")
        return np.array(sorted({r for r, _ in self.factors}))


def equilibrium_set(f: Nonlinearity) -> np.ndarray:
    roots = f.equilibria()
    vals = np.abs(f(roots))
    if np.any(vals > 1e-12):
        raise AssertionError(f"factored roots do not annihilate f: {vals}")
    return roots
