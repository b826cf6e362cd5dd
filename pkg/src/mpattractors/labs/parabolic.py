"""Scalar reaction-diffusion u_t = Lap u - f(u) on periodic boxes, extended by lattice shifts.

Time stepping is Strang-split IMEX: half a reaction step (the exact flow for
the cubic, RK4 substeps otherwise), one backward-Euler diffusion solve done
exactly in Fourier space, and another half reaction step. Both sub-steps are
order preserving, so the scheme keeps the scalar comparison principle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mpattractors.engine.semigroup import FIELD, SemigroupHandle
from mpattractors.errors import NonFiniteState, NonPeriodicAxis
from mpattractors.labs.nonlinearity import Nonlinearity
from mpattractors.phase import Bornology, Cone, Field, GridDomain, TimeArrow

DEFAULT_DT = 1e-2


def logistic_solution(y0, t):
    """Solution of y' = y - y^3: y(t)^2 = y0^2 e^{2t} / (1 + y0^2 (e^{2t} - 1))."""
    y0 = np.asarray(y0, dtype=float)
    e2 = math.exp(2.0 * t)
    with np.errstate(over="ignore", invalid="ignore"):
        return y0 * math.exp(t) / np.sqrt(1.0 + y0 * y0 * (e2 - 1.0))


def comparison_bound(t: float) -> float:
    """Sup-norm bound C_*(t) = (1 - e^{-2t})^{-1/2} reached from arbitrarily large data."""
    return 1.0 / math.sqrt(1.0 - math.exp(-2.0 * t))


@dataclass(frozen=True, eq=False)
class ParabolicProblem:
    domain: GridDomain
    nonlinearity: Nonlinearity
    dt: float = DEFAULT_DT

    def __post_init__(self):
        if not all(self.domain.periodic):
            raise NonPeriodicAxis("the parabolic lab runs on fully periodic boxes")
        if self.domain.ndim not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.nonlinearity.verify_superlinearity():
            raise ValueError("nonlinearity fails its superlinearity certificate")

    @cached_property
    def _symbol(self) -> np.ndarray:
        """Eigenvalues of the periodic 2nd-order difference Laplacian on the rfft grid."""
        h = self.domain.spacing
        shape = self.domain.extents
        lam = np.zeros(shape[:-1] + (shape[-1] // 2 + 1,))
        for ax, n in enumerate(shape):
            k = np.fft.rfftfreq(n) if ax == len(shape) - 1 else np.fft.fftfreq(n)
            ev = (2.0 * np.cos(2.0 * np.pi * k) - 2.0) / (h * h)
            sh = [1] * len(shape)
            sh[ax] = ev.size
            lam = lam + ev.reshape(sh)
        return lam

    def diffuse(self, u: np.ndarray, tau: float) -> np.ndarray:
        """Backward Euler step (I - tau Lap) v = u, solved exactly by FFT."""
        uh = np.fft.rfftn(u)
        return np.fft.irfftn(uh / (1.0 - tau * self._symbol), s=u.shape, axes=tuple(range(u.ndim)))

    def react(self, u: np.ndarray, tau: float) -> np.ndarray:
        """Advance u' = -f(u) by ``tau``."""
        f = self.nonlinearity
        if f.kind == "cubic":
            return logistic_solution(u, tau)
        # RK4 with enough substeps to keep tau * |f'| moderate on the current range
        with np.errstate(over="ignore", invalid="ignore"):
            lip = float(np.abs(f.derivative(u)).max(initial=0.0))
        if not math.isfinite(lip) or tau * lip / 0.2 > 100_000:
            return np.full_like(u, np.inf)
        m = max(1, math.ceil(tau * lip / 0.2))
        k = tau / m
        for _ in range(m):
            a = -f(u)
            b = -f(u + 0.5 * k * a)
            c = -f(u + 0.5 * k * b)
            d = -f(u + k * c)
            u = u + k / 6.0 * (a + 2 * b + 2 * c + d)
        return u

    def step(self, u: np.ndarray, tau: float) -> np.ndarray:
        u = self.react(u, 0.5 * tau)
        if not np.all(np.isfinite(u)):
            return u
        u = self.diffuse(u, tau)
        return self.react(u, 0.5 * tau)

    def step_sizes(self, t: float) -> list[float]:
        n = int(math.floor(t / self.dt + 1e-9))
        steps = [self.dt] * n
        rest = t - n * self.dt
        if rest > 1e-12 * max(1.0, t):
            steps.append(rest)
        return steps


def evolve(p: ParabolicProblem, u0: Field, t: float) -> Field:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if u0.domain.hash != p.domain.hash:
        raise ValueError("initial field lives on another domain")
    u = np.array(u0.values)
    for i, tau in enumerate(p.step_sizes(t)):
        u = p.step(u, tau)
        if not np.all(np.isfinite(u)):
            raise NonFiniteState("parabolic evolution blew up", step=i + 1)
    return Field(p.domain, u)


def shift(u: Field, s) -> Field:
    """(T(s) u)(x) = u(x + s) for an integer cell vector ``s``; exact cyclic permutation."""
    s = np.atleast_1d(np.asarray(s))
    if s.shape != (u.domain.ndim,):
        raise ValueError(f"shift must have {u.domain.ndim} components")
    if not np.array_equal(s, np.rint(s)):
        raise ValueError("shifts must be integer lattice vectors")
    vals = u.values
    for ax, k in enumerate(s.astype(int)):
        if k == 0:
            continue
        if not u.domain.periodic[ax]:
            raise NonPeriodicAxis(f"axis {ax} is not periodic")
        vals = np.roll(vals, -k, axis=ax)
    return Field(u.domain, vals)


def extended_apply(p: ParabolicProblem, h, u: Field) -> Field:
    """S(t, s) = T(s) o S(t) over R_+ x Z^d."""
    h = np.asarray(h, dtype=float)
    if h.shape != (1 + p.domain.ndim,):
        raise ValueError("time point must be (t, s_1, ..., s_d)")
    return shift(evolve(p, u, float(h[0])), h[1:])


def lattice_quantize(h) -> np.ndarray:
    """Round the shift components of ``(t, s)`` to the lattice."""
    h = np.array(h, dtype=float)
    h[1:] = np.rint(h[1:])
    return h


def extended_semigroup(p: ParabolicProblem, norm_bound: float = float("inf"), distance=None) -> SemigroupHandle:
    """The (d+1)-parameter semigroup as an engine handle on the cone R_+ x Z^d."""
    arrow = TimeArrow.whole_cone(Cone.orthant(1, p.domain.ndim))
    return SemigroupHandle(arrow, lambda h, u: extended_apply(p, h, u), FIELD, domain=p.domain,
                           bornology=Bornology(norm_bound), distance=distance, name="parabolic-extended")


def dissipative_check(p: ParabolicProblem, seeds, t: float, tol: float = 0.02) -> dict:
    """Sup-norm of all seeds after time ``t`` against the comparison bound C_*(t)."""
    if p.nonlinearity.kind != "cubic":
        raise ValueError("the comparison bound is derived for the cubic nonlinearity")
    if t < 1:
        raise ValueError("absorption is asserted for t >= 1")
    seeds = list(seeds)
    R = max(u.sup_norm() for u in seeds)
    max_norm = max(evolve(p, u, t).sup_norm() for u in seeds)
    bound = comparison_bound(t)
    return {"max_norm": max_norm, "bound": bound, "pass": bool(max_norm <= bound + tol), "t": float(t), "R": R}


def gradient_sup(u: Field) -> float:
    """Max over cells of the Euclidean norm of the centred-difference gradient."""
    dom = u.domain
    sq = np.zeros(dom.extents)
    for ax in range(dom.ndim):
        g = (dom.neighbor(u.values, ax, 1) - dom.neighbor(u.values, ax, -1)) / (2 * dom.spacing)
        sq += g * g
    return float(np.sqrt(sq[dom.active]).max(initial=0.0))


def smoothing_check(p: ParabolicProblem, seeds, t: float) -> dict:
    if t < 2:
        raise ValueError("smoothing is asserted for t >= 2")
    grads = [gradient_sup(evolve(p, u, t)) for u in seeds]
    return {"max_grad": max(grads), "t": float(t), "per_seed": grads}
