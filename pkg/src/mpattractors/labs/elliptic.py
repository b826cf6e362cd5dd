"""Semilinear Dirichlet problems Lap u = f(u) on masked grids and their plateau structure.

The discrete Laplacian is the standard 2d+1 point stencil on Interior cells;
Boundary cells carry the Dirichlet data. Solutions are found by pseudo-time
continuation of u_tau = Lap u - f(u) followed by damped Newton, and every
accepted solution is re-checked by :func:`stencil_residual`, which evaluates
the stencil directly on the array and shares no code with the sparse assembly.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import pyamg
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import ndimage
from scipy.interpolate import RegularGridInterpolator

from mpattractors.engine.omega import RateProfile
from mpattractors.engine.semigroup import FIELD, SemigroupHandle
from mpattractors.errors import EmptyRegion, NoConvergence, NonFiniteState, NotSemiInvariant
from mpattractors.labs.nonlinearity import Nonlinearity, equilibrium_set
from mpattractors.phase import BOUNDARY, EXTERIOR, Field, GridDomain, TimeArrow
from mpattractors.phase.metric import window_cells

log = logging.getLogger(__name__)

CERT_TOL = 1e-8

__all__ = [
    "CERT_TOL",
    "ConstantGuess",
    "EllipticProblem",
    "Given",
    "HarmonicExtension",
    "PlateauAssignment",
    "PlateauComponent",
    "SolveResult",
    "SolverOptions",
    "WindowConstants",
    "attraction_profile_elliptic",
    "constant_data",
    "equilibrium_set",
    "fourier_data",
    "interior_bound_check",
    "interior_gradient_check",
    "piecewise_data",
    "plateau_assign",
    "profile_monotone_check",
    "prolong",
    "solve",
    "solve_elliptic",
    "stencil_residual",
    "subharmonic_defect",
    "trajectory_shift_closure_check",
    "translation_semigroup",
]


# --------------------------------------------------------------------------
# Boundary data


def constant_data(domain: GridDomain, c: float) -> np.ndarray:
    return np.where(domain.boundary, float(c), 0.0)


def piecewise_data(domain: GridDomain, values, axis: int = 0, splits=(0.0,)) -> np.ndarray:
    """``values[i]`` on Boundary cells whose ``axis`` coordinate falls in the i-th slab cut at ``splits``."""
    values = [float(v) for v in values]
    if len(values) != len(splits) + 1:
        raise ValueError("piecewise data needs one value more than split points")
    x = domain.coords()[axis]
    slab = np.searchsorted(np.asarray(splits, dtype=float), x, side="right")
    return np.where(domain.boundary, np.asarray(values)[slab], 0.0)


def fourier_data(domain: GridDomain, mean: float, terms, inner_terms=None, split_radius: float | None = None):
    """``mean + sum a cos(m theta + phase)`` over ``terms`` = [(m, a, phase), ...] in polar angle.

    With ``split_radius``, Boundary cells closer to the origin use ``inner_terms``.
    """
    if domain.ndim != 2:
        raise ValueError("Fourier boundary data needs a 2-d domain")
    x, y = domain.coords()
    theta = np.arctan2(y, x)

    def series(tt):
        out = np.full(theta.shape, float(mean))
        for m, a, ph in tt:
            out += float(a) * np.cos(float(m) * theta + float(ph))
        return out

    g = series(terms)
    if split_radius is not None:
        g = np.where(np.hypot(x, y) < split_radius, series(inner_terms or []), g)
    return np.where(domain.boundary, g, 0.0)


# --------------------------------------------------------------------------
# Problem and discrete operator


@dataclass(frozen=True, eq=False)
class EllipticProblem:
    """Lap u = f(u) in the Interior cells, u = ``boundary_data`` on Boundary cells.

    ``boundary_data`` has the domain's extents; only Boundary entries are read.
    """

    domain: GridDomain
    boundary_data: np.ndarray = field(repr=False)
    nonlinearity: Nonlinearity

    def __post_init__(self):
        g = np.where(self.domain.boundary, np.asarray(self.boundary_data, dtype=float), 0.0)
        if g.shape != self.domain.extents:
            raise ValueError("boundary data must have the domain's extents")
        if not np.all(np.isfinite(g)):
            raise ValueError("boundary data must be finite")
        g.setflags(write=False)
        object.__setattr__(self, "boundary_data", g)
        if not self.nonlinearity.verify_superlinearity():
            raise ValueError("nonlinearity fails its superlinearity certificate")

    @cached_property
    def hash(self) -> str:
        h = hashlib.sha256()
        h.update(self.domain.hash.encode())
        h.update(self.boundary_data[self.domain.boundary].astype("<f8").tobytes())
        h.update(json.dumps(self.nonlinearity.to_config(), sort_keys=True).encode())
        return h.hexdigest()[:16]

    @property
    def unknowns(self) -> int:
        return int(self.domain.interior.sum())

    @cached_property
    def operator(self) -> tuple[sp.csr_matrix, np.ndarray]:
        """(L, b) with Lap_h u = L u_I + b on Interior cells."""
        dom = self.domain
        h2 = dom.spacing**2
        interior = dom.interior
        idx = np.full(dom.extents, -1, dtype=np.int64)
        idx[interior] = np.arange(self.unknowns)
        rows, cols, vals = [], [], []
        b = np.zeros(self.unknowns)
        me = idx[interior]
        diag = np.zeros(self.unknowns)
        for ax in range(dom.ndim):
            for step in (1, -1):
                nb_idx = dom.neighbor(idx, ax, step, fill=-1)[interior]
                nb_g = dom.neighbor(self.boundary_data, ax, step, fill=0.0)[interior]
                inner = nb_idx >= 0
                rows.append(me[inner])
                cols.append(nb_idx[inner])
                vals.append(np.full(int(inner.sum()), 1.0 / h2))
                b[~inner] += nb_g[~inner] / h2
                diag -= 1.0 / h2
        rows.append(me)
        cols.append(me)
        vals.append(diag)
        n = self.unknowns
        L = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n)).tocsr()
        L.sum_duplicates()
        return L, b

    def to_field(self, u_int: np.ndarray) -> Field:
        vals = np.array(self.boundary_data)
        vals[self.domain.interior] = u_int
        return Field(self.domain, vals)

    def residual_vector(self, u_int: np.ndarray) -> np.ndarray:
        L, b = self.operator
        return L @ u_int + b - self.nonlinearity(u_int)


def stencil_residual(p: EllipticProblem, u: Field) -> float:
    """Max over Interior cells of |Lap_h u - f(u)|, evaluated in one pass over a padded array.

    Boundary entries of ``u`` are replaced by the problem's data first, so a
    field that violates the Dirichlet condition is judged on the problem itself.
    """
    dom = p.domain
    vals = np.where(dom.boundary, p.boundary_data, u.values)
    pad = [(1, 1)] * dom.ndim
    ext = vals
    for ax, per in enumerate(dom.periodic):
        w = [(0, 0)] * dom.ndim
        w[ax] = (1, 1)
        ext = np.pad(ext, w, mode="wrap" if per else "constant")
    core = tuple(slice(1, -1) for _ in pad)
    lap = -2.0 * dom.ndim * ext[core]
    for ax in range(dom.ndim):
        lo = list(core)
        hi = list(core)
        lo[ax] = slice(0, -2)
        hi[ax] = slice(2, None)
        lap = lap + ext[tuple(lo)] + ext[tuple(hi)]
    lap /= dom.spacing**2
    r = np.abs(lap - p.nonlinearity(vals))[dom.interior]
    return float(r.max(initial=0.0))


# --------------------------------------------------------------------------
# Initial guesses


@dataclass(frozen=True)
class HarmonicExtension:
    """Discrete harmonic function with the problem's boundary data."""


@dataclass(frozen=True)
class ConstantGuess:
    c: float = 0.0


@dataclass(frozen=True, eq=False)
class Given:
    field: Field


def prolong(u: Field, fine: GridDomain) -> Field:
    """Interpolate ``u`` (piecewise linear) onto another domain covering the same region."""
    src = u.domain
    vals = np.array(u.values)
    if not src.active.all():
        # extend by nearest active value so interpolation near the boundary ignores Exterior zeros
        _, ind = ndimage.distance_transform_edt(~src.active, return_indices=True)
        vals = vals[tuple(ind)]
    axes = [src.axis_coords(a) for a in range(src.ndim)]
    pts = np.stack([c.ravel() for c in fine.coords()], axis=-1)
    for a, per in enumerate(src.periodic):
        if per:
            period = src.extents[a] * src.spacing
            lo = axes[a][0]
            pts[:, a] = lo + np.mod(pts[:, a] - lo, period)
            axes[a] = np.append(axes[a], axes[a][0] + period)
            vals = np.concatenate([vals, np.take(vals, [0], axis=a)], axis=a)
    interp = RegularGridInterpolator(axes, vals, bounds_error=False, fill_value=None)
    return Field(fine, interp(pts).reshape(fine.extents))


# --------------------------------------------------------------------------
# Solver


@dataclass(frozen=True)
class SolverOptions:
    dt: float = 0.1
    dt_max: float = 1e12
    newton_switch: float = 1e-3
    newton_tol: float = 1e-10
    max_iters: int = 400
    max_halvings: int = 30
    direct_limit: int = 50_000


@dataclass
class SolveResult:
    field: Field
    residual: float
    iters: int
    history: list[float]
    newton_steps: int = 0

    def certificate(self) -> dict:
        return {"residual": self.residual, "iters": self.iters, "newton_steps": self.newton_steps}


class _LinearSolver:
    """Solves (sigma I - L + diag(d)) x = r; direct for small systems, AMG-preconditioned GMRES otherwise."""

    def __init__(self, L: sp.csr_matrix, direct_limit: int):
        self.L = L
        self.n = L.shape[0]
        self.direct = self.n <= direct_limit
        self.eye = sp.identity(self.n, format="csr")
        self._M = None
        self._sigma = 0.0

    def _matrix(self, sigma: float, d: np.ndarray) -> sp.csr_matrix:
        return (sp.diags(sigma + d, format="csr") - self.L).tocsr()

    def _build(self, A, sigma: float):
        # pyamg draws spectral-radius start vectors from the global numpy RNG;
        # pin it so identical inputs give bit-identical hierarchies
        saved = np.random.get_state()
        np.random.seed(0)
        try:
            ml = pyamg.smoothed_aggregation_solver(A, max_coarse=500)
        finally:
            np.random.set_state(saved)
        self._M = ml.aspreconditioner(cycle="V")
        self._sigma = sigma

    def __call__(self, sigma: float, d: np.ndarray, r: np.ndarray, rtol: float) -> np.ndarray:
        A = self._matrix(sigma, d)
        if self.direct:
            return spla.spsolve(A.tocsc(), r)
        # the shift changes the low modes a lot; a hierarchy built for another shift is slow to use
        if self._M is not None and not 0.25 <= (sigma + 1.0) / (self._sigma + 1.0) <= 4.0:
            self._M = None
        for _ in range(2):
            if self._M is None:
                self._build(A, sigma)
            count = [0]
            x, info = spla.gmres(A, r, rtol=rtol, atol=0.0, restart=60, maxiter=5, M=self._M,
                                 callback=lambda _: count.__setitem__(0, count[0] + 1), callback_type="pr_norm")
            if count[0] > 40:
                self._M = None  # stale preconditioner: rebuild on the current matrix next time
            if info == 0:
                return x
        return x


def _initial(p: EllipticProblem, init, lin: _LinearSolver) -> np.ndarray:
    n = p.unknowns
    if isinstance(init, ConstantGuess):
        return np.full(n, float(init.c))
    if isinstance(init, Given):
        if init.field.domain.hash != p.domain.hash:
            raise ValueError("initial field lives on another domain")
        return np.array(init.field.values[p.domain.interior])
    if isinstance(init, HarmonicExtension):
        _, b = p.operator
        g = p.boundary_data[p.domain.boundary]
        if n == 0 or g.size == 0:
            return np.zeros(n)
        if np.all(g == g[0]):
            # constant data: its harmonic extension is the constant, without solver round-off
            return np.full(n, float(g[0]))
        return lin(0.0, np.zeros(n), b, 1e-12)
    raise TypeError(f"unknown initial guess {init!r}")


def solve(p: EllipticProblem, init=None, options: SolverOptions | None = None) -> SolveResult:
    """Pseudo-time continuation to near-stationarity, then damped Newton; certified by the stencil oracle."""
    opts = options or SolverOptions()
    init = HarmonicExtension() if init is None else init
    f = p.nonlinearity
    L, _ = p.operator
    lin = _LinearSolver(L, opts.direct_limit)
    u = _initial(p, init, lin)
    if p.unknowns == 0:
        res = stencil_residual(p, p.to_field(u))
        return SolveResult(p.to_field(u), res, 0, [res])

    F = p.residual_vector(u)
    r = float(np.abs(F).max())
    history = [r]
    dt = opts.dt
    it = 0
    newton = 0
    phase = "ptc" if r > opts.newton_switch else "newton"
    while r > opts.newton_tol and it < opts.max_iters:
        it += 1
        if phase == "ptc":
            # linearised backward Euler on u_tau = Lap u - f(u)
            delta = lin(1.0 / dt, f.derivative(u), F, 1e-6)
            trial = u + delta
            with np.errstate(over="ignore", invalid="ignore"):
                F_new = p.residual_vector(trial)
            r_new = float(np.abs(F_new).max()) if np.all(np.isfinite(F_new)) else math.inf
            if not math.isfinite(r_new) or r_new > 10.0 * r:
                dt *= 0.25
                if dt < 1e-12:
                    raise NonFiniteState("pseudo-time continuation collapsed", step=it)
                history.append(r)
                continue
            # switched evolution relaxation: grow the pseudo step as the residual falls
            dt = min(opts.dt_max, dt * min(10.0, max(0.5, r / max(r_new, 1e-300))))
            u, F, r = trial, F_new, r_new
            history.append(r)
            if r <= opts.newton_switch:
                phase = "newton"
            continue

        newton += 1
        delta = lin(0.0, f.derivative(u), F, min(1e-3, max(1e-11, 0.01 * opts.newton_tol / r)))
        lam = 1.0
        for _ in range(opts.max_halvings + 1):
            trial = u + lam * delta
            with np.errstate(over="ignore", invalid="ignore"):
                F_new = p.residual_vector(trial)
            r_new = float(np.abs(F_new).max()) if np.all(np.isfinite(F_new)) else math.inf
            if r_new < (1.0 - 1e-4 * lam) * r:
                break
            lam *= 0.5
        else:
            if r <= CERT_TOL:
                break  # at the round-off floor
            # Newton stalls: fall back to pseudo-time with a moderate step
            phase = "ptc"
            dt = max(opts.dt, 1.0)
            history.append(r)
            continue
        u, F, r = trial, F_new, r_new
        history.append(r)

    out = p.to_field(u)
    cert = stencil_residual(p, out)
    if cert > CERT_TOL:
        raise NoConvergence(f"residual {cert:.3g} after {it} iterations", history)
    log.info("solved %s: %d unknowns, %d iterations (%d Newton), residual %.2e", p.hash, p.unknowns, it, newton, cert)
    return SolveResult(out, cert, it, history, newton)


def solve_elliptic(p: EllipticProblem, init=None, options: SolverOptions | None = None) -> Field:
    return solve(p, init, options).field


# --------------------------------------------------------------------------
# Checks on solutions


def _gradient_norm(u: Field) -> np.ndarray:
    dom = u.domain
    sq = np.zeros(dom.extents)
    for ax in range(dom.ndim):
        g = (dom.neighbor(u.values, ax, 1) - dom.neighbor(u.values, ax, -1)) / (2 * dom.spacing)
        sq += g * g
    return np.sqrt(sq)


def _deep_cells(dom: GridDomain, D: float) -> np.ndarray:
    cells = dom.interior & (dom.depth >= D)
    if not cells.any():
        raise EmptyRegion(f"no cells of depth >= {D:g} (max depth {dom.max_depth:g})")
    return cells


def interior_gradient_check(u: Field, D: float, refined: Field | None = None) -> dict:
    """Max centred-difference gradient over depth >= D; with ``refined`` also the refinement ratio."""
    g = float(_gradient_norm(u)[_deep_cells(u.domain, D)].max())
    rep = {"D": float(D), "max_grad": g, "pass": None}
    if refined is not None:
        g2 = float(_gradient_norm(refined)[_deep_cells(refined.domain, D)].max())
        ratio = g2 / g if g > 0 else (1.0 if g2 == 0 else math.inf)
        rep.update(refined_max_grad=g2, ratio=ratio, **{"pass": bool(g == g2 == 0.0 or 0.5 <= ratio <= 2.0)})
    return rep


def _window_extrema(u: Field, radius: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Max and min of u over the discrete ball B_radius(x) intersected with the active cells."""
    dom = u.domain
    r = window_cells(dom, radius)
    off = np.arange(-r, r + 1)
    foot = np.add.outer(off**2, off**2) <= r * r if dom.ndim == 2 else np.ones(2 * r + 1, dtype=bool)
    crop = tuple(slice(r, r + n) for n in dom.extents)

    def padded(fill):
        arr = np.where(dom.active, u.values, fill)
        for ax, per in enumerate(dom.periodic):
            w = [(0, 0)] * dom.ndim
            w[ax] = (r, r)
            arr = np.pad(arr, w, mode="wrap") if per else np.pad(arr, w, constant_values=fill)
        return arr

    hi = ndimage.maximum_filter(padded(-np.inf), footprint=foot, mode="nearest")[crop]
    lo = ndimage.minimum_filter(padded(np.inf), footprint=foot, mode="nearest")[crop]
    return hi, lo


def _window_distance(u: Field, K) -> np.ndarray:
    """min over k in K of sup over the unit window of |u - k|, per cell."""
    hi, lo = _window_extrema(u)
    K = np.asarray(K, dtype=float)
    d = np.full(u.domain.extents, np.inf)
    for k in K:
        d = np.minimum(d, np.maximum(hi - k, k - lo))
    return d


def attraction_profile_elliptic(u: Field, K, D_list, band: float = 1.0) -> RateProfile:
    """Sup over cells with depth in [D, D + band) of the windowed distance to the constants ``K``.

    Depth bands without cells are skipped and listed in ``profile.skipped``.
    """
    dom = u.domain
    dist = _window_distance(u, K)
    entries, skipped = [], []
    for D in D_list:
        sel = dom.active & (dom.depth >= D) & (dom.depth < D + band)
        if not sel.any():
            skipped.append(float(D))
            continue
        entries.append((float(D), float(dist[sel].max()), None))
    prof = RateProfile(entries, f"constants{[float(k) for k in K]}")
    prof.skipped = skipped
    return prof


def profile_monotone_check(u: Field, K, D_list, band: float = 1.0) -> dict:
    """Nonincreasing profile up to one grid cell of slack in depth.

    Each entry is compared with the previous band widened by one cell on both
    sides, ``[D_prev - h, D_prev + band + h)``, so a maximum sitting on a band
    edge may count for either neighbour.
    """
    D_list = sorted(float(D) for D in D_list)
    h = u.domain.spacing
    main = attraction_profile_elliptic(u, K, D_list, band)
    dom = u.domain
    dist = _window_distance(u, K)
    s = dict(zip(main.depths, main.sup_dists))
    violations = []
    Ds = [D for D in D_list if D in s]
    for a, b in zip(Ds, Ds[1:]):
        sel = dom.active & (dom.depth >= a - h) & (dom.depth < a + band + h)
        allow = float(dist[sel].max())
        if s[b] > allow:
            violations.append({"D": b, "sup_dist": s[b], "allowed": allow})
    return {"pass": not violations, "violations": violations, "profile": main}


@dataclass(frozen=True)
class PlateauComponent:
    id: int
    size: int
    N_u: float | None
    deviation: float

    @property
    def resolved(self) -> bool:
        return self.N_u is not None


@dataclass
class PlateauAssignment:
    D: float
    tol: float
    components: list[PlateauComponent]

    @property
    def values(self) -> list:
        return [c.N_u for c in self.components]

    def to_dict(self) -> dict:
        return {"D": self.D, "tol": self.tol,
                "components": [{"id": c.id, "size": c.size, "N_u": c.N_u, "deviation": c.deviation}
                               for c in self.components]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def _label(region: np.ndarray, periodic) -> tuple[np.ndarray, int]:
    """4-neighbour components, merged across periodic seams."""
    lab, n = ndimage.label(region)
    parent = list(range(n + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ax, per in enumerate(periodic):
        if not per:
            continue
        first = np.take(lab, 0, axis=ax)
        last = np.take(lab, -1, axis=ax)
        for a, b in zip(first[(first > 0) & (last > 0)], last[(first > 0) & (last > 0)]):
            ra, rb = find(int(a)), find(int(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = np.array([find(i) for i in range(n + 1)])
    uniq = np.unique(roots[1:])
    relabel = np.zeros(n + 1, dtype=np.int64)
    relabel[1:] = np.searchsorted(uniq, roots[1:]) + 1
    return relabel[lab], len(uniq)


def plateau_assign(u: Field, K, D: float, tol: float = 1e-2) -> PlateauAssignment:
    """Per component of {depth >= D}: the unique k in K with sup |u - k| <= tol, else unresolved."""
    dom = u.domain
    region = dom.interior & (dom.depth >= D)
    if not region.any():
        raise EmptyRegion(f"no cells of depth >= {D:g}")
    lab, n = _label(region, dom.periodic)
    K = [float(k) for k in K]
    comps = []
    for cid in range(1, n + 1):
        vals = u.values[lab == cid]
        devs = [float(np.abs(vals - k).max()) for k in K]
        hits = [k for k, d in zip(K, devs) if d <= tol]
        if len(hits) == 1:
            comps.append(PlateauComponent(cid, int(vals.size), hits[0], devs[K.index(hits[0])]))
        else:
            comps.append(PlateauComponent(cid, int(vals.size), None, min(devs)))
    return PlateauAssignment(float(D), float(tol), comps)


def _stencil_laplacian(dom: GridDomain, vals: np.ndarray) -> np.ndarray:
    lap = -2.0 * dom.ndim * vals
    for ax in range(dom.ndim):
        lap = lap + dom.neighbor(vals, ax, 1) + dom.neighbor(vals, ax, -1)
    return lap / dom.spacing**2


def subharmonic_defect(u: Field, D: float = 2.0) -> float:
    """min over Interior cells of depth >= D of Lap_h(u^2); nonnegative in the continuum."""
    dom = u.domain
    lap = _stencil_laplacian(dom, u.values * u.values)
    return float(lap[_deep_cells(dom, D)].min())


def interior_bound_check(u: Field, f: Nonlinearity, D: float = 2.0, margin: float = 0.1) -> dict:
    """sup |u| over depth >= D against the largest equilibrium magnitude plus ``margin``."""
    bound = float(np.abs(equilibrium_set(f)).max()) + margin
    sup = float(np.abs(u.values[_deep_cells(u.domain, D)]).max())
    return {"sup": sup, "bound": bound, "pass": sup <= bound}


def trajectory_shift_closure_check(p: EllipticProblem, u: Field, s) -> float:
    """Residual of the translate (u o T(s))(x) = u(x + s) over cells whose translate is Interior.

    Requires T(s) to map the domain into itself: every active cell ``x``
    must have an active ``x + s`` (periodic axes wrap).
    """
    dom = p.domain
    s = np.asarray(s, dtype=int).reshape(-1)
    if s.shape != (dom.ndim,):
        raise ValueError(f"shift must have {dom.ndim} components")

    def translate(arr, fill):
        out = arr
        for ax, k in enumerate(s):
            if k:
                out = dom.neighbor(out, ax, int(k), fill=fill)
        return out

    if np.any(dom.active & ~translate(dom.active, False)):
        raise NotSemiInvariant(f"translation by {s.tolist()} leaves the domain")
    v = translate(np.where(dom.boundary, p.boundary_data, u.values), 0.0)
    sel = translate(dom.interior, False)
    # the stencil of v at x reads v(x +- e) = u(x + s +- e), defined because x + s is Interior
    lap = _stencil_laplacian(dom, v)
    return float(np.abs(lap - p.nonlinearity(v))[sel].max(initial=0.0))


# --------------------------------------------------------------------------
# Translation dynamics on solutions (the domain arrow)


@dataclass(frozen=True)
class WindowConstants:
    """Target of constant fields measured by the sup over a window field's active cells."""

    values: tuple

    @property
    def label(self) -> str:
        return f"constants{[float(k) for k in self.values]}"

    def distance(self, S, x: Field) -> float:
        v = x.values[x.domain.active]
        return min(float(np.abs(v - k).max(initial=0.0)) for k in self.values)


def translation_semigroup(domain: GridDomain, radius: float = 1.0) -> SemigroupHandle:
    """Translations over the domain arrow: S(h) u is u restricted to the unit window around h."""
    arrow = TimeArrow.domain_arrow(domain)
    r = window_cells(domain, radius)
    ball = _cell_offsets_box(domain.ndim, r) <= r + 1e-12

    def apply(h, u: Field) -> Field:
        c = np.asarray(domain.cell_of(h))
        if np.any(c - r < 0) or np.any(c + r >= np.asarray(domain.extents)):
            idx = [np.mod(np.arange(a - r, a + r + 1), n) for a, n in zip(c, domain.extents)]
            for ax, (a, n) in enumerate(zip(c, domain.extents)):
                if not domain.periodic[ax] and (a - r < 0 or a + r >= n):
                    raise NotSemiInvariant("window leaves the grid")
        else:
            idx = [np.arange(a - r, a + r + 1) for a in c]
        grid = np.ix_(*idx)
        active = ball & domain.active[grid]
        win = np.where(active, BOUNDARY, EXTERIOR).astype(np.int8)
        wdom = GridDomain(domain.spacing, win, (False,) * domain.ndim)
        return Field(wdom, np.where(active, u.values[grid], 0.0))

    return SemigroupHandle(arrow, apply, FIELD, domain=domain, name="translation")


def _cell_offsets_box(ndim: int, r: int) -> np.ndarray:
    off = np.arange(-r, r + 1)
    sq = np.zeros((2 * r + 1,) * ndim)
    for ax in range(ndim):
        shape = [1] * ndim
        shape[ax] = off.size
        sq = sq + off.reshape(shape) ** 2
    return np.sqrt(sq)
