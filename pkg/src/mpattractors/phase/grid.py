"""Masked rectangular lattices and the fields that live on them.

Cell ``i`` along an axis with ``n`` cells has centre coordinate
``(i - (n - 1) / 2) * spacing``, so every domain is centred at the origin.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import ndimage

from mpattractors.errors import DomainMismatch

INTERIOR, BOUNDARY, EXTERIOR = 0, 1, 2
_TAGS = {INTERIOR: "I", BOUNDARY: "B", EXTERIOR: "E"}
_CODES = {v: k for k, v in _TAGS.items()}


def lattice_neighbor(arr: np.ndarray, axis: int, step: int, periodic: bool, fill=0) -> np.ndarray:
    """Values of ``arr`` at ``cell + step * e_axis``; wraps when ``periodic``."""
    if periodic:
        return np.roll(arr, -step, axis=axis)
    out = np.full_like(arr, fill)
    src = [slice(None)] * arr.ndim
    dst = [slice(None)] * arr.ndim
    if step > 0:
        src[axis], dst[axis] = slice(step, None), slice(None, -step)
    else:
        src[axis], dst[axis] = slice(None, step), slice(-step, None)
    out[tuple(dst)] = arr[tuple(src)]
    return out


@dataclass(frozen=True, eq=False)
class GridDomain:
    spacing: float
    mask: np.ndarray
    periodic: tuple[bool, ...]

    def __post_init__(self):
        mask = np.ascontiguousarray(self.mask, dtype=np.int8)
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "periodic", tuple(bool(p) for p in self.periodic))
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if mask.ndim not in (1, 2):
            raise ValueError("only 1-d and 2-d domains are supported")
        if len(self.periodic) != mask.ndim:
            raise ValueError("one periodic flag per axis required")
        if not np.isin(mask, (INTERIOR, BOUNDARY, EXTERIOR)).all():
            raise ValueError("mask contains unknown tags")
        for ax, per in enumerate(self.periodic):
            if per and not np.array_equal(mask, np.roll(mask, 1, axis=ax)):
                raise ValueError(f"mask is not translation invariant along periodic axis {ax}")
        interior = mask == INTERIOR
        for ax in range(mask.ndim):
            for step in (1, -1):
                nb = self.neighbor(mask, ax, step, fill=EXTERIOR)
                if np.any(interior & (nb == EXTERIOR)):
                    raise ValueError("an Interior cell touches an Exterior cell or the grid edge")

    # geometry -----------------------------------------------------------
    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(int(n) for n in self.mask.shape)

    @property
    def ndim(self) -> int:
        return self.mask.ndim

    @cached_property
    def active(self) -> np.ndarray:
        """Boolean array of non-Exterior cells."""
        return self.mask != EXTERIOR

    @cached_property
    def interior(self) -> np.ndarray:
        return self.mask == INTERIOR

    @cached_property
    def boundary(self) -> np.ndarray:
        return self.mask == BOUNDARY

    def axis_coords(self, axis: int) -> np.ndarray:
        n = self.extents[axis]
        return (np.arange(n) - (n - 1) / 2.0) * self.spacing

    def coords(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*(self.axis_coords(a) for a in range(self.ndim)), indexing="ij"))

    def cell_of(self, x) -> tuple[int, ...]:
        """Nearest lattice cell to the physical point ``x`` (may be out of range)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape[0] != self.ndim:
            raise DomainMismatch(f"point of dimension {x.shape[0]} on a {self.ndim}-d domain")
        idx = np.rint(x / self.spacing + (np.asarray(self.extents) - 1) / 2.0).astype(int)
        return tuple(int(i) for i in idx)

    def position(self, cell) -> np.ndarray:
        cell = np.asarray(cell, dtype=float)
        return (cell - (np.asarray(self.extents) - 1) / 2.0) * self.spacing

    def in_bounds(self, cell) -> bool:
        return all(0 <= c < n for c, n in zip(cell, self.extents))

    def neighbor(self, arr: np.ndarray, axis: int, step: int, fill=0) -> np.ndarray:
        return lattice_neighbor(arr, axis, step, self.periodic[axis], fill)

    # depth ----------------------------------------------------------------
    @cached_property
    def depth(self) -> np.ndarray:
        """Euclidean distance from each cell centre to the nearest Boundary cell centre.

        Exterior cells get ``-1``; with no Boundary cells every active cell has
        infinite depth.
        """
        bnd = self.boundary
        if not bnd.any():
            out = np.where(self.active, np.inf, -1.0)
            out.setflags(write=False)
            return out
        reps = [3 if p else 1 for p in self.periodic]
        tiled = np.tile(~bnd, reps)
        dist = ndimage.distance_transform_edt(tiled, sampling=self.spacing)
        crop = tuple(slice(n, 2 * n) if p else slice(None) for n, p in zip(self.extents, self.periodic))
        dist = np.where(self.active, dist[crop], -1.0)
        dist.setflags(write=False)
        return dist

    @cached_property
    def max_depth(self) -> float:
        return float(self.depth.max())

    def deepest_cell(self) -> tuple[int, ...]:
        """Deepest active cell, ties broken by lexicographic cell index."""
        flat = np.flatnonzero(self.depth.ravel() == self.max_depth)
        return tuple(int(i) for i in np.unravel_index(flat[0], self.extents))

    # hashing / serialization --------------------------------------------
    def descriptor(self) -> dict:
        return {
            "spacing": float(self.spacing),
            "extents": list(self.extents),
            "mask_rle": _rle_encode(self.mask.ravel()),
            "periodic": list(self.periodic),
        }

    @cached_property
    def hash(self) -> str:
        payload = json.dumps(self.descriptor(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @classmethod
    def from_descriptor(cls, desc: dict) -> "GridDomain":
        extents = tuple(int(n) for n in desc["extents"])
        flat = _rle_decode(desc["mask_rle"], int(np.prod(extents)))
        return cls(float(desc["spacing"]), flat.reshape(extents), tuple(desc["periodic"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.descriptor(), sort_keys=True, indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "GridDomain":
        return cls.from_descriptor(json.loads(Path(path).read_text()))


def _rle_encode(flat: np.ndarray) -> str:
    if flat.size == 0:
        return ""
    change = np.flatnonzero(np.diff(flat)) + 1
    starts = np.concatenate([[0], change])
    lengths = np.diff(np.concatenate([starts, [flat.size]]))
    return ",".join(f"{n}{_TAGS[int(flat[s])]}" for s, n in zip(starts, lengths))


def _rle_decode(text: str, size: int) -> np.ndarray:
    parts = [p for p in text.split(",") if p]
    tags = np.array([_CODES[p[-1]] for p in parts], dtype=np.int8)
    lengths = np.array([int(p[:-1]) for p in parts], dtype=np.int64)
    out = np.repeat(tags, lengths)
    if out.size != size:
        raise ValueError(f"RLE mask decodes to {out.size} cells, expected {size}")
    return out


# --------------------------------------------------------------------------
# Fields


@dataclass(frozen=True, eq=False)
class Field:
    """Real values on the active cells of a domain (Exterior entries held at 0)."""

    domain: GridDomain
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.domain.extents:
            raise DomainMismatch(f"values shape {vals.shape} != domain extents {self.domain.extents}")
        vals[~self.domain.active] = 0.0
        if not np.all(np.isfinite(vals)):
            raise ValueError("field values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, domain: GridDomain, c: float) -> "Field":
        return cls(domain, np.full(domain.extents, float(c)))

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max(initial=0.0))

    def with_values(self, values) -> "Field":
        return Field(self.domain, values)

    def save(self, path) -> list[Path]:
        """Write ``path`` (little-endian float64 of active cells) and ``path.json``."""
        path = Path(path)
        path.write_bytes(self.values[self.domain.active].astype("<f8").tobytes())
        side = path.with_name(path.name + ".json")
        meta = {"domain_hash": self.domain.hash, "sup_norm": self.sup_norm(), "count": int(self.domain.active.sum())}
        side.write_text(json.dumps(meta, sort_keys=True) + "\n")
        return [path, side]

    @classmethod
    def load(cls, path, domain: GridDomain) -> "Field":
        path = Path(path)
        meta = json.loads(path.with_name(path.name + ".json").read_text())
        if meta["domain_hash"] != domain.hash:
            raise DomainMismatch("field sidecar domain hash does not match the given domain")
        vals = np.zeros(domain.extents)
        vals[domain.active] = np.frombuffer(path.read_bytes(), dtype="<f8")
        return cls(domain, vals)


def same_domain(u: Field, v: Field) -> None:
    if u.domain is not v.domain and u.domain.hash != v.domain.hash:
        raise DomainMismatch("fields live on different domains")


# --------------------------------------------------------------------------
# Domain builders


def _close_region(inside: np.ndarray, spacing: float, periodic) -> GridDomain:
    """Tag ``inside`` as Interior, their lattice neighbours outside as Boundary."""
    mask = np.full(inside.shape, EXTERIOR, dtype=np.int8)
    touch = np.zeros(inside.shape, dtype=bool)
    for ax in range(inside.ndim):
        for step in (1, -1):
            touch |= lattice_neighbor(inside, ax, step, periodic[ax], fill=False)
    mask[touch & ~inside] = BOUNDARY
    mask[inside] = INTERIOR
    return GridDomain(spacing, mask, tuple(periodic))


def periodic_box(n, length: float) -> GridDomain:
    """Fully periodic box with ``n`` cells per axis (int or tuple) and side ``length``."""
    shape = (int(n),) if np.isscalar(n) else tuple(int(k) for k in n)
    return GridDomain(float(length) / shape[0], np.zeros(shape, dtype=np.int8), (True,) * len(shape))


def interval(half_length: float, spacing: float) -> GridDomain:
    """1-d interval [-L, L]: the two end cells are Boundary."""
    m = int(round(2 * half_length / spacing)) + 1
    mask = np.zeros(m, dtype=np.int8)
    mask[[0, -1]] = BOUNDARY
    return GridDomain(spacing, mask, (False,))


def annulus(r_in: float, r_out: float, spacing: float) -> GridDomain:
    half = int(np.ceil(r_out / spacing)) + 2
    n = 2 * half + 1
    x = (np.arange(n) - half) * spacing
    r = np.hypot(x[:, None], x[None, :])
    return _close_region((r > r_in) & (r < r_out), spacing, (False, False))


def strip(width: float, length: float, spacing: float, periodic_length: bool = True) -> GridDomain:
    """Strip along axis 0; Boundary rows sit exactly ``width`` apart on axis 1."""
    rows = int(round(width / spacing)) + 1
    cols = int(round(length / spacing))
    mask = np.zeros((cols, rows), dtype=np.int8)
    mask[:, [0, -1]] = BOUNDARY
    if not periodic_length:
        mask = np.pad(mask, ((1, 1), (0, 0)), constant_values=BOUNDARY)
        mask[[0, -1], :] = BOUNDARY
    return GridDomain(spacing, mask, (periodic_length, False))


def dumbbell(side: float, corridor_cells: int, corridor_length: float, spacing: float) -> GridDomain:
    """Two open squares of side ``side`` joined along axis 0 by a narrow corridor."""
    s = int(round(side / spacing)) - 1
    c = int(round(corridor_length / spacing))
    nx, ny = 2 * s + c + 2, s + 2
    inside = np.zeros((nx, ny), dtype=bool)
    inside[1 : 1 + s, 1 : 1 + s] = True
    inside[1 + s + c : 1 + 2 * s + c, 1 : 1 + s] = True
    mid = 1 + s // 2 - corridor_cells // 2
    inside[1 + s : 1 + s + c, mid : mid + corridor_cells] = True
    return _close_region(inside, spacing, (False, False))


def from_mask(inside: np.ndarray, spacing: float, periodic=None) -> GridDomain:
    inside = np.asarray(inside, dtype=bool)
    return _close_region(inside, spacing, periodic or (False,) * inside.ndim)
