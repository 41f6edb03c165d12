"""Uniform tensor grids, nodal fields, coefficient matrices and problem data.

Everything here is immutable after construction; instances are safe to share
read-only across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Union

import numpy as np

Support = Literal["compact", "strictly_positive", "general"]


class EllipticityError(ValueError):
    """A coefficient field is not symmetric or not uniformly elliptic."""


def _axis_tuple(value, name: str) -> tuple[float, ...]:
    if np.isscalar(value):
        return (float(value),)
    vals = tuple(float(v) for v in value)
    if len(vals) not in (1, 2):
        raise ValueError(f"{name} must be scalar or length 1-2, got {value!r}")
    return vals


@dataclass(frozen=True)
class Grid:
    """Uniform tensor mesh on a 1-D interval or 2-D box, boundary nodes included."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    cells: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.cells)

    @property
    def h(self) -> tuple[float, ...]:
        return tuple((b - a) / c for a, b, c in zip(self.lo, self.hi, self.cells))

    @property
    def shape(self) -> tuple[int, ...]:
        """Nodes per axis (cells + 1)."""
        return tuple(c + 1 for c in self.cells)

    @property
    def node_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def interior_shape(self) -> tuple[int, ...]:
        return tuple(c - 1 for c in self.cells)

    def axes(self) -> list[np.ndarray]:
        return [a + hh * np.arange(c + 1)
                for a, hh, c in zip(self.lo, self.h, self.cells)]

    def meshes(self) -> list[np.ndarray]:
        """Node coordinates broadcast to the full grid shape ('ij' indexing)."""
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    def interior_meshes(self) -> list[np.ndarray]:
        sl = tuple(slice(1, -1) for _ in range(self.dim))
        return [m[sl] for m in self.meshes()]

    def cell_volume(self) -> float:
        return float(np.prod(self.h))


def make_uniform_grid(lo, hi, cells) -> Grid:
    """Build an equispaced grid; extent and cell counts are validated per axis."""
    lo_t = _axis_tuple(lo, "lo")
    hi_t = _axis_tuple(hi, "hi")
    if np.isscalar(cells):
        cells_t: tuple[int, ...] = (int(cells),)
    else:
        cells_t = tuple(int(c) for c in cells)
    if not (len(lo_t) == len(hi_t) == len(cells_t)):
        raise ValueError("lo, hi and cells must agree in dimension")
    for a, b in zip(lo_t, hi_t):
        if not a < b:
            raise ValueError(f"degenerate extent: lo={a} >= hi={b}")
    for c in cells_t:
        if c < 4:
            raise ValueError(f"need at least 4 cells per axis, got {c}")
    return Grid(lo_t, hi_t, cells_t)


@dataclass(frozen=True)
class GridFunction:
    """Nodal values on a grid.  The value buffer is frozen on construction."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float, copy=True)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"value shape {vals.shape} does not match grid shape {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("grid function values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        return cls(grid, np.asarray(fn(*grid.meshes()), dtype=float))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def interior(self) -> np.ndarray:
        sl = tuple(slice(1, -1) for _ in range(self.grid.dim))
        return self.values[sl]

    def with_values(self, values: np.ndarray) -> "GridFunction":
        return GridFunction(self.grid, values)


@dataclass(frozen=True)
class CoefficientField:
    """Per-node symmetric coefficient matrix, shape = grid.shape + (dim, dim)."""

    grid: Grid
    entries: np.ndarray

    def __post_init__(self):
        d = self.grid.dim
        ent = np.array(self.entries, dtype=float, copy=True)
        if ent.shape != self.grid.shape + (d, d):
            raise ValueError(
                f"entry shape {ent.shape}, expected {self.grid.shape + (d, d)}")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @classmethod
    def identity(cls, grid: Grid) -> "CoefficientField":
        d = grid.dim
        ent = np.zeros(grid.shape + (d, d))
        for i in range(d):
            ent[..., i, i] = 1.0
        return cls(grid, ent)

    @classmethod
    def constant(cls, grid: Grid, matrix) -> "CoefficientField":
        d = grid.dim
        mat = np.atleast_2d(np.asarray(matrix, dtype=float))
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape}, expected {(d, d)}")
        ent = np.broadcast_to(mat, grid.shape + (d, d)).copy()
        return cls(grid, ent)

    def is_diagonal(self) -> bool:
        d = self.grid.dim
        if d == 1:
            return True
        off = self.entries[..., 0, 1]
        return bool(np.all(off == 0.0))


def check_ellipticity(coefficients: CoefficientField) -> tuple[float, float]:
    """Field-wide ellipticity certificate (alpha, beta).

    alpha is the smallest nodal eigenvalue, beta the largest nodal operator
    norm.  Raises EllipticityError for non-symmetric entries or alpha <= 0.
    """
    ent = coefficients.entries
    d = coefficients.grid.dim
    if d == 1:
        lam_min = ent[..., 0, 0]
        lam_max = ent[..., 0, 0]
    else:
        a = ent[..., 0, 0]
        b = ent[..., 0, 1]
        bt = ent[..., 1, 0]
        c = ent[..., 1, 1]
        scale = max(1.0, float(np.max(np.abs(ent))))
        if np.max(np.abs(b - bt)) > 1e-12 * scale:
            raise EllipticityError("coefficient matrix is not symmetric")
        half_tr = (a + c) / 2.0
        disc = np.sqrt(((a - c) / 2.0) ** 2 + b * bt)
        lam_min = half_tr - disc
        lam_max = half_tr + disc
    alpha = float(np.min(lam_min))
    beta = float(np.max(np.maximum(np.abs(lam_min), np.abs(lam_max))))
    if alpha <= 0.0:
        raise EllipticityError(f"ellipticity violated: smallest eigenvalue {alpha} <= 0")
    return alpha, beta


# --- data for the right-hand side ------------------------------------------

@dataclass(frozen=True)
class ConstantDatum:
    """f = value everywhere."""
    value: float

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("datum must be nonnegative")


@dataclass(frozen=True)
class IndicatorDatum:
    """f = value on the closed sub-box [lo, hi], zero outside.

    Nodes exactly on the sub-box boundary take the inside value.
    """
    value: float
    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", _axis_tuple(self.lo, "lo"))
        object.__setattr__(self, "hi", _axis_tuple(self.hi, "hi"))
        if self.value < 0:
            raise ValueError("datum must be nonnegative")
        for a, b in zip(self.lo, self.hi):
            if not a < b:
                raise ValueError("indicator sub-box is degenerate")


@dataclass(frozen=True)
class TabulatedDatum:
    """f given nodally."""
    field: GridFunction

    def __post_init__(self):
        if np.min(self.field.values) < 0:
            raise ValueError("datum must be nonnegative")


Datum = Union[ConstantDatum, IndicatorDatum, TabulatedDatum]


def sample_datum(datum: Datum, grid: Grid) -> np.ndarray:
    if isinstance(datum, ConstantDatum):
        return np.full(grid.shape, datum.value)
    if isinstance(datum, IndicatorDatum):
        if len(datum.lo) != grid.dim:
            raise ValueError("indicator sub-box dimension does not match grid")
        inside = np.ones(grid.shape, dtype=bool)
        for mesh, a, b in zip(grid.meshes(), datum.lo, datum.hi):
            inside &= (mesh >= a) & (mesh <= b)
        return np.where(inside, datum.value, 0.0)
    if isinstance(datum, TabulatedDatum):
        if datum.field.grid != grid:
            raise ValueError("tabulated datum lives on a different grid")
        return datum.field.values.copy()
    raise TypeError(f"unknown datum {datum!r}")


@dataclass(frozen=True)
class ProblemSpec:
    """Domain, coefficients, datum, exponent and support annotation."""

    grid: Grid
    coefficients: CoefficientField
    datum: Datum
    gamma: float
    support: Support = "general"

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.coefficients.grid != self.grid:
            raise ValueError("coefficient field lives on a different grid")
        if self.support not in ("compact", "strictly_positive", "general"):
            raise ValueError(f"unknown support annotation {self.support!r}")
        f = sample_datum(self.datum, self.grid)
        if np.min(f) < 0:
            raise ValueError("datum must be nonnegative")
        if self.support == "compact":
            self._check_compact(f)

    def _check_compact(self, f: np.ndarray) -> None:
        if isinstance(self.datum, IndicatorDatum):
            for a, b, lo, hi in zip(self.datum.lo, self.datum.hi,
                                    self.grid.lo, self.grid.hi):
                if not (lo < a and b < hi):
                    raise ValueError(
                        "compactly-contained support requires the indicator "
                        "sub-box strictly inside the domain")
        else:
            # tabulated / constant data must vanish on the boundary frame
            mask = np.zeros(self.grid.shape, dtype=bool)
            for ax in range(self.grid.dim):
                sl_lo = [slice(None)] * self.grid.dim
                sl_hi = [slice(None)] * self.grid.dim
                sl_lo[ax] = 0
                sl_hi[ax] = -1
                mask[tuple(sl_lo)] = True
                mask[tuple(sl_hi)] = True
            if np.any(f[mask] != 0.0):
                raise ValueError(
                    "compactly-contained support requires zero datum on the boundary")

    def datum_values(self) -> np.ndarray:
        return sample_datum(self.datum, self.grid)

    def omega_box(self) -> Optional[tuple[tuple[float, ...], tuple[float, ...]]]:
        """The indicator sub-box, when the datum is an indicator."""
        if isinstance(self.datum, IndicatorDatum):
            return self.datum.lo, self.datum.hi
        return None


# --- truncation utilities ----------------------------------------------------

def truncate(s, k: float):
    """Clamp s into [-k, k]."""
    if k <= 0:
        raise ValueError("truncation level must be positive")
    return np.clip(s, -k, k)


def excess(s, k: float):
    """Signed excess of s over the level k; truncate(s,k) + excess(s,k) == s."""
    if k <= 0:
        raise ValueError("truncation level must be positive")
    s = np.asarray(s, dtype=float)
    out = np.sign(s) * np.maximum(np.abs(s) - k, 0.0)
    return out if out.ndim else float(out)
