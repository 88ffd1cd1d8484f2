"""Condensation sets and the ambient bounding box.

A condensation set is compact, carries a forced or declared box dimension,
and optionally a known Hausdorff value (d, H^d) used symbolically by the
measure classifiers. Samplers are deterministic grids so that repeated runs
produce identical clouds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InvalidInput

# (d, value): caller-declared Hausdorff data, value in the caller's normalization
HausdorffValue = tuple[float, float]


def _vec(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class AxisBox:
    """Axis-aligned box, also used as the ambient bounding region X."""

    corner: np.ndarray
    widths: np.ndarray
    hausdorff: HausdorffValue | None = None

    def __post_init__(self):
        corner = _vec(self.corner)
        widths = _vec(self.widths)
        if corner.size != widths.size:
            raise InvalidInput("corner and widths must have the same length")
        if np.any(widths <= 0):
            raise InvalidInput("box widths must be positive")
        object.__setattr__(self, "corner", corner)
        object.__setattr__(self, "widths", widths)

    @property
    def ambient_dim(self) -> int:
        return self.corner.size

    @property
    def upper(self) -> np.ndarray:
        return self.corner + self.widths

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.widths))

    @property
    def center(self) -> np.ndarray:
        return self.corner + 0.5 * self.widths

    def corners(self) -> np.ndarray:
        """All 2^n corner points, used for mapped-image containment checks."""
        n = self.ambient_dim
        out = np.empty((2 ** n, n))
        for j in range(2 ** n):
            bits = [(j >> a) & 1 for a in range(n)]
            out[j] = self.corner + np.array(bits) * self.widths
        return out

    def contains(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        """Boolean mask: which points lie in the box, inflated by tol."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        lo = self.corner - tol
        hi = self.upper + tol
        return np.all((points >= lo) & (points <= hi), axis=1)


@dataclass(frozen=True)
class FinitePoints:
    """A finite point set; box dimension 0."""

    points: np.ndarray
    hausdorff: HausdorffValue | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        if pts.size == 0:
            raise InvalidInput("a finite condensation set needs at least one point")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class Segment:
    """Closed segment between two distinct points; box dimension 1."""

    start: np.ndarray
    end: np.ndarray
    hausdorff: HausdorffValue | None = None

    def __post_init__(self):
        start = _vec(self.start)
        end = _vec(self.end)
        if start.size != end.size:
            raise InvalidInput("segment endpoints must share a dimension")
        if np.allclose(start, end):
            raise InvalidInput("segment endpoints must be distinct")
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "end", end)

    @property
    def ambient_dim(self) -> int:
        return self.start.size

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))


@dataclass(frozen=True)
class Disk:
    """Closed round ball; box dimension equal to the ambient dimension."""

    center: np.ndarray
    radius: float
    hausdorff: HausdorffValue | None = None

    def __post_init__(self):
        center = _vec(self.center)
        if not self.radius > 0:
            raise InvalidInput("disk radius must be positive")
        object.__setattr__(self, "center", center)

    @property
    def ambient_dim(self) -> int:
        return self.center.size


@dataclass(frozen=True)
class BitmapCloud:
    """A raster-style point cloud with a caller-declared box dimension."""

    points: np.ndarray
    declared_box_dim: float
    hausdorff: HausdorffValue | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        if pts.size == 0:
            raise InvalidInput("a bitmap cloud needs at least one point")
        if not 0.0 <= self.declared_box_dim <= pts.shape[1]:
            raise InvalidInput("declared box dimension must lie in [0, ambient]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]


CondensationSet = Union[FinitePoints, Segment, AxisBox, Disk, BitmapCloud]


def box_dim_of(cond: CondensationSet, ambient_dim: int) -> float:
    """Forced box dimension per variant; bitmap clouds use the declared value."""
    if isinstance(cond, FinitePoints):
        return 0.0
    if isinstance(cond, Segment):
        return 1.0
    if isinstance(cond, (AxisBox, Disk)):
        return float(ambient_dim)
    if isinstance(cond, BitmapCloud):
        return float(cond.declared_box_dim)
    raise InvalidInput(f"unknown condensation variant {type(cond).__name__}")


def bounds_of(cond: CondensationSet) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise lower/upper bounds of the set."""
    if isinstance(cond, (FinitePoints, BitmapCloud)):
        return cond.points.min(axis=0), cond.points.max(axis=0)
    if isinstance(cond, Segment):
        both = np.stack([cond.start, cond.end])
        return both.min(axis=0), both.max(axis=0)
    if isinstance(cond, AxisBox):
        return cond.corner.copy(), cond.upper
    if isinstance(cond, Disk):
        return cond.center - cond.radius, cond.center + cond.radius
    raise InvalidInput(f"unknown condensation variant {type(cond).__name__}")


def diameter_of(cond: CondensationSet) -> float:
    lo, hi = bounds_of(cond)
    return float(np.linalg.norm(hi - lo))


def _axis_grid(lo: np.ndarray, hi: np.ndarray, counts: np.ndarray) -> np.ndarray:
    axes = [np.linspace(lo[a], hi[a], int(counts[a])) for a in range(lo.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def sample_points(cond: CondensationSet, count: int) -> np.ndarray:
    """Deterministic sample of roughly `count` points covering the set.

    Finite and bitmap variants return all of their points regardless of
    count. Grids include the set's extreme points so coarse samples still
    touch the boundary.
    """
    if count < 1:
        raise InvalidInput("sample count must be positive")
    if isinstance(cond, (FinitePoints, BitmapCloud)):
        return np.array(cond.points, dtype=float)
    if isinstance(cond, Segment):
        ts = np.linspace(0.0, 1.0, max(2, count))[:, None]
        return cond.start + ts * (cond.end - cond.start)
    if isinstance(cond, AxisBox):
        n = cond.ambient_dim
        per_axis = max(2, round(count ** (1.0 / n)))
        counts = np.full(n, per_axis)
        return _axis_grid(cond.corner, cond.upper, counts)
    if isinstance(cond, Disk):
        n = cond.ambient_dim
        # oversample the bounding box so the filtered count lands near target
        ball_fraction = (math.pi ** (n / 2)) / (math.gamma(n / 2 + 1) * 2 ** n)
        per_axis = max(2, round((count / ball_fraction) ** (1.0 / n)))
        grid = _axis_grid(cond.center - cond.radius, cond.center + cond.radius,
                          np.full(n, per_axis))
        keep = np.linalg.norm(grid - cond.center, axis=1) <= cond.radius
        pts = grid[keep]
        return pts if len(pts) else cond.center[None, :]
    raise InvalidInput(f"unknown condensation variant {type(cond).__name__}")


def sample_with_spacing(cond: CondensationSet, spacing: float,
                        max_points: int = 20_000_000) -> np.ndarray:
    """Deterministic grid sample with step at most `spacing` along every axis."""
    if not spacing > 0:
        raise InvalidInput("spacing must be positive")
    if isinstance(cond, (FinitePoints, BitmapCloud)):
        return np.array(cond.points, dtype=float)
    if isinstance(cond, Segment):
        m = int(math.ceil(cond.length / spacing)) + 1
        return sample_points(cond, max(2, m))
    if isinstance(cond, (AxisBox, Disk)):
        lo, hi = bounds_of(cond)
        counts = np.maximum(2, np.ceil((hi - lo) / spacing).astype(int) + 1)
        total = int(np.prod(counts, dtype=float))
        if total > max_points:
            raise InvalidInput(
                f"spacing {spacing:g} asks for {total} grid points (cap {max_points})"
            )
        grid = _axis_grid(lo, hi, counts)
        if isinstance(cond, Disk):
            keep = np.linalg.norm(grid - cond.center, axis=1) <= cond.radius
            grid = grid[keep]
            if not len(grid):
                grid = cond.center[None, :]
        return grid
    raise InvalidInput(f"unknown condensation variant {type(cond).__name__}")


def measure_at(cond: CondensationSet, d: float, tol: float = 1e-9) -> float | None:
    """Declared H^d of the set at exponent d.

    Returns the declared value when d matches the declared exponent, 0 when
    d exceeds the set's dimension, +inf when d is strictly below it, and
    None when nothing can be said from the declaration alone.
    """
    declared = cond.hausdorff
    if declared is not None and abs(d - declared[0]) <= tol:
        return float(declared[1])
    own_dim = declared[0] if declared is not None else None
    if own_dim is None:
        if isinstance(cond, FinitePoints):
            own_dim = 0.0
        elif isinstance(cond, Segment):
            own_dim = 1.0
        elif isinstance(cond, (AxisBox, Disk)):
            own_dim = float(cond.ambient_dim)
        else:
            return None
    if d > own_dim + tol:
        return 0.0
    if d < own_dim - tol:
        return math.inf
    if isinstance(cond, FinitePoints) and abs(d) <= tol:
        return float(len(cond.points))
    if isinstance(cond, Segment) and abs(d - 1.0) <= tol:
        return cond.length
    return None
