"""Occupancy grids over the ambient box and binary PGM output.

Grids divide each axis of the bounding box into `resolution` cells. Points
on the far boundary are clipped into the last cell so closed sets raster
without holes. PGM output is binary P5, one byte per cell, 255 for
occupied, row-major with the first image row at the top of the box.
"""
from __future__ import annotations

import numpy as np

from .condensation import AxisBox, CondensationSet, Disk, sample_with_spacing
from .errors import InvalidInput
from .maps import DEFAULT_WORD_BUDGET, IFSystem
from .stopping import LevelFrontier, expand_children, root_frontier


def cell_sides(box: AxisBox, resolution: int) -> np.ndarray:
    return box.widths / resolution


def point_cells(points: np.ndarray, box: AxisBox, resolution: int) -> np.ndarray:
    """Integer cell indices of points, clipped into the grid."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    sides = cell_sides(box, resolution)
    idx = np.floor((points - box.corner) / sides).astype(np.int64)
    return np.clip(idx, 0, resolution - 1)


def rasterize_cloud(points: np.ndarray, box: AxisBox, resolution: int) -> np.ndarray:
    """Boolean occupancy grid of a point cloud, shape (resolution,) * n."""
    if resolution < 1:
        raise InvalidInput("resolution must be positive")
    n = box.ambient_dim
    grid = np.zeros((resolution,) * n, dtype=bool)
    idx = point_cells(points, box, resolution)
    grid[tuple(idx[:, a] for a in range(n))] = True
    return grid


def _mark_box(grid: np.ndarray, lo: np.ndarray, hi: np.ndarray,
              box: AxisBox, resolution: int) -> None:
    """Mark every cell whose closed cell-box intersects [lo, hi]."""
    sides = cell_sides(box, resolution)
    i_lo = np.clip(np.floor((lo - box.corner) / sides).astype(np.int64), 0, resolution - 1)
    i_hi = np.clip(np.floor((hi - box.corner) / sides).astype(np.int64), 0, resolution - 1)
    grid[tuple(slice(a, b + 1) for a, b in zip(i_lo, i_hi))] = True


def _mark_disk(grid: np.ndarray, center: np.ndarray, radius: float,
               box: AxisBox, resolution: int) -> None:
    """Mark cells whose center lies in the closed disk."""
    sides = cell_sides(box, resolution)
    i_lo = np.clip(np.floor((center - radius - box.corner) / sides).astype(np.int64),
                   0, resolution - 1)
    i_hi = np.clip(np.floor((center + radius - box.corner) / sides).astype(np.int64),
                   0, resolution - 1)
    axes = [box.corner[a] + (np.arange(i_lo[a], i_hi[a] + 1) + 0.5) * sides[a]
            for a in range(box.ambient_dim)]
    mesh = np.meshgrid(*axes, indexing="ij")
    dist2 = sum((m - c) ** 2 for m, c in zip(mesh, center))
    sub = tuple(slice(a, b + 1) for a, b in zip(i_lo, i_hi))
    grid[sub] |= dist2 <= radius ** 2


def mark_condensation_image(grid: np.ndarray, cond: CondensationSet,
                            linear: np.ndarray, translation: np.ndarray,
                            lip_plus: float, box: AxisBox, resolution: int) -> None:
    """Rasterize the image of a condensation set under one affine action.

    Axis-aligned images of boxes and similarity images of disks raster
    exactly; every other combination falls back to pushing a grid sample
    fine enough that no covered cell is skipped.
    """
    n = box.ambient_dim
    off_diag = np.abs(linear - np.diag(np.diag(linear))).max() if n > 1 else 0.0
    if isinstance(cond, AxisBox) and off_diag < 1e-12:
        diag = np.diag(linear) if n > 1 else linear.reshape(1)
        a = translation + diag * cond.corner
        b = translation + diag * cond.upper
        _mark_box(grid, np.minimum(a, b), np.maximum(a, b), box, resolution)
        return
    if isinstance(cond, Disk):
        sigma = np.linalg.svd(linear, compute_uv=False)
        if sigma[0] - sigma[-1] < 1e-12 * sigma[0]:
            center = linear @ cond.center + translation
            _mark_disk(grid, center, float(sigma[0]) * cond.radius, box, resolution)
            return
    sides = cell_sides(box, resolution)
    spacing = float(np.min(sides)) / (2.0 * max(lip_plus, 1e-12))
    sample = sample_with_spacing(cond, spacing)
    image = sample @ linear.T + translation
    idx = point_cells(image, box, resolution)
    grid[tuple(idx[:, a] for a in range(n))] = True


def _prune(level: LevelFrontier, keep: np.ndarray) -> LevelFrontier:
    return LevelFrontier([level.words[j] for j in keep],
                         level.lip_plus[keep], level.lip_minus[keep],
                         level.linear[keep], level.translation[keep])


def _walk_grids(ifs: IFSystem, cond: CondensationSet | None, box: AxisBox,
                resolution: int, budget: int) -> tuple[np.ndarray, int, bool]:
    """Breadth-first word walk marking an occupancy grid.

    With a condensation set the grid covers C and every word image of C;
    without one it covers the attractor. A word whose image of the whole
    bounding box fits inside one cell is closed off by marking that image
    box, which also covers everything deeper in its subtree.
    """
    if not ifs.has_point_action:
        raise InvalidInput("rendering needs maps with a point action")
    if resolution < 1:
        raise InvalidInput("resolution must be positive")
    n = box.ambient_dim
    grid = np.zeros((resolution,) * n, dtype=bool)
    min_cell = float(np.min(cell_sides(box, resolution)))
    diam = box.diameter
    center = box.corner + 0.5 * box.widths
    half = 0.5 * box.widths
    level = root_frontier(ifs)
    words_marked = 0
    truncated = False
    while level.words:
        small = level.lip_plus * diam < min_cell
        for j in np.nonzero(small)[0]:
            lin = level.linear[j]
            img_c = lin @ center + level.translation[j]
            img_h = np.abs(lin) @ half
            _mark_box(grid, img_c - img_h, img_c + img_h, box, resolution)
        expand = np.nonzero(~small)[0]
        if cond is not None:
            for j in expand:
                mark_condensation_image(grid, cond, level.linear[j],
                                        level.translation[j],
                                        float(level.lip_plus[j]),
                                        box, resolution)
        words_marked += len(level.words)
        if not expand.size:
            break
        if words_marked + expand.size * ifs.n_maps > budget:
            truncated = True
            if cond is None:
                # close the remaining subtrees coarsely so the attractor
                # grid stays a cover even when cut short
                for j in expand:
                    lin = level.linear[j]
                    img_c = lin @ center + level.translation[j]
                    img_h = np.abs(lin) @ half
                    _mark_box(grid, img_c - img_h, img_c + img_h,
                              box, resolution)
            break
        level = expand_children(ifs, _prune(level, expand))
    return grid, words_marked, truncated


def attractor_grid(ifs: IFSystem, box: AxisBox, resolution: int,
                   budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Exact occupancy grid of the homogeneous attractor."""
    grid, _, _ = _walk_grids(ifs, None, box, resolution, budget)
    return grid


def orbital_grid(ifs: IFSystem, cond: CondensationSet, box: AxisBox,
                 resolution: int,
                 budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Occupancy grid of the condensation set and all its word images."""
    grid, _, _ = _walk_grids(ifs, cond, box, resolution, budget)
    return grid


def condensation_grid(cond: CondensationSet, box: AxisBox,
                      resolution: int) -> np.ndarray:
    """Occupancy grid of the condensation set alone."""
    n = box.ambient_dim
    grid = np.zeros((resolution,) * n, dtype=bool)
    mark_condensation_image(grid, cond, np.eye(n), np.zeros(n), 1.0,
                            box, resolution)
    return grid


def inhomogeneous_grid(ifs: IFSystem, cond: CondensationSet, box: AxisBox,
                       resolution: int,
                       budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Occupancy grid of the attractor together with the orbital set."""
    return (attractor_grid(ifs, box, resolution, budget)
            | orbital_grid(ifs, cond, box, resolution, budget))


def write_pgm(grid: np.ndarray, path) -> None:
    """Binary P5 image of a 1-D or 2-D occupancy grid.

    Grid axis 0 is x and axis 1 is y; the image is written so y increases
    upward (last grid row first), matching the usual plot orientation.
    """
    if grid.ndim == 1:
        pixels = grid[None, :]
    elif grid.ndim == 2:
        pixels = grid.T[::-1, :]
    else:
        raise InvalidInput("PGM output supports 1-D and 2-D grids only")
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    body = (pixels.astype(np.uint8) * 255).tobytes()
    with open(path, "wb") as handle:
        handle.write(header + body)
