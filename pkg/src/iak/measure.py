"""Hausdorff-measure classification for inhomogeneous attractors.

With 0 < H^d(C) < infinity, the attractor's measure decomposes over the
disjoint (under the closed separation assertion) images of C:

    H^d(F_C) = H^d(F) + H^d(C) * (1 + sum over nonempty words of H^d factors)

where each word's factor sits between lip_minus^d and lip_plus^d. The level
sums of the upper factors decide divergence: they stay at or above 1 for
every level exactly when d does not exceed the upper Lipschitz dimension.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .condensation import AxisBox, CondensationSet, Disk, box_dim_of
from .errors import (
    BudgetExceeded,
    InvalidInput,
    NoPointAction,
    NotFullDimensional,
    WrongVariant,
)
from .maps import DEFAULT_WORD_BUDGET, IFSystem
from .pressure import word_lip_tables
from .raster import mark_condensation_image
from .stopping import LevelFrontier, expand_children, root_frontier

REGIME_POSITIVE_FINITE = "positive-finite"
REGIME_INFINITE = "infinite"
REGIME_BOUNDS_ONLY = "bounds-only"
REGIME_DELEGATED = "delegated-to-condensation"

DIVERGENCE_LEVEL_TOL = 1e-12
DIVERGENCE_RUN = 10
DEFAULT_SERIES_LEVELS = 40


@dataclass(frozen=True)
class SeriesBounds:
    """Partial sums of the word series at exponent d.

    Lower rows use lip_minus, upper rows use lip_plus. Divergence is decided
    by the exact level-1 test for similarity systems and otherwise by a run
    of level sums refusing to drop below one.
    """

    d: float
    partial_sums: tuple[tuple[int, float, float], ...]
    level_sums_lower: np.ndarray
    level_sums_upper: np.ndarray
    diverges: bool
    exact_divergence_test: bool

    @property
    def lower_total(self) -> float:
        return self.partial_sums[-1][1] if self.partial_sums else 0.0

    @property
    def upper_total(self) -> float:
        return self.partial_sums[-1][2] if self.partial_sums else 0.0

    def upper_tail_bound(self) -> float:
        """Certified remainder after the last level via submultiplicativity:
        level sums satisfy a_{j+k} <= a_j * a_k, so the tail is dominated by
        a geometric series in the last level sum. Infinite when that sum
        reaches one."""
        if not len(self.level_sums_upper):
            return math.inf
        a_last = float(self.level_sums_upper[-1])
        if a_last >= 1.0:
            return math.inf
        partial = self.upper_total
        return (partial + 1.0) * a_last / (1.0 - a_last)


def series_bounds(ifs: IFSystem, d: float, levels: int = DEFAULT_SERIES_LEVELS,
                  budget: int = DEFAULT_WORD_BUDGET) -> SeriesBounds:
    """Partial sums sum_{k<=K} sum_{|w|=k} lip^d for both constants.

    Similarity levels use the exact product form (sum ratio^d)^k; other
    variants enumerate words level by level inside the budget.
    """
    if levels < 1:
        raise InvalidInput("need at least one series level")
    if ifs.variant == "similarity":
        q = float(np.sum(ifs.lip_plus_vector ** d))
        level_lower = level_upper = np.array([q ** k for k in range(1, levels + 1)])
        exact = True
        diverges = q >= 1.0 - DIVERGENCE_LEVEL_TOL
    elif ifs.variant == "abstract":
        # word constants are declared products, so level sums are exact powers
        q_up = float(np.sum(ifs.lip_plus_vector ** d))
        q_lo = float(np.sum(ifs.lip_minus_vector ** d))
        level_upper = np.array([q_up ** k for k in range(1, levels + 1)])
        level_lower = np.array([q_lo ** k for k in range(1, levels + 1)])
        exact = False
        diverges = q_lo >= 1.0 - DIVERGENCE_LEVEL_TOL
    else:
        # affine: singular values of products need enumeration, so cap the
        # level count at what the word budget allows
        lows, highs = [], []
        for k in range(1, levels + 1):
            if ifs.n_maps ** k > budget:
                break
            lp, lm = word_lip_tables(ifs, k, budget)
            highs.append(float(np.sum(lp ** d)))
            lows.append(float(np.sum(lm ** d)))
        if not highs:
            raise InvalidInput(
                f"word budget {budget} does not allow even one series level")
        level_lower = np.array(lows)
        level_upper = np.array(highs)
        exact = False
        run = 0
        diverges = False
        for value in level_lower:
            run = run + 1 if value >= 1.0 - DIVERGENCE_LEVEL_TOL else 0
            if run >= DIVERGENCE_RUN:
                diverges = True
                break
    partials = tuple(
        (k + 1, float(np.sum(level_lower[: k + 1])), float(np.sum(level_upper[: k + 1])))
        for k in range(len(level_upper))
    )
    return SeriesBounds(
        d=float(d),
        partial_sums=partials,
        level_sums_lower=level_lower,
        level_sums_upper=level_upper,
        diverges=bool(diverges),
        exact_divergence_test=exact,
    )


@dataclass(frozen=True)
class MeasureReport:
    """Classification of H^d(F_C) with certified numeric bounds.

    lower_bound drops the (nonnegative, unresolved) homogeneous term, so it
    is always valid; upper_bound is finite only when the homogeneous term is
    certified zero (d above the upper Lipschitz bound) and the word series
    has a certified convergent tail.
    """

    d: float
    regime: str
    lower_bound: float
    upper_bound: float
    closed_form: float | None
    series: SeriesBounds | None
    notes: tuple[str, ...] = field(default_factory=tuple)


def closed_form_self_similar(ifs: IFSystem,
                             c_measure: tuple[float, float]) -> float:
    """H^d(F_C) = H^d(C) / (1 - sum ratio^d) for similarity systems under
    the closed separation assertion; infinite at or below the similarity
    dimension."""
    if ifs.variant != "similarity":
        raise WrongVariant("the closed form needs a similarity system")
    d, h_c = c_measure
    if not h_c > 0 or not math.isfinite(h_c):
        raise InvalidInput("the closed form needs 0 < H^d(C) < infinity")
    q = float(np.sum(ifs.lip_plus_vector ** d))
    if q >= 1.0 - DIVERGENCE_LEVEL_TOL:
        return math.inf
    if not ifs.asserted_cosc:
        raise InvalidInput(
            "the finite closed-form branch needs the closed separation assertion"
        )
    return h_c / (1.0 - q)


def classify(ifs: IFSystem, c_measure: tuple[float, float], s_upper: float,
             s_lower_k1: float, levels: int = DEFAULT_SERIES_LEVELS,
             budget: int = DEFAULT_WORD_BUDGET) -> MeasureReport:
    """Decide the measure regime of H^d(F_C) at d = c_measure[0].

    s_upper must be a certified upper bound for the upper Lipschitz
    dimension (any doubling-chain value); s_lower_k1 a certified lower
    reference, e.g. lower_lipschitz_root. Degenerate H^d(C) delegates the
    answer to the homogeneous part; negative input is rejected.
    """
    d, h_c = c_measure
    if h_c < 0 or math.isnan(h_c):
        raise InvalidInput("H^d(C) must be nonnegative")
    notes: list[str] = []
    if h_c == 0.0 or math.isinf(h_c):
        notes.append(
            "H^d(C) is degenerate at this d: the inhomogeneous measure reduces to "
            "the homogeneous term (0 case) or is infinite (inf case)"
        )
        lower = 0.0 if h_c == 0.0 else math.inf
        return MeasureReport(d=d, regime=REGIME_DELEGATED, lower_bound=lower,
                             upper_bound=math.inf, closed_form=None, series=None,
                             notes=tuple(notes))
    series = series_bounds(ifs, d, levels, budget)
    separated = ifs.asserted_cosc
    distortion_ok = ifs.variant == "similarity" or ifs.bounded_distortion_L is not None
    closed = None
    if ifs.variant == "similarity" and separated:
        closed = closed_form_self_similar(ifs, c_measure)
    if d > s_upper:
        # the homogeneous term vanishes: its dimension sits below s < d
        upper = h_c * (1.0 + series.upper_tail_bound() + series.upper_total)
        lower = h_c * (1.0 + series.lower_total) if separated else h_c
        if not separated:
            notes.append(
                "no separation asserted: lower bound keeps only the condensation term"
            )
        return MeasureReport(d=d, regime=REGIME_POSITIVE_FINITE, lower_bound=float(lower),
                             upper_bound=float(upper), closed_form=closed,
                             series=series, notes=tuple(notes))
    if d <= s_lower_k1 + 1e-9 and separated and distortion_ok:
        notes.append(
            "d at or below the certified dimension lower bound with separation and "
            "bounded distortion: the word series diverges"
        )
        return MeasureReport(d=d, regime=REGIME_INFINITE, lower_bound=math.inf,
                             upper_bound=math.inf, closed_form=closed,
                             series=series, notes=tuple(notes))
    lower = h_c * (1.0 + series.lower_total) if separated else h_c
    notes.append(
        "d inside the uncertainty band or missing assertions: series bounds only; "
        "the homogeneous term is unresolved so no finite upper bound is certified"
    )
    return MeasureReport(d=d, regime=REGIME_BOUNDS_ONLY, lower_bound=float(lower),
                         upper_bound=math.inf, closed_form=closed,
                         series=series, notes=tuple(notes))


@dataclass(frozen=True)
class OrbitalRatio:
    """Empirical orbital-to-condensation cell ratio on a full-dim grid."""

    ratio: float
    cells_orbital: int
    cells_condensation: int
    closed_form_ratio: float
    resolution: int
    low_resolution: bool


def orbital_measure_ratio_empirical(ifs: IFSystem, cond: CondensationSet,
                                    box: AxisBox, resolution: int,
                                    budget: int = DEFAULT_WORD_BUDGET) -> OrbitalRatio:
    """Rasterize the orbital set against the condensation set at d = n.

    Counts occupied grid cells of the orbital set (images of C through all
    words whose constant is at least one grid cell, relative to the box)
    and of C alone. Under closed separation the limiting ratio is
    1 / (1 - sum |det|) with the determinant factors of the linear parts.
    """
    if not ifs.has_point_action:
        raise NoPointAction("the empirical ratio needs maps with point actions")
    if not ifs.asserted_cosc:
        raise InvalidInput("the empirical ratio is meaningful under the closed "
                           "separation assertion only")
    n = ifs.ambient_dim
    if box_dim_of(cond, n) < n or not isinstance(cond, (AxisBox, Disk)):
        raise NotFullDimensional(
            "the area ratio needs a full-dimensional condensation set (box or disk)"
        )
    if resolution < 2:
        raise InvalidInput("resolution must be at least 2")
    dets = np.array([abs(float(np.linalg.det(
        m.linear if ifs.variant == "affine" else m.ratio * m.isometry))) for m in ifs.maps])
    det_sum = float(np.sum(dets))
    closed = math.inf if det_sum >= 1.0 else 1.0 / (1.0 - det_sum)

    grid = np.zeros((resolution,) * n, dtype=bool)
    c_grid = np.zeros((resolution,) * n, dtype=bool)
    cell_rel = float(np.min(box.widths / resolution)) / max(box.diameter, 1e-300)
    frontier = root_frontier(ifs)
    visited = 1
    while len(frontier.words):
        for i in range(len(frontier.words)):
            mark_condensation_image(grid, cond, frontier.linear[i],
                                    frontier.translation[i], frontier.lip_plus[i],
                                    box, resolution)
        keep = frontier.lip_plus >= cell_rel
        idx = np.flatnonzero(keep)
        frontier = LevelFrontier(
            [frontier.words[i] for i in idx],
            frontier.lip_plus[idx], frontier.lip_minus[idx],
            frontier.linear[idx], frontier.translation[idx],
        )
        if not len(frontier.words):
            break
        frontier = expand_children(ifs, frontier)
        visited += len(frontier.words)
        if visited > budget:
            raise BudgetExceeded(
                f"orbital rasterization exceeds the word budget {budget}"
            )
    mark_condensation_image(c_grid, cond, np.eye(n), np.zeros(n), 1.0, box, resolution)
    cells_c = int(np.count_nonzero(c_grid))
    cells_o = int(np.count_nonzero(grid))
    return OrbitalRatio(
        ratio=cells_o / cells_c,
        cells_orbital=cells_o,
        cells_condensation=cells_c,
        closed_form_ratio=closed,
        resolution=resolution,
        low_resolution=cells_c < 10,
    )


def critical_exponent(ifs: IFSystem, cond: CondensationSet,
                      budget: int = DEFAULT_WORD_BUDGET) -> float:
    """Default exponent for measure classification.

    Takes the larger of the homogeneous dimension bound (exact root for
    similarity systems, best doubling bound otherwise) and the condensation
    set's dimension (declared Hausdorff exponent when present, forced box
    dimension otherwise). Under countable stability this maximum is the
    Hausdorff dimension of the inhomogeneous attractor for separated
    similarity systems.
    """
    from .pressure import similarity_dimension, upper_lipschitz_dimension

    if ifs.variant == "similarity":
        s = similarity_dimension(ifs)
    else:
        s = upper_lipschitz_dimension(ifs, budget=budget).best_upper_bound
    if cond.hausdorff is not None:
        c_dim = float(cond.hausdorff[0])
    else:
        c_dim = box_dim_of(cond, cond.ambient_dim)
    return max(float(s), c_dim)
