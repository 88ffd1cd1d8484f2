"""Point clouds for the homogeneous attractor, the orbital set, and their union.

Rendering never iterates to a fixed depth: words are expanded until their
upper Lipschitz constant drops below a threshold delta, so every cylinder
in the cloud has diameter at most delta times the diameter of the ambient
box regardless of how unevenly the maps contract.
"""
from __future__ import annotations

import numpy as np

from .condensation import CondensationSet, sample_points, sample_with_spacing
from .errors import BudgetExceeded, NoPointAction
from .maps import DEFAULT_WORD_BUDGET, IFSystem, fixed_point
from .stopping import walk_stopping

DEFAULT_POINT_BUDGET = 20_000_000


def _require_action(ifs: IFSystem) -> None:
    if not ifs.has_point_action:
        raise NoPointAction("rendering needs maps with point actions")


def homogeneous_points(ifs: IFSystem, delta: float,
                       budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """One representative per stopping cylinder at threshold delta.

    The representative of a word is the image of the fixed point of the
    first map, which lies on the attractor, so the cloud is a subset of the
    attractor and is (delta * diam X)-dense in it.
    """
    _require_action(ifs)
    walk = walk_stopping(ifs, delta, budget)
    x0 = fixed_point(ifs.maps[0])
    stops = walk.stops
    return np.einsum("wab,b->wa", stops.linear, x0) + stops.translation


def orbital_points(ifs: IFSystem, cond: CondensationSet, delta: float,
                   samples_per_copy: int,
                   budget: int = DEFAULT_WORD_BUDGET) -> np.ndarray:
    """Samples of the orbital set: one shared sample of the condensation set
    pushed through every word with lip_plus >= delta (the empty word
    included), plus one representative per stopping cylinder to stand in
    for all deeper copies."""
    _require_action(ifs)
    walk = walk_stopping(ifs, delta, budget)
    base = sample_points(cond, samples_per_copy)
    interior = walk.interior
    copies = (np.einsum("wab,sb->wsa", interior.linear, base)
              + interior.translation[:, None, :]).reshape(-1, ifs.ambient_dim)
    pieces = [copies]
    if len(walk.stops.words):
        x0 = fixed_point(ifs.maps[0])
        reps = np.einsum("wab,b->wa", walk.stops.linear, x0) + walk.stops.translation
        pieces.append(reps)
    return np.vstack(pieces)


def orbital_points_adaptive(ifs: IFSystem, cond: CondensationSet, delta: float,
                            spacing: float,
                            budget: int = DEFAULT_WORD_BUDGET,
                            point_budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    """Orbital cloud with a per-word condensation sample.

    Each copy S_w(C) is sampled with grid step spacing / lip_plus(w) in the
    frame of C, so every rendered copy is spacing-dense in ambient
    coordinates while large words do not force the same density on small
    ones. Equivalent guarantee to orbital_points at a far lower point count.
    """
    _require_action(ifs)
    walk = walk_stopping(ifs, delta, budget)
    pieces: list[np.ndarray] = []
    total = 0
    interior = walk.interior
    for i in range(len(interior.words)):
        lip = interior.lip_plus[i]
        base = sample_with_spacing(cond, spacing / lip)
        total += len(base)
        if total > point_budget:
            raise BudgetExceeded(
                f"adaptive orbital cloud exceeds the point budget {point_budget}"
            )
        pieces.append(base @ interior.linear[i].T + interior.translation[i])
    if len(walk.stops.words):
        x0 = fixed_point(ifs.maps[0])
        reps = np.einsum("wab,b->wa", walk.stops.linear, x0) + walk.stops.translation
        pieces.append(reps)
    return np.vstack(pieces)


def inhomogeneous_points(ifs: IFSystem, cond: CondensationSet, delta: float,
                         spacing: float,
                         budget: int = DEFAULT_WORD_BUDGET,
                         point_budget: int = DEFAULT_POINT_BUDGET) -> np.ndarray:
    """Cloud for the inhomogeneous attractor: attractor representatives
    united with the adaptive orbital cloud (which contains the condensation
    samples as its empty-word copy)."""
    hom = homogeneous_points(ifs, delta, budget)
    orb = orbital_points_adaptive(ifs, cond, delta, spacing, budget, point_budget)
    return np.vstack([hom, orb])
