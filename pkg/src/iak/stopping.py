"""Stopping-time word sets at a threshold delta.

For delta in (0, 1], the stopping set collects the minimal words whose
composite upper Lipschitz constant first drops below delta. The empty word
has constant 1 by convention, so it is always expanded and every stopping
word has length at least one. The set is prefix-free and complete: every
infinite letter sequence passes through exactly one stopping word.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .condensation import AxisBox, CondensationSet, sample_points
from .errors import BudgetExceeded, SeriesDiverges
from .maps import (
    DEFAULT_WORD_BUDGET,
    Affine,
    ComposedMap,
    IFSystem,
    Similarity,
    Word,
    compose,
    word_str,
)


@dataclass
class LevelFrontier:
    """One breadth level of the expansion tree, vectorized over words."""

    words: list[Word]
    lip_plus: np.ndarray
    lip_minus: np.ndarray
    linear: np.ndarray | None      # (m, n, n) composite linear parts
    translation: np.ndarray | None  # (m, n)


@dataclass
class StoppingWalk:
    """Stopping words plus the interior words that were expanded to reach them."""

    stops: LevelFrontier
    interior: LevelFrontier
    visited: int


def root_frontier(ifs: IFSystem) -> LevelFrontier:
    n = ifs.ambient_dim
    if ifs.has_point_action:
        linear = np.eye(n)[None, :, :]
        translation = np.zeros((1, n))
    else:
        linear = translation = None
    return LevelFrontier([()], np.ones(1), np.ones(1), linear, translation)


def expand_children(ifs: IFSystem, parents: LevelFrontier) -> LevelFrontier:
    """All one-letter extensions of the parent level, lexicographic within it."""
    n = ifs.ambient_dim
    n_maps = ifs.n_maps
    words = [w + (i,) for w in parents.words for i in range(1, n_maps + 1)]
    if ifs.variant == "abstract":
        lp = (parents.lip_plus[:, None] * ifs.lip_plus_vector[None, :]).ravel()
        lm = (parents.lip_minus[:, None] * ifs.lip_minus_vector[None, :]).ravel()
        return LevelFrontier(words, lp, lm, None, None)
    mats = np.stack([m.linear for m in ifs.maps])
    linear = np.einsum("pab,ibc->piac", parents.linear, mats).reshape(-1, n, n)
    trans = (parents.translation[:, None, :]
             + np.einsum("pab,ib->pia", parents.linear,
                         np.stack([m.translation for m in ifs.maps])))
    trans = trans.reshape(-1, n)
    if ifs.variant == "similarity":
        # ratio products are the exact constants; the matrices only carry the action
        lp = (parents.lip_plus[:, None] * ifs.lip_plus_vector[None, :]).ravel()
        return LevelFrontier(words, lp, lp.copy(), linear, trans)
    sigma = np.linalg.svd(linear, compute_uv=False)
    return LevelFrontier(words, sigma[:, 0].copy(), sigma[:, -1].copy(), linear, trans)


def _take(level: LevelFrontier, idx: np.ndarray) -> LevelFrontier:
    return LevelFrontier(
        [level.words[i] for i in idx],
        level.lip_plus[idx],
        level.lip_minus[idx],
        level.linear[idx] if level.linear is not None else None,
        level.translation[idx] if level.translation is not None else None,
    )


def _select(level: LevelFrontier, mask: np.ndarray) -> LevelFrontier:
    return _take(level, np.flatnonzero(mask))


def _concat(levels: list[LevelFrontier], with_actions: bool) -> LevelFrontier:
    words = [w for lv in levels for w in lv.words]
    lp = np.concatenate([lv.lip_plus for lv in levels]) if levels else np.empty(0)
    lm = np.concatenate([lv.lip_minus for lv in levels]) if levels else np.empty(0)
    if with_actions and levels:
        linear = np.concatenate([lv.linear for lv in levels])
        trans = np.concatenate([lv.translation for lv in levels])
    else:
        linear = trans = None
    return LevelFrontier(words, lp, lm, linear, trans)


def walk_stopping(ifs: IFSystem, delta: float,
                  budget: int = DEFAULT_WORD_BUDGET) -> StoppingWalk:
    """Expand words breadth-first until every branch drops below delta.

    A word is expanded while its upper constant is >= delta; the first word
    below delta on each branch is a stopping word. The budget caps the total
    number of words materialized.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    frontier = root_frontier(ifs)
    stop_levels: list[LevelFrontier] = []
    interior_levels: list[LevelFrontier] = []
    visited = 1
    while len(frontier.words):
        expanding = _select(frontier, frontier.lip_plus >= delta)
        interior_levels.append(expanding)
        children = expand_children(ifs, expanding)
        visited += len(children.words)
        if visited > budget:
            raise BudgetExceeded(
                f"stopping enumeration at delta={delta:g} exceeds the word budget {budget}"
            )
        stop_mask = children.lip_plus < delta
        stop_levels.append(_select(children, stop_mask))
        frontier = _select(children, ~stop_mask)
    with_actions = ifs.has_point_action
    stops = _concat(stop_levels, with_actions)
    if stops.words:
        order = np.array(sorted(range(len(stops.words)), key=lambda i: stops.words[i]))
        stops = _take(stops, order)
    interior = _concat(interior_levels, with_actions)
    return StoppingWalk(stops, interior, visited)


@dataclass
class DeltaStopping:
    """The stopping word set at threshold delta, lexicographically ordered."""

    delta: float
    words: tuple[Word, ...]
    lip_plus: np.ndarray
    lip_minus: np.ndarray
    l_min: float
    b_t_cache: dict[float, float] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.words)

    @property
    def max_depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def is_prefix_free(self) -> bool:
        """No stopping word is a proper prefix of another (sorted-neighbor test)."""
        ws = self.words
        for a, b in zip(ws, ws[1:]):
            if b[: len(a)] == a:
                return False
        return True

    def is_complete(self, n_maps: int) -> bool:
        """Every infinite sequence passes a stopping word exactly once.

        With prefix-freeness this reduces to a counting identity at the
        maximal depth: the cylinders below the stopping words tile all
        N^depth words.
        """
        depth = self.max_depth
        total = sum(n_maps ** (depth - len(w)) for w in self.words)
        return self.is_prefix_free() and total == n_maps ** depth

    def sandwich_holds(self) -> bool:
        """delta * l_min <= lip_plus < delta for every stopping word."""
        return bool(
            np.all(self.lip_plus < self.delta)
            and np.all(self.lip_plus >= self.delta * self.l_min)
        )

    def to_csv(self) -> str:
        lines = ["word,lip_plus,lip_minus"]
        for w, lp, lm in zip(self.words, self.lip_plus, self.lip_minus):
            lines.append(f"{word_str(w)},{lp:.12g},{lm:.12g}")
        return "\n".join(lines) + "\n"


def delta_stopping(ifs: IFSystem, delta: float,
                   budget: int = DEFAULT_WORD_BUDGET) -> DeltaStopping:
    """Enumerate the stopping set at delta. See walk_stopping for the policy."""
    walk = walk_stopping(ifs, delta, budget)
    l_min = float(np.min(ifs.lip_minus_vector))
    return DeltaStopping(
        delta=float(delta),
        words=tuple(walk.stops.words),
        lip_plus=walk.stops.lip_plus,
        lip_minus=walk.stops.lip_minus,
        l_min=l_min,
    )


def b_t_constant(ifs: IFSystem, t: float) -> float:
    """Geometric tail constant q / (1 - q) with q = sum of lip_plus^t.

    Defined only where q < 1, which is exactly t above the level-1 root;
    at or below it the underlying series diverges.
    """
    q = float(np.sum(ifs.lip_plus_vector ** t))
    if q >= 1.0:
        raise SeriesDiverges(
            f"sum of lip_plus^t is {q:.6g} >= 1 at t={t:g}; the tail constant diverges"
        )
    return q / (1.0 - q)


@dataclass(frozen=True)
class CardinalityCheck:
    """Observed stopping size against the geometric-tail ceiling."""

    t: float
    lhs: int
    rhs: float
    holds: bool


def check_cardinality_bound(stopping: DeltaStopping, ifs: IFSystem,
                            t: float) -> CardinalityCheck:
    """Audit |stopping| <= b_t * l_min^(-t) * delta^(-t)."""
    key = float(t)
    if key not in stopping.b_t_cache:
        stopping.b_t_cache[key] = b_t_constant(ifs, t)
    b_t = stopping.b_t_cache[key]
    rhs = b_t * stopping.l_min ** (-t) * stopping.delta ** (-t)
    lhs = len(stopping)
    return CardinalityCheck(t=key, lhs=lhs, rhs=float(rhs), holds=lhs <= rhs)


def check_inclusion(ifs: IFSystem, cond: CondensationSet, delta: float,
                    sample_count: int, box: AxisBox,
                    budget: int = DEFAULT_WORD_BUDGET,
                    tol: float = 1e-9) -> bool:
    """Sampled audit: deep copies of the set sit inside stopping cylinders.

    Points are drawn from S_w(C) for the stopping words and their one-letter
    extensions (the first words past the threshold on each branch), and each
    point must land in some stopping cylinder S_v(X), tested by pulling the
    point back through S_v and checking membership in X within tol.
    """
    walk = walk_stopping(ifs, delta, budget)
    stops = walk.stops
    if not len(stops.words):
        return True
    samples = sample_points(cond, sample_count)
    cylinders = list(zip(stops.linear, stops.translation))

    def covered(points: np.ndarray) -> bool:
        remaining = points
        for linear, trans in cylinders:
            if not len(remaining):
                return True
            local = np.linalg.solve(linear, (remaining - trans).T).T
            inside = box.contains(local, tol=tol)
            remaining = remaining[~inside]
        return len(remaining) == 0

    test_words: list[Word] = list(stops.words)
    test_words += [w + (i,) for w in stops.words for i in range(1, ifs.n_maps + 1)]
    if len(test_words) * len(samples) > budget:
        test_words = test_words[: max(1, budget // max(1, len(samples)))]
    for word in test_words:
        comp: ComposedMap = compose(ifs, word)
        if not covered(comp.apply(samples)):
            return False
    return True
