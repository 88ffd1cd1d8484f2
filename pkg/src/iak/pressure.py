"""Partition sums, pressure, and dimension quantities.

The level-k partition sum at exponent t adds lip_plus^t over all N^k
length-k words. Its root s_k (sum equal to one) decreases along the
doubling subsequence k, 2k, 4k, ... by submultiplicativity of the upper
constants, so every s_k is an upper bound for the limiting upper Lipschitz
dimension and the doubling chain certifies convergence from above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, WrongVariant
from .maps import DEFAULT_WORD_BUDGET, IFSystem, check_word_budget

ROOT_TOL = 1e-10
SIMILARITY_ROOT_TOL = 1e-12
MAX_DOUBLING_LEVEL = 64


@dataclass(frozen=True)
class PressureEvaluation:
    """One finite-level pressure sample: (1/k) log of the partition sum."""

    k: int
    t: float
    partition_sum: float
    pressure: float


@dataclass(frozen=True)
class DimensionReport:
    """Doubling-subsequence roots and the best certified upper bound.

    method is one of 'similarity-exact', 'affinity', 'lipschitz-enumeration',
    with the suffix ' (bound)' when the inputs are product bounds rather
    than exact constants. out_of_regime flags an affinity value above 1.
    """

    s_k_sequence: tuple[tuple[int, float, float], ...]
    best_upper_bound: float
    method: str
    converged: bool
    out_of_regime: bool = False

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(k for k, _, _ in self.s_k_sequence)

    def value_at(self, k: int) -> float:
        for kk, val, _ in self.s_k_sequence:
            if kk == k:
                return val
        raise KeyError(f"no root computed at level {k}")


def _level_tables(ifs: IFSystem, k: int, budget: int) -> tuple[np.ndarray, np.ndarray]:
    """lip_plus / lip_minus for all N^k words in lexicographic order."""
    check_word_budget(ifs.n_maps, k, budget)
    if ifs.variant == "affine":
        mats = np.stack([m.linear for m in ifs.maps])
        level = mats
        for _ in range(k - 1):
            level = np.einsum("pab,ibc->piac", level, mats).reshape(
                -1, ifs.ambient_dim, ifs.ambient_dim
            )
        sigma = np.linalg.svd(level, compute_uv=False)
        return sigma[:, 0].copy(), sigma[:, -1].copy()
    lp1 = ifs.lip_plus_vector
    lm1 = ifs.lip_minus_vector
    lp, lm = lp1, lm1
    for _ in range(k - 1):
        lp = (lp[:, None] * lp1[None, :]).ravel()
        lm = (lm[:, None] * lm1[None, :]).ravel()
    return lp, lm


def word_lip_tables(ifs: IFSystem, k: int,
                    budget: int = DEFAULT_WORD_BUDGET) -> tuple[np.ndarray, np.ndarray]:
    """Public accessor for the level-k Lipschitz tables."""
    if k < 1:
        raise ValueError("level k must be a positive integer")
    return _level_tables(ifs, k, budget)


def partition_sum(ifs: IFSystem, k: int, t: float,
                  budget: int = DEFAULT_WORD_BUDGET) -> float:
    """Sum of lip_plus^t over all length-k words; t = 0 gives N^k."""
    lp, _ = word_lip_tables(ifs, k, budget)
    return float(np.sum(lp ** t))


def pressure_eval(ifs: IFSystem, k: int, t: float,
                  budget: int = DEFAULT_WORD_BUDGET) -> PressureEvaluation:
    total = partition_sum(ifs, k, t, budget)
    return PressureEvaluation(k=k, t=t, partition_sum=total,
                              pressure=math.log(total) / k)


def _root_from_lips(lp: np.ndarray, t_start: float, tol: float) -> float:
    """Bisect the decreasing map t -> sum(lp^t) - 1 until the bracket is
    float-exhausted, well past the requested certificate tol.

    Exhaustive bisection keeps roots of algebraically identical levels
    within a few ulps of each other, which the level-invariance checks for
    similarity systems rely on. tol only names the quoted certificate.
    """
    del tol  # over-delivered; kept in signatures as the quoted certificate
    log_lp = np.log(lp)

    def f(t: float) -> float:
        return float(np.sum(np.exp(t * log_lp))) - 1.0

    if f(0.0) <= 0.0:
        return 0.0  # single-word levels: the root sits at t = 0 exactly
    t_hi = max(t_start, 1.0)
    while f(t_hi) > 0.0:
        t_hi *= 2.0
        if t_hi > 1e6:
            raise ArithmeticError("no bracket for the partition-sum root")
    t_lo = 0.0
    while True:
        mid = 0.5 * (t_lo + t_hi)
        if mid == t_lo or mid == t_hi:
            return mid
        if f(mid) > 0.0:
            t_lo = mid
        else:
            t_hi = mid


def solve_s_k(ifs: IFSystem, k: int, tol: float = ROOT_TOL,
              budget: int = DEFAULT_WORD_BUDGET) -> float:
    """Root of the level-k partition sum, certified to |sum - 1| <= tol."""
    lp, _ = word_lip_tables(ifs, k, budget)
    return _root_from_lips(lp, 2.0 * ifs.ambient_dim, tol)


def _method_tag(ifs: IFSystem, base: str | None = None) -> str:
    if base is None:
        base = {"similarity": "similarity-exact",
                "affine": "affinity",
                "abstract": "lipschitz-enumeration"}[ifs.variant]
    if ifs.variant == "abstract":
        base += " (bound)"
    return base


def upper_lipschitz_dimension(ifs: IFSystem, budget: int = DEFAULT_WORD_BUDGET,
                              tol: float = ROOT_TOL) -> DimensionReport:
    """Roots along k = 1, 2, 4, 8, ... while N^k fits the budget.

    Level tables are memoized across the doubling (the 2k table is the outer
    product of the k table with itself), so each level costs one squaring.
    """
    n_maps = ifs.n_maps
    seq: list[tuple[int, float, float]] = []
    k = 1
    if ifs.variant == "affine":
        mats = np.stack([m.linear for m in ifs.maps])
        level = mats
    else:
        level = ifs.lip_plus_vector
    while n_maps ** k <= budget and k <= MAX_DOUBLING_LEVEL:
        if ifs.variant == "affine":
            sigma = np.linalg.svd(level, compute_uv=False)
            lp = sigma[:, 0].copy()
        else:
            lp = level
        seq.append((k, _root_from_lips(lp, 2.0 * ifs.ambient_dim, tol), tol))
        if n_maps ** (2 * k) > budget or 2 * k > MAX_DOUBLING_LEVEL:
            break
        if ifs.variant == "affine":
            level = np.einsum("pab,qbc->pqac", level, level).reshape(
                -1, ifs.ambient_dim, ifs.ambient_dim
            )
        else:
            level = (level[:, None] * level[None, :]).ravel()
        k *= 2
    values = [v for _, v, _ in seq]
    converged = len(values) >= 2 and abs(values[-1] - values[-2]) <= tol
    return DimensionReport(
        s_k_sequence=tuple(seq),
        best_upper_bound=float(min(values)),
        method=_method_tag(ifs),
        converged=converged,
    )


def similarity_dimension(ifs: IFSystem) -> float:
    """Root of sum(ratio_i^s) = 1; exact for similarity systems at any level."""
    if ifs.variant != "similarity":
        raise WrongVariant("similarity dimension is defined for similarity systems only")
    return _root_from_lips(ifs.lip_plus_vector, 2.0 * ifs.ambient_dim,
                           SIMILARITY_ROOT_TOL)


def lower_lipschitz_root(ifs: IFSystem) -> float:
    """Root of sum(lip_minus^t) = 1, a certified lower bound for the
    upper Lipschitz dimension (lower constants are supermultiplicative)."""
    return _root_from_lips(ifs.lip_minus_vector, 2.0 * ifs.ambient_dim,
                           SIMILARITY_ROOT_TOL)


def affinity_dimension_le1(ifs: IFSystem, budget: int = DEFAULT_WORD_BUDGET,
                           tol: float = ROOT_TOL) -> DimensionReport:
    """Doubling-chain bound for affine systems; trustworthy as the affinity
    value only when it lands at or below 1, flagged out_of_regime otherwise."""
    if ifs.variant != "affine":
        raise WrongVariant("the affinity routine expects an affine system")
    report = upper_lipschitz_dimension(ifs, budget, tol)
    out = report.best_upper_bound > 1.0
    return DimensionReport(
        s_k_sequence=report.s_k_sequence,
        best_upper_bound=report.best_upper_bound,
        method="affinity",
        converged=report.converged,
        out_of_regime=out,
    )


def distortion_ratio(ifs: IFSystem, k: int,
                     budget: int = DEFAULT_WORD_BUDGET) -> float:
    """Largest lip_plus / lip_minus over length-k words; 1 for similarities.

    Audits an asserted distortion constant L: the ratio must stay below L
    at every level for the assertion to be coherent.
    """
    lp, lm = word_lip_tables(ifs, k, budget)
    return float(np.max(lp / lm))
