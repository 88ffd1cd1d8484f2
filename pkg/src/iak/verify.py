"""Scene verification suite: every check the bundled scenes must pass.

A check row compares a computed value against an interval and reports a
holds flag. Structural checks (dimension sandwich, doubling monotonicity,
stopping audits) run on every scene; expectation checks run only when the
scene declares the matching `expected` entry. The suite is deterministic:
identical scenes and flags produce byte-identical CSV.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .boxcount import Ladder, verify_theorem_bounds
from .errors import InvalidInput
from .maps import DEFAULT_WORD_BUDGET
from .measure import (
    classify,
    closed_form_self_similar,
    critical_exponent,
    orbital_measure_ratio_empirical,
)
from .condensation import measure_at
from .pressure import (
    lower_lipschitz_root,
    similarity_dimension,
    upper_lipschitz_dimension,
)
from .scene import Scene
from .stopping import check_cardinality_bound, delta_stopping

DEFAULT_SUITE_SLACK = 0.05
DOUBLING_TOL = 1e-9
AUDIT_DELTAS = (2.0 ** -4, 2.0 ** -6, 2.0 ** -8)
DEFAULT_RATIO_RESOLUTION = 1024


@dataclass(frozen=True)
class CheckResult:
    """One verified quantity: value against [lo, hi], or a label match."""

    scene: str
    check: str
    value: float | str
    lo: float | None
    hi: float | None
    holds: bool


def _fmt(x: float | str | None) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return f"{x:.12g}"


def results_to_csv(results: list[CheckResult]) -> str:
    lines = ["scene,check,value,lo,hi,holds"]
    for r in results:
        lines.append(",".join([r.scene, r.check, _fmt(r.value),
                               _fmt(r.lo), _fmt(r.hi),
                               "true" if r.holds else "false"]))
    return "\n".join(lines) + "\n"


def _interval_check(scene: str, check: str, value: float,
                    expected: dict, default_slack: float) -> CheckResult:
    if "lo" in expected:
        lo, hi = float(expected["lo"]), float(expected["hi"])
    else:
        target = float(expected["target"])
        slack = expected.get("slack")
        slack = default_slack if slack is None else float(slack)
        lo, hi = target - slack, target + slack
    return CheckResult(scene, check, value, lo, hi, lo <= value <= hi)


def _upper_dimension(scene: Scene, budget: int) -> float:
    if scene.ifs.variant == "similarity":
        return similarity_dimension(scene.ifs)
    return upper_lipschitz_dimension(scene.ifs, budget=budget).best_upper_bound


def run_scene_checks(scene: Scene, slack: float = DEFAULT_SUITE_SLACK,
                     budget: int = DEFAULT_WORD_BUDGET,
                     ratio_resolution: int = DEFAULT_RATIO_RESOLUTION) -> list[CheckResult]:
    """All checks for one scene, ordered by check name."""
    ifs, cond, name = scene.ifs, scene.condensation, scene.name
    expected = scene.expected
    results: list[CheckResult] = []

    s_upper = _upper_dimension(scene, budget)
    if "upper_dimension" in expected:
        results.append(_interval_check(name, "upper_dimension", s_upper,
                                       expected["upper_dimension"], slack))
    if "affinity_dimension" in expected:
        from .pressure import affinity_dimension_le1

        aff = affinity_dimension_le1(ifs, budget=budget).best_upper_bound
        results.append(_interval_check(name, "affinity_dimension", aff,
                                       expected["affinity_dimension"], slack))

    # doubling chain must be monotone non-increasing
    chain = upper_lipschitz_dimension(ifs, budget=budget).s_k_sequence
    worst = max((chain[i + 1][1] - chain[i][1] for i in range(len(chain) - 1)),
                default=0.0)
    results.append(CheckResult(name, "pressure_doubling", worst,
                               None, DOUBLING_TOL, worst <= DOUBLING_TOL))

    report = verify_theorem_bounds(ifs, cond, scene.box, ladder=Ladder(),
                                   slack=slack, budget=budget)
    results.append(CheckResult(name, "theorem_sandwich", report.estimate,
                               report.lower - slack, report.upper + slack,
                               report.holds))
    hom_fit = report.attractor_fit.slope
    results.append(CheckResult(name, "hom_fit_le_upper", hom_fit, None,
                               report.pressure_upper_bound + slack,
                               hom_fit <= report.pressure_upper_bound + slack))
    if "box_dimension" in expected:
        results.append(_interval_check(name, "box_dimension", report.estimate,
                                       expected["box_dimension"], slack))

    # stopping audits at a small delta ladder, t just above the level-1
    # upper root so the tail constant is finite
    t = chain[0][1] + 0.1
    audits_ok = True
    for delta in AUDIT_DELTAS:
        stop = delta_stopping(ifs, delta, budget)
        card = check_cardinality_bound(stop, ifs, t)
        audits_ok = (audits_ok and stop.is_prefix_free()
                     and stop.is_complete(ifs.n_maps)
                     and stop.sandwich_holds() and card.holds)
    results.append(CheckResult(name, "stopping_audit",
                               "pass" if audits_ok else "fail",
                               None, None, audits_ok))

    if "measure_regime" in expected:
        d = critical_exponent(ifs, cond, budget)
        h = measure_at(cond, d)
        want = str(expected["measure_regime"]["target"])
        if h is None:
            results.append(CheckResult(name, "measure_regime", "no-measure",
                                       None, None, False))
        else:
            mrep = classify(ifs, (d, h), s_upper=s_upper,
                            s_lower_k1=lower_lipschitz_root(ifs), budget=budget)
            results.append(CheckResult(name, "measure_regime", mrep.regime,
                                       None, None, mrep.regime == want))
    if "closed_form" in expected:
        d = critical_exponent(ifs, cond, budget)
        h = measure_at(cond, d)
        if h is None:
            results.append(CheckResult(name, "closed_form", "no-measure",
                                       None, None, False))
        else:
            value = closed_form_self_similar(ifs, (d, h))
            results.append(_interval_check(name, "closed_form", value,
                                           expected["closed_form"], slack))
    if "orbital_ratio" in expected:
        ratio = orbital_measure_ratio_empirical(ifs, cond, scene.box,
                                                ratio_resolution, budget)
        results.append(_interval_check(name, "orbital_ratio", ratio.ratio,
                                       expected["orbital_ratio"], slack))

    results.sort(key=lambda r: r.check)
    return results


@dataclass(frozen=True)
class SuiteResult:
    """All check rows plus the aggregate holds flag (exit-code contract)."""

    results: tuple[CheckResult, ...]
    all_hold: bool

    @property
    def exit_code(self) -> int:
        return 0 if self.all_hold else 1

    def to_csv(self) -> str:
        return results_to_csv(list(self.results))


def _thread_cap(n_scenes: int) -> int:
    env = os.environ.get("IAK_THREADS")
    cap = os.cpu_count() or 1
    if env:
        try:
            cap = max(1, int(env))
        except ValueError:
            pass
    return max(1, min(cap, n_scenes))


def run_verification_suite(scenes: list[Scene],
                           slack: float = DEFAULT_SUITE_SLACK,
                           budget: int = DEFAULT_WORD_BUDGET,
                           ratio_resolution: int = DEFAULT_RATIO_RESOLUTION) -> SuiteResult:
    """Run every scene's checks, scenes in parallel, output deterministic.

    Rows are sorted by (scene, check) after the parallel phase, so thread
    scheduling never shows in the CSV. The empty scene list verifies
    vacuously.
    """
    if not math.isfinite(slack) or slack < 0:
        raise InvalidInput("slack must be a nonnegative finite real")
    if not scenes:
        return SuiteResult(results=(), all_hold=True)
    rows: list[CheckResult] = []
    with ThreadPoolExecutor(max_workers=_thread_cap(len(scenes))) as pool:
        for chunk in pool.map(
                lambda sc: run_scene_checks(sc, slack, budget, ratio_resolution),
                scenes):
            rows.extend(chunk)
    rows.sort(key=lambda r: (r.scene, r.check))
    return SuiteResult(results=tuple(rows), all_hold=all(r.holds for r in rows))
