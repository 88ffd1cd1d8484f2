"""Command line front end.

Subcommands: `dim pressure`, `dim box`, `stopping`, `render`, `measure`,
`verify`. Every subcommand loads scenes with `--scene` (a file path or a
bundled scene name), writes CSV to stdout or into `--out <dir>`, and exits
0 on success, 1 on a failed verification, 2 on usage or input errors.
All sampling is deterministic; `--seed` is accepted so callers can pin it
in scripts, and is recorded but unused while no operation draws randomness.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

from .boxcount import Ladder, box_count_series, fit_tail, verify_theorem_bounds
from .clouds import (
    homogeneous_points,
    inhomogeneous_points,
    orbital_points_adaptive,
)
from .condensation import measure_at, sample_points
from .errors import IAKError
from .maps import DEFAULT_WORD_BUDGET
from .measure import (
    classify,
    critical_exponent,
    orbital_measure_ratio_empirical,
    series_bounds,
)
from .pressure import (
    ROOT_TOL,
    lower_lipschitz_root,
    similarity_dimension,
    upper_lipschitz_dimension,
)
from .raster import (
    attractor_grid,
    condensation_grid,
    inhomogeneous_grid,
    orbital_grid,
    write_pgm,
)
from .scene import Scene, bundled_scene_names, load_scene
from .stopping import check_cardinality_bound, delta_stopping
from .verify import DEFAULT_SUITE_SLACK, run_verification_suite


def _emit(text: str, out_dir: str | None, filename: str) -> None:
    if out_dir is None:
        sys.stdout.write(text)
    else:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, filename), "w") as handle:
            handle.write(text)


def _load_single_scene(args) -> Scene:
    if not args.scene or len(args.scene) != 1:
        raise IAKError("this subcommand needs exactly one --scene")
    return load_scene(args.scene[0])


def _g(x: float) -> str:
    return f"{x:.12g}"


def cmd_dim_pressure(args) -> int:
    scene = _load_single_scene(args)
    tol = args.tol if args.tol is not None else ROOT_TOL
    report = upper_lipschitz_dimension(scene.ifs, budget=args.budget, tol=tol)
    lines = ["k,s_k"]
    for k, s_k, _ in report.s_k_sequence:
        lines.append(f"{k},{_g(s_k)}")
    _emit("\n".join(lines) + "\n", args.out, "dim_pressure.csv")
    extra = ""
    if scene.ifs.variant == "similarity":
        extra = f" similarity_dimension={_g(similarity_dimension(scene.ifs))}"
    print(f"method={report.method} best_upper_bound={_g(report.best_upper_bound)}"
          f" converged={report.converged}{extra}", file=sys.stderr)
    return 0


def cmd_dim_box(args) -> int:
    scene = _load_single_scene(args)
    ladder = Ladder(levels=args.levels, offsets=args.offsets,
                    fit_levels=args.fit_levels)
    delta_hi, delta_lo = ladder.resolve(scene.box)
    diam = scene.box.diameter
    render_delta = delta_lo / (4.0 * diam)
    spacing = delta_lo / math.sqrt(scene.box.ambient_dim)
    cloud = inhomogeneous_points(scene.ifs, scene.condensation, render_delta,
                                 spacing, args.budget)
    series = box_count_series(cloud, delta_hi, delta_lo,
                              ladder.levels, ladder.offsets)
    fit = fit_tail(series, len(cloud), ladder.fit_levels)
    table = ["delta,count"]
    for d, c in zip(series.deltas, series.counts):
        table.append(f"{_g(d)},{c}")
    _emit("\n".join(table) + "\n", args.out, "box_counts.csv")
    summary = ("slope,intercept,r_squared,delta_hi_used,delta_lo_used,saturated\n"
               f"{_g(fit.slope)},{_g(fit.intercept)},{_g(fit.r_squared)},"
               f"{_g(fit.delta_range_used[0])},{_g(fit.delta_range_used[1])},"
               f"{'true' if fit.saturated else 'false'}\n")
    if args.out is None:
        sys.stdout.write("\n")
    _emit(summary, args.out, "box_fit.csv")
    return 0


def cmd_stopping(args) -> int:
    scene = _load_single_scene(args)
    stop = delta_stopping(scene.ifs, args.delta, args.budget)
    _emit(stop.to_csv(), args.out, "stopping_words.csv")
    if args.t is not None:
        t = args.t
    else:
        chain = upper_lipschitz_dimension(scene.ifs, budget=args.budget)
        t = chain.s_k_sequence[0][1] + 0.1
    card = check_cardinality_bound(stop, scene.ifs, t)
    audit = ["check,value,holds",
             f"prefix_free,{len(stop)},"
             f"{'true' if stop.is_prefix_free() else 'false'}",
             f"complete,{len(stop)},"
             f"{'true' if stop.is_complete(scene.ifs.n_maps) else 'false'}",
             f"sandwich,{_g(stop.delta)},"
             f"{'true' if stop.sandwich_holds() else 'false'}",
             f"cardinality_at_t={_g(t)},{card.lhs}<={_g(card.rhs)},"
             f"{'true' if card.holds else 'false'}"]
    if args.out is None:
        sys.stdout.write("\n")
    _emit("\n".join(audit) + "\n", args.out, "stopping_audit.csv")
    return 0


GRID_BUILDERS = {
    "attractor": lambda sc, res, budget: attractor_grid(sc.ifs, sc.box, res, budget),
    "orbital": lambda sc, res, budget: orbital_grid(sc.ifs, sc.condensation,
                                                    sc.box, res, budget),
    "condensation": lambda sc, res, budget: condensation_grid(sc.condensation,
                                                              sc.box, res),
    "full": lambda sc, res, budget: inhomogeneous_grid(sc.ifs, sc.condensation,
                                                       sc.box, res, budget),
}


def _render_cloud(scene: Scene, which: str, delta: float, budget: int):
    diam = scene.box.diameter
    spacing = delta * diam / 2.0
    if which == "attractor":
        return homogeneous_points(scene.ifs, delta, budget)
    if which == "orbital":
        return orbital_points_adaptive(scene.ifs, scene.condensation, delta,
                                       spacing, budget)
    if which == "condensation":
        return sample_points(scene.condensation, 4096)
    return inhomogeneous_points(scene.ifs, scene.condensation, delta,
                                spacing, budget)


def cmd_render(args) -> int:
    scene = _load_single_scene(args)
    out_dir = args.out or "."
    if args.format == "pgm":
        grid = GRID_BUILDERS[args.set](scene, args.resolution, args.budget)
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{scene.name}_{args.set}.pgm")
        write_pgm(grid, path)
        print(f"wrote {path}", file=sys.stderr)
        return 0
    cloud = _render_cloud(scene, args.set, args.delta, args.budget)
    header = ",".join(f"x{a}" for a in range(scene.box.ambient_dim))
    lines = [header]
    for row in cloud:
        lines.append(",".join(_g(float(v)) for v in row))
    _emit("\n".join(lines) + "\n", args.out, f"{scene.name}_{args.set}_points.csv")
    return 0


def cmd_measure(args) -> int:
    scene = _load_single_scene(args)
    ifs, cond = scene.ifs, scene.condensation
    d = args.d if args.d is not None else critical_exponent(ifs, cond, args.budget)
    if args.hd is not None:
        h = args.hd
    else:
        h = measure_at(cond, d)
        if h is None:
            raise IAKError(
                f"no H^d value known for the condensation set at d={d:g}; "
                "declare one in the scene or pass --hd")
    if ifs.variant == "similarity":
        s_upper = similarity_dimension(ifs)
    else:
        s_upper = upper_lipschitz_dimension(ifs, budget=args.budget).best_upper_bound
    report = classify(ifs, (d, h), s_upper=s_upper,
                      s_lower_k1=lower_lipschitz_root(ifs),
                      levels=args.K, budget=args.budget)
    closed = "" if report.closed_form is None else _g(report.closed_form)
    notes = ";".join(report.notes)
    head = ("d,regime,lower_bound,upper_bound,closed_form,notes\n"
            f"{_g(report.d)},{report.regime},{_g(report.lower_bound)},"
            f"{_g(report.upper_bound)},{closed},{notes}\n")
    _emit(head, args.out, "measure_report.csv")
    series = report.series or series_bounds(ifs, d, args.K, args.budget)
    rows = ["K,lower_partial,upper_partial"]
    for k, lo, hi in series.partial_sums:
        rows.append(f"{k},{_g(lo)},{_g(hi)}")
    if args.out is None:
        sys.stdout.write("\n")
    _emit("\n".join(rows) + "\n", args.out, "measure_series.csv")
    if args.resolution is not None:
        ratio = orbital_measure_ratio_empirical(ifs, cond, scene.box,
                                                args.resolution, args.budget)
        block = ("resolution,ratio,closed_form_ratio,cells_orbital,"
                 "cells_condensation,low_resolution\n"
                 f"{ratio.resolution},{_g(ratio.ratio)},"
                 f"{_g(ratio.closed_form_ratio)},{ratio.cells_orbital},"
                 f"{ratio.cells_condensation},"
                 f"{'true' if ratio.low_resolution else 'false'}\n")
        if args.out is None:
            sys.stdout.write("\n")
        _emit(block, args.out, "measure_ratio.csv")
    return 0


def cmd_verify(args) -> int:
    specs = args.scene if args.scene else list(bundled_scene_names())
    scenes = [load_scene(spec) for spec in specs]
    suite = run_verification_suite(scenes, slack=args.slack,
                                   budget=args.budget,
                                   ratio_resolution=args.ratio_resolution)
    _emit(suite.to_csv(), args.out, "verify.csv")
    failed = sum(1 for r in suite.results if not r.holds)
    print(f"{len(suite.results)} checks, {failed} failed", file=sys.stderr)
    return suite.exit_code


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--scene", action="append",
                        help="scene file path or bundled scene name; "
                             "repeatable for verify")
    parser.add_argument("--out", help="directory for output files "
                                      "(default: CSV to stdout)")
    parser.add_argument("--budget", type=int, default=DEFAULT_WORD_BUDGET,
                        help="word enumeration budget")
    parser.add_argument("--tol", type=float, default=None,
                        help="root-finding tolerance")
    parser.add_argument("--seed", type=int, default=None,
                        help="sampling seed (all current sampling is "
                             "deterministic)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iak",
        description="dimensions and Hausdorff measure of inhomogeneous "
                    "attractors of iterated function systems")
    sub = parser.add_subparsers(dest="command", required=True)

    dim = sub.add_parser("dim", help="dimension estimates")
    dim_sub = dim.add_subparsers(dest="dim_command", required=True)

    p = dim_sub.add_parser("pressure", help="pressure-root upper bounds s_k")
    _add_common(p)
    p.set_defaults(func=cmd_dim_pressure)

    p = dim_sub.add_parser("box", help="box-count table and slope fit")
    _add_common(p)
    p.add_argument("--levels", type=int, default=Ladder.levels)
    p.add_argument("--offsets", type=int, default=Ladder.offsets)
    p.add_argument("--fit-levels", type=int, default=Ladder.fit_levels)
    p.set_defaults(func=cmd_dim_box)

    p = sub.add_parser("stopping", help="stopping words and lemma audit")
    _add_common(p)
    p.add_argument("--delta", type=float, required=True,
                   help="stopping threshold in (0, 1)")
    p.add_argument("--t", type=float, default=None,
                   help="exponent for the cardinality bound "
                        "(default: level-1 root + 0.1)")
    p.set_defaults(func=cmd_stopping)

    p = sub.add_parser("render", help="rasterize or sample a scene")
    _add_common(p)
    p.add_argument("--set", choices=sorted(GRID_BUILDERS), default="full")
    p.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    p.add_argument("--resolution", type=int, default=1024,
                   help="grid cells per axis for pgm output")
    p.add_argument("--delta", type=float, default=1.0 / 512.0,
                   help="cylinder threshold for csv point clouds")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("measure", help="Hausdorff measure classification")
    _add_common(p)
    p.add_argument("--d", type=float, default=None,
                   help="exponent (default: critical exponent of the scene)")
    p.add_argument("--hd", type=float, default=None,
                   help="H^d of the condensation set "
                        "(default: declared or exact value)")
    p.add_argument("--K", type=int, default=40,
                   help="number of series levels")
    p.add_argument("--resolution", type=int, default=None,
                   help="also compute the empirical cell ratio at this "
                        "resolution")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("verify", help="run the scene verification suite")
    _add_common(p)
    p.add_argument("--slack", type=float, default=DEFAULT_SUITE_SLACK,
                   help="tolerance for estimate checks")
    p.add_argument("--ratio-resolution", type=int, default=1024,
                   help="grid resolution for empirical ratio checks")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IAKError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
