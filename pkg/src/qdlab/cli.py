"""Command-line interface: generation, exact oracles, bounds, constants, reports."""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from . import report as rpt
from .bounds import (
    BOUND_KINDS,
    BoundModel,
    delta_star,
    delta_star_from_log,
    lambert_w,
    lambert_w_residual,
    projection_bound,
)
from .constants import CDeltaReport, c_delta_alt, c_delta_hn, c_delta_table, c_delta_table_grid, n_min
from .core import BudgetError, LogValue, WeightFamily, first_primes
from .exact import (
    star_discrepancy_exact,
    subset_contributions,
    unanchored_discrepancy_exact,
    weighted_star_discrepancy_exact,
    weighted_unanchored_discrepancy_exact,
)
from .sequences import PointSet, halton_points, halton_points_incremental


def _resolve_format(args: argparse.Namespace) -> str:
    if args.format:
        return args.format
    if args.output:
        ext = Path(args.output).suffix.lower()
        if ext == ".json":
            return "json"
        return "csv"
    return "table" if sys.stdout.isatty() else "csv"


def _resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        value = args.threads
    else:
        value = int(os.environ.get("QDL_THREADS", "1"))
    if value < 1:
        raise ValueError("--threads must be >= 1")
    return value


def _emit(args: argparse.Namespace, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _emit_rows(args: argparse.Namespace, header: tuple[str, ...], rows: list[tuple[object, ...]]) -> None:
    _emit(args, rpt.render(_resolve_format(args), header, rows))


def _parse_subset(text: str) -> tuple[int, ...]:
    try:
        u = tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"bad index list {text!r}") from exc
    if not u:
        raise ValueError("subset must be non-empty")
    return u


def _load_points(args: argparse.Namespace) -> PointSet:
    if args.points:
        text = Path(args.points).read_text(encoding="utf-8")
        if args.points.endswith(".json") or text.lstrip().startswith("{"):
            return PointSet.from_json(text)
        return PointSet.from_csv(text)
    if args.dimension is None or args.count is None:
        raise ValueError("need -d and -N (or --points FILE)")
    if args.dimension < 1:
        raise ValueError("dimension must be >= 1")
    if args.count < 1:
        raise ValueError("point count must be >= 1")
    return halton_points(first_primes(args.dimension), args.count, start=args.start)


def _fmt_coords(values) -> str:
    return ";".join(format(float(v), ".17g") for v in values)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    if args.dimension < 1:
        raise ValueError("dimension must be >= 1")
    if args.count < 1:
        raise ValueError("point count must be >= 1")
    bases = first_primes(args.dimension)
    if args.incremental:
        points = halton_points_incremental(bases, args.count, start=args.start)
    else:
        points = halton_points(bases, args.count, start=args.start)
    fmt = _resolve_format(args)
    if fmt == "json":
        _emit(args, points.to_json() + "\n")
    else:
        # table output of raw coordinates adds nothing over csv here
        _emit(args, points.to_csv())
    return 0


def cmd_discrepancy(args: argparse.Namespace) -> int:
    points = _load_points(args)
    threads = _resolve_threads(args)
    family = WeightFamily.parse(args.weights) if args.weights else None

    if args.per_subset:
        fam = family if family is not None else WeightFamily.ones(points.d)
        rows = subset_contributions(
            points, fam, unanchored=args.unanchored, threads=threads, budget=args.budget
        )
        header = ("subset", "gamma", "discrepancy", "contribution")
        body = [("+".join(str(j) for j in u), g, dv, c) for (u, g, dv, c) in rows]
        _emit_rows(args, header, body)
        return 0

    if family is not None:
        if args.unanchored:
            result = weighted_unanchored_discrepancy_exact(
                points, family, threads=threads, budget=args.budget
            )
        else:
            result = weighted_star_discrepancy_exact(
                points, family, threads=threads, budget=args.budget
            )
    elif args.unanchored:
        result = unanchored_discrepancy_exact(points, budget=args.budget)
    else:
        result = star_discrepancy_exact(points, budget=args.budget)

    box = result.witness_box
    lower = getattr(box, "lower", None)
    header = ("value", "witness_subset", "witness_closed", "witness_lower", "witness_upper")
    row = (
        result.value,
        "+".join(str(j) for j in result.witness_subset) if result.witness_subset else None,
        result.witness_closed,
        _fmt_coords(lower) if lower is not None else None,
        _fmt_coords(box.upper),
    )
    _emit_rows(args, header, [row])
    return 0


def _model_from_args(args: argparse.Namespace) -> BoundModel:
    return BoundModel(args.model, b=args.base, g=args.g, C=args.C)


def cmd_bound(args: argparse.Namespace) -> int:
    model = _model_from_args(args)
    u = _parse_subset(args.u)
    value = projection_bound(model, u, args.count)
    header = ("model", "u", "N", "bound")
    _emit_rows(args, header, [(model.kind, "+".join(map(str, u)), args.count, value)])
    return 0


def cmd_bound_sweep(args: argparse.Namespace) -> int:
    if args.csv:
        args.output = args.csv
        args.format = "csv"
    model = _model_from_args(args)
    u = _parse_subset(args.u)
    sweep = rpt.parse_n_range(args.n_range)
    if min(sweep) < 2:
        raise ValueError("bounds need N >= 2; start the sweep there")
    rows = [(n, projection_bound(model, u, n)) for n in sweep]
    _emit_rows(args, ("N", "bound"), rows)
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    if args.dimension < 1:
        raise ValueError("dimension must be >= 1")
    sweep = rpt.parse_n_range(args.n_range)
    family = WeightFamily.parse(args.weights) if args.weights else None
    rows = rpt.assemble_report(
        args.dimension,
        sweep,
        family,
        budget=args.budget,
        threads=_resolve_threads(args),
    )
    if not args.no_assert:
        rpt.check_report_rows(rows)
    _emit_rows(args, rpt.REPORT_COLUMNS, [r.cells() for r in rows])

    plot_path = args.plot_file
    if plot_path is None and args.output and not args.no_plot:
        plot_path = rpt.plot_path_for(args.output)
    if plot_path and not args.no_plot:
        title = f"d={args.dimension}" + (f", weights {family}" if family else "")
        rpt.render_report_plot(rows, plot_path, title=title)
    return 0


def _cdelta_row(rep: CDeltaReport) -> tuple[object, ...]:
    return (rep.alpha, rep.delta, rep.route, rep.w, rep.sigma_w, rep.c_delta)


def cmd_cdelta(args: argparse.Namespace) -> int:
    route = {"table": c_delta_table, "hn": c_delta_hn, "alt": c_delta_alt}[args.route]
    rep = route(args.alpha, args.delta)
    header = ("alpha", "delta", "route", "w", "sigma_w", "c_delta")
    _emit_rows(args, header, [_cdelta_row(rep)])
    return 0


def cmd_cdelta_table(args: argparse.Namespace) -> int:
    header = ("delta", "alpha", "w", "c_delta", "reference", "log10_diff", "comparison", "matches")
    rows = [
        (c.delta, c.alpha, c.w, c.computed, c.reference, c.log10_diff, c.kind, c.matches)
        for c in c_delta_table_grid()
    ]
    _emit_rows(args, header, rows)
    return 0


def cmd_nmin(args: argparse.Namespace) -> int:
    c = LogValue.parse(args.c_delta)
    value = n_min(args.epsilon, c, args.delta)
    header = ("epsilon", "c_delta", "delta", "n_min")
    _emit_rows(args, header, [(args.epsilon, c, args.delta, value)])
    return 0


def cmd_lambertw(args: argparse.Namespace) -> int:
    w = lambert_w(args.z)
    header = ("z", "w", "residual")
    _emit_rows(args, header, [(args.z, w, lambert_w_residual(args.z, w))])
    return 0


def cmd_deltastar(args: argparse.Namespace) -> int:
    factor = 12.0 if args.unanchored else 6.0
    if args.log_n is not None:
        log_n = args.log_n
        value = delta_star_from_log(log_n, factor=factor)
        n_cell: object = None
    else:
        value = delta_star(args.N, factor=factor)
        log_n = math.log(args.N)
        n_cell = args.N
    header = ("N", "log_n", "factor", "delta_star")
    _emit_rows(args, header, [(n_cell, log_n, factor, value)])
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json", "table"), default=None,
                        help="output format (default: table on a terminal, csv otherwise)")
    common.add_argument("--output", metavar="PATH", default=None, help="write output to a file")
    common.add_argument("--threads", type=int, default=None,
                        help="worker threads for subset oracles (env QDL_THREADS)")
    common.add_argument("--no-assert", action="store_true",
                        help="skip internal validity assertions")

    parser = argparse.ArgumentParser(
        prog="qdlab",
        description="Low-discrepancy point sets, exact discrepancy oracles, "
                    "and the bound/constant formulas attached to them.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="emit Halton points")
    p.add_argument("-d", "--dimension", type=int, required=True)
    p.add_argument("-N", "--count", type=int, required=True)
    p.add_argument("--start", type=int, default=0, help="first sequence index (default 0)")
    p.add_argument("--incremental", action="store_true",
                   help="use the block-doubling generator (identical output)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("discrepancy", parents=[common], help="exact discrepancy of a point set")
    p.add_argument("-d", "--dimension", type=int, default=None)
    p.add_argument("-N", "--count", type=int, default=None)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--sequence", choices=("halton",), default="halton")
    p.add_argument("--points", metavar="FILE", default=None,
                   help="read the point set from a generate-format CSV/JSON file")
    p.add_argument("--weights", metavar="SPEC", default=None,
                   help="weight family: power:A, reciprocal, logsqrt:C, explicit:g1,g2,..., ones:D")
    p.add_argument("--unanchored", action="store_true", help="boxes [a,b) instead of [0,a)")
    p.add_argument("--per-subset", action="store_true",
                   help="emit the per-subset contribution table instead of the single maximum")
    p.add_argument("--budget", type=int, default=10**8,
                   help="critical-grid cell budget per projection (default 1e8)")
    p.set_defaults(func=cmd_discrepancy)

    def add_model_flags(q: argparse.ArgumentParser) -> None:
        q.add_argument("--model", choices=BOUND_KINDS, required=True)
        q.add_argument("--base", type=int, default=None, help="construction base b (sequence models)")
        q.add_argument("--g", type=int, default=None, help="quality offset g")
        q.add_argument("--C", type=float, default=None, help="leading constant C > 1 (default 2)")
        q.add_argument("--u", required=True, help="projection indices, e.g. 1,2,3")

    p = sub.add_parser("bound", parents=[common], help="one bound value")
    add_model_flags(p)
    p.add_argument("-N", "--count", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("bound-sweep", parents=[common], help="bound values over an N range")
    add_model_flags(p)
    p.add_argument("--N-range", dest="n_range", required=True, metavar="A:B[:STEP]")
    p.add_argument("--csv", metavar="PATH", default=None, help="shorthand for --format csv --output PATH")
    p.set_defaults(func=cmd_bound_sweep)

    p = sub.add_parser("report", parents=[common],
                       help="exact values vs bounds over an N sweep, with a figure")
    p.add_argument("-d", "--dimension", type=int, required=True)
    p.add_argument("--N-range", dest="n_range", required=True, metavar="A:B[:STEP]")
    p.add_argument("--weights", metavar="SPEC", default=None)
    p.add_argument("--budget", type=int, default=10**8,
                   help="exact-oracle cell budget; rows beyond it leave exact_star blank")
    p.add_argument("--plot-file", metavar="PATH", default=None,
                   help="figure path (default: next to --output)")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("cdelta", parents=[common], help="tractability constant, one (alpha, delta)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--route", choices=("table", "hn", "alt"), default="table")
    p.set_defaults(func=cmd_cdelta)

    p = sub.add_parser("cdelta-table", parents=[common],
                       help="the 12-cell constant table with reference diffs")
    p.set_defaults(func=cmd_cdelta_table)

    p = sub.add_parser("nmin", parents=[common], help="smallest N meeting a target epsilon")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--c-delta", dest="c_delta", required=True,
                   help="constant as a number or mEe / mx10^e string")
    p.add_argument("--delta", type=float, required=True)
    p.set_defaults(func=cmd_nmin)

    p = sub.add_parser("lambertw", parents=[common], help="principal-branch Lambert W")
    p.add_argument("--z", type=float, required=True)
    p.set_defaults(func=cmd_lambertw)

    p = sub.add_parser("deltastar", parents=[common], help="the exponent gap delta*(N)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("-N", type=float, default=None)
    g.add_argument("--log-n", dest="log_n", type=float, default=None)
    p.add_argument("--unanchored", action="store_true", help="use the doubled interior constant")
    p.set_defaults(func=cmd_deltastar)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BudgetError as exc:
        print(f"error: budget guard: {exc}", file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
