"""Command-line front end: ``fibsnake <command> [flags]``.

Data goes to ``--out`` (or stdout); the one-line summary goes to stdout when
``--out`` is given and to stderr otherwise, so piped data stays clean.
Exit status: 0 success, 1 regime/budget/range violations and I/O failures,
2 usage errors.
"""
from __future__ import annotations

import argparse
import math
import sys
import warnings
from typing import Any, Callable, Sequence

from . import emit, expansion, geometry, ifs, manipulator, series
from ._threads import worker_count
from .errors import (
    BudgetError,
    NumericalInstabilityError,
    OutOfRangeError,
    RegimeError,
    RegimeWarning,
)
from .numbers import require_convergent

RUNTIME_ERRORS = (RegimeError, BudgetError, OutOfRangeError, NumericalInstabilityError, OSError)
TOLERANCES = f"atol={series.ATOL:g} rtol={series.RTOL:g}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # single-line diagnostic
        raise UsageError(message)


def _positive_int(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return n


def _nonneg_int(text: str) -> int:
    n = int(text)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text}")
    return n


def _finite(text: str) -> float:
    x = float(text)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return x


FORMATS = {
    "series": ("csv", "json"),
    "qp": ("csv", "json"),
    "expand": ("text", "csv", "json"),
    "workspace": ("csv", "json"),
    "polygon": ("json", "svg", "csv"),
    "attractor": ("json", "svg"),
    "chaos": ("csv", "json"),
    "bounds": ("csv", "json"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--out", metavar="PATH", help="write data here instead of stdout")
    common.add_argument("--format", choices=("text", "csv", "json", "svg"))
    common.add_argument("--plot", metavar="PNG", help="also render a PNG figure")
    common.add_argument("--header", action="store_true", help="x,y header line on point CSVs")

    def base(sp, q_required=True):
        sp.add_argument("--q", type=_finite, required=q_required, help="scaling ratio (> golden ratio)")

    def rotation(sp):
        sp.add_argument("--d", type=_positive_int, default=1, help="turn numerator: omega = 2*pi*d/p")
        sp.add_argument("--p", type=_positive_int, default=1, help="turn denominator (stride)")

    parser = _Parser(prog="fibsnake", description="Fibonacci control system numerics")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("series", parents=[common], help="closed-form vs partial tail sums")
    base(sp)
    sp.add_argument("--p", type=_positive_int, default=1)
    sp.add_argument("--h", type=_nonneg_int, default=None, help="single offset (default 0..p+2)")
    sp.add_argument("--terms", type=_positive_int, default=200, help="partial-sum length")

    sp = sub.add_parser("qp", parents=[common], help="critical ratios q(p)")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--p", type=_positive_int, help="single stride")
    g.add_argument("--pmax", type=_positive_int, help="table for p = 1..PMAX")

    sp = sub.add_parser("expand", parents=[common], help="greedy control word for a target")
    base(sp)
    sp.add_argument("--x", type=_finite, required=True, help="target value")
    sp.add_argument("--p", type=_positive_int, default=1)
    sp.add_argument("--h", type=_nonneg_int, default=0, help="stride offset")
    sp.add_argument("--depth", type=_positive_int, default=expansion.DEFAULT_DEPTH, help="digits to emit")

    sp = sub.add_parser("workspace", parents=[common], help="end points of links 0..N")
    base(sp)
    rotation(sp)
    sp.add_argument("--links", type=_nonneg_int, required=True, help="last link index N")

    sp = sub.add_parser("polygon", parents=[common], help="asymptotic full-rotation polygon")
    base(sp)
    rotation(sp)

    sp = sub.add_parser("attractor", parents=[common], help="IFS cover of the reachable set")
    base(sp)
    rotation(sp)
    sp.add_argument("--k", type=_positive_int, default=None, help="map power (default k_min)")
    sp.add_argument("--iters", type=_positive_int, required=True, help="rounds of the 2^k-map system")

    sp = sub.add_parser("chaos", parents=[common], help="chaos-game sample of the attractor")
    base(sp)
    rotation(sp)
    sp.add_argument("--k", type=_positive_int, default=None)
    sp.add_argument("--count", type=_positive_int, required=True, help="points to keep")
    sp.add_argument("--seed", type=_nonneg_int, required=True, help="PCG64 seed")

    sp = sub.add_parser("bounds", parents=[common], help="contraction and tail bounds")
    base(sp)
    rotation(sp)
    sp.add_argument("--links", type=_nonneg_int, default=10)
    return parser


def _base_of(args) -> complex | float:
    if args.p == 1:
        return float(args.q)
    return manipulator.ManipulatorParams(args.q, args.d, args.p).z


def _params(args, *names: str) -> dict[str, Any]:
    return {n: getattr(args, n) for n in names}


def _meta(args, names: Sequence[str], seed: Any = "none") -> dict[str, Any]:
    cmd = " ".join([args.command] + [f"{n}={getattr(args, n)}" for n in names])
    return {"command": cmd, "seed": seed, "tolerances": TOLERANCES}


def _require_regime(q: float, p: int) -> None:
    if not expansion.in_regime(q, p):
        raise RegimeError(f"q exceeds q(p)={series.q_crit(p).value:.5g} for p={p}")


def cmd_series(args) -> str:
    require_convergent(args.q)
    hs = [args.h] if args.h is not None else list(range(args.p + 3))
    rows = []
    for h in hs:
        closed = series.tail_sum(args.q, h, args.p)
        partial = series.tail_sum_partial(args.q, h, args.p, args.terms)
        rows.append((h, args.p, closed, partial, abs(closed - partial) / abs(closed)))
    if args.format == "json":
        cols = ("h", "p", "closed", "partial", "rel_diff")
        doc = {"kind": "series", "params": _params(args, "q", "p", "terms"),
               "rows": [dict(zip(cols, r)) for r in rows]}
        emit.emit_document(doc, args.out)
    else:
        emit.emit_rows(("h", "p", "closed", "partial", "rel_diff"), rows, args.out)
    worst = max(r[4] for r in rows)
    return f"series: q={args.q:g} p={args.p} terms={args.terms} rows={len(rows)} max_rel_diff={worst:.3e}"


def cmd_qp(args) -> str:
    ps = [args.p] if args.p is not None else list(range(1, (args.pmax or 10) + 1))
    rows = [(p, series.q_crit(p).value) for p in ps]
    if args.format == "json":
        doc = {"kind": "qp", "params": {"p": ps}, "rows": [{"p": p, "q": q} for p, q in rows]}
        emit.emit_document(doc, args.out)
    else:
        emit.emit_rows(("p", "q_p"), rows, args.out)
    if len(rows) == 1:
        return f"qp: p={rows[0][0]} q(p)={rows[0][1]:.10g}"
    return f"qp: p={ps[0]}..{ps[-1]} rows={len(rows)}"


def cmd_expand(args) -> str:
    require_convergent(args.q)
    _require_regime(args.q, args.p)
    res = expansion.greedy_strided(args.x, args.q, args.p, args.h, args.depth)
    digits = expansion.word_str(res.word)
    if args.format == "csv":
        rows = [(n, res.word[n], res.scaled_remainders[n], res.scaled_bounds[n]) for n in range(res.depth)]
        emit.emit_rows(("n", "digit", "scaled_remainder", "scaled_bound"), rows, args.out)
    elif args.format == "json":
        doc = {"kind": "expansion", "params": _params(args, "q", "x", "p", "h", "depth"),
               "digits": digits, "value": res.value, "residual": res.residual,
               "tail_bound": res.tail_bound}
        emit.emit_document(doc, args.out)
    else:
        with emit._open(args.out) as fh:
            fh.write(digits + "\n")
    return (f"expand: q={args.q:g} p={args.p} h={args.h} depth={args.depth} digits={digits} "
            f"residual={res.residual:.3g} tail_bound={res.tail_bound:.3g}")


def cmd_workspace(args) -> str:
    params = manipulator.ManipulatorParams(args.q, args.d, args.p)
    pts = manipulator.workspace(args.links, params)
    names = ("q", "d", "p", "links")
    if args.format == "json":
        emit.emit_json(pts, args.out, _params(args, *names))
    else:
        emit.emit_csv(pts, args.out, header=args.header)
    if args.plot:
        from .plotting import plot_points
        plot_points(pts, args.plot, f"W_{args.links}  q={args.q:g}  omega=2pi*{args.d}/{args.p}")
    bound = manipulator.workspace_error_bound(args.links, args.q)
    return f"workspace: N={args.links} points={len(pts)} error_bound={bound:.6g}"


def cmd_polygon(args) -> str:
    params = manipulator.ManipulatorParams(args.q, args.d, args.p)
    poly = geometry.reachable_polygon(params)
    names = ("q", "d", "p")
    if args.format == "svg":
        emit.emit_svg([poly], args.out, _meta(args, names))
    elif args.format == "csv":
        emit.emit_csv(poly.vertices, args.out, header=args.header)
    else:
        emit.emit_json(poly, args.out, _params(args, *names))
    if args.plot:
        from .plotting import plot_polygons
        plot_polygons([poly], args.plot, f"reachable polygon  q={args.q:g}  p={args.p}")
    interior = geometry.is_interior((0.0, 0.0), poly)
    return (f"polygon: vertices={len(poly)} area={poly.area():.10g} degenerate={poly.degenerate} "
            f"origin_interior={interior}")


def cmd_attractor(args) -> str:
    b = _base_of(args)
    km = ifs.k_min(b)
    k = km if args.k is None else args.k
    if args.p == 1:
        cover = ifs.iterate_real(b, k, args.iters)
    else:
        cover = ifs.iterate_complex_hull(b, k, args.iters)
    names = ("q", "d", "p", "iters")
    if args.format == "svg":
        emit.emit_svg(list(cover.polygons), args.out, _meta(args, names) | {"k": k})
    else:
        emit.emit_json(cover, args.out, _params(args, *names) | {"k": k})
    if args.plot:
        from .plotting import plot_polygons
        plot_polygons(cover.polygons, args.plot, f"IFS cover  q={args.q:g}  p={args.p}  k={k}  n={args.iters}")
    return f"attractor: cells={len(cover)} k={k} k_min={km} shape_vertices={len(cover.shape)}"


def cmd_chaos(args) -> str:
    b = _base_of(args)
    km = ifs.k_min(b)
    k = km if args.k is None else args.k
    if k < km:
        raise RegimeError(f"k={k} is below k_min={km}; the maps are not contractions")
    pts = ifs.chaos_game(b, args.count, args.seed, k)
    if args.format == "json":
        params = _params(args, "q", "d", "p", "count", "seed") | {
            "k": k, "generator": ifs.CHAOS_GENERATOR, "burn_in": ifs.BURN_IN}
        emit.emit_json(pts, args.out, params)
    else:
        emit.emit_csv(pts, args.out, header=args.header)
    if args.plot:
        from .plotting import plot_points
        plot_points(pts, args.plot, f"chaos game  q={args.q:g}  p={args.p}  seed={args.seed}")
    return f"chaos: points={len(pts)} k={k} seed={args.seed} generator={ifs.CHAOS_GENERATOR}"


def cmd_bounds(args) -> str:
    b = _base_of(args)
    a = ifs.companion(b)
    km = ifs.k_min(b)
    rows: list[tuple[str, Any]] = [
        ("k_min", km),
        ("norm_A_k_min_minus_1", ifs.spectral_norm(ifs.matrix_power(a, km - 1))),
        ("norm_A_k_min", ifs.spectral_norm(ifs.matrix_power(a, km))),
        ("tail_remainder", series.tail_remainder(args.q, args.links)),
        ("q_p", series.q_crit(args.p).value),
        ("in_regime", expansion.in_regime(args.q, args.p)),
    ]
    if args.p == 1:
        kb = ifs.k_log_bounds(args.q)
        rows += [("k_log_bound", kb.first), ("k_log_bound_alt", kb.second_even)]
    gap = expansion.gap_interval(args.q, args.p)
    if gap is not None:
        rows += [("gap_lo", gap[0]), ("gap_hi", gap[1])]
    if args.format == "json":
        doc = {"kind": "bounds", "params": _params(args, "q", "d", "p", "links"), "values": dict(rows)}
        emit.emit_document(doc, args.out)
    else:
        emit.emit_rows(("name", "value"), rows, args.out)
    return f"bounds: k_min={km} norm_A^k_min={rows[2][1]:.6g} tail_remainder={rows[3][1]:.6g}"


COMMANDS: dict[str, Callable[[argparse.Namespace], str]] = {
    "series": cmd_series,
    "qp": cmd_qp,
    "expand": cmd_expand,
    "workspace": cmd_workspace,
    "polygon": cmd_polygon,
    "attractor": cmd_attractor,
    "chaos": cmd_chaos,
    "bounds": cmd_bounds,
}


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        allowed = FORMATS[args.command]
        if args.format is None:
            args.format = allowed[0]
        elif args.format not in allowed:
            raise UsageError(f"{args.command} supports --format {'/'.join(allowed)}, not {args.format}")
        worker_count()
        with warnings.catch_warnings():
            warnings.simplefilter("error", RegimeWarning)
            summary = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"fibsnake: error: {exc}", file=sys.stderr)
        return 2
    except (*RUNTIME_ERRORS, RegimeWarning) as exc:
        print(f"fibsnake: error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, IndexError) as exc:
        # precondition violations on flag values (q <= phi, d/p not coprime, ...)
        print(f"fibsnake: error: {exc}", file=sys.stderr)
        return 2
    print(summary, file=sys.stdout if args.out else sys.stderr)
    return 0


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))
