"""Command-line entry point: ``crossres {run,bench,metrics,render}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import io as gio
from . import metrics
from .harness import (VARIANTS, bench, run_one, variant_label, write_metrics_csv)
from .initializer import InitSpec
from .metrics import MetricsRecord, Objective
from .optimizer import Escape, OptimizerParams

log = logging.getLogger("crossres")


def parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = (int(part) for part in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like WxH, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError("grid sides must be positive")
    return w, h


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--init", choices=["circle", "random-grid", "spring"], default="spring")
    p.add_argument("--grid", type=parse_grid, default=None, metavar="WxH")
    p.add_argument("--rho", type=int, default=10)
    p.add_argument("--delta-min", type=float, default=None)
    p.add_argument("--delta-max", type=float, default=None)
    p.add_argument("--tau", type=int, default=500)
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--zeta", type=int, default=200)
    p.add_argument("--zeta-prime", type=int, default=100)
    p.add_argument("--escape", choices=[e.value for e in Escape], default="amplify")
    p.add_argument("--pool-decay", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=100_000)
    p.add_argument("--time-limit", type=float, default=None, metavar="SECONDS")
    p.add_argument("--random-accept", action="store_true",
                   help="move to a uniformly random feasible candidate instead of the best")
    p.add_argument("--out", type=Path, default=Path("out"))


def _init_spec(args) -> InitSpec:
    kind = args.init.replace("-", "_")
    if kind == "random_grid" and args.grid is None:
        raise SystemExit("--init random-grid needs --grid WxH")
    return InitSpec(kind=kind, grid=args.grid, seed=args.seed)


def _params(args, objective) -> OptimizerParams:
    return OptimizerParams(
        rho=args.rho, delta_min=args.delta_min, delta_max=args.delta_max, tau=args.tau,
        epsilon=args.epsilon, zeta=args.zeta, zeta_prime=args.zeta_prime,
        objective=objective, escape=args.escape, grid=args.grid,
        max_iterations=args.max_iterations, seed=args.seed, pool_decay=args.pool_decay,
        random_accept=args.random_accept, time_limit=args.time_limit,
    )


def cmd_run(args) -> int:
    graph = gio.read_graph_file(args.graph)
    initial = None
    if args.layout is not None:
        initial = gio.load_layout(Path(args.layout))
        if initial.graph != graph:
            raise ValueError("layout does not match the graph")
    formats = {f.strip() for f in args.formats.split(",") if f.strip()}
    params = _params(args, args.objective)
    init, final, report = run_one(graph, _init_spec(args), params, args.variant, initial)

    out: Path = args.out
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.graph).stem
    gio.save_layout(final, out / f"{stem}.layout.json")
    if "csv" in formats:
        write_metrics_csv(out / f"{stem}.metrics.csv",
                          [[stem, str(graph.n), str(graph.m)] + report.final.csv_values()],
                          ("graph", "n", "m") + MetricsRecord.CSV_FIELDS)
    if "jsonl" in formats:
        with open(out / f"{stem}.trace.jsonl", "w") as fh:
            report.write_jsonl(fh)
    if "svg" in formats:
        (out / f"{stem}.before.svg").write_text(gio.render_svg(init))
        _, crit = metrics.resolution(final, params.objective)
        (out / f"{stem}.after.svg").write_text(gio.render_svg(final, highlight=crit))
    value = report.final_value
    print(f"{Objective(args.objective).value}_resolution={'' if value is None else repr(value)}")
    return 0


def cmd_bench(args) -> int:
    variants = args.variant or ["unrestricted"]
    objectives = args.objective or ["crossing"]
    init = _init_spec(args)
    params = _params(args, objectives[0])
    bench(Path(args.corpus), args.out, init, params, variants=variants,
          objectives=[Objective(o) for o in objectives], reps=args.reps, jobs=args.jobs)
    for variant in variants:
        for objective in objectives:
            print(args.out / f"{variant_label(variant, Objective(objective), args.grid)}.csv")
    return 0


def cmd_metrics(args) -> int:
    drawing = gio.load_layout(Path(args.layout))
    record = metrics.metrics_record(drawing)
    if args.json:
        print(json.dumps(record.as_dict()))
    else:
        print(";".join(MetricsRecord.CSV_FIELDS))
        print(";".join(record.csv_values()))
    return 0


def cmd_render(args) -> int:
    drawing = gio.load_layout(Path(args.layout))
    highlight = None
    if args.highlight:
        _, highlight = metrics.resolution(drawing, args.highlight)
    svg = gio.render_svg(drawing, width=args.width, highlight=highlight)
    if args.out is None:
        sys.stdout.write(svg)
    else:
        Path(args.out).write_text(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossres",
                                     description="Crossing-resolution maximization for graph drawings.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="optimize one graph")
    run.add_argument("--graph", required=True)
    run.add_argument("--layout", default=None, help="initial layout JSON (overrides --init)")
    run.add_argument("--objective", choices=[o.value for o in Objective], default="crossing")
    run.add_argument("--variant", choices=VARIANTS, default="unrestricted")
    run.add_argument("--formats", default="csv", help="comma list of csv,jsonl,svg")
    _add_optimizer_flags(run)
    run.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="run a corpus and aggregate per vertex count")
    b.add_argument("--corpus", required=True)
    b.add_argument("--objective", choices=[o.value for o in Objective], action="append")
    b.add_argument("--variant", choices=VARIANTS, action="append")
    b.add_argument("--reps", type=int, default=1)
    b.add_argument("--jobs", type=int, default=1)
    _add_optimizer_flags(b)
    b.set_defaults(func=cmd_bench)

    m = sub.add_parser("metrics", help="print the metrics of a layout")
    m.add_argument("--layout", required=True)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_metrics)

    r = sub.add_parser("render", help="render a layout to SVG")
    r.add_argument("--layout", required=True)
    r.add_argument("--highlight", choices=[o.value for o in Objective], default=None)
    r.add_argument("--width", type=int, default=600)
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
