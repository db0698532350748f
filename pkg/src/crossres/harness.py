"""Single runs and corpus benchmarks with per-vertex-count aggregation."""

from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import io as gio
from .graph_model import Drawing, Graph
from .initializer import InitSpec, initial_drawing
from .metrics import MetricsRecord, Objective, aspect_ratio
from .optimizer import OptimizerParams, RunReport, optimize

log = logging.getLogger(__name__)

VARIANTS = ("unrestricted", "ar-restricted")
GRAPH_SUFFIXES = (".edgelist", ".txt", ".el", ".graphml", ".gml")
AGGREGATE_HEADER = (
    "n", "crossing_resolution", "angular_resolution", "total_resolution",
    "aspect_ratio", "crossings", "iterations", "samples",
)
RUN_HEADER = ("graph", "rep", "seed", "n", "m") + MetricsRecord.CSV_FIELDS

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def run_seed(master_seed: int, name: str, rep: int) -> int:
    """Per-run seed from the master seed, the graph file name and the repetition."""
    return fnv1a_64(f"{master_seed}:{name}:{rep}".encode())


def variant_params(params: OptimizerParams, variant: str, initial: Drawing) -> OptimizerParams:
    if variant == "unrestricted":
        return params
    if variant == "ar-restricted":
        return replace(params, aspect_cap=aspect_ratio(initial))
    raise ValueError(f"unknown variant {variant!r}")


def run_one(graph: Graph, init: InitSpec, params: OptimizerParams, variant: str = "unrestricted",
            initial: Optional[Drawing] = None) -> tuple[Drawing, Drawing, RunReport]:
    """Initialize (unless ``initial`` is given), then optimize."""
    if initial is None:
        initial = initial_drawing(graph, init)
    final, report = optimize(graph, initial, variant_params(params, variant, initial))
    return initial, final, report


def write_metrics_csv(path, rows: Iterable[Sequence[str]], header: Sequence[str]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=";", lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# Benchmark
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BenchJob:
    path: str
    name: str
    rep: int
    variant: str
    objective: Objective
    init: InitSpec
    params: OptimizerParams
    layout_out: str


@dataclass
class BenchResult:
    name: str
    rep: int
    seed: int
    variant: str
    objective: Objective
    n: int
    m: int
    record: Optional[MetricsRecord]
    error: Optional[str] = None


@dataclass
class AggregateRow:
    n: int
    crossing_resolution: Optional[float]
    angular_resolution: Optional[float]
    total_resolution: Optional[float]
    aspect_ratio: Optional[float]
    crossings: float
    iterations: float
    samples: int

    def csv_values(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))

        return [
            str(self.n), fmt(self.crossing_resolution), fmt(self.angular_resolution),
            fmt(self.total_resolution), fmt(self.aspect_ratio), fmt(self.crossings),
            fmt(self.iterations), str(self.samples),
        ]


def _run_job(job: BenchJob) -> BenchResult:
    seed = job.params.seed
    try:
        graph = gio.read_graph_file(job.path)
    except Exception as exc:  # reported, excluded from aggregates
        return BenchResult(job.name, job.rep, seed, job.variant, job.objective, 0, 0, None, str(exc))
    try:
        _, final, report = run_one(graph, job.init, job.params, job.variant)
        Path(job.layout_out).parent.mkdir(parents=True, exist_ok=True)
        gio.save_layout(final, job.layout_out)
        record = report.final
    except Exception as exc:
        return BenchResult(job.name, job.rep, seed, job.variant, job.objective,
                           graph.n, graph.m, None, f"{type(exc).__name__}: {exc}")
    return BenchResult(job.name, job.rep, seed, job.variant, job.objective, graph.n, graph.m, record)


def _mean(values) -> Optional[float]:
    values = [v for v in values if v is not None]
    if not values:
        return None
    if any(math.isinf(v) for v in values):
        return math.inf
    return math.fsum(values) / len(values)


def aggregate(results: Iterable[BenchResult]) -> list[AggregateRow]:
    """Arithmetic means per vertex count; undefined values are left out of
    their column's mean."""
    buckets: dict[int, list[MetricsRecord]] = {}
    for res in sorted(results, key=lambda r: (r.n, r.name, r.rep)):
        if res.record is not None:
            buckets.setdefault(res.n, []).append(res.record)
    rows = []
    for n in sorted(buckets):
        recs = buckets[n]
        rows.append(AggregateRow(
            n=n,
            crossing_resolution=_mean(r.crossing_resolution for r in recs),
            angular_resolution=_mean(r.angular_resolution for r in recs),
            total_resolution=_mean(r.total_resolution for r in recs),
            aspect_ratio=_mean(r.aspect_ratio for r in recs),
            crossings=_mean(r.crossing_count for r in recs),
            iterations=_mean(r.iterations for r in recs),
            samples=len(recs),
        ))
    return rows


def corpus_files(corpus: Path) -> list[Path]:
    files = sorted(p for p in Path(corpus).iterdir()
                   if p.is_file() and p.suffix.lower() in GRAPH_SUFFIXES)
    if not files:
        raise FileNotFoundError(f"no graph files in {corpus}")
    return files


def variant_label(variant: str, objective: Objective, grid) -> str:
    label = f"{variant}_{Objective(objective).value}"
    if grid is not None:
        label += f"_grid{grid[0]}x{grid[1]}"
    return label


def bench(corpus: Path, out_dir: Path, init: InitSpec, params: OptimizerParams,
          variants: Sequence[str] = ("unrestricted",),
          objectives: Sequence[Objective] = (Objective.CROSSING,),
          reps: int = 1, jobs: int = 1) -> dict[str, list[AggregateRow]]:
    """Run every (variant, objective) over the corpus and write one aggregate
    CSV per combination, plus per-run CSVs and final layouts."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = corpus_files(corpus)
    master = params.seed

    work = []
    for variant in variants:
        for objective in objectives:
            label = variant_label(variant, objective, params.grid)
            for path in files:
                for rep in range(reps):
                    seed = run_seed(master, path.name, rep)
                    work.append(BenchJob(
                        path=str(path), name=path.name, rep=rep, variant=variant,
                        objective=Objective(objective),
                        init=replace(init, seed=seed),
                        params=replace(params, seed=seed, objective=Objective(objective)),
                        layout_out=str(out_dir / "layouts" / label / f"{path.stem}.r{rep}.json"),
                    ))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_job, work))
    else:
        results = [_run_job(job) for job in work]

    tables = {}
    for variant in variants:
        for objective in objectives:
            label = variant_label(variant, objective, params.grid)
            mine = [r for r in results if r.variant == variant and r.objective == Objective(objective)]
            failed = [r for r in mine if r.record is None]
            for r in failed:
                log.warning("%s rep %d failed: %s", r.name, r.rep, r.error)
            if failed:
                log.warning("%s: %d run(s) excluded from aggregates", label, len(failed))
            ok = sorted((r for r in mine if r.record is not None), key=lambda r: (r.name, r.rep))
            write_metrics_csv(
                out_dir / f"runs_{label}.csv",
                ([r.name, str(r.rep), str(r.seed), str(r.n), str(r.m)] + r.record.csv_values()
                 for r in ok),
                RUN_HEADER,
            )
            rows = aggregate(ok)
            write_metrics_csv(out_dir / f"{label}.csv", (row.csv_values() for row in rows),
                              AGGREGATE_HEADER)
            tables[label] = rows
    return tables
