"""Randomized monotone hill climbing for crossing/angular/total resolution.

Each iteration picks a vertex (biased towards the vertices defining the
current resolution), proposes ``rho`` positions on rotated rays around it,
discards positions that would lower the objective or break the drawing, and
moves the vertex to the best surviving position.  Two optional strategies
help leave local maxima after ``zeta`` stagnant iterations: widening the
vertex pool to all vertices, or doubling ``rho``, ``delta_min`` and
``delta_max``; either lasts ``zeta_prime`` iterations.
"""

from __future__ import annotations

import enum
import json
import math
import time
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Optional, Protocol

import numpy as np

from . import metrics
from .graph_model import Drawing, Graph, InvalidDrawing, bounding_box, require_valid, validate
from .metrics import CriticalSet, LocalEvaluator, MetricsRecord, Objective


class Escape(str, enum.Enum):
    WIDEN = "widen"
    AMPLIFY = "amplify"
    NONE = "none"


POOL_CRITICAL = "critical"
POOL_ALL = "all"


class RandomSource(Protocol):
    """The two draws the optimizer needs; ``numpy.random.Generator`` fits."""

    def random(self) -> float: ...

    def uniform(self, low: float, high: float, size=None): ...


@dataclass(frozen=True)
class OptimizerParams:
    rho: int = 10
    delta_min: Optional[float] = None  # default: delta_max / 100
    delta_max: Optional[float] = None  # default: half the longer side of the initial drawing
    tau: int = 500
    epsilon: float = 0.001
    zeta: int = 200
    zeta_prime: int = 100
    objective: Objective = Objective.CROSSING
    escape: Escape = Escape.AMPLIFY
    aspect_cap: Optional[float] = None
    grid: Optional[tuple[int, int]] = None
    max_iterations: int = 100_000
    seed: int = 0
    pool_decay: float = 0.5
    random_accept: bool = False
    time_limit: Optional[float] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "objective", Objective(self.objective))
        object.__setattr__(self, "escape", Escape(self.escape))
        if self.rho < 1:
            raise ValueError("rho must be >= 1")
        if self.tau < 1 or self.zeta < 1 or self.zeta_prime < 1:
            raise ValueError("tau, zeta and zeta_prime must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if not 0 < self.pool_decay < 1:
            raise ValueError("pool_decay must lie in (0, 1)")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.delta_min is not None and self.delta_min <= 0:
            raise ValueError("delta_min must be positive")
        if self.delta_max is not None and self.delta_max <= 0:
            raise ValueError("delta_max must be positive")
        if (self.delta_min is not None and self.delta_max is not None
                and self.delta_min > self.delta_max):
            raise ValueError("delta_min must not exceed delta_max")
        if self.aspect_cap is not None and self.aspect_cap < 1:
            raise ValueError("aspect_cap must be >= 1")

    def resolved(self, initial: Drawing) -> "OptimizerParams":
        """Fill in the distance interval from the initial drawing's extent."""
        dmax = self.delta_max
        if dmax is None:
            if self.delta_min is not None:
                dmax = self.delta_min * 100
            else:
                box = bounding_box(initial) if initial.graph.n else None
                side = max(box.width, box.height) if box else 0.0
                dmax = 0.5 * side if side > 0 else 1.0
        dmin = self.delta_min if self.delta_min is not None else dmax / 100
        return replace(self, delta_min=float(dmin), delta_max=float(dmax))


@dataclass
class IterationRecord:
    iteration: int
    vertex: int
    accepted: bool
    value: Optional[float]
    rho: int
    pool_mode: str


@dataclass
class RunReport:
    records: list[IterationRecord]
    final: MetricsRecord
    initial_value: Optional[float]
    final_value: Optional[float]
    wall_time: float
    stop_reason: str

    @property
    def values(self) -> list[Optional[float]]:
        return [r.value for r in self.records]

    def write_jsonl(self, sink) -> None:
        for rec in self.records:
            sink.write(json.dumps(asdict(rec)) + "\n")


@dataclass
class OptimizerState:
    graph: Graph
    evaluator: LocalEvaluator
    params: OptimizerParams
    rng: RandomSource
    value: Optional[float]
    critical: CriticalSet
    rho: int
    delta_min: float
    delta_max: float
    pool_mode: str = POOL_CRITICAL
    iterations: int = 0
    since_improvement: int = 0
    stagnation: int = 0
    escape_remaining: int = 0
    anchor: Optional[float] = None
    records: list[IterationRecord] = field(default_factory=list)
    _distances: Optional[np.ndarray] = None

    @property
    def current(self) -> Drawing:
        return self.evaluator.drawing()

    @property
    def escape_active(self) -> bool:
        return self.escape_remaining > 0


def _as_value(v: Optional[float]) -> float:
    # an undefined resolution (no crossings / no angles) is the best possible
    return math.inf if v is None else v


def improved(new: Optional[float], anchor: Optional[float], epsilon: float) -> bool:
    a, b = _as_value(new), _as_value(anchor)
    if a == b:
        return False
    return a > b + epsilon


# ---------------------------------------------------------------------------
# Vertex pool and selection
# ---------------------------------------------------------------------------


def critical_vertex_pool(drawing: Drawing, objective: Objective) -> frozenset:
    """Endpoints of the pairs defining the objective; all vertices if undefined."""
    value, critical = metrics.resolution(drawing, objective)
    if value is None:
        return frozenset(range(drawing.graph.n))
    return critical.vertices


def pool_distances(graph: Graph, pool: Iterable[int]) -> np.ndarray:
    """Multi-source BFS distance to the pool; unreachable vertices get max+1."""
    dist = np.full(graph.n, -1, dtype=np.int64)
    queue = deque()
    for v in pool:
        dist[v] = 0
        queue.append(v)
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue.append(w)
    unreachable = dist < 0
    if unreachable.any():
        dist[unreachable] = (dist.max() if (~unreachable).any() else -1) + 1
    return dist


def selection_weights(graph: Graph, pool, pool_mode: str, pool_decay: float,
                      distances: Optional[np.ndarray] = None) -> np.ndarray:
    if pool_mode == POOL_ALL:
        return np.ones(graph.n)
    if distances is None:
        distances = pool_distances(graph, pool)
    return pool_decay ** distances.astype(float)


def select_vertex(graph: Graph, pool, pool_mode: str, pool_decay: float, rng: RandomSource,
                  distances: Optional[np.ndarray] = None) -> int:
    """Sample a vertex: uniform in ``all`` mode, else with weight
    ``pool_decay ** distance_to_pool``.  Uses exactly one ``rng.random()`` draw."""
    if graph.n == 0:
        raise ValueError("cannot select a vertex of an empty graph")
    if pool_mode == POOL_CRITICAL and not pool:
        raise ValueError("critical pool is empty")
    weights = selection_weights(graph, pool, pool_mode, pool_decay, distances)
    cumulative = np.cumsum(weights)
    u = float(rng.random()) * cumulative[-1]
    return int(min(np.searchsorted(cumulative, u, side="right"), graph.n - 1))


# ---------------------------------------------------------------------------
# Candidates
# ---------------------------------------------------------------------------


def round_to_grid(points: np.ndarray) -> np.ndarray:
    """Nearest integer point; exact halves go towards -inf."""
    return np.ceil(points - 0.5)


def generate_candidates(position, rho: int, delta_min: float, delta_max: float,
                        rng: RandomSource, grid: Optional[tuple[int, int]] = None):
    """``rho`` points on rays at angles ``2*j*pi/rho + theta`` around ``position``.

    ``theta`` is one uniform rotation; each ray gets its own uniform distance
    in ``[delta_min, delta_max]``.  In grid mode the points are rounded and
    those outside ``[0, W-1] x [0, H-1]`` or equal to ``position`` are dropped.
    Returns ``(points, ray_indices)``.
    """
    theta = float(rng.uniform(0.0, 2 * math.pi))
    deltas = np.asarray(rng.uniform(delta_min, delta_max, size=rho), dtype=float)
    angles = 2 * np.pi * np.arange(rho) / rho + theta
    px, py = float(position[0]), float(position[1])
    pts = np.column_stack([px + deltas * np.cos(angles), py + deltas * np.sin(angles)])
    idx = np.arange(rho)
    if grid is not None:
        pts = round_to_grid(pts)
        w, h = grid
        keep = (pts[:, 0] >= 0) & (pts[:, 0] <= w - 1) & (pts[:, 1] >= 0) & (pts[:, 1] <= h - 1)
        keep &= ~((pts[:, 0] == px) & (pts[:, 1] == py))
        pts, idx = pts[keep], idx[keep]
    return pts, idx


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    feasible: bool
    value: float = -math.inf  # local objective value; inf when vacuous


def _local_values(state: OptimizerState, v: int, cands: np.ndarray) -> np.ndarray:
    objective = state.params.objective
    ev = state.evaluator
    values = np.full(len(cands), math.inf)
    touching = np.zeros(len(cands), dtype=bool)
    if objective in (Objective.CROSSING, Objective.TOTAL):
        cross, touching = ev.crossing(v, cands)
        values = np.minimum(values, cross)
    if objective in (Objective.ANGULAR, Objective.TOTAL):
        ok = np.flatnonzero(~touching)
        if len(ok):
            values[ok] = np.minimum(values[ok], ev.angular(v, cands[ok]))
    values[touching] = -math.inf
    return values


def reference_value(state: OptimizerState, v: int) -> float:
    """Local objective value at the vertex's current position; falls back to
    the global value when none of its edges take part."""
    here = _local_values(state, v, state.evaluator.pos[v][None])[0]
    if math.isinf(here):
        return _as_value(state.value)
    return float(here)


def _aspect_ok(state: OptimizerState, v: int, cands: np.ndarray) -> np.ndarray:
    cap = state.params.aspect_cap
    if cap is None or state.graph.n < 2:
        return np.ones(len(cands), dtype=bool)
    others = np.delete(state.evaluator.pos, v, axis=0)
    lo, hi = others.min(axis=0), others.max(axis=0)
    lo = np.minimum(lo[None], cands)
    hi = np.maximum(hi[None], cands)
    ratios = np.array([metrics.ratio_of_sides(w, h) for w, h in (hi - lo).tolist()])
    return ratios <= cap


def evaluate_candidates(state: OptimizerState, v: int, cands: np.ndarray,
                        reference: Optional[float] = None) -> list[Evaluation]:
    cands = np.asarray(cands, dtype=float).reshape(-1, 2)
    if len(cands) == 0:
        return []
    if reference is None:
        reference = reference_value(state, v)
    ok = ~state.evaluator.degenerate(v, cands)
    ok &= _aspect_ok(state, v, cands)
    grid = state.params.grid
    if grid is not None:
        on_grid = np.all(cands == np.round(cands), axis=1)
        inside = ((cands[:, 0] >= 0) & (cands[:, 0] <= grid[0] - 1)
                  & (cands[:, 1] >= 0) & (cands[:, 1] <= grid[1] - 1))
        ok &= on_grid & inside
    values = np.full(len(cands), -math.inf)
    live = np.flatnonzero(ok)
    if len(live):
        values[live] = _local_values(state, v, cands[live])
    return [
        Evaluation(True, float(val)) if good and val >= reference else Evaluation(False)
        for good, val in zip(ok.tolist(), values.tolist())
    ]


def evaluate_candidate(state: OptimizerState, v: int, candidate) -> Evaluation:
    return evaluate_candidates(state, v, np.asarray(candidate, dtype=float)[None])[0]


# ---------------------------------------------------------------------------
# Iteration
# ---------------------------------------------------------------------------


def init_state(graph: Graph, initial: Drawing, params: OptimizerParams,
               rng: Optional[RandomSource] = None) -> OptimizerState:
    require_valid(initial)
    if initial.graph != graph:
        raise ValueError("initial drawing belongs to a different graph")
    params = params.resolved(initial)
    if params.grid is not None:
        pos = initial.positions
        w, h = params.grid
        if not (np.all(pos == np.round(pos)) and np.all(pos >= 0)
                and np.all(pos[:, 0] <= w - 1) and np.all(pos[:, 1] <= h - 1)):
            raise InvalidDrawing("grid mode needs an integer drawing inside the grid bounds")
    value, critical = metrics.resolution(initial, params.objective)
    return OptimizerState(
        graph=graph,
        evaluator=LocalEvaluator(initial),
        params=params,
        rng=rng if rng is not None else np.random.default_rng(params.seed),
        value=value,
        critical=critical,
        rho=params.rho,
        delta_min=params.delta_min,
        delta_max=params.delta_max,
        anchor=value,
    )


def current_pool(state: OptimizerState) -> frozenset:
    if state.value is None:
        return frozenset(range(state.graph.n))
    return state.critical.vertices


def step(state: OptimizerState) -> OptimizerState:
    """One iteration: select, propose, filter, move (or stay)."""
    graph = state.graph
    if state.pool_mode == POOL_CRITICAL and state._distances is None:
        state._distances = pool_distances(graph, current_pool(state))
    v = select_vertex(graph, current_pool(state), state.pool_mode, state.params.pool_decay,
                      state.rng, state._distances)
    cands, _ = generate_candidates(state.evaluator.pos[v], state.rho, state.delta_min,
                                   state.delta_max, state.rng, state.params.grid)
    evals = evaluate_candidates(state, v, cands)
    feasible = [k for k, e in enumerate(evals) if e.feasible]

    accepted = False
    if feasible:
        if state.params.random_accept:
            chosen = feasible[min(int(state.rng.random() * len(feasible)), len(feasible) - 1)]
        else:
            # values within the tie tolerance count as equal; lowest index wins
            best = max(evals[k].value for k in feasible)
            chosen = next(k for k in feasible if evals[k].value >= best - metrics.TIE_TOL)
        old = state.evaluator.pos[v].copy()
        state.evaluator.move(v, cands[chosen])
        value, critical = metrics.resolution(state.evaluator.drawing(), state.params.objective)
        if _as_value(value) >= _as_value(state.value):
            state.value, state.critical = value, critical
            state._distances = None
            accepted = True
        else:
            # last-ulp disagreement between local and full evaluation
            state.evaluator.move(v, old)

    state.iterations += 1
    if improved(state.value, state.anchor, state.params.epsilon):
        state.anchor = state.value
        state.since_improvement = 0
        state.stagnation = 0
    else:
        state.since_improvement += 1
        state.stagnation += 1
    state.records.append(
        IterationRecord(state.iterations, v, accepted, state.value, state.rho, state.pool_mode)
    )
    return state


def escape_controller(state: OptimizerState) -> OptimizerState:
    """Start, continue or end an escape window after an iteration.

    A window opens once ``zeta`` iterations pass without improvement and
    always runs its full ``zeta_prime`` iterations.
    """
    params = state.params
    if params.escape is Escape.NONE:
        return state
    if state.escape_active:
        state.escape_remaining -= 1
        if state.escape_remaining == 0:
            state.rho, state.delta_min, state.delta_max = params.rho, params.delta_min, params.delta_max
            state.pool_mode = POOL_CRITICAL
            state.stagnation = 0
        return state
    if state.stagnation >= params.zeta:
        state.escape_remaining = params.zeta_prime
        state.stagnation = 0
        if params.escape is Escape.AMPLIFY:
            state.rho = 2 * params.rho
            state.delta_min = 2 * params.delta_min
            state.delta_max = 2 * params.delta_max
        else:
            state.pool_mode = POOL_ALL
    return state


def _check_state(state: OptimizerState) -> None:
    drawing = state.current
    problems = validate(drawing)
    if problems:
        raise AssertionError(f"iteration {state.iterations}: invalid drawing {problems[:3]}")
    value, critical = metrics.resolution(drawing, state.params.objective)
    if value != state.value or critical != state.critical:
        raise AssertionError(f"iteration {state.iterations}: cached objective out of date")


def optimize(graph: Graph, initial: Drawing, params: OptimizerParams,
             rng: Optional[RandomSource] = None,
             check_invariants: bool = False) -> tuple[Drawing, RunReport]:
    """Run the hill climber until ``tau`` iterations pass without an
    improvement larger than ``epsilon``, or a cap (iterations, time) hits."""
    start = time.perf_counter()
    state = init_state(graph, initial, params, rng)
    initial_value = state.value
    limit = state.params.time_limit
    reason = "converged"
    while True:
        if state.since_improvement >= state.params.tau:
            break
        if state.iterations >= state.params.max_iterations:
            reason = "max_iterations"
            break
        if limit is not None and time.perf_counter() - start >= limit:
            reason = "time_limit"
            break
        step(state)
        escape_controller(state)
        if check_invariants:
            _check_state(state)
    final = state.current
    report = RunReport(
        records=state.records,
        final=metrics.metrics_record(final, state.iterations),
        initial_value=initial_value,
        final_value=state.value,
        wall_time=time.perf_counter() - start,
        stop_reason=reason,
    )
    return final, report
