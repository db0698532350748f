"""Resolution measures of straight-line drawings.

Full evaluators work over the whole drawing (all non-adjacent edge pairs,
all vertices).  :class:`LocalEvaluator` restricts the work to the edges
incident to one vertex, optionally relocated to a batch of candidate
positions, which is what the optimizer calls in its inner loop.  Both paths
compute every individual angle with the same kernels, so a local minimum is
always one of the values the full evaluator would see.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import geometry
from .geometry import CROSSING, DEGENERATE, DegenerateGeometry
from .graph_model import GEOM_EPS, Drawing, Graph, InvalidDrawing, bounding_box

# Two angles closer than this (degrees) are considered equal.
TIE_TOL = 1e-9
# Bounding boxes thinner than this get an infinite aspect ratio.
MIN_SIDE = 1e-12


class Objective(str, enum.Enum):
    CROSSING = "crossing"
    ANGULAR = "angular"
    TOTAL = "total"


@dataclass(frozen=True)
class CriticalSet:
    """Edge-index pairs attaining the resolution, and their endpoints."""

    pairs: tuple[tuple[int, int], ...] = ()
    vertices: frozenset = frozenset()

    @classmethod
    def from_pairs(cls, graph: Graph, pairs) -> "CriticalSet":
        pairs = tuple(sorted({(min(a, b), max(a, b)) for a, b in pairs}))
        verts = set()
        for a, b in pairs:
            verts.update(graph.edges[a])
            verts.update(graph.edges[b])
        return cls(pairs, frozenset(verts))

    def union(self, other: "CriticalSet") -> "CriticalSet":
        return CriticalSet(
            tuple(sorted(set(self.pairs) | set(other.pairs))), self.vertices | other.vertices
        )


EMPTY = CriticalSet()


@dataclass
class MetricsRecord:
    crossing_resolution: Optional[float]
    angular_resolution: Optional[float]
    total_resolution: Optional[float]
    crossing_count: int
    aspect_ratio: float
    iterations: int = 0

    CSV_FIELDS = (
        "crossing_resolution",
        "angular_resolution",
        "total_resolution",
        "aspect_ratio",
        "crossings",
        "iterations",
    )

    def csv_values(self) -> list[str]:
        return [
            _fmt(self.crossing_resolution),
            _fmt(self.angular_resolution),
            _fmt(self.total_resolution),
            _fmt(self.aspect_ratio),
            str(self.crossing_count),
            str(self.iterations),
        ]

    def as_dict(self) -> dict:
        return {
            "crossing_resolution": self.crossing_resolution,
            "angular_resolution": self.angular_resolution,
            "total_resolution": self.total_resolution,
            "aspect_ratio": self.aspect_ratio,
            "crossings": self.crossing_count,
            "iterations": self.iterations,
        }


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(float(value))


# ---------------------------------------------------------------------------
# Full evaluators
# ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=64)
def _nonadjacent_mask(graph: Graph) -> np.ndarray:
    """Upper-triangular m x m mask of edge pairs sharing no endpoint."""
    edges = graph.edge_array()
    a, b = edges[:, None, :], edges[None, :, :]
    shared = (
        (a[..., 0] == b[..., 0]) | (a[..., 0] == b[..., 1])
        | (a[..., 1] == b[..., 0]) | (a[..., 1] == b[..., 1])
    )
    return np.triu(~shared, k=1)


def crossing_table(drawing: Drawing) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All proper crossings as parallel arrays ``(edge_i, edge_j, angle)``.

    Raises :class:`InvalidDrawing` if two non-adjacent edges touch or overlap.
    """
    graph = drawing.graph
    if graph.m < 2:
        empty = np.zeros(0, dtype=np.intp)
        return empty, empty, np.zeros(0)
    edges = graph.edge_array()
    pos = drawing.positions
    p, q = pos[edges[:, 0]], pos[edges[:, 1]]
    lo, hi = np.minimum(p, q), np.maximum(p, q)
    meet = (
        (hi[:, None, 0] >= lo[None, :, 0]) & (hi[None, :, 0] >= lo[:, None, 0])
        & (hi[:, None, 1] >= lo[None, :, 1]) & (hi[None, :, 1] >= lo[:, None, 1])
    )
    ei, ej = np.nonzero(meet & _nonadjacent_mask(graph))
    status = geometry.classify_boxed(p[ei], q[ei], p[ej], q[ej])
    if np.any(status == DEGENERATE):
        k = int(np.flatnonzero(status == DEGENERATE)[0])
        raise InvalidDrawing(f"edges {int(ei[k])} and {int(ej[k])} touch or overlap")
    hit = status == CROSSING
    ei, ej = ei[hit], ej[hit]
    angles = geometry.line_angle_batch(q[ei] - p[ei], q[ej] - p[ej])
    return ei, ej, angles


def crossing_resolution(drawing: Drawing) -> tuple[Optional[float], CriticalSet]:
    """Minimum crossing angle and the edge pairs attaining it (``None`` if planar)."""
    ei, ej, angles = crossing_table(drawing)
    if len(angles) == 0:
        return None, EMPTY
    best = float(angles.min())
    tied = angles <= best + TIE_TOL
    return best, CriticalSet.from_pairs(drawing.graph, zip(ei[tied].tolist(), ej[tied].tolist()))


def crossing_count(drawing: Drawing) -> int:
    return len(crossing_table(drawing)[2])


def _vertex_gaps(center, graph: Graph, v: int, coords, moved: Optional[int] = None, at=None):
    """Sorted cyclic gaps at ``v`` as ``[(gap, edge_a, edge_b), ...]``.

    ``coords`` is a list of (x, y); vertex ``moved`` is read from ``at``.
    """
    cx, cy = center
    keyed = []
    for nb, e in zip(graph.adjacency[v], graph.incident[v]):
        px, py = at if nb == moved else coords[nb]
        dx, dy = px - cx, py - cy
        if dx == 0 and dy == 0:
            raise DegenerateGeometry(f"vertex {nb} coincides with vertex {v}")
        keyed.append((math.degrees(math.atan2(dy, dx)), e))
    keyed.sort()
    directions = [d for d, _ in keyed]
    gaps = geometry._gaps_from_directions(directions)
    d = len(keyed)
    return [(gaps[k], keyed[k][1], keyed[(k + 1) % d][1]) for k in range(d)]


def angular_resolution(drawing: Drawing) -> tuple[Optional[float], CriticalSet]:
    """Minimum angle between consecutive edges around any vertex of degree >= 2."""
    graph = drawing.graph
    coords = drawing.positions.tolist()
    entries = []
    for v in range(graph.n):
        if graph.degree(v) >= 2:
            entries.extend(_vertex_gaps(coords[v], graph, v, coords))
    if not entries:
        return None, EMPTY
    best = min(g for g, _, _ in entries)
    if best <= 0:
        raise InvalidDrawing("overlapping adjacent edges")
    pairs = [(a, b) for g, a, b in entries if g <= best + TIE_TOL]
    return best, CriticalSet.from_pairs(graph, pairs)


def combine_total(cross, angular) -> tuple[Optional[float], CriticalSet]:
    """Total resolution from two ``(value, CriticalSet)`` results."""
    (cv, cs), (av, as_) = cross, angular
    if cv is None:
        return av, as_
    if av is None:
        return cv, cs
    if abs(cv - av) <= TIE_TOL:
        return min(cv, av), cs.union(as_)
    return (cv, cs) if cv < av else (av, as_)


def total_resolution(drawing: Drawing) -> tuple[Optional[float], CriticalSet]:
    return combine_total(crossing_resolution(drawing), angular_resolution(drawing))


def resolution(drawing: Drawing, objective: Objective) -> tuple[Optional[float], CriticalSet]:
    objective = Objective(objective)
    if objective is Objective.CROSSING:
        return crossing_resolution(drawing)
    if objective is Objective.ANGULAR:
        return angular_resolution(drawing)
    return total_resolution(drawing)


def aspect_ratio(drawing: Drawing) -> float:
    if drawing.graph.n < 2:
        raise InvalidDrawing("aspect ratio needs at least two vertices")
    box = bounding_box(drawing)
    return ratio_of_sides(box.width, box.height)


def ratio_of_sides(w: float, h: float) -> float:
    short, long_ = min(w, h), max(w, h)
    if short < MIN_SIDE:
        return math.inf
    return long_ / short


def metrics_record(drawing: Drawing, iterations: int = 0) -> MetricsRecord:
    cross = crossing_resolution(drawing)
    ang = angular_resolution(drawing)
    total = combine_total(cross, ang)
    return MetricsRecord(
        crossing_resolution=cross[0],
        angular_resolution=ang[0],
        total_resolution=total[0],
        crossing_count=crossing_count(drawing),
        aspect_ratio=aspect_ratio(drawing) if drawing.graph.n >= 2 else math.inf,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# Local evaluation
# ---------------------------------------------------------------------------


class LocalEvaluator:
    """Incident-edge evaluation of one vertex at a batch of candidate positions.

    Holds its own mutable copy of the coordinates; call :meth:`move` to keep
    it in sync with an accepted relocation.  Cost per candidate is
    O(deg(v) * m) for crossings and O(sum of neighbor degrees) for angles.
    """

    def __init__(self, drawing: Drawing, eps: float = GEOM_EPS):
        self.graph = drawing.graph
        self.pos = drawing.positions.copy()
        self.edges = self.graph.edge_array()
        self.eps = eps
        self._pairs: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def move(self, v: int, at) -> None:
        self.pos[v] = at

    def drawing(self) -> Drawing:
        return Drawing(self.graph, self.pos)

    def _incident_pairs(self, v: int):
        # (neighbor, other edge) for every incident edge and non-adjacent other edge
        cached = self._pairs.get(v)
        if cached is None:
            nbs, others = [], []
            e0, e1 = self.edges[:, 0], self.edges[:, 1]
            for u in self.graph.adjacency[v]:
                ok = np.flatnonzero((e0 != v) & (e1 != v) & (e0 != u) & (e1 != u))
                nbs.append(np.full(len(ok), u, dtype=np.intp))
                others.append(ok)
            if nbs:
                cached = (np.concatenate(nbs), np.concatenate(others))
            else:
                cached = (np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp))
            self._pairs[v] = cached
        return cached

    def degenerate(self, v: int, cands: np.ndarray) -> np.ndarray:
        """Mask of candidates that would create a coincidence or put a vertex on an edge."""
        cands = np.asarray(cands, dtype=float).reshape(-1, 2)
        pos, eps = self.pos, self.eps
        others = np.arange(self.graph.n) != v
        d = np.hypot(cands[:, None, 0] - pos[None, others, 0], cands[:, None, 1] - pos[None, others, 1])
        bad = (d < eps).any(axis=1)
        e0, e1 = self.edges[:, 0], self.edges[:, 1]
        far = (e0 != v) & (e1 != v)
        if far.any():
            d = geometry.point_segment_distance_batch(
                cands[:, None, :], pos[e0[far]][None], pos[e1[far]][None]
            )
            bad |= (d < eps).any(axis=1)
        nbs = np.asarray(self.graph.adjacency[v], dtype=np.intp)
        if len(nbs):
            # every other vertex against every moved edge (candidate, neighbor)
            d = geometry.point_segment_distance_batch(
                pos[None, None, :, :], cands[:, None, None, :], pos[nbs][None, :, None, :]
            )
            ignore = ~others[None, :] | (np.arange(self.graph.n)[None, :] == nbs[:, None])
            d[:, ignore] = np.inf
            bad |= (d < eps).any(axis=(1, 2))
        return bad

    def crossing(self, v: int, cands: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Minimum crossing angle of v's edges per candidate (``inf`` when none)
        and a mask of candidates producing a touching/overlapping contact."""
        cands = np.asarray(cands, dtype=float).reshape(-1, 2)
        k = len(cands)
        best = np.full(k, math.inf)
        touching = np.zeros(k, dtype=bool)
        nbs, others = self._incident_pairs(v)
        if len(nbs) == 0:
            return best, touching
        u = self.pos[nbs]
        p2 = self.pos[self.edges[others, 0]]
        q2 = self.pos[self.edges[others, 1]]
        meet = geometry.boxes_meet(cands[:, None, :], u[None], p2[None], q2[None])
        kk, ll = np.nonzero(meet)
        if len(kk) == 0:
            return best, touching
        a, b, c, d = cands[kk], u[ll], p2[ll], q2[ll]
        status = geometry.classify_boxed(a, b, c, d)
        touching[kk[status == DEGENERATE]] = True
        hit = status == CROSSING
        angles = geometry.line_angle_batch(b[hit] - a[hit], d[hit] - c[hit])
        np.minimum.at(best, kk[hit], angles)
        return best, touching

    def angular(self, v: int, cands: np.ndarray) -> np.ndarray:
        """Minimum cyclic gap at v and its neighbors per candidate (``inf`` when none)."""
        cands = np.asarray(cands, dtype=float).reshape(-1, 2).tolist()
        coords = self.pos.tolist()
        graph = self.graph
        out = np.full(len(cands), math.inf)
        for k, at in enumerate(cands):
            at = tuple(at)
            best = math.inf
            if graph.degree(v) >= 2:
                best = min(g for g, _, _ in _vertex_gaps(at, graph, v, coords))
            for u in graph.adjacency[v]:
                if graph.degree(u) >= 2:
                    g = min(g for g, _, _ in _vertex_gaps(coords[u], graph, u, coords, v, at))
                    best = min(best, g)
            out[k] = best
        return out


def _at(drawing: Drawing, v: int, at) -> np.ndarray:
    return np.asarray(drawing.positions[v] if at is None else at, dtype=float).reshape(1, 2)


def local_min_crossing_angle(drawing: Drawing, v: int, at=None) -> Optional[float]:
    """Minimum crossing angle involving an edge incident to ``v`` (with ``v``
    relocated to ``at`` when given).  Raises :class:`DegenerateGeometry` when
    the placement touches or overlaps another element."""
    ev = LocalEvaluator(drawing)
    cand = _at(drawing, v, at)
    if at is not None and ev.degenerate(v, cand)[0]:
        raise DegenerateGeometry(f"vertex {v} at {tuple(cand[0])} creates a degeneracy")
    value, touching = ev.crossing(v, cand)
    if touching[0]:
        raise DegenerateGeometry(f"vertex {v} at {tuple(cand[0])} creates a degeneracy")
    return None if math.isinf(value[0]) else float(value[0])


def local_min_angular(drawing: Drawing, v: int, at=None) -> Optional[float]:
    """Minimum angular gap at ``v`` and its neighbors (with ``v`` at ``at``)."""
    ev = LocalEvaluator(drawing)
    cand = _at(drawing, v, at)
    if at is not None and ev.degenerate(v, cand)[0]:
        raise DegenerateGeometry(f"vertex {v} at {tuple(cand[0])} creates a degeneracy")
    value = ev.angular(v, cand)[0]
    return None if math.isinf(value) else float(value)
