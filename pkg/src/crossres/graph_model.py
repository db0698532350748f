"""Graph and drawing value types plus the drawing validity checker."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import geometry

# Coincidence / incidence tolerance in drawing units.
GEOM_EPS = 1e-9


class GraphError(ValueError):
    """Raised when a graph violates simplicity or index density."""


class InvalidDrawing(ValueError):
    """Raised when a drawing has coincident vertices or overlapping edges."""


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    incident: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 0:
            raise GraphError("negative vertex count")
        normalized = []
        seen = set()
        adjacency: list[list[int]] = [[] for _ in range(n)]
        incident: list[list[int]] = [[] for _ in range(n)]
        for k, (u, v) in enumerate(edges):
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge ({u}, {v})")
            seen.add(key)
            normalized.append((u, v))
            adjacency[u].append(v)
            adjacency[v].append(u)
            incident[u].append(k)
            incident[v].append(k)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(normalized))
        object.__setattr__(self, "adjacency", tuple(tuple(a) for a in adjacency))
        object.__setattr__(self, "incident", tuple(tuple(a) for a in incident))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_array(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)


@dataclass(frozen=True)
class BoundingBox:
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    @property
    def width(self) -> float:
        return self.max_x - self.min_x

    @property
    def height(self) -> float:
        return self.max_y - self.min_y


class Drawing:
    """A graph together with one position per vertex.

    Positions are stored in a read-only ``(n, 2)`` float array.  Use
    :meth:`moved` to derive a drawing with one vertex relocated.
    """

    __slots__ = ("graph", "positions")

    def __init__(self, graph: Graph, positions):
        pos = np.array(positions, dtype=float).reshape(-1, 2) if graph.n else np.zeros((0, 2))
        if pos.shape != (graph.n, 2):
            raise InvalidDrawing(f"expected {graph.n} positions, got {pos.shape[0]}")
        if not np.all(np.isfinite(pos)):
            raise InvalidDrawing("non-finite coordinate")
        pos.setflags(write=False)
        self.graph = graph
        self.positions = pos

    def position(self, v: int) -> tuple[float, float]:
        x, y = self.positions[v]
        return (float(x), float(y))

    def moved(self, v: int, at) -> "Drawing":
        pos = self.positions.copy()
        pos[v] = at
        return Drawing(self.graph, pos)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Drawing):
            return NotImplemented
        return self.graph == other.graph and np.array_equal(self.positions, other.positions)

    def __repr__(self) -> str:
        return f"Drawing(n={self.graph.n}, m={self.graph.m})"


def bounding_box(drawing: Drawing) -> BoundingBox:
    if drawing.graph.n == 0:
        raise InvalidDrawing("bounding box of an empty drawing")
    lo = drawing.positions.min(axis=0)
    hi = drawing.positions.max(axis=0)
    return BoundingBox(float(lo[0]), float(lo[1]), float(hi[0]), float(hi[1]))


@dataclass(frozen=True)
class Violation:
    kind: str  # "coincident" | "overlap" | "vertex_on_edge"
    items: tuple

    def __str__(self) -> str:
        return f"{self.kind}{self.items}"


def validate(drawing: Drawing, eps: float = GEOM_EPS) -> list[Violation]:
    """List every coincident vertex pair, overlapping edge pair and vertex
    lying on a non-incident edge (within ``eps``)."""
    pos = drawing.positions
    n = drawing.graph.n
    violations: list[Violation] = []
    if n < 2:
        return violations

    iu, ju = np.triu_indices(n, k=1)
    close = np.hypot(*(pos[iu] - pos[ju]).T) < eps
    for a, b in zip(iu[close], ju[close]):
        violations.append(Violation("coincident", (int(a), int(b))))

    edges = drawing.graph.edge_array()
    m = len(edges)
    if m == 0:
        return violations

    # vertex-on-edge: every (vertex, edge) pair with the vertex not an endpoint
    vv, ee = np.meshgrid(np.arange(n), np.arange(m), indexing="ij")
    vv, ee = vv.ravel(), ee.ravel()
    keep = (edges[ee, 0] != vv) & (edges[ee, 1] != vv)
    vv, ee = vv[keep], ee[keep]
    dist = geometry.point_segment_distance_batch(pos[vv], pos[edges[ee, 0]], pos[edges[ee, 1]])
    for v, e in zip(vv[dist < eps], ee[dist < eps]):
        violations.append(Violation("vertex_on_edge", (int(v), int(e))))

    # overlap: collinear edge pairs sharing a stretch of positive length
    if m >= 2:
        ei, ej = np.triu_indices(m, k=1)
        p1, q1 = pos[edges[ei, 0]], pos[edges[ei, 1]]
        p2, q2 = pos[edges[ej, 0]], pos[edges[ej, 1]]
        collinear = (geometry.orientation_batch(p1, q1, p2) == 0) & (
            geometry.orientation_batch(p1, q1, q2) == 0
        )
        for a, b in zip(ei[collinear], ej[collinear]):
            s1 = (drawing.position(edges[a, 0]), drawing.position(edges[a, 1]))
            s2 = (drawing.position(edges[b, 0]), drawing.position(edges[b, 1]))
            if s1[0] == s1[1] or s2[0] == s2[1]:
                continue
            if geometry._collinear_overlap(*s1, *s2):
                violations.append(Violation("overlap", (int(a), int(b))))
    return violations


def is_valid(drawing: Drawing) -> bool:
    return not validate(drawing)


def require_valid(drawing: Drawing) -> None:
    problems = validate(drawing)
    if problems:
        shown = ", ".join(str(p) for p in problems[:5])
        raise InvalidDrawing(f"{len(problems)} violation(s): {shown}")
