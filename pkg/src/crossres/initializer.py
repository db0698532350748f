"""Starting layouts: circular, random grid, and a Fruchterman-Reingold spring
embedder used in place of a commercial organic layouter."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .graph_model import Drawing, Graph, InvalidDrawing, validate


class CapacityError(RuntimeError):
    """No valid placement found within the attempt budget."""


@dataclass(frozen=True)
class InitSpec:
    kind: str = "spring"  # "circle" | "random_grid" | "spring"
    radius: float = 100.0
    grid: Optional[tuple[int, int]] = None
    iterations: int = 300
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("circle", "random_grid", "spring"):
            raise ValueError(f"unknown init kind {self.kind!r}")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.grid is not None and (self.grid[0] <= 0 or self.grid[1] <= 0):
            raise ValueError("grid bounds must be positive")
        if self.kind == "random_grid" and self.grid is None:
            raise ValueError("random_grid needs grid bounds")


def initial_drawing(graph: Graph, spec: InitSpec) -> Drawing:
    if spec.kind == "circle":
        return circular_layout(graph, spec.radius)
    if spec.kind == "random_grid":
        return random_grid_layout(graph, spec.grid, spec.seed)
    return spring_layout(graph, spec.iterations, spec.seed)


def circular_layout(graph: Graph, radius: float = 100.0) -> Drawing:
    """Vertex k at angle 2*k*pi/n on a circle centred at the origin."""
    k = np.arange(graph.n)
    theta = 2 * np.pi * k / max(graph.n, 1)
    pos = np.column_stack([radius * np.cos(theta), radius * np.sin(theta)])
    return Drawing(graph, pos)


def _on_segment(p, a, b) -> bool:
    # exact for integer coordinates
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def random_grid_layout(graph: Graph, grid: tuple[int, int], seed: int = 0) -> Drawing:
    """Place vertices one at a time on random points of a W x H integer grid.

    A placement is resampled while it coincides with a placed vertex, lies on
    an edge between placed vertices, or would create an edge running through
    a placed vertex.  Raises :class:`CapacityError` after ``1000 * n`` draws.
    """
    width, height = int(grid[0]), int(grid[1])
    n = graph.n
    if width * height < n:
        raise CapacityError(f"{width}x{height} grid cannot hold {n} vertices")
    rng = np.random.default_rng(seed)
    placed: dict[int, tuple[int, int]] = {}
    occupied: set[tuple[int, int]] = set()
    budget = 1000 * max(n, 1)
    for v in range(n):
        while True:
            if budget == 0:
                raise CapacityError(f"no valid grid placement after {1000 * n} attempts")
            budget -= 1
            p = (int(rng.integers(width)), int(rng.integers(height)))
            if p in occupied or not _placement_ok(graph, placed, v, p):
                continue
            placed[v] = p
            occupied.add(p)
            break
    return Drawing(graph, [placed[v] for v in range(n)])


def _placement_ok(graph: Graph, placed: dict, v: int, p) -> bool:
    for a, b in graph.edges:
        if a in placed and b in placed and _on_segment(p, placed[a], placed[b]):
            return False
    for u in graph.adjacency[v]:
        if u not in placed:
            continue
        for w, q in placed.items():
            if w != u and _on_segment(q, p, placed[u]):
                return False
    return True


def spring_layout(graph: Graph, iterations: int = 300, seed: int = 0,
                  size: float = 100.0) -> Drawing:
    """Fruchterman-Reingold layout in a ``size`` x ``size`` frame.

    Degenerate results (coincident vertices, vertex on an edge) are repaired
    with small random jitter; :class:`InvalidDrawing` after 100 rounds.
    """
    n = graph.n
    rng = np.random.default_rng(seed)
    pos = rng.uniform(0.0, size, size=(n, 2))
    if n == 0:
        return Drawing(graph, pos)
    edges = graph.edge_array()
    k = size / math.sqrt(n)
    temperature = size / 10.0
    for it in range(iterations):
        delta = pos[:, None, :] - pos[None, :, :]
        dist = np.hypot(delta[..., 0], delta[..., 1])
        np.fill_diagonal(dist, 1.0)
        dist = np.maximum(dist, 1e-6)
        disp = ((k * k / dist**2)[..., None] * delta).sum(axis=1)
        if len(edges):
            d = pos[edges[:, 0]] - pos[edges[:, 1]]
            length = np.maximum(np.hypot(d[:, 0], d[:, 1]), 1e-6)
            pull = (length / k)[:, None] * d
            np.add.at(disp, edges[:, 0], -pull)
            np.add.at(disp, edges[:, 1], pull)
        step = np.maximum(np.hypot(disp[:, 0], disp[:, 1]), 1e-12)
        cool = temperature * (1.0 - it / iterations)
        pos += disp / step[:, None] * np.minimum(step, cool)[:, None]

    pos -= pos.min(axis=0)
    span = pos.max()
    if span > 0:
        pos *= size / span
    return _jitter_until_valid(graph, pos, rng, scale=size * 1e-3)


def _jitter_until_valid(graph: Graph, pos: np.ndarray, rng, scale: float) -> Drawing:
    for _ in range(100):
        drawing = Drawing(graph, pos)
        problems = validate(drawing)
        if not problems:
            return drawing
        bad = set()
        for p in problems:
            if p.kind == "coincident":
                bad.update(p.items)
            elif p.kind == "vertex_on_edge":
                bad.add(p.items[0])
            else:
                bad.update(graph.edges[p.items[0]])
        pos = pos.copy()
        idx = sorted(bad)
        pos[idx] += rng.uniform(-scale, scale, size=(len(idx), 2))
    raise InvalidDrawing("spring layout could not be repaired by jitter")
