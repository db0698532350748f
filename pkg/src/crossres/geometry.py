"""Planar primitives: orientation, segment intersection, crossing angles and
angular gaps.

Scalar functions operate on ``(x, y)`` tuples; the ``*_batch`` kernels take
numpy arrays of shape ``(k, 2)`` and are what the metrics engine uses.  Both
share the same orientation predicate, which falls back to exact rational
arithmetic whenever the floating-point determinant is too close to zero to
trust its sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

Point = Tuple[float, float]

# Relative threshold below which the float determinant is recomputed exactly.
EXACT_FALLBACK_REL = 1e-12
# Inputs that are integers below this magnitude give exact float determinants.
_EXACT_INT_LIMIT = float(2**25)

NO_CONTACT = 0
CROSSING = 1
DEGENERATE = 2


class DegenerateGeometry(ValueError):
    """Raised for configurations whose crossing angle is undefined
    (collinear overlap, vertex lying on a segment, coincident points)."""


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def __post_init__(self) -> None:
        if self.a[0] == self.b[0] and self.a[1] == self.b[1]:
            raise ValueError(f"zero-length segment at {self.a}")

    @property
    def direction(self) -> Point:
        return (self.b[0] - self.a[0], self.b[1] - self.a[1])


def _exact_orient(ax, ay, bx, by, cx, cy) -> int:
    ax, ay, bx, by, cx, cy = map(Fraction, (ax, ay, bx, by, cx, cy))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def orientation(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c: +1 counter-clockwise, -1 clockwise, 0 collinear."""
    left = (b[0] - a[0]) * (c[1] - a[1])
    right = (b[1] - a[1]) * (c[0] - a[0])
    det = left - right
    if abs(det) > EXACT_FALLBACK_REL * (abs(left) + abs(right)):
        return 1 if det > 0 else -1
    return _exact_orient(a[0], a[1], b[0], b[1], c[0], c[1])


def _collinear_overlap(a: Point, b: Point, c: Point, d: Point) -> bool:
    # Collinear segments: project on the dominant axis of ab.
    axis = 0 if abs(b[0] - a[0]) >= abs(b[1] - a[1]) else 1
    lo1, hi1 = sorted((a[axis], b[axis]))
    lo2, hi2 = sorted((c[axis], d[axis]))
    return min(hi1, hi2) > max(lo1, lo2)


def proper_intersection(s1: Segment, s2: Segment) -> Optional[Point]:
    """Return the single point where the open interiors of ``s1`` and ``s2`` meet.

    Returns ``None`` for disjoint segments and for contacts at an endpoint
    (shared endpoints, T-junctions).  A collinear overlap of positive length
    raises :class:`DegenerateGeometry`.
    """
    a, b, c, d = s1.a, s1.b, s2.a, s2.b
    o1 = orientation(a, b, c)
    o2 = orientation(a, b, d)
    o3 = orientation(c, d, a)
    o4 = orientation(c, d, b)
    if o1 == 0 and o2 == 0:
        if _collinear_overlap(a, b, c, d):
            raise DegenerateGeometry("collinear overlapping segments")
        return None
    if o1 * o2 < 0 and o3 * o4 < 0:
        rx, ry = b[0] - a[0], b[1] - a[1]
        sx, sy = d[0] - c[0], d[1] - c[1]
        left, right = rx * sy, ry * sx
        denom = left - right
        if abs(denom) > EXACT_FALLBACK_REL * (abs(left) + abs(right)):
            t = ((c[0] - a[0]) * sy - (c[1] - a[1]) * sx) / denom
            return (a[0] + t * rx, a[1] + t * ry)
        return _exact_intersection(a, b, c, d)
    return None


def _exact_intersection(a: Point, b: Point, c: Point, d: Point) -> Point:
    # nearly parallel lines: the float denominator may have cancelled
    ax, ay, bx, by, cx, cy, dx, dy = map(Fraction, (*a, *b, *c, *d))
    rx, ry, sx, sy = bx - ax, by - ay, dx - cx, dy - cy
    t = ((cx - ax) * sy - (cy - ay) * sx) / (rx * sy - ry * sx)
    return (float(ax + t * rx), float(ay + t * ry))


def line_angle(u: Point, w: Point) -> float:
    """Acute angle in degrees, in [0, 90], between lines with directions u and w."""
    cross = u[0] * w[1] - u[1] * w[0]
    dot = u[0] * w[0] + u[1] * w[1]
    return math.degrees(math.atan2(abs(cross), abs(dot)))


def crossing_angle(s1: Segment, s2: Segment) -> Optional[float]:
    """Crossing angle of two segments in degrees, or ``None`` if they do not cross."""
    if proper_intersection(s1, s2) is None:
        return None
    return line_angle(s1.direction, s2.direction)


def angular_gaps(center: Point, neighbors: Sequence[Point]) -> list[float]:
    """Consecutive angular gaps (degrees) between edges leaving ``center``.

    The edges are sorted by direction; the returned gaps follow that cyclic
    order starting from the smallest direction angle and sum to 360.
    """
    if len(neighbors) < 2:
        return []
    directions = []
    for p in neighbors:
        dx, dy = p[0] - center[0], p[1] - center[1]
        if dx == 0 and dy == 0:
            raise DegenerateGeometry(f"neighbor coincides with center {center}")
        directions.append(math.degrees(math.atan2(dy, dx)))
    return _gaps_from_directions(directions)


def _gaps_from_directions(directions: list[float]) -> list[float]:
    directions = sorted(directions)
    gaps = [directions[k + 1] - directions[k] for k in range(len(directions) - 1)]
    gaps.append(360.0 - (directions[-1] - directions[0]))
    return gaps


# ---------------------------------------------------------------------------
# Vectorized kernels
# ---------------------------------------------------------------------------


def orientation_batch(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Row-wise orientation signs for arrays of points of shape (k, 2)."""
    left = (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
    right = (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])
    det = left - right
    sign = np.sign(det).astype(np.int8)
    unsure = np.abs(det) <= EXACT_FALLBACK_REL * (np.abs(left) + np.abs(right))
    if unsure.any():
        coords = np.stack(np.broadcast_arrays(a, b, c), axis=-2)[unsure]
        small_ints = np.all(
            (coords == np.round(coords)) & (np.abs(coords) < _EXACT_INT_LIMIT),
            axis=(-2, -1),
        )
        idx = np.flatnonzero(unsure)
        # Small integer inputs already have an exact float determinant.
        for k in np.flatnonzero(~small_ints):
            (ax, ay), (bx, by), (cx, cy) = coords[k].tolist()
            sign.flat[idx[k]] = _exact_orient(ax, ay, bx, by, cx, cy)
    return sign


def boxes_meet(p1, q1, p2, q2) -> np.ndarray:
    """Whether the axis-aligned boxes of segments (p1, q1) and (p2, q2) intersect."""
    return (
        (np.maximum(p1[..., 0], q1[..., 0]) >= np.minimum(p2[..., 0], q2[..., 0]))
        & (np.maximum(p2[..., 0], q2[..., 0]) >= np.minimum(p1[..., 0], q1[..., 0]))
        & (np.maximum(p1[..., 1], q1[..., 1]) >= np.minimum(p2[..., 1], q2[..., 1]))
        & (np.maximum(p2[..., 1], q2[..., 1]) >= np.minimum(p1[..., 1], q1[..., 1]))
    )


def classify_boxed(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray) -> np.ndarray:
    """:func:`classify_pairs` for pairs already known to have meeting boxes."""
    o1 = orientation_batch(a, b, c)
    o2 = orientation_batch(a, b, d)
    o3 = orientation_batch(c, d, a)
    o4 = orientation_batch(c, d, b)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    # collinear pairs with meeting boxes always touch
    closed = ((o1 * o2 <= 0) & (o3 * o4 <= 0)) | ((o1 == 0) & (o2 == 0))
    out = np.zeros(o1.shape, dtype=np.int8)
    out[closed] = DEGENERATE
    out[proper] = CROSSING
    return out


def classify_pairs(p1: np.ndarray, q1: np.ndarray, p2: np.ndarray, q2: np.ndarray) -> np.ndarray:
    """Classify segment pairs (p1, q1) x (p2, q2) row-wise (inputs broadcast).

    Returns an int8 array with ``CROSSING`` for a proper interior crossing,
    ``DEGENERATE`` for any other contact (touching, collinear overlap) and
    ``NO_CONTACT`` otherwise.
    """
    p1, q1, p2, q2 = np.broadcast_arrays(p1, q1, p2, q2)
    out = np.zeros(p1.shape[:-1], dtype=np.int8)
    meet = boxes_meet(p1, q1, p2, q2)
    if meet.any():
        out[meet] = classify_boxed(p1[meet], q1[meet], p2[meet], q2[meet])
    return out


def line_angle_batch(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Row-wise :func:`line_angle`."""
    cross = u[..., 0] * w[..., 1] - u[..., 1] * w[..., 0]
    dot = u[..., 0] * w[..., 0] + u[..., 1] * w[..., 1]
    return np.degrees(np.arctan2(np.abs(cross), np.abs(dot)))


def point_segment_distance_batch(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Euclidean distance from points ``p`` to closed segments ``ab``, row-wise."""
    abx, aby = b[..., 0] - a[..., 0], b[..., 1] - a[..., 1]
    apx, apy = p[..., 0] - a[..., 0], p[..., 1] - a[..., 1]
    denom = abx * abx + aby * aby
    with np.errstate(invalid="ignore", divide="ignore"):
        t = (apx * abx + apy * aby) / denom
    t = np.clip(np.where(denom > 0, t, 0.0), 0.0, 1.0)
    return np.hypot(apx - t * abx, apy - t * aby)
