"""Independent reference implementations used as test oracles.

Nothing here imports the package's geometry or metrics code: orientation is
decided with exact rational arithmetic, angles come from direction angles
folded modulo 180 degrees, and every quantity is recomputed by brute force.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

_SCALE = 2.0**80


def _exact(x: float):
    # doubles with |x| >= 2**-28 are integer multiples of 2**-80, so scaling
    # by 2**80 is exact and the integer arithmetic below is exact too
    y = x * _SCALE
    if y.is_integer():
        return int(y)
    return Fraction(x) * (2**80)


def exact_orient(a, b, c) -> int:
    ax, ay, bx, by, cx, cy = (_exact(float(t)) for t in (*a, *b, *c))
    det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    return (det > 0) - (det < 0)


def _between(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def classify(p1, q1, p2, q2) -> str:
    """'cross' (interiors meet in one point), 'overlap' (collinear with a
    shared piece of positive length) or 'none' (disjoint or touching)."""
    o1 = exact_orient(p1, q1, p2)
    o2 = exact_orient(p1, q1, q2)
    o3 = exact_orient(p2, q2, p1)
    o4 = exact_orient(p2, q2, q1)
    if o1 == o2 == 0:
        # collinear: compare the parameter intervals exactly
        pts = [tuple(Fraction(float(t)) for t in p) for p in (p1, q1, p2, q2)]
        axis = 0 if pts[0][0] != pts[1][0] else 1
        lo1, hi1 = sorted((pts[0][axis], pts[1][axis]))
        lo2, hi2 = sorted((pts[2][axis], pts[3][axis]))
        return "overlap" if min(hi1, hi2) > max(lo1, lo2) else "none"
    if o1 * o2 < 0 and o3 * o4 < 0:
        return "cross"
    return "none"


def exact_intersection(p1, q1, p2, q2):
    f = [[Fraction(float(t)) for t in p] for p in (p1, q1, p2, q2)]
    (x1, y1), (x2, y2), (x3, y3), (x4, y4) = f
    den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4)
    t = ((x1 - x3) * (y3 - y4) - (y1 - y3) * (x3 - x4)) / den
    return float(x1 + t * (x2 - x1)), float(y1 + t * (y2 - y1))


def fold_angle(u, w) -> float:
    """Acute angle between the lines spanned by u and w, via direction angles."""
    a = math.degrees(math.atan2(u[1], u[0])) % 180.0
    b = math.degrees(math.atan2(w[1], w[0])) % 180.0
    d = abs(a - b)
    return min(d, 180.0 - d)


def crossing_pairs(edges, pos):
    """All (i, j, angle) with edges i < j crossing properly."""
    out = []
    for i, j in combinations(range(len(edges)), 2):
        (a, b), (c, d) = edges[i], edges[j]
        if len({a, b, c, d}) < 4:
            continue
        kind = classify(pos[a], pos[b], pos[c], pos[d])
        if kind == "overlap":
            raise ValueError("collinear overlap")
        if kind == "cross":
            u = (pos[b][0] - pos[a][0], pos[b][1] - pos[a][1])
            w = (pos[d][0] - pos[c][0], pos[d][1] - pos[c][1])
            out.append((i, j, fold_angle(u, w)))
    return out


def crossing_resolution(edges, pos):
    pairs = crossing_pairs(edges, pos)
    if not pairs:
        return None, set()
    best = min(a for _, _, a in pairs)
    crit = {(i, j) for i, j, a in pairs if a <= best + 1e-9}
    return best, crit


def vertex_gaps(v, edges, pos):
    """[(gap, edge_a, edge_b)] between cyclically consecutive edges at v."""
    spokes = []
    for k, (a, b) in enumerate(edges):
        if v in (a, b):
            other = b if a == v else a
            dx, dy = pos[other][0] - pos[v][0], pos[other][1] - pos[v][1]
            spokes.append((math.degrees(math.atan2(dy, dx)) % 360.0, k))
    if len(spokes) < 2:
        return []
    spokes.sort()
    out = []
    for t in range(len(spokes)):
        d0, e0 = spokes[t]
        d1, e1 = spokes[(t + 1) % len(spokes)]
        gap = d1 - d0 if t + 1 < len(spokes) else d1 + 360.0 - d0
        out.append((gap, e0, e1))
    return out


def angular_resolution(n, edges, pos):
    entries = [g for v in range(n) for g in vertex_gaps(v, edges, pos)]
    if not entries:
        return None, set()
    best = min(g for g, _, _ in entries)
    crit = {(min(a, b), max(a, b)) for g, a, b in entries if g <= best + 1e-9}
    return best, crit


def endpoints(edges, pairs):
    return {x for i, j in pairs for x in (*edges[i], *edges[j])}


def aspect(pos):
    xs = [p[0] for p in pos]
    ys = [p[1] for p in pos]
    w, h = max(xs) - min(xs), max(ys) - min(ys)
    return max(w, h) / min(w, h)


def closed_contact(p1, q1, p2, q2) -> bool:
    """Whether the closed segments share at least one point."""
    o1 = exact_orient(p1, q1, p2)
    o2 = exact_orient(p1, q1, q2)
    o3 = exact_orient(p2, q2, p1)
    o4 = exact_orient(p2, q2, q1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and _between(p1, q1, p2)) or (o2 == 0 and _between(p1, q1, q2))
            or (o3 == 0 and _between(p2, q2, p1)) or (o4 == 0 and _between(p2, q2, q1)))
