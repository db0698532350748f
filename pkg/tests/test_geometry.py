import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from crossres import geometry as geo
from crossres.geometry import DegenerateGeometry, Segment

coord = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
point = st.tuples(coord, coord)


def seg(a, b):
    return Segment(tuple(map(float, a)), tuple(map(float, b)))


def test_symmetric_x_meets_at_center():
    assert geo.proper_intersection(seg((0, 0), (2, 2)), seg((0, 2), (2, 0))) == (1.0, 1.0)


def test_shared_endpoint_is_not_a_crossing():
    assert geo.proper_intersection(seg((0, 0), (1, 0)), seg((1, 0), (2, 1))) is None


def test_collinear_overlap_is_degenerate():
    with pytest.raises(DegenerateGeometry):
        geo.proper_intersection(seg((0, 0), (4, 0)), seg((1, 0), (3, 0)))


def test_collinear_disjoint_and_touching_are_not_crossings():
    assert geo.proper_intersection(seg((0, 0), (1, 0)), seg((2, 0), (3, 0))) is None
    assert geo.proper_intersection(seg((0, 0), (1, 0)), seg((1, 0), (3, 0))) is None


def test_t_junction_is_not_a_crossing():
    assert geo.proper_intersection(seg((0, 0), (2, 0)), seg((1, 0), (1, 5))) is None


def test_zero_length_segment_rejected():
    with pytest.raises(ValueError):
        Segment((1.0, 1.0), (1.0, 1.0))


@pytest.mark.parametrize(
    "s1, s2, expected",
    [
        (((0, 0), (2, 2)), ((0, 2), (2, 0)), 90.0),
        (((0, 0), (2, 0)), ((0, -1), (2, 1)), 45.0),
    ],
)
def test_crossing_angle_examples(s1, s2, expected):
    assert geo.crossing_angle(seg(*s1), seg(*s2)) == pytest.approx(expected, abs=1e-12)


def test_crossing_angle_none_without_crossing():
    assert geo.crossing_angle(seg((0, 0), (1, 0)), seg((0, 1), (1, 1))) is None


@settings(max_examples=400, deadline=None)
@given(point, point, point, point)
def test_crossing_angle_matches_direction_oracle(a, b, c, d):
    if a == b or c == d:
        return
    s1, s2 = seg(a, b), seg(c, d)
    kind = oracles.classify(a, b, c, d)
    if kind == "overlap":
        with pytest.raises(DegenerateGeometry):
            geo.crossing_angle(s1, s2)
        return
    got = geo.crossing_angle(s1, s2)
    if kind == "none":
        assert got is None
    else:
        u = (b[0] - a[0], b[1] - a[1])
        w = (d[0] - c[0], d[1] - c[1])
        assert abs(got - oracles.fold_angle(u, w)) < 1e-9
        assert geo.crossing_angle(s2, s1) == got


@settings(max_examples=300, deadline=None)
@given(point, point, point)
def test_orientation_matches_exact_sign(a, b, c):
    assert geo.orientation(a, b, c) == oracles.exact_orient(a, b, c)


def test_orientation_near_collinear_uses_exact_fallback():
    # c lies within one ulp of the line through a and b; floats alone misjudge it
    a, b = (0.1, 0.1), (0.3, 0.3)
    for k in range(-3, 4):
        c = (0.2 + k * 2.0**-55, 0.2)
        assert geo.orientation(a, b, c) == oracles.exact_orient(a, b, c)


def test_angular_gaps_cross():
    assert geo.angular_gaps((0, 0), [(1, 0), (0, 1), (-1, 0), (0, -1)]) == [90.0] * 4


def test_angular_gaps_collinear_path():
    assert geo.angular_gaps((0, 0), [(1, 0), (-1, 0)]) == [180.0, 180.0]


def test_angular_gaps_thin_wedge():
    eps = 1e-3
    gaps = geo.angular_gaps((0, 0), [(1, 0), (1, eps)])
    assert sum(gaps) == pytest.approx(360.0, abs=1e-12)
    assert min(gaps) == pytest.approx(math.degrees(math.atan(eps)), rel=1e-12)
    assert max(gaps) == pytest.approx(360.0 - math.degrees(math.atan(eps)), rel=1e-12)


def test_angular_gaps_small_inputs_and_errors():
    assert geo.angular_gaps((0, 0), []) == []
    assert geo.angular_gaps((0, 0), [(1, 1)]) == []
    with pytest.raises(DegenerateGeometry):
        geo.angular_gaps((0, 0), [(1, 0), (0, 0)])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(min_value=-179.0, max_value=180.0), min_size=2, max_size=8, unique=True))
def test_angular_gaps_sum_to_full_turn(angles):
    nbrs = [(math.cos(math.radians(t)), math.sin(math.radians(t))) for t in angles]
    gaps = geo.angular_gaps((0.0, 0.0), nbrs)
    assert len(gaps) == len(angles)
    assert math.fsum(gaps) == pytest.approx(360.0, abs=1e-9)
    assert all(g >= 0 for g in gaps)


def test_batch_classification_agrees_with_scalar(rng):
    pts = rng.integers(-3, 4, size=(4000, 4, 2)).astype(float)
    pts = pts[(np.any(pts[:, 0] != pts[:, 1], axis=1)) & (np.any(pts[:, 2] != pts[:, 3], axis=1))]
    codes = geo.classify_pairs(pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3])
    # any contact other than a proper crossing counts as degenerate here
    for (a, b, c, d), code in zip(pts.tolist(), codes.tolist()):
        if oracles.classify(a, b, c, d) == "cross":
            assert code == geo.CROSSING
        elif oracles.closed_contact(a, b, c, d):
            assert code == geo.DEGENERATE
        else:
            assert code == geo.NO_CONTACT


def test_point_segment_distance_batch(rng):
    p = rng.uniform(-5, 5, size=(500, 2))
    a = rng.uniform(-5, 5, size=(500, 2))
    b = rng.uniform(-5, 5, size=(500, 2))
    got = geo.point_segment_distance_batch(p, a, b)
    for k in range(500):
        ts = np.linspace(0, 1, 20001)
        samples = a[k] + ts[:, None] * (b[k] - a[k])
        brute = np.min(np.hypot(*(samples - p[k]).T))
        assert got[k] <= brute + 1e-12
        assert got[k] >= brute - 1e-3 * np.hypot(*(b[k] - a[k]))
