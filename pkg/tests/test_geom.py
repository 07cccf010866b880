import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from picvar.geom import (ConvexPolygon, DegeneratePolygonError, GeometryError, Line, Point,
                         clip_halfplane, convex_hull, orient, polygon_area, segment_intersection,
                         side)

UNIT = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
coord = st.floats(-100, 100, allow_nan=False)
pt = st.tuples(coord, coord)


@pytest.mark.parametrize("r,expected", [((0, 1), 1), ((2, 0), 0), ((0, -1), -1)])
def test_orient_examples(r, expected):
    assert orient((0, 0), (1, 0), r) == expected


def test_orient_rejects_non_finite():
    with pytest.raises(GeometryError):
        orient((0, 0), (1, 0), (math.nan, 0))


@pytest.mark.parametrize("p,expected", [((2, 3), 1), ((0, 5), 0), ((-1, 0), -1)])
def test_side_examples(p, expected):
    assert side(Line((0, 0), (1, 0)), p) == expected


def test_clip_examples():
    half = clip_halfplane(UNIT, Line((0.5, 0), (1, 0)))
    assert sorted(half.vertices) == sorted(map(Point.of, [(0.5, 0), (1, 0), (1, 1), (0.5, 1)]))
    assert clip_halfplane(UNIT, Line((2, 0), (1, 0))) is None
    assert clip_halfplane(UNIT, Line((-1, 0), (1, 0))) == UNIT


def test_clip_touching_is_flagged():
    with pytest.raises(DegeneratePolygonError):
        clip_halfplane(UNIT, Line((1, 0), (1, 0)))


def test_polygon_is_canonical():
    a = ConvexPolygon([(1, 1), (0, 1), (0, 0), (1, 0)])
    assert a == UNIT
    assert a.vertices[0] == Point(0, 0)
    assert UNIT.area == pytest.approx(1.0)


def test_polygon_rejects_nonconvex_and_degenerate():
    with pytest.raises(GeometryError):
        ConvexPolygon([(0, 0), (2, 0), (1, 0.2), (2, 2), (0, 2)])
    with pytest.raises(GeometryError):
        ConvexPolygon([(0, 0), (1, 0), (2, 0)])


def test_corners_drop_straight_vertices():
    P = ConvexPolygon([(0, 0), (0.5, 0), (1, 0), (1, 1), (0, 1)])
    assert len(P.vertices) == 5
    assert P.n_sides == 4
    assert len(P.corners()) == 4


def test_segment_intersection_and_hull():
    assert segment_intersection((0, 0), (2, 2), (0, 2), (2, 0)) == pytest.approx((1, 1))
    assert segment_intersection((0, 0), (1, 0), (0, 1), (1, 1)) is None
    hull = convex_hull([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5), (0.5, 0)])
    assert len(hull) == 4


@settings(max_examples=200, deadline=None)
@given(pt, pt, pt)
def test_orient_antisymmetric(p, q, r):
    assert orient(p, q, r) == -orient(p, r, q)


@settings(max_examples=200, deadline=None)
@given(pt, st.tuples(st.floats(-1, 1), st.floats(-1, 1)), pt, pt)
def test_side_translation_invariant(u, v, p, shift):
    if math.hypot(*v) < 1e-3:
        return
    ell = Line(u, v)
    moved = Line((u[0] + shift[0], u[1] + shift[1]), v)
    assert side(moved, (p[0] + shift[0], p[1] + shift[1])) == side(ell, p) or \
        abs(ell.signed_distance(p)) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.lists(pt, min_size=3, max_size=12), pt, st.floats(0, 2 * math.pi))
def test_clip_convex_and_contained(points, u, angle):
    hull = convex_hull(points)
    if len(hull) < 3 or polygon_area(hull) < 1e-3:
        return
    P = ConvexPolygon(hull)
    h = Line(u, (math.cos(angle), math.sin(angle)))
    try:
        Q = clip_halfplane(P, h)
    except DegeneratePolygonError:
        return
    if Q is None:
        return
    tol = 1e-7 * max(1.0, P.scale_len())
    for q in Q.vertices:
        assert P.boundary_distance(np.array([q]))[0] >= -tol
        assert h.signed_distance(q) >= -tol
    assert Q.area <= P.area + tol
