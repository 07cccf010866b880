"""Planar primitives: points, lines/half-planes, convex polygons and the
tolerance-banded predicates everything else is built on.

The plane is identified with C; a point ``(x, y)`` is ``x + iy``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

#: relative width of the zero band used by :func:`orient` and :func:`side`
ZERO_TOL = 1e-9


class GeometryError(ValueError):
    """Raised for invalid geometric input (non-finite values, bad polygons)."""


class DegeneratePolygonError(GeometryError):
    """A clip or construction produced a polygon of zero area."""


class Point(NamedTuple):
    x: float
    y: float

    @classmethod
    def of(cls, p) -> "Point":
        if isinstance(p, Point):
            return p
        if isinstance(p, complex):
            x, y = p.real, p.imag
        else:
            x, y = p
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise GeometryError(f"non-finite point ({x}, {y})")
        return cls(x, y)

    def __sub__(self, other):  # type: ignore[override]
        return Point(self.x - other[0], self.y - other[1])

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def scale(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)

    def dot(self, other) -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other) -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_complex(self) -> complex:
        return complex(self.x, self.y)


def as_array(points: Iterable) -> np.ndarray:
    """Stack points into an ``(n, 2)`` float array."""
    arr = np.asarray([tuple(p) for p in points], dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise GeometryError("non-finite coordinates")
    return arr


def orient(p, q, r) -> int:
    """Sign of the cross product (q - p) x (r - p); +1 is a left turn."""
    p, q, r = Point.of(p), Point.of(q), Point.of(r)
    a, b = q - p, r - p
    value = a.cross(b)
    scale = max(a.norm(), b.norm(), 1.0)
    if abs(value) <= ZERO_TOL * scale * scale:
        return 0
    return 1 if value > 0 else -1


@dataclass(frozen=True)
class Line:
    """The line ``{x : (x - u) . v = 0}``; as a half-plane, ``(x - u) . v >= 0``."""

    u: Point
    v: Point

    def __post_init__(self):
        u, v = Point.of(self.u), Point.of(self.v)
        n = v.norm()
        if n == 0:
            raise GeometryError("line normal must be nonzero")
        if abs(n - 1.0) > 1e-12:
            v = v.scale(1.0 / n)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def through(cls, a, b) -> "Line":
        """Line through ``a`` and ``b``; the positive side is to the left of a->b."""
        a, b = Point.of(a), Point.of(b)
        d = b - a
        if d.norm() == 0:
            raise GeometryError("need two distinct points")
        return cls(a, Point(-d.y, d.x))

    def signed_distance(self, p) -> float:
        return (Point.of(p) - self.u).dot(self.v)

    def direction(self) -> Point:
        return Point(self.v.y, -self.v.x)

    def contains_halfplane(self, p) -> bool:
        return side(self, p) >= 0


def _side_tol(dist_from_anchor):
    return ZERO_TOL * np.maximum(1.0, dist_from_anchor)


def side(line: Line, p) -> int:
    """Which side of ``line`` the point lies on; 0 means on the line."""
    p = Point.of(p)
    d = p - line.u
    value = d.dot(line.v)
    if abs(value) <= _side_tol(d.norm()):
        return 0
    return 1 if value > 0 else -1


def side_many(normals: np.ndarray, offsets: np.ndarray, anchors: np.ndarray,
              points: np.ndarray) -> np.ndarray:
    """Vectorised :func:`side` for many lines against many points.

    ``normals`` is ``(L, 2)``, ``anchors`` is ``(L, 2)``, ``offsets`` is
    ``(L,)`` with ``offset = anchor . normal``; returns an ``(L, n)`` int8 array.
    """
    values = points @ normals.T - offsets  # (n, L)
    dx = points[:, None, 0] - anchors[None, :, 0]
    dy = points[:, None, 1] - anchors[None, :, 1]
    tol = _side_tol(np.hypot(dx, dy))
    out = np.sign(values).astype(np.int8)
    out[np.abs(values) <= tol] = 0
    return out.T


def polygon_area(vertices: Sequence) -> float:
    """Signed shoelace area; positive for counter-clockwise order."""
    arr = as_array(vertices)
    x, y = arr[:, 0], arr[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _dedupe_cyclic(points: list[Point], tol: float) -> list[Point]:
    out: list[Point] = []
    for p in points:
        if not out or (p - out[-1]).norm() > tol:
            out.append(p)
    while len(out) > 1 and (out[0] - out[-1]).norm() <= tol:
        out.pop()
    return out


@dataclass(frozen=True, init=False)
class ConvexPolygon:
    """Convex polygon stored counter-clockwise, lexicographically smallest
    vertex first.  Collinear (straight-angle) vertices are permitted."""

    vertices: tuple

    def __init__(self, vertices: Iterable):
        pts = [Point.of(p) for p in vertices]
        scale = max((p.norm() for p in pts), default=1.0)
        pts = _dedupe_cyclic(pts, 1e-12 * max(scale, 1.0))
        if len(pts) < 3:
            raise GeometryError("a polygon needs at least 3 distinct vertices")
        if polygon_area(pts) < 0:
            pts.reverse()
        n = len(pts)
        for i in range(n):
            if orient(pts[i - 1], pts[i], pts[(i + 1) % n]) < 0:
                raise GeometryError(f"polygon is not convex at vertex {pts[i]}")
        if abs(polygon_area(pts)) <= ZERO_TOL * max(scale, 1.0) ** 2:
            raise DegeneratePolygonError("polygon has zero area")
        start = min(range(n), key=lambda i: (pts[i].x, pts[i].y))
        object.__setattr__(self, "vertices", tuple(pts[start:] + pts[:start]))

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def array(self) -> np.ndarray:
        return as_array(self.vertices)

    def edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def halfplanes(self) -> list[Line]:
        """Supporting half-planes whose intersection is the polygon."""
        return [Line.through(a, b) for a, b in self.edges()]

    def corners(self) -> list[Point]:
        """Vertices with a genuine turn (straight-angle vertices dropped)."""
        n = len(self.vertices)
        return [self.vertices[i] for i in range(n)
                if orient(self.vertices[i - 1], self.vertices[i],
                          self.vertices[(i + 1) % n]) != 0]

    def sides(self) -> list[tuple[Point, Point]]:
        """Maximal straight sides between consecutive corners."""
        c = self.corners()
        return [(c[i], c[(i + 1) % len(c)]) for i in range(len(c))]

    @property
    def n_sides(self) -> int:
        return len(self.corners())

    def centroid(self) -> Point:
        arr = self.array()
        x, y = arr[:, 0], arr[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cr = x * yn - xn * y
        a = cr.sum() / 2.0
        return Point(float(((x + xn) * cr).sum() / (6 * a)),
                     float(((y + yn) * cr).sum() / (6 * a)))

    def scale_len(self) -> float:
        arr = self.array()
        return float(np.max(np.ptp(arr, axis=0)))

    def contains(self, p, strict: bool = False) -> bool:
        """Point-in-polygon with the geometric tolerance band on each side."""
        p = Point.of(p)
        for h in self.halfplanes():
            s = side(h, p)
            if s < 0 or (strict and s == 0):
                return False
        return True

    def boundary_distance(self, points: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary, positive inside."""
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        best = np.full(len(pts), np.inf)
        for h in self.halfplanes():
            d = (pts - np.array(h.u)) @ np.array(h.v)
            best = np.minimum(best, d)
        return best

    def has_vertex(self, p, tol: float = 1e-9) -> bool:
        p = Point.of(p)
        return any((p - q).norm() <= tol * max(1.0, self.scale_len())
                   for q in self.corners())


def clip_halfplane(poly: ConvexPolygon, h: Line) -> ConvexPolygon | None:
    """Intersect ``poly`` with the closed half-plane ``h``.

    Returns ``None`` when the intersection is empty and raises
    :class:`DegeneratePolygonError` when it is a segment or a point.
    """
    verts = list(poly.vertices)
    signs = [side(h, p) for p in verts]
    if all(s >= 0 for s in signs):
        return poly
    if all(s <= 0 for s in signs):
        if any(s == 0 for s in signs):
            raise DegeneratePolygonError("half-plane only touches the polygon")
        return None
    out: list[Point] = []
    n = len(verts)
    for i in range(n):
        p, q = verts[i], verts[(i + 1) % n]
        sp, sq = signs[i], signs[(i + 1) % n]
        if sp >= 0:
            out.append(p)
        if sp * sq < 0:
            dp, dq = h.signed_distance(p), h.signed_distance(q)
            t = dp / (dp - dq)
            out.append(Point(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)))
    try:
        return ConvexPolygon(out)
    except DegeneratePolygonError:
        raise
    except GeometryError as exc:
        raise DegeneratePolygonError(str(exc)) from exc


def clip_many(poly: ConvexPolygon | None, lines: Iterable[Line]) -> ConvexPolygon | None:
    for h in lines:
        if poly is None:
            return None
        poly = clip_halfplane(poly, h)
    return poly


def convex_hull(points: Iterable) -> list[Point]:
    """Andrew's monotone chain; collinear points are dropped."""
    pts = sorted(set(Point.of(p) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain: list[Point] = []
        for p in seq:
            while len(chain) >= 2 and orient(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def segment_intersection(a, b, c, d):
    """Intersection point of segments [a, b] and [c, d], or ``None``.

    Overlapping collinear segments return ``None``; callers that care about
    that case handle endpoints separately.
    """
    a, b, c, d = map(Point.of, (a, b, c, d))
    r, s = b - a, d - c
    den = r.cross(s)
    scale = max(r.norm(), s.norm(), 1.0)
    if abs(den) <= ZERO_TOL * scale * scale:
        return None
    t = (c - a).cross(s) / den
    u = (c - a).cross(r) / den
    eps = 1e-12
    if -eps <= t <= 1 + eps and -eps <= u <= 1 + eps:
        return Point(a.x + t * r.x, a.y + t * r.y)
    return None


def point_segment_distance(p, a, b) -> float:
    p, a, b = map(Point.of, (p, a, b))
    d = b - a
    L2 = d.dot(d)
    if L2 == 0:
        return (p - a).norm()
    t = min(1.0, max(0.0, (p - a).dot(d) / L2))
    return (p - Point(a.x + t * d.x, a.y + t * d.y)).norm()
