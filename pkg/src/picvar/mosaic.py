"""Polygonal mosaics and polygonally inscribed curves (PIC sets).

A :class:`PicSet` pairs curve ``i`` with convex polygon ``i``.  The mosaic
axioms (connected union, polygons meeting only in a common corner or a
common full side) and the PIC axioms (each curve joins two corners of its
polygon, touches the polygon boundary only there, and is all of the set
inside that polygon) are checked by :func:`validate`, which reports
violations as data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curve import Curve, is_convex, is_projectable, split_at_index, split_projectable
from .geom import (
    ConvexPolygon, DegeneratePolygonError, GeometryError, Line, Point, clip_halfplane, clip_many,
    convex_hull, point_segment_distance, segment_intersection, side,
)


class MosaicError(GeometryError):
    pass


class PartitionError(MosaicError):
    pass


# -- data ---------------------------------------------------------------------


@dataclass(frozen=True)
class Mosaic:
    polygons: tuple

    def __init__(self, polygons: Sequence[ConvexPolygon]):
        object.__setattr__(self, "polygons", tuple(polygons))

    def __len__(self):
        return len(self.polygons)

    def __iter__(self):
        return iter(self.polygons)


@dataclass(frozen=True, eq=False)
class PicSet:
    """Curves with their enclosing polygons; ``names`` label curves for I/O."""

    curves: tuple
    polygons: tuple
    names: tuple = field(default=())

    def __init__(self, curves: Sequence[Curve], polygons: Sequence[ConvexPolygon],
                 names: Sequence[str] | None = None):
        if len(curves) != len(polygons):
            raise MosaicError("need exactly one polygon per curve")
        object.__setattr__(self, "curves", tuple(curves))
        object.__setattr__(self, "polygons", tuple(polygons))
        if names is None:
            names = [f"c{i}" for i in range(len(curves))]
        object.__setattr__(self, "names", tuple(names))

    def __len__(self):
        return len(self.curves)

    @property
    def mosaic(self) -> Mosaic:
        return Mosaic(self.polygons)

    @property
    def vertex_set(self) -> list[Point]:
        seen: list[Point] = []
        for c in self.curves:
            for p in c.endpoints:
                if not any(_same(p, q) for q in seen):
                    seen.append(p)
        return seen

    @property
    def scale(self) -> float:
        pts = self.sample_points()
        return max(1.0, float(np.max(np.ptp(pts, axis=0))))

    def sample_points(self) -> np.ndarray:
        return np.unique(np.vstack([c.points for c in self.curves]), axis=0)

    def replace_curve(self, i: int, new: Sequence[tuple[Curve, ConvexPolygon]]) -> "PicSet":
        curves = list(self.curves[:i]) + [c for c, _ in new] + list(self.curves[i + 1:])
        polys = list(self.polygons[:i]) + [p for _, p in new] + list(self.polygons[i + 1:])
        base = self.names[i]
        labels = [base] if len(new) == 1 else [f"{base}.{k}" for k in range(len(new))]
        names = list(self.names[:i]) + labels + list(self.names[i + 1:])
        return PicSet(curves, polys, _unique_names(names))

    def resampled(self, samples: int) -> "PicSet":
        return PicSet([c.resample(samples) for c in self.curves], self.polygons, self.names)


def _cross2(a: np.ndarray, b) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _unique_names(names):
    seen, out = set(), []
    for n in names:
        m, k = n, 1
        while m in seen:
            m = f"{n}~{k}"
            k += 1
        seen.add(m)
        out.append(m)
    return out


def _same(p, q, tol: float = 1e-9) -> bool:
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol * max(1.0, abs(p[0]), abs(p[1]))


# -- polygon contacts -----------------------------------------------------------


def polygon_contact(P: ConvexPolygon, Q: ConvexPolygon):
    """Classify ``P & Q`` as ``("empty",)``, ``("point", p)``,
    ``("segment", a, b)`` or ``("overlap", area)``."""
    pts = [p for p in P.vertices if Q.contains(p)]
    pts += [q for q in Q.vertices if P.contains(q)]
    for a, b in P.edges():
        for c, d in Q.edges():
            x = segment_intersection(a, b, c, d)
            if x is not None:
                pts.append(x)
    if not pts:
        return ("empty",)
    scale = max(P.scale_len(), Q.scale_len(), 1.0)
    tol = 1e-9 * scale
    hull = convex_hull(pts)
    if len(hull) >= 3:
        try:
            area = ConvexPolygon(hull).area
        except GeometryError:
            area = 0.0
        if area > 1e-12 * scale * scale:
            return ("overlap", area)
    arr = np.array(pts)
    d = arr - arr[0]
    spread = np.hypot(d[:, 0], d[:, 1])
    if spread.max() <= tol:
        return ("point", Point(*arr[0]))
    far = arr[int(np.argmax(spread))]
    dd = np.hypot(*(arr - far).T)
    near = arr[int(np.argmax(dd))]
    return ("segment", Point(*near), Point(*far))


def _is_full_side(poly: ConvexPolygon, a, b, tol: float) -> bool:
    for p, q in poly.sides():
        if (_close(p, a, tol) and _close(q, b, tol)) or (_close(p, b, tol) and _close(q, a, tol)):
            return True
    return False


def _close(p, q, tol):
    return math.hypot(p[0] - q[0], p[1] - q[1]) <= tol


def _is_corner(poly: ConvexPolygon, p, tol: float) -> bool:
    return any(_close(p, q, tol) for q in poly.corners())


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, i):
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i, j):
        self.parent[self.find(i)] = self.find(j)

    def groups(self):
        return len({self.find(i) for i in range(len(self.parent))})


# -- validation -----------------------------------------------------------------


@dataclass
class Violation:
    code: str
    message: str
    indices: tuple = ()

    def as_dict(self):
        return {"code": self.code, "message": self.message, "indices": list(self.indices)}


@dataclass
class ValidationReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def __bool__(self):
        return self.ok


def validate_mosaic(polygons: Sequence[ConvexPolygon]) -> list[Violation]:
    out: list[Violation] = []
    n = len(polygons)
    if n == 0:
        return [Violation("empty", "mosaic has no polygons")]
    uf = _UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            P, Q = polygons[i], polygons[j]
            tol = 1e-7 * max(P.scale_len(), Q.scale_len(), 1.0)
            kind = polygon_contact(P, Q)
            if kind[0] == "empty":
                continue
            uf.union(i, j)
            if kind[0] == "overlap":
                out.append(Violation("interiors overlap",
                                     f"polygons {i} and {j} overlap (area {kind[1]:.3g})", (i, j)))
            elif kind[0] == "point":
                if not (_is_corner(P, kind[1], tol) and _is_corner(Q, kind[1], tol)):
                    out.append(Violation("bad contact",
                                         f"polygons {i} and {j} touch at a point that is not "
                                         "a corner of both", (i, j)))
            else:
                a, b = kind[1], kind[2]
                if not (_is_full_side(P, a, b, tol) and _is_full_side(Q, a, b, tol)):
                    out.append(Violation("partial side",
                                         f"polygons {i} and {j} share a segment that is not a "
                                         "full side of both", (i, j)))
    if uf.groups() > 1:
        out.append(Violation("disconnected", "union of the polygons is not connected"))
    return out


def validate(ps: PicSet) -> ValidationReport:
    """Check every mosaic and PIC axiom; violations name curve/polygon indices."""
    out = validate_mosaic(ps.polygons)
    n = len(ps)
    arrays = [c.points for c in ps.curves]
    for i, (c, P) in enumerate(zip(ps.curves, ps.polygons)):
        tol = 1e-9 * max(P.scale_len(), 1.0)
        ctol = 1e-7 * max(P.scale_len(), 1.0)
        if not is_convex(c):
            out.append(Violation("curve not convex", f"curve {i} is not convex", (i,)))
        for p in c.endpoints:
            if not _is_corner(P, p, ctol):
                out.append(Violation("endpoint not a corner",
                                     f"endpoint {tuple(p)} of curve {i} is not a corner of "
                                     f"polygon {i}", (i,)))
        d = P.boundary_distance(c.points[1:-1])
        if np.any(d < -tol):
            out.append(Violation("curve leaves polygon", f"curve {i} leaves polygon {i}", (i,)))
        elif np.any(d <= tol):
            out.append(Violation("curve touches boundary off-vertex",
                                 f"curve {i} touches the boundary of polygon {i} away from "
                                 "its endpoints", (i,)))
        for j in range(n):
            if j == i:
                continue
            dj = P.boundary_distance(arrays[j])
            inside = dj >= -tol
            if not inside.any():
                continue
            hits = arrays[j][inside]
            if not all(any(_close(h, e, ctol) for e in c.endpoints) for h in hits):
                out.append(Violation("foreign curve in polygon",
                                     f"curve {j} meets polygon {i} away from the endpoints of "
                                     f"curve {i}", (i, j)))
    # connectedness of the set itself
    verts = ps.vertex_set
    uf = _UnionFind(len(verts))
    for c in ps.curves:
        ia = _vertex_index(verts, c.start)
        ib = _vertex_index(verts, c.end)
        uf.union(ia, ib)
    if len(verts) and uf.groups() > 1:
        out.append(Violation("set disconnected", "the union of the curves is not connected"))
    return ValidationReport(out)


def _vertex_index(verts, p) -> int:
    for k, q in enumerate(verts):
        if _same(p, q):
            return k
    raise MosaicError(f"{p} is not a vertex")


def sides_max(m) -> int:
    """Largest side count among the polygons of a mosaic."""
    polys = m.polygons if hasattr(m, "polygons") else list(m)
    if not polys:
        raise MosaicError("empty mosaic")
    return max(P.n_sides for P in polys)


def is_simple(ps: PicSet) -> bool:
    return not _duplicate_groups(ps)


def _endpoint_key(ps: PicSet, c: Curve, verts) -> frozenset:
    return frozenset((_vertex_index(verts, c.start), _vertex_index(verts, c.end)))


def _duplicate_groups(ps: PicSet) -> list[list[int]]:
    verts = ps.vertex_set
    groups: dict = {}
    for i, c in enumerate(ps.curves):
        groups.setdefault(_endpoint_key(ps, c, verts), []).append(i)
    return [g for g in groups.values() if len(g) > 1]


# -- partition lemma ------------------------------------------------------------


def _tangent_halfplanes(c: Curve, inner_hint: np.ndarray) -> list[Line]:
    pts = c.points
    out = []
    for k in range(1, len(pts) - 1):
        d = pts[k + 1] - pts[k - 1]
        n = np.array([-d[1], d[0]])
        if np.hypot(*n) == 0:
            continue
        s = (pts - pts[k]) @ n
        if np.max(np.abs(s)) <= 1e-12 * np.hypot(*n) * max(1.0, c.extent):
            s = (inner_hint - pts[k]) @ n
            sign = 1.0 if s >= 0 else -1.0
        else:
            sign = 1.0 if np.sum(s) >= 0 else -1.0
        out.append(Line(Point(*pts[k]), Point(*(sign * n))))
    return out


def _insert_vertex(poly: ConvexPolygon, v: Point) -> ConvexPolygon:
    """Add ``v`` (lying on an edge) as a straight-angle vertex."""
    verts = list(poly.vertices)
    if any(_close(v, q, 1e-12 * max(1.0, poly.scale_len())) for q in verts):
        return poly
    best, at = math.inf, 0
    for i, (a, b) in enumerate(poly.edges()):
        d = point_segment_distance(v, a, b)
        if d < best:
            best, at = d, i
    verts.insert(at + 1, v)
    return ConvexPolygon(verts)


def _rc_candidates(P: ConvexPolygon, c: Curve):
    """Points on the boundary of R_c that lie on the polygon boundary and off c."""
    inner = 0.5 * (c.points[0] + c.points[-1])
    lines = _tangent_halfplanes(c, inner)
    straight = np.max(np.abs(_cross2(c.points - c.points[0], c.points[-1] - c.points[0]))) \
        <= 1e-12 * c.extent ** 2
    options = []
    if straight:
        chord = Line.through(c.start, c.end)
        options = [[chord], [Line(chord.u, Point(-chord.v.x, -chord.v.y))]]
    else:
        options = [lines]
    scale = max(P.scale_len(), 1.0)
    cands = []
    for hs in options:
        try:
            R = clip_many(P, hs)
        except DegeneratePolygonError:
            continue
        if R is None:
            continue
        pts = list(R.vertices)
        pts += [Point((a.x + b.x) / 2, (a.y + b.y) / 2) for a, b in R.edges()]
        for m in pts:
            on_boundary = abs(float(P.boundary_distance([m])[0])) <= 1e-9 * scale
            off_curve = min(np.hypot(*(c.points - np.array(m)).T)) > 1e-6 * scale and \
                min(point_segment_distance(m, a, b) for a, b in zip(c.points[:-1], c.points[1:])) \
                > 1e-6 * scale
            if on_boundary and off_curve:
                cands.append(m)
    return cands


def _locate(c: Curve, v: Point, scale: float) -> tuple[Curve, int]:
    """Curve with ``v`` on its grid, reusing a sample that already sits there."""
    d = np.hypot(*(c.points - np.array(v)).T)
    k = int(np.argmin(d))
    if d[k] <= 1e-9 * scale:
        return c, k
    return c.insert(c.param_of(v))


def partition_at(P: ConvexPolygon, c: Curve, v) -> tuple[ConvexPolygon, ConvexPolygon]:
    """Split ``P`` into convex pieces around the point ``v`` of ``c``.

    ``R_c`` is cut out of ``P`` by the tangent half-planes at the interior
    samples of ``c``; a point ``m`` on its boundary away from ``c`` fixes the
    cutting line through ``v`` and ``m``.  ``P1`` holds the part of ``c`` from
    its start to ``v``, ``P2`` the rest; ``v`` is a vertex of both (on the
    shared cut side) and ``area(P1) + area(P2) == area(P)``.
    """
    v = Point.of(v)
    scale = max(P.scale_len(), 1.0)
    tol = 1e-9 * scale
    if not (_is_corner(P, c.start, 1e-7 * scale) and _is_corner(P, c.end, 1e-7 * scale)):
        raise PartitionError("curve must join two corners of the polygon")
    if c.distance_to(v) > 1e-7 * scale:
        raise PartitionError("v is not on the curve")
    if float(P.boundary_distance([v])[0]) <= tol:
        raise PartitionError("v must lie strictly inside the polygon")
    c2, kv = _locate(c, v, scale)
    if kv <= 0 or kv >= len(c2) - 1:
        raise PartitionError("v must be an interior point of the curve")
    vv = c2.points[kv]
    tangent = c2.points[kv + 1] - c2.points[kv - 1]
    tangent = tangent / np.hypot(*tangent)

    cands = _rc_candidates(P, c2)
    if not cands:
        raise PartitionError("no usable boundary point of R_c (degenerate tangents)")

    def transversality(m):
        d = np.array(m) - vv
        n = np.hypot(*d)
        return abs(d[0] * tangent[1] - d[1] * tangent[0]) / n if n > 0 else 0.0

    before, after = c2.points[:kv], c2.points[kv + 1:]
    for m in sorted(cands, key=transversality, reverse=True):
        if transversality(m) < 1e-6:
            break
        line = Line.through(Point(*vv), m)
        sb = np.array([side(line, p) for p in before])
        sa = np.array([side(line, p) for p in after])
        if not (np.all(sb == sb[0]) and sb[0] != 0 and np.all(sa == -sb[0])):
            continue
        h1 = line if sb[0] > 0 else Line(line.u, Point(-line.v.x, -line.v.y))
        h2 = Line(h1.u, Point(-h1.v.x, -h1.v.y))
        try:
            Q1, Q2 = clip_halfplane(P, h1), clip_halfplane(P, h2)
        except DegeneratePolygonError:
            continue
        if Q1 is None or Q2 is None:
            continue
        vp = Point(float(vv[0]), float(vv[1]))
        return _insert_vertex(Q1, vp), _insert_vertex(Q2, vp)
    raise PartitionError("no cutting line through v separates the two halves of the curve")


def check_partition(P: ConvexPolygon, c: Curve, v, P1: ConvexPolygon, P2: ConvexPolygon,
                    area_rtol: float = 1e-9) -> list[str]:
    """Failed conclusions of the partition lemma (empty list when all hold)."""
    v = Point.of(v)
    scale = max(P.scale_len(), 1.0)
    tol = 1e-9 * scale
    fails = []
    if not all(P.contains(p) for p in list(P1.vertices) + list(P2.vertices)):
        fails.append("pieces not contained in P")
    try:
        inter = clip_many(P1, P2.halfplanes())
        if inter is not None:
            fails.append("pieces overlap in their interiors")
    except DegeneratePolygonError:
        pass
    for piece, end, label in ((P1, c.start, "P1"), (P2, c.end, "P2")):
        vs = list(piece.vertices)
        if not any(_close(end, q, 1e-7 * scale) for q in vs):
            fails.append(f"curve endpoint is not a vertex of {label}")
        if not any(_close(v, q, 1e-7 * scale) for q in vs):
            fails.append(f"v is not a vertex of {label}")
    c2, kv = _locate(c, v, scale)
    parts = ((P1, c2.points[:kv + 1], c2.points[kv + 1:]), (P2, c2.points[kv:], c2.points[:kv]))
    for j, (piece, own, other) in enumerate(parts, start=1):
        d_own = piece.boundary_distance(own)
        if np.any(d_own < -tol):
            fails.append(f"part {j} of the curve leaves P{j}")
        if np.any(d_own[1:-1] <= tol):
            fails.append(f"part {j} of the curve touches the boundary of P{j} between its ends")
        if len(other) and np.any(piece.boundary_distance(other) >= -tol):
            fails.append(f"the other part of the curve enters P{j}")
    if abs(P1.area + P2.area - P.area) > area_rtol * P.area:
        fails.append("area(P1) + area(P2) != area(P)")
    return fails


# -- refinement -----------------------------------------------------------------


def tighten(P: ConvexPolygon, c: Curve) -> ConvexPolygon:
    """Shrink ``P`` to a convex polygon that still holds ``c`` in its interior
    but meets the boundary of ``P`` only at the curve's endpoints."""
    o = np.array(P.centroid())
    V = P.array()
    ends = [c.start, c.end]
    scale = max(P.scale_len(), 1.0)
    inner = c.points[1:-1]
    lam = 0.5
    for _ in range(60):
        shrunk = o + (1 - lam) * (V - o)
        hull = convex_hull(list(map(tuple, shrunk)) + ends)
        try:
            T = ConvexPolygon(hull)
        except GeometryError:
            lam *= 0.5
            continue
        ok = all(_is_corner(T, e, 1e-9 * scale) for e in ends)
        if ok and (len(inner) == 0 or np.min(T.boundary_distance(inner)) > 1e-8 * scale):
            return T
        lam *= 0.5
    raise PartitionError("could not tighten polygon around its curve")


def split_curve(ps: PicSet, i: int, k: int) -> PicSet:
    """Split curve ``i`` at its sample ``k``, re-partitioning its polygon."""
    c, P = ps.curves[i], ps.polygons[i]
    a, b = split_at_index(c, k)
    v = Point(*c.points[k])
    P1, P2 = partition_at(P, c, v)
    T1, T2 = tighten(P1, a), tighten(P2, b)
    return ps.replace_curve(i, [(a, T1), (b, T2)])


def _split_many(ps: PicSet, i: int, ks: Sequence[int]) -> PicSet:
    """Split curve ``i`` at several sample indices (ascending)."""
    offset = 0
    for n_done, k in enumerate(sorted(ks)):
        ps = split_curve(ps, i + n_done, k - offset)
        offset = k
    return ps


def refine_simple(ps: PicSet, max_rounds: int = 50) -> PicSet:
    """Finer decomposition of the same set whose curves are all projectable
    and whose graph has no repeated endpoint pairs."""
    for _ in range(max_rounds):
        changed = False
        i = 0
        while i < len(ps):
            c = ps.curves[i]
            if not is_projectable(c):
                pieces = split_projectable(c)
                cuts = np.cumsum([len(p) - 1 for p in pieces[:-1]])
                ps = _split_many(ps, i, [int(k) for k in cuts])
                i += len(pieces)
                changed = True
            else:
                i += 1
        for group in _duplicate_groups(ps):
            for i in sorted(group, reverse=True):
                c = ps.curves[i]
                if len(c) < 3:
                    raise PartitionError(f"curve {i} has too few samples to split")
                ps = split_curve(ps, i, len(c) // 2)
            changed = True
            break
        if not changed:
            return ps
    raise PartitionError("refinement did not converge")
