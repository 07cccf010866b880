"""Sampled parameterised plane curves.

A :class:`Curve` carries a closed form ``gamma(t)`` (segment, circular arc,
quadratic Bezier parabola, or a fixed polyline) and a strictly increasing
parameter grid.  Every quantity computed here (convexity, projectability,
``pvar``) is exact relative to that grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .functions import PlaneFunction
from .geom import GeometryError, Point, ZERO_TOL, as_array

KINDS = ("segment", "circular-arc", "parabolic-arc", "polyline-sample")
DEFAULT_SAMPLES = 64


class CurveError(GeometryError):
    pass


def _polyline_lengths(V: np.ndarray) -> np.ndarray:
    seg = np.hypot(*np.diff(V, axis=0).T)
    return np.concatenate([[0.0], np.cumsum(seg)])


@dataclass(frozen=True, eq=False)
class Curve:
    """A parameterised curve restricted to the grid ``t``.

    ``params`` holds the closed form on the reference domain ``[0, 1]``;
    ``t`` may cover a sub-interval of it (pieces produced by splitting).
    """

    kind: str
    params: dict
    t: np.ndarray = field(repr=False)
    points: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CurveError(f"unknown curve kind {self.kind!r}")
        t = np.asarray(self.t, dtype=float).reshape(-1)
        if len(t) < 2:
            raise CurveError("a curve needs at least 2 samples")
        if np.any(np.diff(t) <= 0):
            raise CurveError("parameter grid must be strictly increasing")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)
        pts = self.gamma(t)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if not np.all(np.isfinite(pts)):
            raise CurveError("curve evaluates to non-finite points")
        steps = np.hypot(*np.diff(pts, axis=0).T)
        if np.any(steps == 0):
            raise CurveError("consecutive samples coincide")
        if np.allclose(pts[0], pts[-1], rtol=0, atol=1e-12 * max(1.0, self.extent)):
            raise CurveError("curve endpoints must be distinct")

    # -- constructors -------------------------------------------------------

    @classmethod
    def segment(cls, a, b, samples: int = DEFAULT_SAMPLES) -> "Curve":
        a, b = Point.of(a), Point.of(b)
        return cls("segment", {"a": a, "b": b}, np.linspace(0, 1, samples))

    @classmethod
    def arc(cls, center, radius: float, theta0: float, sweep: float,
            samples: int = DEFAULT_SAMPLES) -> "Curve":
        """Arc ``center + radius * e^{i(theta0 + t*sweep)}``; ``sweep`` signed."""
        if radius <= 0 or sweep == 0 or abs(sweep) >= 2 * math.pi:
            raise CurveError("arc needs radius > 0 and 0 < |sweep| < 2*pi")
        return cls("circular-arc", {"center": Point.of(center), "radius": float(radius),
                                    "theta0": float(theta0), "sweep": float(sweep)},
                   np.linspace(0, 1, samples))

    @classmethod
    def arc_between(cls, a, b, center, ccw: bool = True,
                    samples: int = DEFAULT_SAMPLES) -> "Curve":
        a, b, c = Point.of(a), Point.of(b), Point.of(center)
        ra, rb = (a - c).norm(), (b - c).norm()
        if abs(ra - rb) > 1e-7 * max(ra, rb, 1.0):
            raise CurveError("arc endpoints are not equidistant from the center")
        t0 = math.atan2(a.y - c.y, a.x - c.x)
        t1 = math.atan2(b.y - c.y, b.x - c.x)
        sweep = (t1 - t0) % (2 * math.pi)
        if not ccw:
            sweep -= 2 * math.pi
        return cls.arc(c, 0.5 * (ra + rb), t0, sweep, samples)

    @classmethod
    def parabola(cls, p0, control, p2, samples: int = DEFAULT_SAMPLES) -> "Curve":
        """Quadratic Bezier arc from ``p0`` to ``p2`` (a parabolic arc)."""
        return cls("parabolic-arc", {"p0": Point.of(p0), "p1": Point.of(control),
                                     "p2": Point.of(p2)}, np.linspace(0, 1, samples))

    @classmethod
    def polyline(cls, points) -> "Curve":
        V = as_array(points)
        s = _polyline_lengths(V)
        if s[-1] == 0:
            raise CurveError("degenerate polyline")
        return cls("polyline-sample", {"vertices": V}, s / s[-1])

    # -- evaluation ---------------------------------------------------------

    def gamma(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float).reshape(-1)
        p = self.params
        if self.kind == "segment":
            a, b = np.array(p["a"]), np.array(p["b"])
            return a[None, :] + t[:, None] * (b - a)[None, :]
        if self.kind == "circular-arc":
            ang = p["theta0"] + t * p["sweep"]
            c = np.array(p["center"])
            return c[None, :] + p["radius"] * np.stack([np.cos(ang), np.sin(ang)], axis=1)
        if self.kind == "parabolic-arc":
            p0, p1, p2 = (np.array(p[k]) for k in ("p0", "p1", "p2"))
            u = 1 - t
            return (u * u)[:, None] * p0 + (2 * u * t)[:, None] * p1 + (t * t)[:, None] * p2
        V = p["vertices"]
        s = _polyline_lengths(V)
        s = s / s[-1]
        return np.stack([np.interp(t, s, V[:, 0]), np.interp(t, s, V[:, 1])], axis=1)

    @property
    def start(self) -> Point:
        return Point(float(self.points[0, 0]), float(self.points[0, 1]))

    @property
    def end(self) -> Point:
        return Point(float(self.points[-1, 0]), float(self.points[-1, 1]))

    @property
    def endpoints(self) -> tuple[Point, Point]:
        return self.start, self.end

    @property
    def extent(self) -> float:
        return float(np.max(np.ptp(self.points, axis=0)))

    def __len__(self):
        return len(self.t)

    def length(self) -> float:
        """Length of the sampled polyline."""
        return float(np.sum(np.hypot(*np.diff(self.points, axis=0).T)))

    def with_grid(self, t) -> "Curve":
        return replace(self, t=np.asarray(t, dtype=float))

    def resample(self, samples: int) -> "Curve":
        if self.kind == "polyline-sample":
            return self
        return self.with_grid(np.linspace(self.t[0], self.t[-1], samples))

    def reversed(self) -> "Curve":
        """Same point set traversed backwards, on the mirrored grid."""
        p = self.params
        if self.kind == "segment":
            params = {"a": p["b"], "b": p["a"]}
        elif self.kind == "circular-arc":
            params = dict(p, theta0=p["theta0"] + p["sweep"], sweep=-p["sweep"])
        elif self.kind == "parabolic-arc":
            params = {"p0": p["p2"], "p1": p["p1"], "p2": p["p0"]}
        else:
            params = {"vertices": p["vertices"][::-1].copy()}
        return Curve(self.kind, params, (1.0 - self.t)[::-1])

    def normalized(self) -> "Curve":
        """Equivalent curve whose grid spans the full reference domain [0, 1]."""
        t0, t1 = float(self.t[0]), float(self.t[-1])
        if t0 == 0.0 and t1 == 1.0:
            return self
        p = self.params
        if self.kind == "segment":
            params = {"a": self.start, "b": self.end}
        elif self.kind == "circular-arc":
            params = dict(p, theta0=p["theta0"] + t0 * p["sweep"], sweep=(t1 - t0) * p["sweep"])
        elif self.kind == "parabolic-arc":
            # blossom of the quadratic at (t0, t1) gives the sub-arc control point
            p0, p1, p2 = (np.array(p[k]) for k in ("p0", "p1", "p2"))
            q1 = (1 - t0) * (1 - t1) * p0 + ((1 - t0) * t1 + t0 * (1 - t1)) * p1 + t0 * t1 * p2
            params = {"p0": self.start, "p1": Point(float(q1[0]), float(q1[1])), "p2": self.end}
        else:
            V = p["vertices"]
            s = _polyline_lengths(V)
            s = s / s[-1]
            inner = V[(s > t0) & (s < t1)]
            params = {"vertices": np.vstack([self.points[:1], inner, self.points[-1:]])}
            # sub-polyline arc length is affine in the parent's arc length
            return Curve(self.kind, params, np.clip((self.t - t0) / (t1 - t0), 0, 1))
        return Curve(self.kind, params, (self.t - t0) / (t1 - t0))

    def param_of(self, point) -> float:
        """Parameter of the curve point nearest to ``point``."""
        q = np.array(Point.of(point))
        d = np.hypot(*(self.points - q).T)
        k = int(np.argmin(d))
        lo = self.t[max(k - 1, 0)]
        hi = self.t[min(k + 1, len(self.t) - 1)]
        if self.kind == "segment":
            a, b = np.array(self.params["a"]), np.array(self.params["b"])
            t = float(np.dot(q - a, b - a) / np.dot(b - a, b - a))
        elif self.kind == "circular-arc":
            c = np.array(self.params["center"])
            ang = math.atan2(q[1] - c[1], q[0] - c[0])
            sw, th = self.params["sweep"], self.params["theta0"]
            rel = (ang - th) % (2 * math.pi) if sw > 0 else -((th - ang) % (2 * math.pi))
            t = rel / sw
            if not (lo - 1e-9 <= t <= hi + 1e-9):
                t = float(self.t[k])
        else:
            res = minimize_scalar(lambda s: float(np.sum((self.gamma(s)[0] - q) ** 2)),
                                  bounds=(lo, hi), method="bounded",
                                  options={"xatol": 1e-15})
            t = float(res.x)
        return float(min(max(t, self.t[0]), self.t[-1]))

    def distance_to(self, point) -> float:
        q = Point.of(point)
        t = self.param_of(q)
        g = self.gamma([t])[0]
        return math.hypot(g[0] - q.x, g[1] - q.y)

    def insert(self, t: float, tol: float = 1e-12) -> tuple["Curve", int]:
        """Curve with ``t`` added to the grid and the index of that sample."""
        k = int(np.argmin(np.abs(self.t - t)))
        if abs(self.t[k] - t) <= tol:
            return self, k
        grid = np.sort(np.append(self.t, t))
        return self.with_grid(grid), int(np.searchsorted(grid, t))


# -- predicates ---------------------------------------------------------------


def _turns(c: Curve) -> np.ndarray:
    e = np.diff(c.points, axis=0)
    closing = c.points[0] - c.points[-1]
    loop = np.vstack([e, closing[None, :], e[:1]])
    a, b = loop[:-1], loop[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.einsum("ij,ij->i", a, b)
    scale = np.hypot(*a.T) * np.hypot(*b.T)
    cross = np.where(np.abs(cross) <= ZERO_TOL * scale, 0.0, cross)
    return np.stack([cross, dot], axis=1)


def is_convex(c: Curve) -> bool:
    """All turns of the sampled curve, closed by its chord, agree in sign and
    the closed polygon winds exactly once."""
    if len(c) < 3:
        return True
    turns = _turns(c)
    cross = turns[:, 0]
    if np.all(cross[:-2] == 0):
        return True  # straight
    if np.any(cross > 0) and np.any(cross < 0):
        return False
    total = np.sum(np.abs(np.arctan2(cross, turns[:, 1])))
    return bool(total <= 2 * math.pi + 1e-6)


def _chord_projection(c: Curve) -> tuple[np.ndarray, float]:
    a, b = c.points[0], c.points[-1]
    L = float(np.hypot(*(b - a)))
    u = (b - a) / L
    return (c.points - a) @ u, L


def is_projectable(c: Curve) -> bool:
    """Projection onto the endpoint chord is exactly the chord segment."""
    if not is_convex(c):
        raise CurveError("projectability is defined for convex curves")
    s, L = _chord_projection(c)
    tol = 1e-9 * L
    return bool(np.all(np.diff(s) >= -tol) and s.min() >= -tol and s.max() <= L + tol)


def split_at(c: Curve, t: float) -> tuple[Curve, Curve]:
    """Split at the grid sample nearest to ``t``."""
    k = int(np.argmin(np.abs(c.t - t)))
    return split_at_index(c, k)


def split_at_index(c: Curve, k: int) -> tuple[Curve, Curve]:
    if k <= 0 or k >= len(c) - 1:
        raise CurveError("split point must be strictly interior to the curve")
    return c.with_grid(c.t[: k + 1]), c.with_grid(c.t[k:])


def split_projectable(c: Curve) -> list[Curve]:
    """Cut a convex curve into projectable pieces, in order.

    Cuts go where the edge direction turns against the current chord; pieces
    that are still not projectable are cut again with their own chord.
    """
    if not is_convex(c):
        raise CurveError("only convex curves can be split into projectable pieces")
    if is_projectable(c):
        return [c]
    s, L = _chord_projection(c)
    ds = np.diff(s)
    sign = np.where(np.abs(ds) <= 1e-12 * L, 0, np.sign(ds))
    cuts = []
    last = 0
    for k, sg in enumerate(sign):
        if sg == 0:
            continue
        if last and sg != last:
            cuts.append(k)  # sample shared by edges k-1 and k
        last = sg
    cuts = [k for k in cuts if 0 < k < len(c) - 1]
    if not cuts:
        raise CurveError("could not find a projectable split")
    pieces = []
    bounds = [0] + cuts + [len(c) - 1]
    for i0, i1 in zip(bounds, bounds[1:]):
        piece = c.with_grid(c.t[i0: i1 + 1])
        pieces.extend(split_projectable(piece))
    return pieces


def pvar(f: PlaneFunction, c: Curve) -> float:
    """Variation of ``f`` along the curve's sample grid."""
    return float(np.sum(np.abs(np.diff(f(c.points)))))
