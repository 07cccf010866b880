"""Function builders: two-variable polynomials, polygon cut-offs, extensions
of curve functions, and a heuristic distance from ``f`` to the polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .functions import PlaneFunction, Piecewise
from .geom import ConvexPolygon, DegeneratePolygonError, GeometryError, Line, Point, clip_many, convex_hull
from .mosaic import PicSet


class ExtensionError(GeometryError):
    pass


# -- polynomials ---------------------------------------------------------------


class Poly2(PlaneFunction):
    """``p(x, y) = Σ c[n, m] X^n Y^m`` with ``X = (x - ox)/s``, ``Y = (y - oy)/s``.

    The default origin and scale give plain monomials; the shifted form is
    still a polynomial in ``x, y`` and keeps fitting well conditioned.
    """

    def __init__(self, coeffs, origin=(0.0, 0.0), scale: float = 1.0):
        if isinstance(coeffs, dict):
            N = max((n for n, _ in coeffs), default=0) + 1
            M = max((m for _, m in coeffs), default=0) + 1
            table = np.zeros((N, M), dtype=complex)
            for (n, m), c in coeffs.items():
                if n < 0 or m < 0:
                    raise ValueError("monomial exponents must be nonnegative")
                table[n, m] += c
        else:
            table = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        if not np.all(np.isfinite(table)):
            raise ValueError("coefficients must be finite")
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.c = table
        self.origin = Point.of(origin)
        self.scale = float(scale)

    @property
    def degree(self) -> int:
        nz = np.argwhere(self.c != 0)
        return int(nz.sum(axis=1).max()) if len(nz) else 0

    def _eval(self, pts):
        X = (pts[:, 0] - self.origin.x) / self.scale
        Y = (pts[:, 1] - self.origin.y) / self.scale
        # Horner in y for every power of x, then Horner in x
        out = np.zeros(len(pts), dtype=complex)
        for n in range(self.c.shape[0] - 1, -1, -1):
            row = np.zeros(len(pts), dtype=complex)
            for m in range(self.c.shape[1] - 1, -1, -1):
                row = row * Y + self.c[n, m]
            out = out * X + row
        return out

    def __repr__(self):
        terms = {(int(n), int(m)): complex(self.c[n, m]) for n, m in np.argwhere(self.c != 0)}
        return f"Poly2({terms})"


def poly_eval(p: Poly2, z) -> complex:
    return p.at(z)


def monomials(degree: int) -> list[tuple[int, int]]:
    """Exponent pairs of total degree ``<= degree``, graded order."""
    return [(n, k - n) for k in range(degree + 1) for n in range(k, -1, -1)]


# -- cut-off functions -------------------------------------------------------------


def g_eps(t, eps: float):
    """Ramp: 0 up to ``eps/2``, linear to 1 at ``eps``, then 1."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    t = np.asarray(t, dtype=float)
    out = np.clip((2 * t - eps) / eps, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


class _Ramp(PlaneFunction):
    def __init__(self, h: Line, eps: float):
        g_eps(0.0, eps)
        self.h, self.eps = h, eps

    def _eval(self, pts):
        d = (pts - np.array(self.h.u)) @ np.array(self.h.v)
        return g_eps(d, self.eps)

    def __repr__(self):
        return f"cutoff({self.h}, eps={self.eps})"


def cutoff_halfplane(h: Line, eps: float) -> PlaneFunction:
    """``x ↦ g_eps((x - u)·v)``."""
    return _Ramp(h, eps)


class _Product(PlaneFunction):
    def __init__(self, factors):
        self.factors = list(factors)

    def _eval(self, pts):
        out = np.ones(len(pts), dtype=complex)
        for f in self.factors:
            out = out * f(pts)
        return out


def cutoff_polygon(P: ConvexPolygon, eps: float) -> PlaneFunction:
    """Product of the side ramps of ``P``: 1 well inside, 0 near and outside ∂P."""
    if not eps > 0:
        raise ValueError("eps must be positive")
    sides = [Line.through(a, b) for a, b in P.sides()]
    inner = [Line(Point(h.u.x + eps * h.v.x, h.u.y + eps * h.v.y), h.v) for h in sides]
    try:
        region = clip_many(P, inner)
    except DegeneratePolygonError:
        region = None
    if region is None:
        raise ValueError("inner region empty: eps is too large for this polygon")
    return _Product(cutoff_halfplane(h, eps) for h in sides)


# -- extensions ----------------------------------------------------------------------


Normalizer = Callable[[np.ndarray], np.ndarray]


def chord_normalizer(a, b) -> Normalizer:
    """Similarity ``z ↦ (z - a)/(b - a)`` sending ``a`` to 0 and ``b`` to 1."""
    a, b = Point.of(a).as_complex(), Point.of(b).as_complex()
    if a == b:
        raise ExtensionError("chord endpoints must differ")
    return lambda z: (z - a) / (b - a)


def _to_complex(pts: np.ndarray) -> np.ndarray:
    return pts[:, 0] + 1j * pts[:, 1]


class _StripExtension(PlaneFunction):
    def __init__(self, norm, s, vals):
        self.norm, self.s, self.vals = norm, s, vals

    def _eval(self, pts):
        r = np.real(self.norm(_to_complex(pts)))
        # np.interp clamps outside [s0, s1], giving f(0) and f(1) off the strip
        return np.interp(r, self.s, self.vals.real) + 1j * np.interp(r, self.s, self.vals.imag)


def extend_along_projection(f: PlaneFunction, c, normalizer: Normalizer | None = None) -> PlaneFunction:
    """Extend ``f|c`` to the plane, constant across the strip ``0 <= Re w <= 1``.

    ``w`` is the normalised coordinate (default: the chord similarity of
    ``c``); ``c`` must project one to one onto ``[0, 1]``.
    """
    norm = normalizer or chord_normalizer(c.start, c.end)
    w = norm(_to_complex(c.points))
    s = np.real(w)
    tol = 1e-9
    if abs(s[0]) > tol or abs(s[-1] - 1) > tol or np.any(np.abs(np.imag(w[[0, -1]])) > tol):
        raise ExtensionError("normaliser must send the curve's endpoints to 0 and 1")
    if np.any(np.diff(s) <= 0):
        raise ExtensionError("curve is not projectable over [0, 1] after normalisation")
    s = s.copy()
    s[0], s[-1] = 0.0, 1.0
    return _StripExtension(norm, s, f(c.points))


def separating_line(ps1: PicSet, ps2: PicSet) -> Line | None:
    """A line with ``ps1`` strictly on its negative side and ``ps2`` strictly
    on its positive side, or ``None``."""
    A, B = ps1.sample_points(), ps2.sample_points()
    hulls = [convex_hull(map(tuple, A)), convex_hull(map(tuple, B))]
    normals = []
    for h in hulls:
        pts = list(h)
        if len(pts) == 1:
            continue
        for i in range(len(pts)):
            p, q = pts[i], pts[(i + 1) % len(pts)]
            normals.append(np.array([-(q.y - p.y), q.x - p.x]))
            normals.append(np.array([q.x - p.x, q.y - p.y]))
    normals.append(B.mean(axis=0) - A.mean(axis=0))
    scale = max(1.0, float(np.max(np.ptp(np.vstack([A, B]), axis=0))))
    for n in normals:
        norm = np.hypot(*n)
        if norm == 0:
            continue
        n = n / norm
        for sgn in (1.0, -1.0):
            a, b = (A @ (sgn * n)).max(), (B @ (sgn * n)).min()
            if b - a > 1e-9 * scale:
                mid = (a + b) / 2
                v = sgn * n
                return Line(Point(*(mid * v)), Point(*v))
    return None


def extend_by_zero(g: PlaneFunction, ps1: PicSet, ps2: PicSet,
                   normalizer: Normalizer | None = None) -> PlaneFunction:
    """``g`` on the part of the plane holding ``ps1``, zero on the side of ``ps2``.

    With a ``normalizer`` the split is ``Re w < 0`` versus ``Re w > 0``;
    otherwise a separating line is searched for.  Strict separation is
    required on every sample.
    """
    if normalizer is not None:
        w1 = np.real(normalizer(_to_complex(ps1.sample_points())))
        w2 = np.real(normalizer(_to_complex(ps2.sample_points())))
        if not (w1.max() < 0 < w2.min()):
            raise ExtensionError("the normalised parts are not strictly separated by Re w = 0")
        first = lambda pts: np.real(normalizer(_to_complex(pts))) < 0  # noqa: E731
    else:
        line = separating_line(ps1, ps2)
        if line is None:
            raise ExtensionError("the two parts cannot be separated by a line")
        first = lambda pts: (pts - np.array(line.u)) @ np.array(line.v) < 0  # noqa: E731
    return Piecewise([(first, g)], default=_Zero())


class _Zero(PlaneFunction):
    def _eval(self, pts):
        return np.zeros(len(pts), dtype=complex)


# -- distance to polynomials ---------------------------------------------------------------


@dataclass
class AcBudget:
    restarts: int = 16
    sweeps: int = 200
    seed: int = 0


@dataclass
class AcFit:
    distance: float
    poly: Poly2
    by_degree: list


class _Objective:
    """``‖f - p‖_PIC`` as a function of the real coefficient vector
    ``x = (Re a, Im a)``."""

    def __init__(self, f, ps: PicSet, degree: int, origin, scale):
        self.exps = monomials(degree)
        self.origin, self.scale = origin, scale
        Vs, Fs, dV, dF = [], [], [], []
        for c in ps.curves:
            X = (c.points[:, 0] - origin[0]) / scale
            Y = (c.points[:, 1] - origin[1]) / scale
            V = np.stack([X ** n * Y ** m for n, m in self.exps], axis=1)
            F = f(c.points)
            Vs.append(V)
            Fs.append(F)
            dV.append(np.diff(V, axis=0))
            dF.append(np.diff(F))
        self.V, self.F = np.vstack(Vs), np.concatenate(Fs)
        self.dV, self.dF = np.vstack(dV), np.concatenate(dF)
        # columns acting on the real vector x
        self.Vx = np.hstack([self.V, 1j * self.V])
        self.dVx = np.hstack([self.dV, 1j * self.dV])

    def coef(self, x: np.ndarray) -> np.ndarray:
        K = len(self.exps)
        return x[:K] + 1j * x[K:]

    def residuals(self, x):
        return self.F - self.Vx @ x, self.dF - self.dVx @ x

    def __call__(self, x: np.ndarray) -> float:
        r, dr = self.residuals(x)
        return float(np.max(np.abs(r)) + np.sum(np.abs(dr)))

    def moves(self, x: np.ndarray, step: float) -> np.ndarray:
        """Objective after each single-coordinate move ``x ± step·e_i``,
        ordered ``[+e_0, ..., +e_n, -e_0, ..., -e_n]``."""
        r, dr = self.residuals(x)
        D = np.hstack([self.Vx, -self.Vx]) * step
        dD = np.hstack([self.dVx, -self.dVx]) * step
        R = r[:, None] - D
        dR = dr[:, None] - dD
        return np.max(np.abs(R), axis=0) + np.sum(np.abs(dR), axis=0)

    def least_squares(self) -> np.ndarray:
        a, *_ = np.linalg.lstsq(self.V, self.F, rcond=None)
        return np.concatenate([a.real, a.imag])

    def poly(self, x: np.ndarray) -> Poly2:
        table = {e: c for e, c in zip(self.exps, self.coef(x))}
        return Poly2(table, self.origin, self.scale)


def _descend(obj: _Objective, x: np.ndarray, step: float, sweeps: int) -> tuple[np.ndarray, float]:
    """Coordinate descent taking the best single move; the step halves when
    no move helps."""
    best = obj(x)
    x = x.copy()
    n = len(x)
    moves = 0
    while step >= 1e-12 and moves < sweeps * n:
        vals = obj.moves(x, step)
        j = int(np.argmin(vals))
        if vals[j] < best:
            x[j % n] += step if j < n else -step
            best = float(vals[j])
            moves += 1
        else:
            step /= 2
    return x, obj(x)


def ac_fit(f: PlaneFunction, ps: PicSet, degree: int, budget: AcBudget | None = None) -> AcFit:
    """Best polynomial found for ``min_p ‖f - p‖_PIC`` over total degree ``<= degree``.

    Degrees are visited in turn, each warm-started from the previous winner,
    so the reported distance never increases with the degree.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    budget = budget or AcBudget()
    pts = ps.sample_points()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    origin = tuple((lo + hi) / 2)
    scale = max(float(np.max(hi - lo)) / 2, 1e-12)
    rng = np.random.default_rng(budget.seed)
    best_x, best_v, best_obj = None, np.inf, None
    history = []
    for d in range(degree + 1):
        obj = _Objective(f, ps, d, origin, scale)
        K = len(obj.exps)
        starts = [obj.least_squares()]
        if best_x is not None:
            Kp = len(best_obj.exps)
            warm = np.zeros(2 * K)
            warm[:Kp], warm[K:K + Kp] = best_x[:Kp], best_x[Kp:]
            starts.append(warm)
        fscale = max(float(np.max(np.abs(obj.F))), 1e-12)
        while len(starts) < budget.restarts:
            starts.append(starts[0] + rng.normal(scale=0.1 * fscale, size=2 * K))
        for x0 in starts:
            x, v = _descend(obj, x0, 0.25 * fscale, budget.sweeps)
            if v < best_v:
                best_x, best_v, best_obj = x, v, obj
        # carry the winner forward even when it came from a lower degree
        if best_obj is not obj:
            Kp = len(best_obj.exps)
            x = np.zeros(2 * K)
            x[:Kp], x[K:K + Kp] = best_x[:Kp], best_x[Kp:]
            best_x, best_obj = x, obj
        history.append(best_v)
    return AcFit(best_v, best_obj.poly(best_x), history)


def ac_distance(f: PlaneFunction, ps: PicSet, degree: int, budget: AcBudget | None = None) -> float:
    """Heuristic upper bound on the PIC distance from ``f`` to polynomials of
    degree ``<= degree``.  Not a membership test."""
    return ac_fit(f, ps, degree, budget).distance
