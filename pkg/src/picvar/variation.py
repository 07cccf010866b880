"""Crossing segments, variation factors and two-dimensional variation.

For a finite ordered list ``S = [x0, ..., xn]`` and a line ``l``, a segment
``[xi, xi+1]`` crosses ``l`` when its ends lie strictly on opposite sides,
when it is the first segment and starts on ``l``, or when it lands on ``l``
from off it.  ``vf(S)`` is the largest crossing count over all lines and
``var(f, sigma)`` is the supremum of ``cvar(f, S) / vf(S)`` over lists in
``sigma``.  Only brackets of ``var`` are ever reported: the lower end comes
from an explicit list search, the upper end from the PIC-norm route.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .functions import PlaneFunction, sup_norm
from .geom import GeometryError, Line, Point, as_array, side, side_many


class PointListError(GeometryError):
    pass


class PointList(tuple):
    """Immutable ordered list of points with distinct consecutive entries."""

    def __new__(cls, points):
        pts = tuple(Point.of(p) for p in points)
        if not pts:
            raise PointListError("a point list needs at least one point")
        for a, b in zip(pts, pts[1:]):
            if a == b:
                raise PointListError(f"consecutive points coincide at {a}")
        return super().__new__(cls, pts)

    def array(self) -> np.ndarray:
        return as_array(self)


def _as_list(S) -> PointList:
    return S if isinstance(S, PointList) else PointList(S)


def _crossing_counts(signs: np.ndarray) -> np.ndarray:
    """Crossing-segment counts for each row of an ``(L, n+1)`` sign matrix."""
    if signs.shape[1] == 1:
        return (signs[:, 0] == 0).astype(np.int64)
    a, b = signs[:, :-1], signs[:, 1:]
    crossing = (a.astype(np.int16) * b < 0) | ((a != 0) & (b == 0))
    crossing[:, 0] |= signs[:, 0] == 0
    return crossing.sum(axis=1)


def vf_on_line(S, line: Line) -> int:
    """Number of crossing segments of ``S`` on ``line``."""
    S = _as_list(S)
    signs = np.array([[side(line, p) for p in S]], dtype=np.int8)
    return int(_crossing_counts(signs)[0])


def _candidate_lines(D: np.ndarray):
    """Candidate normals, offsets and anchors realising every sign vector a
    line can induce on the distinct points ``D``.

    Each pair line is kept as is, translated both ways along its normal and
    rotated both ways about the pair midpoint and about each of the two
    points.  Perturbations are sized per base line from the smallest positive
    point-line distance, so no off-line point changes side.
    """
    m = len(D)
    i, j = np.triu_indices(m, k=1)
    a, b = D[i], D[j]
    d = b - a
    length = np.hypot(d[:, 0], d[:, 1])
    n = np.stack([-d[:, 1], d[:, 0]], axis=1) / length[:, None]
    dist = np.einsum("pk,pmk->pm", n, D[None, :, :] - a[:, None, :])
    rel = np.hypot(D[None, :, 0] - a[:, None, 0], D[None, :, 1] - a[:, None, 1])
    off = np.abs(dist) > 1e-9 * np.maximum(1.0, rel)
    dmin = np.where(off, np.abs(dist), np.inf).min(axis=1)
    extent = float(np.max(np.ptp(D, axis=0))) if m > 1 else 1.0
    dmin = np.where(np.isfinite(dmin), dmin, max(extent, 1.0))

    normals, anchors = [n, n, n], [a, a + 0.5 * dmin[:, None] * n, a - 0.5 * dmin[:, None] * n]
    for pivot in (0.5 * (a + b), a, b):
        R = np.max(np.hypot(D[None, :, 0] - pivot[:, None, 0],
                            D[None, :, 1] - pivot[:, None, 1]), axis=1)
        theta = 0.25 * dmin / np.maximum(R, 1e-300)
        for sgn in (1.0, -1.0):
            c, s = np.cos(sgn * theta), np.sin(sgn * theta)
            rn = np.stack([c * n[:, 0] - s * n[:, 1], s * n[:, 0] + c * n[:, 1]], axis=1)
            normals.append(rn)
            anchors.append(pivot)
    normals_arr = np.concatenate(normals)
    anchors_arr = np.concatenate(anchors)
    offsets = np.einsum("lk,lk->l", normals_arr, anchors_arr)
    return normals_arr, offsets, anchors_arr


@lru_cache(maxsize=200_000)
def _vf_cached(key: tuple) -> tuple[int, tuple, tuple]:
    pts = np.array(key, dtype=float).reshape(-1, 2)
    D, inverse = np.unique(pts, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    if len(D) == 1:
        return 1, (float(D[0, 0]), float(D[0, 1])), (0.0, 1.0)
    normals, offsets, anchors = _candidate_lines(D)
    signs = side_many(normals, offsets, anchors, D)[:, inverse]
    counts = _crossing_counts(signs)
    best = int(np.argmax(counts))
    return (int(counts[best]), tuple(float(x) for x in anchors[best]),
            tuple(float(x) for x in normals[best]))


def vf_exact(S) -> tuple[int, Line]:
    """Variation factor of ``S`` together with a line attaining it."""
    S = _as_list(S)
    count, u, v = _vf_cached(tuple(c for p in S for c in p))
    return count, Line(Point(*u), Point(*v))


def vf(S) -> int:
    return vf_exact(S)[0]


def random_line_vf(S, n_lines: int = 100_000, seed: int = 0, chunk: int = 20_000) -> int:
    """Largest crossing count over random lines through the bounding box.

    Independent of the candidate construction in :func:`vf_exact`; used as a
    check that the candidate family never misses a better line.
    """
    S = _as_list(S)
    pts = S.array()
    rng = np.random.default_rng(seed)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = 0.05 * max(float(np.max(hi - lo)), 1e-9)
    best = 0
    done = 0
    while done < n_lines:
        k = min(chunk, n_lines - done)
        anchors = rng.uniform(lo - pad, hi + pad, size=(k, 2))
        ang = rng.uniform(0.0, math.pi, size=k)
        normals = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        offsets = np.einsum("lk,lk->l", normals, anchors)
        signs = side_many(normals, offsets, anchors, pts)
        best = max(best, int(_crossing_counts(signs).max()))
        done += k
    return best


def cvar(f: PlaneFunction, S) -> float:
    """Curve variation: sum of |f(x_i) - f(x_{i-1})| along the list."""
    S = _as_list(S)
    if len(S) == 1:
        f(S.array())  # still surface evaluation failures
        return 0.0
    vals = f(S.array())
    return float(np.sum(np.abs(np.diff(vals))))


@dataclass(frozen=True)
class NormBracket:
    lower: float
    upper: float
    lower_witness: PointList | None = None
    upper_provenance: str = ""

    def __post_init__(self):
        if self.lower < 0:
            raise ValueError("lower bound must be nonnegative")
        if self.lower > self.upper + 1e-9:
            raise ValueError(f"inconsistent bracket [{self.lower}, {self.upper}]")


@dataclass
class SearchBudget:
    """Limits for :func:`var_lower`."""

    max_len: int = 8
    exhaustive_cap: int = 20_000
    restarts: int = 32
    steps: int = 64
    seed: int = 0


@dataclass
class VarSearch:
    value: float
    witness: PointList | None
    evaluated: int
    exhaustive: bool
    trace: list = field(default_factory=list, repr=False)


def _ratio(vals: np.ndarray, pts: np.ndarray, idx: Sequence[int]) -> tuple[float, int, float]:
    c = float(np.sum(np.abs(np.diff(vals[list(idx)])))) if len(idx) > 1 else 0.0
    key = tuple(float(v) for i in idx for v in pts[i])
    k = _vf_cached(key)[0]
    return c / k, k, c


def _valid(idx: Sequence[int]) -> bool:
    return len(idx) >= 1 and all(a != b for a, b in zip(idx, idx[1:]))


def var_lower(f: PlaneFunction, sigma, budget: SearchBudget | None = None,
              seeds: Sequence[Sequence] = (), record: bool = False) -> VarSearch:
    """Certified lower bound for ``var(f, sigma)`` over lists drawn from ``sigma``.

    All lists of length ``<= budget.max_len`` are enumerated when
    ``len(sigma) ** max_len <= budget.exhaustive_cap``; otherwise seeded
    hill-climbing runs with add/remove/replace/reorder moves.  ``seeds`` are
    extra lists that are always scored (their points are added to ``sigma``);
    those within ``max_len`` also serve as hill-climbing starts.  With
    ``record=True`` every evaluated list is kept in ``trace`` as
    ``(points, cvar, vf)``.
    """
    budget = budget or SearchBudget()
    pts_list = [Point.of(p) for p in sigma]
    for s in seeds:
        pts_list.extend(Point.of(p) for p in s)
    if not pts_list:
        raise ValueError("var_lower needs a nonempty point set")
    pts = np.unique(as_array(pts_list), axis=0)
    index = {tuple(p): i for i, p in enumerate(pts)}
    vals = f(pts)
    N = len(pts)

    best_val, best_idx = 0.0, (0,)
    trace: list = []
    evaluated = 0

    def consider(idx):
        nonlocal best_val, best_idx, evaluated
        r, k, c = _ratio(vals, pts, idx)
        evaluated += 1
        if record:
            trace.append((PointList(pts[list(idx)]), c, k))
        if r > best_val:
            best_val, best_idx = r, tuple(idx)
        return r

    seed_idx = [tuple(index[tuple(Point.of(p))] for p in s) for s in seeds]
    for s in seed_idx:
        if _valid(s):
            consider(s)

    exhaustive = N ** budget.max_len <= budget.exhaustive_cap
    if exhaustive:
        for L in range(1, budget.max_len + 1):
            for idx in itertools.product(range(N), repeat=L):
                if _valid(idx):
                    consider(idx)
    else:
        rng = np.random.default_rng(budget.seed)
        # seeds longer than max_len are scored above but not climbed from
        starts = [s for s in seed_idx if len(s) <= budget.max_len]
        while len(starts) < budget.restarts:
            L = int(rng.integers(2, budget.max_len + 1))
            idx = [int(rng.integers(N))]
            while len(idx) < L:
                j = int(rng.integers(N))
                if j != idx[-1]:
                    idx.append(j)
            starts.append(tuple(idx))
        for start in starts[: max(budget.restarts, len(starts))]:
            cur = list(start)
            if not _valid(cur):
                continue
            cur_val = consider(cur)
            for _ in range(budget.steps):
                cand = _mutate(cur, N, budget.max_len, rng)
                if cand is None or not _valid(cand):
                    continue
                val = consider(cand)
                if val >= cur_val:
                    cur, cur_val = cand, val
    return VarSearch(best_val, PointList(pts[list(best_idx)]), evaluated, exhaustive, trace)


def _mutate(cur: list[int], N: int, max_len: int, rng) -> list[int] | None:
    move = int(rng.integers(4))
    cand = list(cur)
    if move == 0 and len(cand) < max_len:
        cand.insert(int(rng.integers(len(cand) + 1)), int(rng.integers(N)))
    elif move == 1 and len(cand) > 1:
        del cand[int(rng.integers(len(cand)))]
    elif move == 2:
        cand[int(rng.integers(len(cand)))] = int(rng.integers(N))
    elif move == 3 and len(cand) > 1:
        i = int(rng.integers(len(cand) - 1))
        cand[i], cand[i + 1] = cand[i + 1], cand[i]
    else:
        return None
    return cand


def bv_bracket(f: PlaneFunction, ps, budget: SearchBudget | None = None,
               extra_points: Sequence = (), seeds: Sequence[Sequence] = ()) -> NormBracket:
    """Bracket for the BV norm ``sup|f| + var(f, sigma)`` on a PIC set.

    The lower end is the sample sup-norm plus :func:`var_lower` over all curve
    samples (and ``extra_points``); the upper end is ``K_sigma`` times the PIC
    norm on a simple projectable refinement of ``ps``.
    """
    from .picnorm import equivalence_constants, pic_norm, ensure_refined

    refined = ensure_refined(ps)
    sample_pts = refined.sample_points()
    sigma = list(map(tuple, sample_pts)) + [tuple(Point.of(p)) for p in extra_points]
    seed_points = [p for s in seeds for p in s]
    sup = max(sup_norm(f, sample_pts), sup_norm(f, as_array(seed_points)) if seed_points else 0.0)
    search = var_lower(f, sigma, budget, seeds=seeds)
    consts = equivalence_constants(refined)
    upper = consts.K_sigma * pic_norm(f, refined)
    return NormBracket(
        lower=sup + search.value,
        upper=upper,
        lower_witness=search.witness,
        upper_provenance=f"K_sigma={consts.K_sigma} (M={consts.M}, S={consts.S}) x PIC norm",
    )
