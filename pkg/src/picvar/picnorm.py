"""The PIC norm, its equivalence constants with the BV norm, transport along
homeomorphisms, and the direct-sum split of functions on separated sets.

All norms are grid-resolution values: suprema are taken over curve samples.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import is_convex, is_projectable, pvar
from .functions import PlaneFunction, Piecewise, sup_norm
from .mosaic import PicSet, is_simple, refine_simple, sides_max


class NormError(ValueError):
    pass


def pic_norm(f: PlaneFunction, ps: PicSet) -> float:
    """``‖f‖_∞ + Σ pvar(f, c_i)`` over the component curves."""
    for i, c in enumerate(ps.curves):
        if not is_convex(c) or not is_projectable(c):
            raise NormError(f"curve {ps.names[i]} is not projectable; refine the set first")
    total = sup_norm(f, ps.sample_points())
    # sum the per-curve terms in a fixed order so results are reproducible
    return float(total + sum(pvar(f, c) for c in ps.curves))


@dataclass(frozen=True)
class EquivalenceConstants:
    """``‖f‖_PIC ≤ upper_factor·‖f‖_BV`` and ``‖f‖_BV ≤ K_sigma·‖f‖_PIC``."""

    M: int
    S: int
    upper_factor: int
    K_sigma: int

    def __post_init__(self):
        if self.K_sigma < 1 or self.upper_factor < 2:
            raise NormError("inconsistent equivalence constants")


def constants_for(M: int, S: int) -> EquivalenceConstants:
    if M < 1 or S < 3:
        raise NormError("need at least one curve and polygons with at least 3 sides")
    return EquivalenceConstants(M, S, 2 * M, M + 2 * (M - 1) * S)


def ensure_refined(ps: PicSet) -> PicSet:
    """The set itself when simple and projectable, else its refinement."""
    if is_simple(ps) and all(is_projectable(c) for c in ps.curves):
        return ps
    return refine_simple(ps)


def equivalence_constants(ps: PicSet) -> EquivalenceConstants:
    """Constants for the decomposition in use (after refinement if needed)."""
    ps = ensure_refined(ps)
    return constants_for(len(ps), sides_max(ps.mosaic))


def transport_norm_check(hm, f: PlaneFunction) -> float:
    """``|‖f‖_PIC(σ) − ‖Φ(f)‖_PIC(τ)|`` for ``Φ(f) = f ∘ h⁻¹``."""
    from .picgraph import pushforward

    return abs(pic_norm(f, hm.sigma) - pic_norm(pushforward(hm, f), hm.tau))


# -- direct sums ------------------------------------------------------------------


def _separated(P, Q) -> bool:
    """Some side line of ``P`` or ``Q`` has the other polygon strictly outside."""
    tol = 1e-9 * max(1.0, P.scale_len(), Q.scale_len())
    for A, B in ((P, Q), (Q, P)):
        pts = B.array()
        for h in A.halfplanes():
            if np.all((pts - np.array(h.u)) @ np.array(h.v) < -tol):
                return True
    return False


def _enclosures_disjoint(ps_P: PicSet, ps_Q: PicSet) -> bool:
    # touching polygons count as overlapping
    return all(_separated(P, Q) for P in ps_P.polygons for Q in ps_Q.polygons)


class _OnSamples:
    """Membership test: is a query point one of the set's samples?"""

    def __init__(self, ps: PicSet):
        from scipy.spatial import cKDTree

        pts = ps.sample_points()
        self.tree = cKDTree(pts)
        self.tol = 1e-9 * max(1.0, float(np.max(np.ptp(pts, axis=0))))
        self.ps = ps
        self.lo, self.hi = pts.min(axis=0) - self.tol, pts.max(axis=0) + self.tol

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        d, _ = self.tree.query(pts)
        inside = d <= self.tol
        near = np.all((pts >= self.lo) & (pts <= self.hi), axis=1)
        for n in np.flatnonzero(~inside & near):
            p = pts[n]
            inside[n] = min(c.distance_to(p) for c in self.ps.curves) <= self.tol
        return inside


def direct_sum_split(f: PlaneFunction, ps_P: PicSet, ps_Q: PicSet):
    """The map ``J``: restrictions of ``f`` to the two separated parts."""
    if not _enclosures_disjoint(ps_P, ps_Q):
        raise NormError("the two parts must lie in disjoint polygons")
    return (Piecewise([(_OnSamples(ps_P), f)]), Piecewise([(_OnSamples(ps_Q), f)]))


def direct_sum_join(f_P: PlaneFunction, f_Q: PlaneFunction, ps_P: PicSet, ps_Q: PicSet):
    """Inverse of :func:`direct_sum_split`: assemble a function on both parts."""
    if not _enclosures_disjoint(ps_P, ps_Q):
        raise NormError("the two parts must lie in disjoint polygons")
    return Piecewise([(_OnSamples(ps_P), f_P), (_OnSamples(ps_Q), f_Q)])


def union(ps_P: PicSet, ps_Q: PicSet) -> PicSet:
    """The two parts as one (disconnected) curve family, for norm evaluation."""
    names = [f"P.{n}" for n in ps_P.names] + [f"Q.{n}" for n in ps_Q.names]
    return PicSet(ps_P.curves + ps_Q.curves, ps_P.polygons + ps_Q.polygons, names)


def direct_sum_norm(f_P: PlaneFunction, f_Q: PlaneFunction, ps_P: PicSet, ps_Q: PicSet) -> float:
    return max(pic_norm(f_P, ps_P), pic_norm(f_Q, ps_Q))
