"""Graph view of PIC sets.

The curves of a :class:`~picvar.mosaic.PicSet` are the edges of a loop-free
multigraph on their endpoints.  Two sets are homeomorphic when their graphs
smooth (degree-2 vertices suppressed) to isomorphic multigraphs; matching the
smoothed edges and subdividing both sides to equal piece counts yields
curve-by-curve pairs, from which the point map ``h`` is assembled.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .curve import Curve
from .functions import EvaluationError, PlaneFunction
from .geom import GeometryError, Point, as_array
from .mosaic import PicSet, _same, refine_simple, split_curve


class GraphError(GeometryError):
    pass


# chain entries are (original edge index, traversed forward?)
Chain = tuple


@dataclass(frozen=True)
class PicGraph:
    """Loop-free multigraph; ``edges[k] = (u, v, key)``.

    ``chains[k]`` lists the original edges that edge ``k`` stands for after
    smoothing, in order from ``u`` to ``v``.
    """

    vertices: tuple
    edges: tuple
    chains: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if not self.chains:
            object.__setattr__(self, "chains", tuple(((k, True),) for k in range(len(self.edges))))
        else:
            object.__setattr__(self, "chains", tuple(tuple(c) for c in self.chains))
        for u, v, _ in self.edges:
            if u == v:
                raise GraphError("loops are not allowed")

    def degree(self, i: int) -> int:
        return sum((u == i) + (v == i) for u, v, _ in self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.vertices)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def incident(self, i: int) -> list[int]:
        return [k for k, (u, v, _) in enumerate(self.edges) if i in (u, v)]

    def multiplicity(self, a: int, b: int) -> int:
        return sum(1 for u, v, _ in self.edges if {u, v} == {a, b})

    @property
    def guards(self) -> list[int]:
        """Degree-2 vertices whose two edges lead to the same neighbour."""
        out = []
        for i, d in enumerate(self.degrees()):
            if d == 2:
                e1, e2 = self.incident(i)
                if _other(self.edges[e1], i) == _other(self.edges[e2], i):
                    out.append(i)
        return out


def _other(edge, i):
    u, v, _ = edge
    return v if u == i else u


def _vertex_of(verts: list, p) -> int:
    for k, q in enumerate(verts):
        if _same(p, q):
            return k
    verts.append(Point.of(p))
    return len(verts) - 1


def extract_graph(ps: PicSet) -> PicGraph:
    """One vertex per distinct curve endpoint, one edge per curve."""
    verts: list = []
    edges = []
    for name, c in zip(ps.names, ps.curves):
        edges.append((_vertex_of(verts, c.start), _vertex_of(verts, c.end), name))
    return PicGraph(verts, edges)


def subdivide_edge(g: PicGraph, edge: int, point) -> PicGraph:
    """Replace edge ``u–v`` by ``u–w–v`` with a new vertex ``w`` at ``point``."""
    p = Point.of(point)
    if any(_same(p, q) for q in g.vertices):
        raise GraphError("split point coincides with an existing vertex")
    u, v, key = g.edges[edge]
    w = len(g.vertices)
    edges = list(g.edges)
    chains = list(g.chains)
    edges[edge:edge + 1] = [(u, w, f"{key}.0"), (w, v, f"{key}.1")]
    chains[edge:edge + 1] = [chains[edge], chains[edge]]
    return PicGraph(list(g.vertices) + [p], edges, chains)


def _reverse_chain(chain):
    return tuple((e, not fwd) for e, fwd in reversed(chain))


def smooth(g: PicGraph) -> PicGraph:
    """Suppress degree-2 vertices until none can go without making a loop.

    A closed cycle therefore ends as two vertices joined by two parallel
    edges.  ``chains`` of the result refer to edges of ``g``'s own chains.
    """
    alive = [(u, v, key, tuple(ch)) for (u, v, key), ch in zip(g.edges, g.chains)]
    removed: set = set()
    changed = True
    while changed:
        changed = False
        for w in range(len(g.vertices)):
            if w in removed:
                continue
            inc = [k for k, e in enumerate(alive) if w in (e[0], e[1])]
            if len(inc) != 2:
                continue
            e1, e2 = alive[inc[0]], alive[inc[1]]
            if e1[1] != w:
                e1 = (e1[1], e1[0], e1[2], _reverse_chain(e1[3]))
            if e2[0] != w:
                e2 = (e2[1], e2[0], e2[2], _reverse_chain(e2[3]))
            if e1[0] == e2[1]:
                continue  # would close a loop
            merged = (e1[0], e2[1], f"{e1[2]}+{e2[2]}", e1[3] + e2[3])
            alive = [e for k, e in enumerate(alive) if k not in inc] + [merged]
            removed.add(w)
            changed = True
    keep = [i for i in range(len(g.vertices)) if i not in removed]
    index = {old: new for new, old in enumerate(keep)}
    return PicGraph([g.vertices[i] for i in keep],
                    [(index[u], index[v], key) for u, v, key, _ in alive],
                    [ch for *_, ch in alive])


# -- isomorphism ------------------------------------------------------------------


@dataclass
class GraphMatching:
    """Vertex map and edge map (with orientation) between two multigraphs."""

    vertex_map: dict
    edge_map: dict  # edge of g1 -> (edge of g2, same direction?)


def _signature(g: PicGraph, i: int, deg: list[int]) -> tuple:
    nbr = sorted(deg[_other(g.edges[k], i)] for k in g.incident(i))
    return (deg[i], tuple(nbr))


def find_isomorphism(g1: PicGraph, g2: PicGraph) -> GraphMatching | None:
    """Backtracking multigraph isomorphism with degree/neighbour pruning."""
    n = len(g1.vertices)
    if n != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return None
    d1, d2 = g1.degrees(), g2.degrees()
    s1 = [_signature(g1, i, d1) for i in range(n)]
    s2 = [_signature(g2, i, d2) for i in range(n)]
    if Counter(s1) != Counter(s2):
        return None
    mult1 = Counter(frozenset((u, v)) for u, v, _ in g1.edges)
    mult2 = Counter(frozenset((u, v)) for u, v, _ in g2.edges)
    nbrs1 = [sorted({_other(g1.edges[k], i) for k in g1.incident(i)}) for i in range(n)]

    # visit vertices so each one (after the first of its component) has a mapped neighbour
    order: list[int] = []
    seen: set = set()
    for root in sorted(range(n), key=lambda i: -d1[i]):
        if root in seen:
            continue
        queue = [root]
        seen.add(root)
        while queue:
            i = queue.pop(0)
            order.append(i)
            for j in nbrs1[i]:
                if j not in seen:
                    seen.add(j)
                    queue.append(j)

    phi: dict = {}
    used: set = set()

    def consistent(i, j):
        for a in nbrs1[i]:
            if a in phi and mult1[frozenset((i, a))] != mult2[frozenset((j, phi[a]))]:
                return False
        # mapped non-neighbours must stay non-adjacent
        for a, b in phi.items():
            if a not in nbrs1[i] and mult2[frozenset((j, b))]:
                return False
        return True

    def backtrack(pos):
        if pos == len(order):
            return True
        i = order[pos]
        for j in range(n):
            if j in used or s2[j] != s1[i] or not consistent(i, j):
                continue
            phi[i] = j
            used.add(j)
            if backtrack(pos + 1):
                return True
            del phi[i]
            used.discard(j)
        return False

    if not backtrack(0):
        return None
    pool: dict = {}
    for k, (u, v, _) in enumerate(g2.edges):
        pool.setdefault(frozenset((u, v)), []).append(k)
    edge_map = {}
    for k, (u, v, _) in enumerate(g1.edges):
        k2 = pool[frozenset((phi[u], phi[v]))].pop(0)
        edge_map[k] = (k2, g2.edges[k2][0] == phi[u])
    return GraphMatching(dict(phi), edge_map)


def is_homeomorphic(g1: PicGraph, g2: PicGraph) -> tuple[bool, GraphMatching | None]:
    """Smooth both graphs and test the results for isomorphism."""
    m = find_isomorphism(smooth(g1), smooth(g2))
    return m is not None, m


# -- matched subdivisions -------------------------------------------------------------


def _closed_chains(sg: PicGraph, matching: GraphMatching):
    """Chains to equalise, as (chain in g1, matching chain in g2) pairs.

    The two edges through a guard vertex are fused into one closed chain so
    the guard (an artefact of the loop rule) need not be matched to a
    particular vertex on the other side.
    """
    done: set = set()
    out = []
    for gv in sg.guards:
        e1, e2 = sg.incident(gv)
        if e1 in done or e2 in done:
            continue
        out.append(((e1, e2), gv))
        done.update((e1, e2))
    for k in range(len(sg.edges)):
        if k not in done:
            out.append(((k,), None))
    return out


def _oriented(chain, forward):
    return tuple(chain) if forward else _reverse_chain(chain)


def _arc_len(c: Curve) -> float:
    return c.length()


def _equalise(ps: PicSet, chain: list, target: int) -> tuple[PicSet, list]:
    """Split the longest piece of ``chain`` (entries are (name, forward)) until
    it has ``target`` pieces."""
    chain = list(chain)
    while len(chain) < target:
        lengths = [_arc_len(ps.curves[ps.names.index(nm)]) for nm, _ in chain]
        k = int(np.argmax(lengths))
        name, fwd = chain[k]
        i = ps.names.index(name)
        c = ps.curves[i]
        if len(c) < 3:
            raise GraphError(f"curve {name} has too few samples to subdivide")
        cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(c.points, axis=0).T))])
        mid = int(np.clip(np.argmin(np.abs(cum - cum[-1] / 2)), 1, len(c) - 2))
        ps = split_curve(ps, i, mid)
        a, b = ps.names[i], ps.names[i + 1]
        chain[k:k + 1] = [(a, True), (b, True)] if fwd else [(b, False), (a, False)]
    return ps, chain


@dataclass
class AlignedPairs:
    sigma: PicSet
    tau: PicSet
    pairs: list  # (index in sigma, index in tau, tau curve reversed?)
    vertex_map: dict = field(default_factory=dict)


def match_subdivisions(ps1: PicSet, ps2: PicSet, refine: bool = True) -> AlignedPairs:
    """Refine two homeomorphic sets until their curves pair off one to one.

    Curve ``i`` of the returned ``sigma`` corresponds to curve ``i`` of
    ``tau``; ``pairs[i][2]`` says whether ``tau``'s curve runs the other way.
    """
    if refine:
        ps1, ps2 = refine_simple(ps1), refine_simple(ps2)
    g1, g2 = extract_graph(ps1), extract_graph(ps2)
    s1, s2 = smooth(g1), smooth(g2)
    m = find_isomorphism(s1, s2)
    if m is None:
        raise GraphError("the two sets are not homeomorphic")

    def names(ps, g, chain):
        return [(g.edges[e][2], fwd) for e, fwd in chain]

    groups = []
    for edges, guard in _closed_chains(s1, m):
        if guard is None:
            (k,) = edges
            k2, same = m.edge_map[k]
            c1 = s1.chains[k]
            c2 = _oriented(s2.chains[k2], same)
        else:
            # closed walk: neighbour -> guard -> neighbour
            e1, e2 = edges
            c1 = s1.chains[e1] if s1.edges[e1][1] == guard else _reverse_chain(s1.chains[e1])
            c1 = c1 + (s1.chains[e2] if s1.edges[e2][0] == guard else _reverse_chain(s1.chains[e2]))
            parts = []
            for e, end in zip(edges, (1, 0)):
                # first edge must run into the guard, the second out of it
                k2, same = m.edge_map[e]
                ch = _oriented(s2.chains[k2], same)
                parts.append(ch if s1.edges[e][end] == guard else _reverse_chain(ch))
            c2 = parts[0] + parts[1]
        groups.append([names(ps1, g1, c1), names(ps2, g2, c2)])

    pairs_named = []
    for n1, n2 in groups:
        target = max(len(n1), len(n2))
        ps1, n1 = _equalise(ps1, n1, target)
        ps2, n2 = _equalise(ps2, n2, target)
        pairs_named.extend(zip(n1, n2))

    order1 = [ps1.names.index(a) for (a, _), _ in pairs_named]
    order2 = [ps2.names.index(b) for _, (b, _) in pairs_named]
    flips = [fa != fb for (_, fa), (_, fb) in pairs_named]
    sigma = PicSet([ps1.curves[i] for i in order1], [ps1.polygons[i] for i in order1],
                   [ps1.names[i] for i in order1])
    tau = PicSet([ps2.curves[i] for i in order2], [ps2.polygons[i] for i in order2],
                 [ps2.names[i] for i in order2])
    pairs = [(i, i, flips[i]) for i in range(len(flips))]
    vmap = {s1.vertices[a]: s2.vertices[b] for a, b in m.vertex_map.items()
            if a not in s1.guards}
    return AlignedPairs(sigma, tau, pairs, vmap)


# -- the homeomorphism h ----------------------------------------------------------------


def _arclength_fraction(c: Curve, dense: int = 4097):
    ts = np.union1d(np.linspace(c.t[0], c.t[-1], dense), c.t)
    pts = c.gamma(ts)
    cum = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    return ts, cum / cum[-1]


@dataclass
class HomeoMap:
    """Piecewise map between aligned curve grids.

    ``sigma.curves[i]`` and ``tau.curves[i]`` share the same sample count and
    ``h`` sends sample ``k`` of one to sample ``k`` of the other; between
    samples it is monotone in the curve parameters.
    """

    sigma: PicSet
    tau: PicSet
    pairs: list

    def __post_init__(self):
        self._trees = (cKDTree(np.vstack([c.points for c in self.sigma.curves])),
                       cKDTree(np.vstack([c.points for c in self.tau.curves])))
        self._index = [np.concatenate([np.full(len(c), i) for i, c in enumerate(ps.curves)])
                       for ps in (self.sigma, self.tau)]
        self._offset = [np.concatenate([np.arange(len(c)) for c in ps.curves])
                        for ps in (self.sigma, self.tau)]

    def _map(self, points, forward: bool) -> np.ndarray:
        src, dst = (self.sigma, self.tau) if forward else (self.tau, self.sigma)
        side = 0 if forward else 1
        pts = as_array(points) if not isinstance(points, np.ndarray) else points.reshape(-1, 2)
        out = np.empty_like(pts, dtype=float)
        scale = max(1.0, float(np.max(np.ptp(self._trees[side].data, axis=0))))
        dist, idx = self._trees[side].query(pts)
        for n, (p, d, j) in enumerate(zip(pts, dist, idx)):
            i, k = int(self._index[side][j]), int(self._offset[side][j])
            if d <= 1e-12 * scale:
                out[n] = dst.curves[i].points[k]
                continue
            # off-grid: locate the nearest curve and interpolate between samples
            dists = [c.distance_to(p) for c in src.curves]
            i = int(np.argmin(dists))
            if dists[i] > 1e-7 * scale:
                raise EvaluationError(f"point ({p[0]}, {p[1]}) is not on the set")
            a, b = src.curves[i], dst.curves[i]
            t = a.param_of(p)
            pos = np.interp(t, a.t, np.arange(len(a)))
            out[n] = b.gamma([np.interp(pos, np.arange(len(b)), b.t)])[0]
        return out

    def h(self, points) -> np.ndarray:
        return self._map(points, True)

    def h_inv(self, points) -> np.ndarray:
        return self._map(points, False)

    def vertex_image(self, p) -> Point:
        q = self.h([tuple(p)])[0]
        return Point(float(q[0]), float(q[1]))


def build_homeo(aligned: AlignedPairs) -> HomeoMap:
    """Pair curve grids by arc-length fraction and check ``h`` is well defined."""
    sig_curves, tau_curves = [], []
    for i, j, flip in aligned.pairs:
        a = aligned.sigma.curves[i]
        b = aligned.tau.curves[j]
        b = b.reversed() if flip else b
        ta, fa = _arclength_fraction(a)
        tb, fb = _arclength_fraction(b)
        own_a = np.interp(a.t, ta, fa)
        own_b = np.interp(b.t, tb, fb)
        common = np.unique(np.concatenate([own_a, own_b]))
        # merge fractions so close that their samples would be indistinguishable
        common = common[np.concatenate([[True], np.diff(common) > 1e-9])]
        common[0], common[-1] = 0.0, 1.0
        ga = np.interp(common, fa, ta)
        gb = np.interp(common, fb, tb)
        ga[0], ga[-1] = a.t[0], a.t[-1]
        gb[0], gb[-1] = b.t[0], b.t[-1]
        sig_curves.append(a.with_grid(ga))
        tau_curves.append(b.with_grid(gb))
    sigma = PicSet(sig_curves, [aligned.sigma.polygons[i] for i, _, _ in aligned.pairs],
                   [aligned.sigma.names[i] for i, _, _ in aligned.pairs])
    tau = PicSet(tau_curves, [aligned.tau.polygons[j] for _, j, _ in aligned.pairs],
                 [aligned.tau.names[j] for _, j, _ in aligned.pairs])
    hm = HomeoMap(sigma, tau, [(k, k, False) for k in range(len(sig_curves))])
    _check_well_defined(hm, aligned.vertex_map)
    return hm


def _check_well_defined(hm: HomeoMap, vertex_map: dict):
    images: list = []
    for a, b in zip(hm.sigma.curves, hm.tau.curves):
        for p, q in ((a.start, b.start), (a.end, b.end)):
            for p0, q0 in images:
                if _same(p, p0, 1e-9) and not _same(q, q0, 1e-9):
                    raise GraphError(f"vertex {tuple(p)} has two images {tuple(q0)} and {tuple(q)}")
                if _same(q, q0, 1e-9) and not _same(p, p0, 1e-9):
                    raise GraphError(f"vertex {tuple(q)} has two preimages")
            images.append((p, q))
    for p, q in vertex_map.items():
        for p0, q0 in images:
            if _same(p, p0, 1e-9) and not _same(q, q0, 1e-9):
                raise GraphError(f"vertex {tuple(p)} is not sent to its matched vertex")


class _Composed(PlaneFunction):
    def __init__(self, f: PlaneFunction, point_map, label: str):
        self.f, self.point_map, self.label = f, point_map, label

    def _eval(self, pts):
        return self.f(self.point_map(pts))

    def __repr__(self):
        return f"{self.label}({self.f!r})"


def pullback(hm: HomeoMap, f: PlaneFunction) -> PlaneFunction:
    """``f ∘ h``: a function on tau brought back to sigma."""
    return _Composed(f, hm.h, "pullback")


def pushforward(hm: HomeoMap, f: PlaneFunction) -> PlaneFunction:
    """``Φ(f) = f ∘ h⁻¹``: a function on sigma carried to tau."""
    return _Composed(f, hm.h_inv, "pushforward")
