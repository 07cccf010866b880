"""Reading and writing PIC set description files (JSON).

Layout::

    {
      "vertices":  {"a": [0, 0], ...},
      "polygons":  {"P": ["a", [1, 0], ...], ...},      # names or coordinates
      "curves":    [{"name": "c", "kind": "segment", "from": "a", "to": "b",
                     "polygon": "P", "params": {...}}, ...],
      "functions": {"f": {"type": "indicator", "curves": ["c"]}, ...},
      "lists":     {"l1": ["a", [0.5, 0.5], ...]}
    }

Curve ``params`` by kind: ``circular-arc`` takes ``center`` and ``ccw``;
``parabolic-arc`` takes ``control``; ``polyline-sample`` takes ``points``
(inner vertices only).  Function types are ``constant`` (``value``),
``polynomial`` (``coeffs``: ``[n, m, re, im]`` rows), ``indicator``
(``curves``) and ``table`` (``values`` per curve on its sample grid).
An optional ``grid`` lists a curve's sample parameters in ``[0, 1]``.
Complex numbers are written as ``[re, im]`` or a bare real.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .acfun import Poly2
from .curve import DEFAULT_SAMPLES, Curve, CurveError
from .functions import Constant, PlaneFunction, SampleTable
from .geom import ConvexPolygon, GeometryError, Point
from .mosaic import PicSet, validate
from .variation import PointList, PointListError


class SpecError(ValueError):
    """Input problem; ``line``/``column`` locate it in the file when known."""

    def __init__(self, message: str, path: str = "<spec>", line: int | None = None,
                 column: int | None = None):
        self.path, self.line, self.column = path, line, column
        where = path if line is None else f"{path}:{line}:{column}"
        super().__init__(f"{where}: {message}")


@dataclass
class Spec:
    picset: PicSet
    functions: dict = field(default_factory=dict)
    lists: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("picvar") / "fixtures" / name))


def resolve(path: str) -> Path:
    """A path as given, falling back to the bundled fixtures."""
    p = Path(path)
    if p.exists():
        return p
    q = fixture_path(p.name)
    if q.exists():
        return q
    raise SpecError("no such file", str(path))


class _Locator:
    def __init__(self, text: str, path: str):
        self.text, self.path = text, path

    def error(self, message: str, token: str | None = None) -> SpecError:
        if token is not None:
            m = re.search(re.escape(json.dumps(token)), self.text)
            if m:
                line = self.text.count("\n", 0, m.start()) + 1
                col = m.start() - self.text.rfind("\n", 0, m.start())
                return SpecError(message, self.path, line, col)
        return SpecError(message, self.path)


def _complex(v, loc: _Locator, what: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise loc.error(f"{what}: expected a number or [re, im]", what)


def _point(v, vertices: dict, loc: _Locator, what: str) -> Point:
    if isinstance(v, str):
        if v not in vertices:
            raise loc.error(f"unknown vertex {v!r} in {what}", v)
        return vertices[v]
    try:
        return Point.of(v)
    except (TypeError, ValueError, GeometryError):
        raise loc.error(f"{what}: expected a vertex name or [x, y]", what) from None


def _curve(entry: dict, vertices, loc: _Locator, samples: int) -> Curve:
    c = _base_curve(entry, vertices, loc, samples)
    grid = entry.get("grid")
    if grid is None:
        return c
    try:
        return c.with_grid(grid)
    except (CurveError, GeometryError, ValueError) as exc:
        raise loc.error(f"curve {entry.get('name')}: bad grid: {exc}", entry.get("name")) from None


def _base_curve(entry: dict, vertices, loc: _Locator, samples: int) -> Curve:
    name = entry.get("name", "?")
    kind = entry.get("kind")
    params = entry.get("params", {}) or {}
    a = _point(entry.get("from"), vertices, loc, f"curve {name}")
    b = _point(entry.get("to"), vertices, loc, f"curve {name}")
    n = int(entry.get("samples", samples))
    try:
        if kind == "segment":
            return Curve.segment(a, b, n)
        if kind == "circular-arc":
            center = _point(params.get("center"), vertices, loc, f"curve {name} center")
            return Curve.arc_between(a, b, center, bool(params.get("ccw", True)), n)
        if kind == "parabolic-arc":
            ctrl = _point(params.get("control"), vertices, loc, f"curve {name} control")
            return Curve.parabola(a, ctrl, b, n)
        if kind == "polyline-sample":
            inner = [_point(p, vertices, loc, f"curve {name}") for p in params.get("points", [])]
            return Curve.polyline([a, *inner, b])
    except (CurveError, GeometryError) as exc:
        raise loc.error(f"curve {name}: {exc}", name) from None
    raise loc.error(f"curve {name}: unknown kind {kind!r}", name)


class Indicator(PlaneFunction):
    """1 on the listed curves, 0 elsewhere."""

    def __init__(self, curves, tol: float = 1e-9):
        self.curves = list(curves)
        self.tol = tol

    def _eval(self, pts):
        out = np.zeros(len(pts), dtype=complex)
        for n, p in enumerate(pts):
            for c in self.curves:
                scale = max(1.0, c.extent)
                if np.min(np.hypot(*(c.points - p).T)) <= self.tol * scale or \
                        c.distance_to(p) <= self.tol * scale:
                    out[n] = 1.0
                    break
        return out

    def __repr__(self):
        return f"Indicator({len(self.curves)} curves)"


def _function(name: str, entry: dict, ps: PicSet, loc: _Locator) -> PlaneFunction:
    typ = entry.get("type")
    if typ == "constant":
        return Constant(_complex(entry.get("value", 0), loc, name))
    if typ == "polynomial":
        coeffs = {}
        for row in entry.get("coeffs", []):
            if len(row) not in (3, 4):
                raise loc.error(f"function {name}: coefficient rows are [n, m, re, im]", name)
            n, m = int(row[0]), int(row[1])
            coeffs[(n, m)] = coeffs.get((n, m), 0) + complex(row[2], row[3] if len(row) == 4 else 0)
        return Poly2(coeffs or {(0, 0): 0})
    if typ == "indicator":
        chosen = []
        for cname in entry.get("curves", []):
            if cname not in ps.names:
                raise loc.error(f"function {name}: unknown curve {cname!r}", cname)
            chosen.append(ps.curves[ps.names.index(cname)])
        return Indicator(chosen)
    if typ == "table":
        pts, vals = [], []
        for cname, values in entry.get("values", {}).items():
            if cname not in ps.names:
                raise loc.error(f"function {name}: unknown curve {cname!r}", cname)
            c = ps.curves[ps.names.index(cname)]
            if len(values) != len(c):
                raise loc.error(f"function {name}: curve {cname} has {len(c)} samples, "
                                f"got {len(values)} values", cname)
            pts.append(c.points)
            vals.extend(_complex(v, loc, name) for v in values)
        if not pts:
            raise loc.error(f"function {name}: empty table", name)
        return SampleTable(np.vstack(pts), vals)
    raise loc.error(f"function {name}: unknown type {typ!r}", name)


def loads(text: str, path: str = "<spec>", samples: int = DEFAULT_SAMPLES,
          check: bool = True) -> Spec:
    """Parse a description; ``check`` runs :func:`~picvar.mosaic.validate`."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(exc.msg, path, exc.lineno, exc.colno) from None
    loc = _Locator(text, path)
    if not isinstance(raw, dict):
        raise SpecError("top level must be an object", path, 1, 1)
    vertices = {}
    for k, v in (raw.get("vertices") or {}).items():
        try:
            vertices[k] = Point.of(v)
        except (TypeError, ValueError, GeometryError):
            raise loc.error(f"vertex {k!r}: expected [x, y]", k) from None
    polygons = {}
    for k, verts in (raw.get("polygons") or {}).items():
        pts = [_point(p, vertices, loc, f"polygon {k}") for p in verts]
        try:
            polygons[k] = ConvexPolygon(pts)
        except GeometryError as exc:
            raise loc.error(f"polygon {k}: {exc}", k) from None
    curves, polys, names = [], [], []
    entries = raw.get("curves") or []
    if not entries:
        raise SpecError("no curves given", path)
    for i, entry in enumerate(entries):
        name = entry.get("name", f"c{i}")
        if name in names:
            raise loc.error(f"duplicate curve name {name!r}", name)
        pname = entry.get("polygon")
        if pname not in polygons:
            raise loc.error(f"curve {name}: unknown polygon {pname!r}", pname if pname else name)
        curves.append(_curve(dict(entry, name=name), vertices, loc, samples))
        polys.append(polygons[pname])
        names.append(name)
    ps = PicSet(curves, polys, names)
    if check:
        report = validate(ps)
        if not report.ok:
            msgs = "; ".join(f"{v.code}: {v.message}" for v in report.violations)
            raise SpecError(f"invalid PIC set: {msgs}", path)
    functions = {k: _function(k, e, ps, loc) for k, e in (raw.get("functions") or {}).items()}
    lists = {}
    for k, pts in (raw.get("lists") or {}).items():
        try:
            lists[k] = PointList([_point(p, vertices, loc, f"list {k}") for p in pts])
        except PointListError as exc:
            raise loc.error(f"list {k}: {exc}", k) from None
    return Spec(ps, functions, lists, raw)


def load(path: str, samples: int = DEFAULT_SAMPLES, check: bool = True) -> Spec:
    p = resolve(path)
    return loads(p.read_text(), str(path), samples, check)


# -- writing -----------------------------------------------------------------


def _num(x: float):
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


def _pt(p) -> list:
    return [_num(p[0]), _num(p[1])]


def curve_entry(name: str, c: Curve, polygon: str) -> dict:
    """Spec entry for a curve; sub-grid pieces are written in normalised form."""
    c = c.normalized()
    entry = {"name": name, "kind": c.kind, "from": _pt(c.start), "to": _pt(c.end),
             "polygon": polygon}
    p = c.params
    if c.kind == "circular-arc":
        entry["params"] = {"center": _pt(p["center"]), "ccw": bool(p["sweep"] > 0)}
    elif c.kind == "parabolic-arc":
        entry["params"] = {"control": _pt(p["p1"])}
    elif c.kind == "polyline-sample":
        entry["params"] = {"points": [_pt(q) for q in p["vertices"][1:-1]]}
    if c.kind != "polyline-sample":
        uniform = np.linspace(0.0, 1.0, len(c))
        if np.array_equal(c.t, uniform):
            entry["samples"] = len(c)
        else:
            entry["grid"] = [float(t) for t in c.t]
    return entry


def picset_fragment(ps: PicSet) -> dict:
    """A description of ``ps`` that :func:`loads` accepts."""
    polys = {f"P{i}": [_pt(v) for v in P.vertices] for i, P in enumerate(ps.polygons)}
    curves = [curve_entry(n, c, f"P{i}") for i, (n, c) in enumerate(zip(ps.names, ps.curves))]
    return {"vertices": {}, "polygons": polys, "curves": curves}
