"""Complex-valued functions on plane sets.

Every function is evaluated on batches of points (an ``(n, 2)`` array) and
returns a complex array.  Sums, differences and products of functions are
functions again, so constructions such as ``f * (1 - h)`` read naturally.
"""

from __future__ import annotations

from typing import Callable, Iterable

import numpy as np
from scipy.spatial import cKDTree

from .geom import as_array


class EvaluationError(ValueError):
    """A function could not be evaluated at a requested point."""


def _points(points) -> np.ndarray:
    if isinstance(points, np.ndarray) and points.ndim == 2 and points.shape[1] == 2:
        return points.astype(float, copy=False)
    return as_array(points)


class PlaneFunction:
    """Base class; subclasses implement :meth:`_eval`."""

    def __call__(self, points) -> np.ndarray:
        pts = _points(points)
        out = np.asarray(self._eval(pts), dtype=complex).reshape(len(pts))
        if not np.all(np.isfinite(out)):
            raise EvaluationError("function produced non-finite values")
        return out

    def at(self, p) -> complex:
        return complex(self([p])[0])

    def _eval(self, pts: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    @staticmethod
    def lift(other) -> "PlaneFunction":
        if isinstance(other, PlaneFunction):
            return other
        return Constant(other)

    def __add__(self, other):
        return Combined(np.add, self, PlaneFunction.lift(other), "+")

    __radd__ = __add__

    def __sub__(self, other):
        return Combined(np.subtract, self, PlaneFunction.lift(other), "-")

    def __rsub__(self, other):
        return Combined(np.subtract, PlaneFunction.lift(other), self, "-")

    def __mul__(self, other):
        return Combined(np.multiply, self, PlaneFunction.lift(other), "*")

    __rmul__ = __mul__

    def __neg__(self):
        return Combined(np.multiply, Constant(-1), self, "*")


class Constant(PlaneFunction):
    def __init__(self, value):
        self.value = complex(value)

    def _eval(self, pts):
        return np.full(len(pts), self.value, dtype=complex)

    def __repr__(self):
        return f"Constant({self.value!r})"


class Analytic(PlaneFunction):
    """Wraps ``fn(z)`` taking a complex array; handy for closed forms."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], name: str = "analytic"):
        self.fn = fn
        self.name = name

    def _eval(self, pts):
        z = pts[:, 0] + 1j * pts[:, 1]
        return np.broadcast_to(np.asarray(self.fn(z), dtype=complex), z.shape)

    def __repr__(self):
        return f"Analytic({self.name})"


class Combined(PlaneFunction):
    def __init__(self, op, left: PlaneFunction, right: PlaneFunction, symbol: str):
        self.op, self.left, self.right, self.symbol = op, left, right, symbol

    def _eval(self, pts):
        return self.op(self.left(pts), self.right(pts))

    def __repr__(self):
        return f"({self.left!r} {self.symbol} {self.right!r})"


class SampleTable(PlaneFunction):
    """Values attached to a finite set of points.

    Lookup is by nearest stored point; a query farther than ``tol`` (relative
    to the table's extent) from every stored point is an evaluation error.
    """

    def __init__(self, points, values, tol: float = 1e-9):
        self.points = _points(points)
        self.values = np.asarray(values, dtype=complex).reshape(len(self.points))
        extent = float(np.max(np.ptp(self.points, axis=0))) if len(self.points) > 1 else 1.0
        self.tol = tol * max(1.0, extent)
        self._tree = cKDTree(self.points)

    def _eval(self, pts):
        dist, idx = self._tree.query(pts)
        if np.any(dist > self.tol):
            bad = pts[int(np.argmax(dist))]
            raise EvaluationError(f"no table entry near ({bad[0]}, {bad[1]})")
        return self.values[idx]

    def __repr__(self):
        return f"SampleTable({len(self.points)} points)"


class Piecewise(PlaneFunction):
    """Dispatches each point to the first piece whose selector accepts it."""

    def __init__(self, pieces: Iterable[tuple[Callable[[np.ndarray], np.ndarray], PlaneFunction]],
                 default: PlaneFunction | None = None):
        self.pieces = list(pieces)
        self.default = default

    def _eval(self, pts):
        out = np.zeros(len(pts), dtype=complex)
        todo = np.ones(len(pts), dtype=bool)
        for select, fn in self.pieces:
            mask = todo & np.asarray(select(pts), dtype=bool)
            if mask.any():
                out[mask] = fn(pts[mask])
                todo &= ~mask
        if todo.any():
            if self.default is None:
                bad = pts[int(np.argmax(todo))]
                raise EvaluationError(f"point ({bad[0]}, {bad[1]}) outside every piece")
            out[todo] = self.default(pts[todo])
        return out


def sup_norm(f: PlaneFunction, points) -> float:
    pts = _points(points)
    if len(pts) == 0:
        return 0.0
    return float(np.max(np.abs(f(pts))))
