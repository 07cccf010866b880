import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from picvar.acfun import (AcBudget, ExtensionError, Poly2, ac_distance, ac_fit, chord_normalizer,
                          cutoff_halfplane, cutoff_polygon, extend_along_projection, extend_by_zero,
                          g_eps, monomials, poly_eval, separating_line)
from picvar.curve import Curve, pvar
from picvar.functions import Analytic, Constant
from picvar.geom import ConvexPolygon, Line
from picvar.mosaic import PicSet
from picvar.picnorm import pic_norm
from picvar.specfile import Indicator
from picvar.variation import SearchBudget, bv_bracket, cvar, vf_exact

import _gen

SQ = ConvexPolygon([(0, 0), (1, 0), (1, 1), (0, 1)])
RE = Analytic(lambda z: z.real + 0j, "Re z")
SMALL = AcBudget(restarts=4, sweeps=80)


def naive(coeffs, x, y):
    return sum(c * x ** n * y ** m for (n, m), c in coeffs.items())


def test_poly_eval_examples():
    assert poly_eval(Poly2({(0, 0): 1}), (7, -2)) == 1
    assert poly_eval(Poly2({(1, 0): 1, (0, 1): 1j}), (3, 4)) == 3 + 4j
    assert poly_eval(Poly2({(2, 0): 1}), (0.5, 7)) == pytest.approx(0.25)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)),
                       st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                       min_size=1, max_size=8),
       st.floats(-2, 2), st.floats(-2, 2))
def test_horner_matches_monomial_sum(coeffs, x, y):
    p = Poly2(coeffs)
    assert poly_eval(p, (x, y)) == pytest.approx(naive(coeffs, x, y), abs=1e-9)
    assert p.degree == max((n + m for (n, m), c in coeffs.items() if c != 0), default=0)


def test_monomials_graded():
    assert monomials(0) == [(0, 0)]
    assert len(monomials(3)) == 10
    assert all(n + m <= 3 for n, m in monomials(3))


def test_g_eps_examples():
    eps = 0.2
    assert g_eps(eps / 2, eps) == 0
    assert g_eps(eps, eps) == 1
    assert g_eps(3 * eps / 4, eps) == pytest.approx(0.5)
    assert g_eps(-5, eps) == 0 and g_eps(5, eps) == 1
    with pytest.raises(ValueError):
        g_eps(0.1, 0)


def test_cutoff_halfplane_examples():
    h = cutoff_halfplane(Line((0, 0), (0, 1)), 0.1)
    assert h.at((3, 0.5)) == 1
    assert h.at((3, 0)) == 0
    rng = np.random.default_rng(0)
    for _ in range(20):
        a, b = rng.uniform(-1, 1, size=(2, 2))
        assert pvar(h, Curve.segment(a, b, 200)) <= 1 + 1e-12


def test_cutoff_polygon_examples():
    h = cutoff_polygon(SQ, 0.1)
    assert h.at((0.5, 0.5)) == 1
    assert h.at((1.5, 0.5)) == 0
    with pytest.raises(ValueError, match="inner region empty"):
        cutoff_polygon(SQ, 1.2)


def test_cutoff_polygon_is_product_of_ramps():
    rng = np.random.default_rng(1)
    pts = rng.uniform(-0.2, 1.2, size=(500, 2))
    eps = 0.1
    expected = np.ones(len(pts))
    # sides of the unit square as inward distances
    for d in (pts[:, 1], 1 - pts[:, 0], 1 - pts[:, 1], pts[:, 0]):
        expected *= np.clip((2 * d - eps) / eps, 0, 1)
    got = cutoff_polygon(SQ, eps)(pts)
    assert np.allclose(got, expected)
    assert np.all((got.real >= 0) & (got.real <= 1)) and np.all(got.imag == 0)


def test_cutoff_pvar_bound_random_polygons():
    rng = np.random.default_rng(2)
    for _ in range(10):
        P = _gen.random_convex_polygon(rng)
        c = _gen.random_curve_in_polygon(rng, P, samples=400)
        h = cutoff_polygon(P, 0.05)
        assert pvar(h, c) <= 2 * P.n_sides + 1e-9


def test_extend_along_projection_examples():
    c = Curve.parabola((0, 0), (0.5, 0.6), (1, 0), 50)
    ext = extend_along_projection(Constant(3j), c)
    assert np.allclose(ext(np.random.default_rng(0).normal(size=(20, 2))), 3j)
    ext = extend_along_projection(RE, c)
    q = np.array([[-1.0, 5.0], [0.25, -3.0], [2.0, 0.1]])
    assert np.allclose(ext(q), [0, 0.25, 1])
    f = Analytic(lambda z: np.exp(1j * z.real) * (1 + z.imag), "f")
    ext = extend_along_projection(f, c)
    assert np.allclose(ext(c.points), f(c.points))


def test_extend_along_projection_errors():
    arc = Curve.arc((0, 0), 1, 0, 5.0, 80)
    with pytest.raises(ExtensionError):
        extend_along_projection(RE, arc)
    seg = Curve.segment((0, 0), (2, 0))
    with pytest.raises(ExtensionError):
        extend_along_projection(RE, seg, lambda z: z)


def test_extension_is_multiplicative():
    c = Curve.arc_between((0, 0), (2, 1), (1.5, -0.5), False, 60)
    f = Analytic(lambda z: z ** 2, "f")
    g = Analytic(lambda z: np.cos(z.real) + 1j, "g")
    norm = chord_normalizer(c.start, c.end)
    fg, fe, ge = (extend_along_projection(h, c, norm) for h in (f * g, f, g))
    assert np.allclose(fg(c.points), fe(c.points) * ge(c.points))


def _two_parts(gap=1.0):
    P1 = ConvexPolygon([(0, 0), (0.5, -0.3), (1, 0), (0.5, 0.3)])
    ps1 = PicSet([Curve.segment((0, 0), (1, 0), 9)], [P1])
    P2 = ConvexPolygon([(1 + gap, 0), (1.5 + gap, -0.3), (2 + gap, 0), (1.5 + gap, 0.3)])
    ps2 = PicSet([Curve.segment((1 + gap, 0), (2 + gap, 0), 9)], [P2])
    return ps1, ps2


def test_extend_by_zero_examples():
    ps1, ps2 = _two_parts()
    g = extend_by_zero(Constant(1), ps1, ps2)
    assert np.allclose(g(ps1.sample_points()), 1) and np.allclose(g(ps2.sample_points()), 0)
    line = separating_line(ps1, ps2)
    assert line is not None
    g = extend_by_zero(Constant(5), ps1, ps2, normalizer=lambda z: z - 1.5)
    assert np.allclose(g(ps1.sample_points()), 5)


def test_extend_by_zero_requires_separation():
    ps1, _ = _two_parts()
    with pytest.raises(ExtensionError):
        extend_by_zero(Constant(1), ps1, ps1)
    ps1, ps2 = _two_parts()
    with pytest.raises(ExtensionError):
        extend_by_zero(Constant(1), ps1, ps2, normalizer=lambda z: z - 0.5)


def test_extend_by_zero_variation_bound():
    rng = np.random.default_rng(3)
    ps1, ps2 = _two_parts(0.5)
    g = Analytic(lambda z: np.sin(3 * z.real) + 1j * z.real, "g")
    upper = bv_bracket(g, ps1, SearchBudget(max_len=3, restarts=4, steps=8)).upper
    ext = extend_by_zero(g, ps1, ps2)
    pts = np.vstack([ps1.sample_points(), ps2.sample_points()])
    for _ in range(200):
        idx = [int(rng.integers(len(pts)))]
        while len(idx) < int(rng.integers(2, 8)):
            j = int(rng.integers(len(pts)))
            if j != idx[-1]:
                idx.append(j)
        S = pts[idx]
        assert cvar(ext, S) / vf_exact(S)[0] <= 2 * upper + 1e-9


def test_ac_distance_polynomial_and_constant():
    ps = _gen.random_picset(np.random.default_rng(5))
    p = Poly2({(0, 0): 1 - 1j, (1, 0): 2, (1, 1): 0.5j, (0, 2): -1})
    assert ac_distance(p, ps, 2, SMALL) <= 1e-6
    assert ac_distance(Constant(2 + 3j), ps, 0, SMALL) <= 1e-9


def _l_shape():
    PA = ConvexPolygon([(0, 0), (0.5, -0.2), (1, 0), (0.5, 0.2)])
    PB = ConvexPolygon([(0, 0), (0.2, 0.5), (0, 1), (-0.2, 0.5)])
    A = Curve.segment((0, 0), (1, 0), 17)
    B = Curve.segment((0, 0), (0, 1), 17)
    return PicSet([A, B], [PA, PB]), Indicator([A])


def test_ac_distance_indicator_lower_bound():
    ps, f = _l_shape()
    d = ac_distance(f, ps, 2, SMALL)
    assert d >= 0.5
    # lattice of affine real polynomials: none gets below the same bound
    grid = np.linspace(-1, 2, 7)
    best = math.inf
    for a, b, c in itertools.product(grid, grid, grid):
        p = Poly2({(0, 0): a, (1, 0): b, (0, 1): c})
        best = min(best, pic_norm(f - p, ps))
    assert best >= 0.5
    assert d <= best + 1e-9


def test_ac_distance_monotone_in_degree():
    ps, f = _l_shape()
    hist = ac_fit(f, ps, 3, SMALL).by_degree
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))
    g = Analytic(lambda z: np.exp(z.real) * np.cos(2 * z.imag), "g")
    hist = ac_fit(g, ps, 3, SMALL).by_degree
    assert all(b <= a + 1e-9 for a, b in zip(hist, hist[1:]))
    with pytest.raises(ValueError):
        ac_fit(g, ps, -1)
