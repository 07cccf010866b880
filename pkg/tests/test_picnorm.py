import numpy as np
import pytest

from picvar.curve import Curve, pvar
from picvar.functions import Analytic, Constant, SampleTable
from picvar.geom import ConvexPolygon
from picvar.mosaic import PicSet, refine_simple, split_curve
from picvar.picnorm import (NormError, constants_for, direct_sum_join, direct_sum_norm,
                            direct_sum_split, equivalence_constants, pic_norm, union)
from picvar.specfile import load
from picvar.variation import SearchBudget, var_lower

import _gen

RE = Analytic(lambda z: z.real + 0j, "Re z")


def unit_segment(samples=11):
    P = ConvexPolygon([(0, 0), (0.5, -0.3), (1, 0), (0.5, 0.3)])
    return PicSet([Curve.segment((0, 0), (1, 0), samples)], [P])


def test_pic_norm_examples():
    ps = unit_segment()
    assert pic_norm(Constant(1), ps) == 1
    assert pic_norm(RE, ps) == pytest.approx(2)
    spec = load("bad_bv_ex.json")
    assert pic_norm(spec.functions["red_indicator"], spec.picset) == pytest.approx(2, abs=1e-9)


def test_pic_norm_refuses_unprojectable():
    ps = load("two_arcs.json").picset
    big = Curve.arc((0, 0), 1, 0, 5.0, 60)
    P = ConvexPolygon([(1.3, -1.3), (1.3, 1.3), (-1.3, 1.3), (-1.3, -1.3)])
    bad = PicSet([big], [P])
    with pytest.raises(NormError):
        pic_norm(Constant(1), bad)
    assert pic_norm(Constant(1), refine_simple(ps)) == 1


@pytest.mark.parametrize("M,S,K", [(1, 3, 1), (1, 7, 1), (3, 4, 19), (2, 3, 8)])
def test_constants_examples(M, S, K):
    c = constants_for(M, S)
    assert c.K_sigma == K and c.upper_factor == 2 * M


def test_constants_of_fixture():
    c = equivalence_constants(load("square_cycle.json").picset)
    assert (c.M, c.S, c.K_sigma) == (4, 4, 4 + 2 * 3 * 4)


def test_constants_use_refinement():
    c = equivalence_constants(load("two_arcs.json").picset)
    assert c.M == 4


def test_refinement_invariance():
    rng = np.random.default_rng(1)
    for _ in range(5):
        ps = _gen.random_picset(rng)
        f = _gen.random_function(rng)
        base = pic_norm(f, ps)
        k = len(ps.curves[0]) // 2
        assert pic_norm(f, split_curve(ps, 0, k)) == pytest.approx(base, rel=1e-12)
        assert pic_norm(f, refine_simple(ps)) == pytest.approx(base, rel=1e-12)


def test_norm_axioms():
    rng = np.random.default_rng(2)
    ps = load("sigma_pair.json").picset
    ps = refine_simple(ps)
    for _ in range(10):
        f, g = _gen.random_function(rng), _gen.random_function(rng)
        a = complex(*rng.normal(size=2))
        assert pic_norm(f * a, ps) == pytest.approx(abs(a) * pic_norm(f, ps), rel=1e-12)
        assert pic_norm(f + g, ps) <= pic_norm(f, ps) + pic_norm(g, ps) + 1e-12


def test_pvar_at_most_twice_variation_exhaustive():
    rng = np.random.default_rng(3)
    for _ in range(6):
        c = Curve.parabola((0, 0), tuple(rng.uniform(0.2, 0.8, 2)), (1, 0), 5)
        vals = rng.normal(size=5) + 1j * rng.normal(size=5)
        f = SampleTable(c.points, vals)
        lower = var_lower(f, list(map(tuple, c.points)), SearchBudget(max_len=5, exhaustive_cap=10 ** 4))
        assert lower.exhaustive
        assert pvar(f, c) <= 2 * lower.value + 1e-9


def _translated(ps, dx):
    curves = [Curve.polyline(c.points + [dx, 0]) for c in ps.curves]
    polys = [ConvexPolygon(P.array() + [dx, 0]) for P in ps.polygons]
    return PicSet(curves, polys)


def test_direct_sum_examples():
    ps_P = unit_segment()
    ps_Q = _translated(ps_P, 3.0)
    fP, fQ = direct_sum_split(Constant(2), ps_P, ps_Q)
    assert np.allclose(fP(ps_P.sample_points()), 2) and np.allclose(fQ(ps_Q.sample_points()), 2)
    assert direct_sum_norm(fP, fQ, ps_P, ps_Q) == pytest.approx(2)
    g = direct_sum_join(Constant(1), Constant(0), ps_P, ps_Q)
    both = union(ps_P, ps_Q).sample_points()
    expected = np.r_[np.ones(len(ps_P.sample_points())), np.zeros(len(ps_Q.sample_points()))]
    assert np.allclose(g(both), expected)
    zero_on_Q = direct_sum_join(RE, Constant(0), ps_P, ps_Q)
    assert np.allclose(direct_sum_split(zero_on_Q, ps_P, ps_Q)[1](ps_Q.sample_points()), 0)


def test_direct_sum_round_trip_and_norm():
    ps_P = load("square_cycle.json").picset
    ps_Q = _translated(ps_P, 5.0)
    f = Analytic(lambda z: np.cos(z.real) + 1j * z.imag ** 2, "f")
    fP, fQ = direct_sum_split(f, ps_P, ps_Q)
    joined = direct_sum_join(fP, fQ, ps_P, ps_Q)
    pts = union(ps_P, ps_Q).sample_points()
    assert np.array_equal(joined(pts), f(pts))
    whole = pic_norm(f, union(ps_P, ps_Q))
    assert direct_sum_norm(fP, fQ, ps_P, ps_Q) <= whole + 1e-9


def test_direct_sum_rejects_overlap():
    ps = unit_segment()
    with pytest.raises(NormError):
        direct_sum_split(Constant(1), ps, _translated(ps, 0.5))
