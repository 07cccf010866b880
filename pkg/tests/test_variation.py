import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from picvar.curve import Curve
from picvar.functions import Analytic, Constant, SampleTable
from picvar.geom import Line
from picvar.mosaic import PicSet
from picvar.geom import ConvexPolygon
from picvar.specfile import load
from picvar.variation import (NormBracket, PointList, PointListError, SearchBudget, bv_bracket,
                              cvar, var_lower, vf_exact, vf_on_line)

from _oracle import crossings, line_signs, random_lines_vf, vf_bruteforce

RE = Analytic(lambda z: z.real + 0j, "Re z")


def test_pointlist_rejects_repeated_neighbours():
    with pytest.raises(PointListError):
        PointList([(0, 0), (0, 0)])
    PointList([(0, 0), (1, 0), (0, 0)])


def test_vf_on_line_examples():
    assert vf_on_line([(0, -1), (0, 1)], Line((0, 0), (0, 1))) == 1
    assert vf_on_line([(3, 4)], Line.through((3, 4), (5, 1))) == 1
    assert vf_on_line([(3, 4)], Line((0, 0), (0, 1))) == 0


def test_vf_on_line_rules_match_oracle():
    rng = np.random.default_rng(3)
    for _ in range(300):
        pts = rng.integers(-2, 3, size=(int(rng.integers(1, 7)), 2)).astype(float)
        if any((pts[i] == pts[i + 1]).all() for i in range(len(pts) - 1)):
            continue
        a, b = rng.integers(-2, 3, size=(2, 2)).astype(float)
        if (a == b).all():
            continue
        ell = Line.through(a, b)
        assert vf_on_line(pts, ell) == crossings(line_signs(pts, np.array(ell.u), np.array(ell.v)))


def test_dashed_line_fires_only_first_rule():
    spec = load("bad_bv_ex.json")
    S = spec.lists["dashed"]
    assert vf_on_line(S, Line((0, 0.5), (0, 1))) == 1


def test_vf_exact_examples():
    count, line = vf_exact([(0, -1), (1, 1), (2, -1), (3, 1)])
    assert count == 3
    assert vf_on_line([(0, -1), (1, 1), (2, -1), (3, 1)], line) == 3
    assert vf_exact([(0, 0), (1, 2)])[0] == 1
    assert vf_exact([(0.2, 0.3)])[0] == 1


def test_vf_exact_on_convex_sample_at_most_two():
    c = Curve.arc((0, 0), 1, 0, math.pi, 40)
    assert vf_exact(c.points)[0] <= 2


def test_vf_exact_dominates_oracles():
    rng = np.random.default_rng(11)
    for _ in range(40):
        n = int(rng.integers(1, 7))
        pts = rng.integers(0, 4, size=(n, 2)).astype(float)
        if any((pts[i] == pts[i + 1]).all() for i in range(n - 1)):
            continue
        got = vf_exact(pts)[0]
        assert 1 <= got <= max(1, n - 1)
        assert got >= vf_bruteforce(pts)
        assert got >= random_lines_vf(pts, 5000, rng)


def test_vf_exact_witness_realises_count():
    rng = np.random.default_rng(5)
    for _ in range(50):
        pts = rng.normal(size=(int(rng.integers(2, 8)), 2))
        count, line = vf_exact(pts)
        assert vf_on_line(pts, line) == count


def test_cvar_examples():
    S = [(0, 0), (1, 0), (5, 5)]
    assert cvar(Constant(2 + 1j), S) == 0
    f = SampleTable([(0, 0), (1, 0)], [0, 3 + 4j])
    assert cvar(f, [(0, 0), (1, 0)]) == pytest.approx(5)
    assert cvar(RE, [(0.5, 0.5)]) == 0


def test_cvar_bad_bv_ex():
    spec = load("bad_bv_ex.json")
    assert cvar(spec.functions["red_indicator"], spec.lists["dashed"]) == pytest.approx(5)


def test_var_lower_examples():
    assert var_lower(Constant(3), [(0, 0), (1, 1)]).value == 0
    a, b = (0.0, 0.0), (1.0, 0.0)
    ind = SampleTable([a, b], [1, 0])
    res = var_lower(ind, [a, b], SearchBudget(max_len=4))
    assert res.exhaustive
    assert res.value == pytest.approx(1)
    spec = load("bad_bv_ex.json")
    res = var_lower(spec.functions["red_indicator"], list(spec.lists["dashed"]),
                    SearchBudget(max_len=6, exhaustive_cap=0, restarts=4, steps=16),
                    seeds=[spec.lists["dashed"]])
    assert res.value >= 5 - 1e-12


def test_var_lower_deterministic():
    rng = np.random.default_rng(0)
    pts = [tuple(p) for p in rng.normal(size=(30, 2))]
    f = SampleTable(pts, rng.normal(size=30))
    budget = SearchBudget(max_len=6, restarts=8, steps=20, seed=7)
    assert var_lower(f, pts, budget).value == var_lower(f, pts, budget).value


def test_var_lower_empty_rejected():
    with pytest.raises(ValueError):
        var_lower(Constant(1), [])


def test_var_lower_witness_value_is_certified():
    rng = np.random.default_rng(2)
    pts = [tuple(p) for p in rng.normal(size=(12, 2))]
    f = SampleTable(pts, rng.normal(size=12) + 1j * rng.normal(size=12))
    res = var_lower(f, pts, SearchBudget(max_len=5, restarts=8, steps=30))
    W = res.witness
    assert res.value == pytest.approx(cvar(f, W) / vf_exact(W)[0])
    assert res.value * random_lines_vf(W.array(), 20000, rng) <= cvar(f, W) + 1e-9


def test_bv_bracket_constant_and_re():
    seg = Curve.segment((0, 0), (1, 0), 11)
    P = ConvexPolygon([(0, 0), (0.5, -0.5), (1, 0), (0.5, 0.5)])
    ps = PicSet([seg], [P])
    br = bv_bracket(Constant(2), ps)
    assert br.lower == pytest.approx(2)
    assert br.upper == pytest.approx(2)
    br = bv_bracket(RE, ps, SearchBudget(max_len=2))
    assert br.lower == pytest.approx(2)
    assert br.lower <= br.upper + 1e-9


def test_bracket_rejects_inverted():
    with pytest.raises(ValueError):
        NormBracket(2.0, 1.0)


def _exhaustive_pairs(rng):
    pts = [tuple(p) for p in rng.normal(size=(4, 2))]
    f = SampleTable(pts, rng.normal(size=4) + 1j * rng.normal(size=4))
    g = SampleTable(pts, rng.normal(size=4) + 1j * rng.normal(size=4))
    return pts, f, g


def test_product_rule_on_exhaustive_family():
    rng = np.random.default_rng(9)
    budget = SearchBudget(max_len=4, exhaustive_cap=10 ** 6)
    for _ in range(5):
        pts, f, g = _exhaustive_pairs(rng)
        P = np.array(pts)
        sup_f, sup_g = np.abs(f(P)).max(), np.abs(g(P)).max()
        vfg = var_lower(f * g, pts, budget).value
        bound = sup_f * var_lower(g, pts, budget).value + sup_g * var_lower(f, pts, budget).value
        assert vfg <= bound + 1e-9


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=2, max_size=7),
       st.data())
def test_sublist_monotone(points, data):
    pts = [points[0]]
    for p in points[1:]:
        if p != pts[-1]:
            pts.append(p)
    keep = data.draw(st.lists(st.booleans(), min_size=len(pts), max_size=len(pts)))
    sub = []
    for p, k in zip(pts, keep):
        if k and (not sub or sub[-1] != p):
            sub.append(p)
    if not sub:
        return
    assert vf_exact(sub)[0] <= vf_exact(pts)[0]
