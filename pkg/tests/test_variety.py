import json
import random
from fractions import Fraction
from math import comb

import pytest

from gsv.errors import InvalidSpec, NotOnVariety, NotOrthonormalRows, ShapeMismatch
from gsv.repthy import base_point, random_orbit_point
from gsv.symalg import LocalizedElement, Polynomial, parse_poly, x, y
from gsv.symmat import minor_value, rank
from gsv.variety import (
    GSVSpec,
    Point,
    build_chart,
    chart_atlas,
    chart_identity_holds,
    contains,
    defining_equations,
    dimension,
    jacobian_rank_at,
    rational_sphere_point,
    require_on_variety,
    stiefel_embed,
)

SPECS = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def P(v):
    return Polynomial.variable(v)


def test_spec_validation():
    with pytest.raises(InvalidSpec):
        GSVSpec(3, 2)
    with pytest.raises(InvalidSpec):
        GSVSpec(0, 2)


def test_defining_equations():
    (eq,), = defining_equations(GSVSpec(1, 2))
    assert eq == parse_poly("x1_1*y1_1 + x1_2*y2_1 - 1")
    eqs = defining_equations(GSVSpec(2, 3))
    assert sum(len(row) for row in eqs) == 4
    v = base_point(GSVSpec(2, 3)).assignment()
    assert all(e.evaluate(v) == 0 for row in eqs for e in row)


def test_contains():
    spec = GSVSpec(1, 2)
    assert contains(spec, base_point(spec))
    assert contains(spec, Point([[2, 3]], [[Fraction(1, 2)], [0]]))
    assert not contains(spec, Point([[1, 0]], [[0], [0]]))
    with pytest.raises(NotOnVariety) as exc:
        require_on_variety(spec, Point([[1, 0]], [[0], [0]]))
    assert exc.value.entry == (1, 1) and exc.value.residual == -1
    with pytest.raises(ShapeMismatch):
        contains(GSVSpec(2, 3), base_point(spec))


@pytest.mark.parametrize("r, s, expected", [(1, 2, 3), (2, 3, 8), (2, 2, 4), (3, 3, 9)])
def test_dimension(r, s, expected):
    spec = GSVSpec(r, s)
    assert dimension(spec) == expected
    assert len(build_chart(spec, tuple(range(1, r + 1))).free_coords) == expected
    # ambient size minus the rank of the defining map at the base point
    assert 2 * r * s - jacobian_rank_at(spec, base_point(spec)) == expected


def test_jacobian_rank_examples():
    assert jacobian_rank_at(GSVSpec(1, 2), base_point(GSVSpec(1, 2))) == 1
    assert jacobian_rank_at(GSVSpec(2, 3), base_point(GSVSpec(2, 3))) == 4


def test_jacobian_rank_by_hand_r1():
    # gradient of x11*y11 + x12*y21 - 1 is (y11, y21, x11, x12)
    rng = random.Random(2)
    spec = GSVSpec(1, 2)
    for _ in range(20):
        p = random_orbit_point(spec, rng)
        (x11, x12), = p.X
        (y11,), (y21,) = p.Y
        assert jacobian_rank_at(spec, p) == rank([[y11, y21, x11, x12]]) == 1


@pytest.mark.parametrize("r, s", SPECS)
def test_rank_at_random_points(r, s):
    spec = GSVSpec(r, s)
    rng = random.Random(r * 10 + s)
    for _ in range(25):
        assert jacobian_rank_at(spec, random_orbit_point(spec, rng)) == r * r


def test_chart_r1_s2():
    spec = GSVSpec(1, 2)
    c1 = build_chart(spec, (1,))
    assert c1.free_coords == (x(1, 1), x(1, 2), y(2, 1))
    assert c1.solved[y(1, 1)] == LocalizedElement(1 - P(x(1, 2)) * P(y(2, 1)), {(1,): 1})
    c2 = build_chart(spec, (2,))
    assert c2.solved[y(2, 1)] == LocalizedElement(1 - P(x(1, 1)) * P(y(1, 1)), {(2,): 1})


@pytest.mark.parametrize("r, s", SPECS)
def test_every_chart_solves_the_equations(r, s):
    spec = GSVSpec(r, s)
    charts = chart_atlas(spec)
    assert len(charts) == comb(s, r)
    for c in charts:
        assert len(c.free_coords) == r * s + r * (s - r)
        assert chart_identity_holds(c)


@pytest.mark.parametrize("r, s", [(1, 3), (2, 3), (2, 4)])
def test_solved_rows_agree_with_points(r, s):
    spec = GSVSpec(r, s)
    rng = random.Random(s)
    for _ in range(10):
        p = random_orbit_point(spec, rng)
        vals = p.assignment()
        hit = False
        for c in chart_atlas(spec):
            if minor_value(p.X, c.index_set) == 0:
                continue
            hit = True
            for v, e in c.solved.items():
                assert e.evaluate(vals) == vals[v]
        assert hit


def test_bad_index_sets():
    spec = GSVSpec(2, 3)
    for bad in [(1,), (2, 1), (1, 4), (1, 1)]:
        with pytest.raises(ValueError):
            build_chart(spec, bad)


def test_stiefel_and_sphere():
    spec = GSVSpec(1, 2)
    p = stiefel_embed([[Fraction(3, 5), Fraction(4, 5)]])
    assert contains(spec, p)
    X0 = base_point(GSVSpec(2, 4)).X
    assert stiefel_embed(X0) == base_point(GSVSpec(2, 4))
    with pytest.raises(NotOrthonormalRows):
        stiefel_embed([[1, 1]])
    for u in ([1, 2], [Fraction(1, 3), 5, -2], [7]):
        pt = rational_sphere_point(u)
        assert sum(v * v for v in pt) == 1
        assert contains(GSVSpec(1, len(pt)), stiefel_embed([pt]))


def test_point_json_round_trip(tmp_path):
    p = Point([[2, 3]], [[Fraction(1, 2)], [0]])
    text = json.dumps(p.to_json())
    assert json.loads(text)["Y"] == [["1/2"], ["0/1"]]
    assert Point.loads(text) == p
    with pytest.raises(ShapeMismatch):
        Point.loads(json.dumps({"r": 2, "s": 2, "X": [[1, 0]], "Y": [[1], [0]]}))
    with pytest.raises(ShapeMismatch):
        Point.loads('{"X": [[1, "a"]], "Y": [[1], [0]]}')
