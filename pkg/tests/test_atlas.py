import itertools
import random

import pytest

from gsv.atlas import (
    cartier_cocycle,
    certify_canonical_trivial,
    chart_pairs,
    det_formula_sign,
    gluing_factor,
    is_adjacent,
    jacobian_det,
    minor_ratio_power,
    numeric_cross_check,
    transition,
)
from gsv.repthy import random_orbit_point
from gsv.symalg import LocalizedElement, Polynomial, x, y
from gsv.symmat import all_index_sets, det_cofactor, minor_value, qdet
from gsv.variety import GSVSpec, build_chart

SMALL = [(1, 2), (1, 3), (2, 3), (2, 4)]


def test_transition_r1_s2():
    spec = GSVSpec(1, 2)
    t = transition(spec, (1,), (2,))
    x11, x12, y21 = (Polynomial.variable(v) for v in (x(1, 1), x(1, 2), y(2, 1)))
    assert t.nontrivial_entries() == [y(1, 1)]
    assert t.substitution[y(1, 1)] == LocalizedElement(1 - x12 * y21, {(1,): 1})
    d = jacobian_det(t)
    assert d == LocalizedElement(-x12, {(1,): 1})
    assert str(d) == "(-x1_2)/(M1)"
    assert det_cofactor(t.jacobian) == d
    with pytest.raises(ValueError):
        transition(spec, (1,), (1,))


@pytest.mark.parametrize("r, s", SMALL + [(3, 4)])
def test_adjacent_block_shape(r, s):
    spec = GSVSpec(r, s)
    for I, J in chart_pairs(spec, "adjacent"):
        t = transition(spec, I, J)
        moved = len(set(J) - set(I))
        assert len(t.nontrivial_entries()) == r * moved
        from_coords = build_chart(spec, I).free_coords
        for row, v in zip(t.jacobian.rows, build_chart(spec, J).free_coords):
            if v in from_coords:
                assert [e == int(u == v) for e, u in zip(row, from_coords)] == [True] * len(row)


def test_jacobian_det_r2_s3_is_minor_ratio():
    spec = GSVSpec(2, 3)
    eps = det_formula_sign(spec, (1, 2), (2, 3))
    assert eps in (1, -1)
    d = jacobian_det(transition(spec, (1, 2), (2, 3)))
    assert d == eps * minor_ratio_power((1, 2), (2, 3), 2)


@pytest.mark.parametrize("r, s", SMALL)
def test_jacobian_det_numeric_cross_check(r, s):
    spec = GSVSpec(r, s)
    rng = random.Random(1000 + 10 * r + s)
    for I, J in chart_pairs(spec, "all"):
        ok, used = numeric_cross_check(spec, I, J, rng, 50)
        assert ok and used == 50


@pytest.mark.parametrize("r, s", SMALL)
def test_transition_and_inverse_compose_to_one(r, s):
    spec = GSVSpec(r, s)
    rng = random.Random(r + s)
    for I, J in chart_pairs(spec, "all"):
        fwd, back = transition(spec, I, J), transition(spec, J, I)
        n = 0
        while n < 10:
            p = random_orbit_point(spec, rng)
            if minor_value(p.X, I) == 0 or minor_value(p.X, J) == 0:
                continue
            vals = p.assignment()
            assert qdet(fwd.jacobian.evaluate(vals)) * qdet(back.jacobian.evaluate(vals)) == 1
            n += 1


def test_gluing_factor_examples():
    spec = GSVSpec(1, 2)
    assert gluing_factor(spec, (1,), (2,)) == -1
    assert gluing_factor(spec, (2,), (1,)) == -1
    spec = GSVSpec(2, 3)
    for I, J in chart_pairs(spec):
        assert gluing_factor(spec, I, J) in (1, -1)
        assert gluing_factor(spec, J, I) == gluing_factor(spec, I, J)


def test_cocycle():
    spec = GSVSpec(2, 4)
    triples = list(itertools.combinations(all_index_sets(2, 4), 3))
    assert len(triples) == 20
    assert all(cartier_cocycle(spec, *t) for t in triples)
    with pytest.raises(ValueError):
        cartier_cocycle(spec, (1, 2), (1, 2), (1, 3))


@pytest.mark.parametrize("r, s, pairs, signs", [
    (1, 2, 1, [-1]),
    (1, 3, 3, [-1, 1, -1]),
    (2, 3, 3, [1, 1, 1]),
])
def test_certificate(r, s, pairs, signs):
    cert = certify_canonical_trivial(GSVSpec(r, s))
    assert cert.verdict == "CANONICAL_TRIVIAL"
    assert len(cert.pairs) == pairs
    assert [c.gluing for c in cert.pairs] == signs
    assert all(c.det_formula_matched for c in cert.pairs)
    assert cert.sign_cocycle_ok
    doc = cert.to_json()
    assert set(doc) == {"spec", "pairs", "cocycleTriplesChecked", "verdict"}


def test_adjacency():
    assert is_adjacent((1, 2), (1, 3))
    assert not is_adjacent((1, 2), (3, 4))
    assert len(chart_pairs(GSVSpec(2, 4), "adjacent")) == 12
    assert len(chart_pairs(GSVSpec(2, 4), "all")) == 15
    with pytest.raises(ValueError):
        chart_pairs(GSVSpec(2, 4), "some")


def test_progress_hook_can_abort():
    class Stop(Exception):
        pass

    def hook():
        raise Stop

    with pytest.raises(Stop):
        certify_canonical_trivial(GSVSpec(1, 3), progress=hook)
