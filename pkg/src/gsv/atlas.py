"""Transition maps between charts and the certificate that K_V is trivial.

On chart ``I`` the top form ``sigma_I = d(coords) / minor_I^r`` is nowhere
zero.  For two charts, ``sigma_J = g * sigma_I`` with
``g = det(Jacobian) * minor_I^r / minor_J^r``.  The certificate checks that
every such ``g`` is exactly +1 or -1, and that the transition functions
``(minor_I / minor_J)^r`` satisfy the cocycle condition.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .errors import NotUnit
from .symalg import LocalizedElement, Polynomial, Variable
from .symmat import SymMatrix, all_index_sets, det, minor_value, qdet
from .variety import GSVSpec, _check_index_set, build_chart


@dataclass(frozen=True, eq=False)
class TransitionMap:
    spec: GSVSpec
    from_chart: tuple
    to_chart: tuple
    substitution: dict  # chart-J coordinate -> element of chart-I coordinates
    jacobian: SymMatrix  # rows: chart-J coordinates, columns: chart-I coordinates

    def nontrivial_entries(self) -> list[Variable]:
        return [v for v, e in self.substitution.items() if e != _var(v)]


@dataclass(frozen=True)
class GluingCertificate:
    I: tuple
    J: tuple
    gluing: int
    det_formula_matched: bool
    jacobian_det: str = field(default="", compare=False)

    def to_json(self) -> dict:
        return {
            "I": list(self.I),
            "J": list(self.J),
            "gluing": self.gluing,
            "detFormulaMatched": self.det_formula_matched,
        }


@dataclass(frozen=True)
class CanonicalCertificate:
    spec: GSVSpec
    pairs: tuple
    cocycle_triples_checked: int
    sign_cocycle_ok: bool
    verdict: str

    def sign_pattern(self) -> dict:
        return {(c.I, c.J): c.gluing for c in self.pairs}

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "pairs": [c.to_json() for c in self.pairs],
            "cocycleTriplesChecked": self.cocycle_triples_checked,
            "verdict": self.verdict,
        }


def _var(v: Variable) -> LocalizedElement:
    return LocalizedElement(Polynomial.variable(v))


def is_adjacent(I: Sequence[int], J: Sequence[int]) -> bool:
    return len(set(J) - set(I)) == 1


@lru_cache(maxsize=None)
def transition(spec: GSVSpec, I: tuple, J: tuple) -> TransitionMap:
    """Express the chart-J coordinates in chart-I coordinates and differentiate."""
    I = _check_index_set(spec, I)
    J = _check_index_set(spec, J)
    if I == J:
        raise ValueError("transition needs two distinct charts")
    ci, cj = build_chart(spec, I), build_chart(spec, J)
    from_coords = set(ci.free_coords)
    sub = {}
    for v in cj.free_coords:
        sub[v] = _var(v) if v in from_coords else ci.solved[v]
    rows = []
    for v in cj.free_coords:
        e = sub[v]
        if v in from_coords:
            rows.append([int(u == v) for u in ci.free_coords])
        else:
            rows.append([e.derivative(u) for u in ci.free_coords])
    return TransitionMap(spec, I, J, sub, SymMatrix(rows))


@lru_cache(maxsize=None)
def _jacobian_det_cached(spec: GSVSpec, I: tuple, J: tuple) -> LocalizedElement:
    return det(transition(spec, I, J).jacobian).reduced()


def jacobian_det(t: TransitionMap) -> LocalizedElement:
    return _jacobian_det_cached(t.spec, t.from_chart, t.to_chart)


def minor_ratio_power(I: tuple, J: tuple, r: int) -> LocalizedElement:
    """``(minor_J / minor_I) ** r``."""
    return LocalizedElement.minor(J, r) * LocalizedElement.minor(I, -r)


def det_formula_sign(spec: GSVSpec, I: tuple, J: tuple) -> int | None:
    """The sign e with ``jacobian_det == e * (minor_J / minor_I)^r``, or None if neither sign works."""
    d = jacobian_det(transition(spec, tuple(I), tuple(J)))
    ratio = minor_ratio_power(tuple(I), tuple(J), spec.r)
    if d == ratio:
        return 1
    if d == -ratio:
        return -1
    return None


def gluing_factor(spec: GSVSpec, I: Sequence[int], J: Sequence[int]) -> Fraction:
    """``det(J_{I->J}) * minor_I^r / minor_J^r``; must be exactly +1 or -1."""
    I, J = tuple(I), tuple(J)
    d = jacobian_det(transition(spec, I, J))
    g = (d * LocalizedElement.minor(I, spec.r) / LocalizedElement.minor(J, spec.r)).reduced()
    for eps in (1, -1):
        if g == eps:
            return Fraction(eps)
    raise NotUnit(f"gluing factor for {I}->{J} is {g}, not a unit sign")


def cartier_cocycle(spec: GSVSpec, I: Sequence[int], J: Sequence[int], K: Sequence[int]) -> bool:
    """Check ``g_IJ g_JK g_KI == 1`` for ``g_IJ = (minor_I / minor_J)^r``."""
    I, J, K = (_check_index_set(spec, T) for T in (I, J, K))
    if len({I, J, K}) != 3:
        raise ValueError("cocycle check needs three distinct charts")
    r = spec.r

    def g(A, B):
        return LocalizedElement.minor(A, r) / LocalizedElement.minor(B, r)

    return g(I, J) * g(J, K) * g(K, I) == 1


def chart_pairs(spec: GSVSpec, scope: str = "all") -> list[tuple[tuple, tuple]]:
    sets = all_index_sets(spec.r, spec.s)
    pairs = list(itertools.combinations(sets, 2))
    if scope == "adjacent":
        pairs = [(I, J) for I, J in pairs if is_adjacent(I, J)]
    elif scope != "all":
        raise ValueError(f"unknown pair scope {scope!r}")
    return pairs


def certify_pair(spec: GSVSpec, I: tuple, J: tuple) -> GluingCertificate:
    eps = gluing_factor(spec, I, J)
    d = jacobian_det(transition(spec, I, J))
    return GluingCertificate(
        I, J, int(eps), det_formula_sign(spec, I, J) is not None, jacobian_det=str(d)
    )


def certify_canonical_trivial(
    spec: GSVSpec, scope: str = "all", progress: Callable[[], None] | None = None
) -> CanonicalCertificate:
    """Gluing factor of every chart pair plus the cocycle condition on every triple.

    ``progress`` is called before each pair; it may raise to abort a long run.
    """
    certs = []
    for I, J in chart_pairs(spec, scope):
        if progress is not None:
            progress()
        certs.append(certify_pair(spec, I, J))
    certs = tuple(certs)
    sets = all_index_sets(spec.r, spec.s)
    triples = list(itertools.combinations(sets, 3))
    cocycle_ok = all(cartier_cocycle(spec, *t) for t in triples)
    signs = {(c.I, c.J): c.gluing for c in certs}
    sign_ok = True
    for I, J, K in triples:
        if (I, J) in signs and (J, K) in signs and (I, K) in signs:
            # eps_KI == eps_IK because each sign is its own inverse
            sign_ok &= signs[I, J] * signs[J, K] * signs[I, K] == 1
    ok = cocycle_ok and sign_ok and all(c.gluing in (1, -1) for c in certs)
    return CanonicalCertificate(
        spec, certs, len(triples), sign_ok, "CANONICAL_TRIVIAL" if ok else "FAILED"
    )


def numeric_cross_check(
    spec: GSVSpec, I: tuple, J: tuple, rng: random.Random, samples: int
) -> tuple[bool, int]:
    """Evaluate the Jacobian numerically at random points of the overlap.

    Compares ``det`` of the evaluated matrix with ``eps * (minor_J / minor_I)^r``
    for the certified sign.  Returns (all agree, points used).
    """
    from .repthy import random_orbit_point

    I, J = tuple(I), tuple(J)
    t = transition(spec, I, J)
    eps = gluing_factor(spec, I, J)
    used = 0
    ok = True
    while used < samples:
        p = random_orbit_point(spec, rng)
        mi, mj = minor_value(p.X, I), minor_value(p.X, J)
        if mi == 0 or mj == 0:
            continue
        ok &= qdet(t.jacobian.evaluate(p.assignment())) == eps * (mj / mi) ** spec.r
        used += 1
    return ok, used
