"""GL(r) x GL(s) acting on GSV(r, s).

``(A, B)`` sends ``(X, Y)`` to ``(A X B^-1, B Y A^-1)``.  The variety is the
orbit of the base point ``v = ([I | 0], [I ; 0])``, whose stabilizer is
``{(A, diag(A, D))}``.  Torus weights are integer vectors in additive
notation: ``alpha`` holds the exponents of ``a_1..a_r`` and ``beta`` those of
``b_1..b_s``.  Under the restricted torus ``b_i = a_i`` for ``i <= r`` and the
last ``s - r`` coordinates are renamed ``delta``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .errors import (
    DegenerateComplement,
    NonTrivialCanonicalWeight,
    NonTrivialSigmaWeight,
    ShapeMismatch,
    SingularGroupElement,
)
from .symalg import Polynomial, Variable, minor_polynomial, x, y
from .symmat import (
    QMatrix,
    kernel_basis,
    permutation_matrix,
    qdet,
    qidentity,
    qinverse,
    qmatmul,
    qmatrix,
    qshape,
    qzeros,
)
from .variety import GSVSpec, Point, chart_free_coords, require_on_variety


@dataclass(frozen=True)
class GroupElement:
    A: QMatrix
    B: QMatrix

    def __init__(self, A, B):
        A, B = qmatrix(A), qmatrix(B)
        if qshape(A)[0] != qshape(A)[1] or qshape(B)[0] != qshape(B)[1]:
            raise ShapeMismatch("group element blocks must be square")
        if qdet(A) == 0 or qdet(B) == 0:
            raise SingularGroupElement("A and B must be invertible")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(qmatmul(self.A, other.A), qmatmul(self.B, other.B))

    def inverse(self) -> "GroupElement":
        return GroupElement(qinverse(self.A), qinverse(self.B))

    @classmethod
    def identity(cls, spec: GSVSpec) -> "GroupElement":
        return cls(qidentity(spec.r), qidentity(spec.s))

    def to_json(self) -> dict:
        def enc(M):
            return [[f"{v.numerator}/{v.denominator}" for v in row] for row in M]

        return {"A": enc(self.A), "B": enc(self.B)}


@dataclass(frozen=True)
class WeylElement:
    """Permutations ``sigma`` of rows 0..r-1 and ``tau`` of columns 0..s-1 (0-based images)."""

    sigma: tuple
    tau: tuple

    def __post_init__(self):
        for perm in (self.sigma, self.tau):
            if sorted(perm) != list(range(len(perm))):
                raise ValueError(f"{perm} is not a permutation")

    def as_group_element(self) -> GroupElement:
        return GroupElement(permutation_matrix(self.sigma), permutation_matrix(self.tau))


class Character(NamedTuple):
    alpha: tuple
    beta: tuple

    def __add__(self, other):
        return Character(_vadd(self.alpha, other.alpha), _vadd(self.beta, other.beta))

    def __neg__(self):
        return Character(_vneg(self.alpha), _vneg(self.beta))


class RestrictedCharacter(NamedTuple):
    alpha: tuple
    delta: tuple

    def __add__(self, other):
        return RestrictedCharacter(_vadd(self.alpha, other.alpha), _vadd(self.delta, other.delta))

    def __neg__(self):
        return RestrictedCharacter(_vneg(self.alpha), _vneg(self.delta))

    def is_zero(self) -> bool:
        return not any(self.alpha) and not any(self.delta)

    def as_list(self) -> list[int]:
        return list(self.alpha) + list(self.delta)


def _vadd(a, b):
    return tuple(p + q for p, q in zip(a, b))


def _vneg(a):
    return tuple(-p for p in a)


def _unit(n: int, i: int, scale: int = 1) -> tuple:
    return tuple(scale if k == i else 0 for k in range(n))


def zero_restricted(spec: GSVSpec) -> RestrictedCharacter:
    return RestrictedCharacter((0,) * spec.r, (0,) * (spec.s - spec.r))


# -- the action ----------------------------------------------------------


def act(g: GroupElement, p: Point) -> Point:
    r, s = qshape(g.A)[0], qshape(g.B)[0]
    if qshape(p.X) != (r, s) or qshape(p.Y) != (s, r):
        raise ShapeMismatch("group element and point sizes differ")
    Ai, Bi = qinverse(g.A), qinverse(g.B)
    return Point(qmatmul(qmatmul(g.A, p.X), Bi), qmatmul(qmatmul(g.B, p.Y), Ai))


def base_point(spec: GSVSpec) -> Point:
    r, s = spec.r, spec.s
    X0 = [[Fraction(int(i == j)) for j in range(s)] for i in range(r)]
    Y0 = [[Fraction(int(i == j)) for j in range(r)] for i in range(s)]
    return Point(X0, Y0)


def has_stabilizer_form(spec: GSVSpec, g: GroupElement) -> bool:
    """``B == [[A, 0], [0, D]]`` (D is then invertible because B is)."""
    r = spec.r
    for i in range(spec.s):
        for j in range(spec.s):
            b = g.B[i][j]
            if i < r and j < r:
                if b != g.A[i][j]:
                    return False
            elif (i < r) != (j < r) and b != 0:
                return False
    return True


def in_stabilizer(spec: GSVSpec, g: GroupElement) -> bool:
    """Whether ``g`` fixes the base point; the block-form test must agree."""
    v = base_point(spec)
    fixes = act(g, v) == v
    if fixes != has_stabilizer_form(spec, g):
        raise AssertionError("stabilizer tests disagree")
    return fixes


def orbit_witness(spec: GSVSpec, p: Point) -> GroupElement:
    """Return ``g`` with ``act(g, v) == p``: ``A = I`` and ``B = [Y | Z]`` with ``XZ = 0``."""
    require_on_variety(spec, p)
    r, s = spec.r, spec.s
    Z = kernel_basis(p.X)
    if len(Z) != s - r:
        raise DegenerateComplement(f"kernel of X has dimension {len(Z)}, expected {s - r}")
    B = [list(p.Y[i]) + [z[i] for z in Z] for i in range(s)]
    try:
        g = GroupElement(qidentity(r), B)
    except SingularGroupElement as exc:
        raise DegenerateComplement("[Y | Z] is singular") from exc
    if act(g, base_point(spec)) != p:
        raise DegenerateComplement("witness does not reproduce the point")
    return g


def weyl_act(w: WeylElement, p: Point) -> Point:
    """Permute rows and columns: ``(P_sigma X P_tau^-1, P_tau Y P_sigma^-1)``."""
    Ps, Pt = permutation_matrix(w.sigma), permutation_matrix(w.tau)
    # permutation matrices are orthogonal, so the inverse is the transpose
    Ps_inv, Pt_inv = tuple(zip(*Ps)), tuple(zip(*Pt))
    return Point(qmatmul(qmatmul(Ps, p.X), Pt_inv), qmatmul(qmatmul(Pt, p.Y), Ps_inv))


# -- random elements -----------------------------------------------------


def random_invertible(n: int, rng: random.Random, lo: int = -5, hi: int = 5) -> QMatrix:
    while True:
        M = qmatrix([[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)])
        if qdet(M) != 0:
            return M


def random_group_element(spec: GSVSpec, rng: random.Random) -> GroupElement:
    return GroupElement(random_invertible(spec.r, rng), random_invertible(spec.s, rng))


def random_stabilizer_element(spec: GSVSpec, rng: random.Random) -> GroupElement:
    r, s = spec.r, spec.s
    A = random_invertible(r, rng)
    D = random_invertible(s - r, rng) if s > r else ()
    B = [list(A[i]) + [Fraction(0)] * (s - r) for i in range(r)]
    B += [[Fraction(0)] * r + list(D[k]) for k in range(s - r)]
    return GroupElement(A, B)


def random_non_stabilizer_element(spec: GSVSpec, rng: random.Random) -> GroupElement:
    """A random invertible pair whose ``B`` breaks the block form of the stabilizer."""
    while True:
        g = random_group_element(spec, rng)
        if not has_stabilizer_form(spec, g):
            return g


def random_orbit_point(spec: GSVSpec, rng: random.Random) -> Point:
    return act(random_group_element(spec, rng), base_point(spec))


def random_weyl_element(spec: GSVSpec, rng: random.Random) -> WeylElement:
    sigma = list(range(spec.r))
    tau = list(range(spec.s))
    rng.shuffle(sigma)
    rng.shuffle(tau)
    return WeylElement(tuple(sigma), tuple(tau))


# -- torus weights -------------------------------------------------------


def coordinate_weight(v: Variable, spec: GSVSpec) -> Character:
    """Weight of a coordinate vector: x_ij has a_i / b_j, y_ji has b_j / a_i."""
    r, s = spec.r, spec.s
    if v.kind == "x":
        i, j = v.row - 1, v.col - 1
        return Character(_unit(r, i), _unit(s, j, -1))
    j, i = v.row - 1, v.col - 1
    return Character(_unit(r, i, -1), _unit(s, j))


def restrict(c: Character, spec: GSVSpec) -> RestrictedCharacter:
    r = spec.r
    return RestrictedCharacter(
        tuple(c.alpha[i] + c.beta[i] for i in range(r)), tuple(c.beta[r:])
    )


def torus_element(spec: GSVSpec, a: Sequence, b: Sequence) -> GroupElement:
    """Diagonal element ``(diag(a), diag(b))``."""
    r, s = spec.r, spec.s
    A = [[Fraction(a[i]) if i == j else Fraction(0) for j in range(r)] for i in range(r)]
    B = [[Fraction(b[i]) if i == j else Fraction(0) for j in range(s)] for i in range(s)]
    return GroupElement(A, B)


def character_value(c: Character, a: Sequence, b: Sequence) -> Fraction:
    value = Fraction(1)
    for ai, e in zip(a, c.alpha):
        value *= Fraction(ai) ** e
    for bj, e in zip(b, c.beta):
        value *= Fraction(bj) ** e
    return value


@dataclass(frozen=True)
class TangentWeights:
    """Weights of the complement ``{(C, 0)} + {(0, [[0, P], [Q, 0]])}`` of the stabilizer algebra."""

    spec: GSVSpec
    gl_r: tuple  # ((i, j), weight) for the gl(r) factor
    upper: tuple  # ((i, k), weight) for block P
    lower: tuple  # ((k, i), weight) for block Q

    def multiset(self) -> Counter:
        return Counter(w for _, w in self.gl_r + self.upper + self.lower)

    def count(self) -> int:
        return len(self.gl_r) + len(self.upper) + len(self.lower)

    def total(self) -> RestrictedCharacter:
        acc = zero_restricted(self.spec)
        for _, w in self.gl_r + self.upper + self.lower:
            acc = acc + w
        return acc


def tangent_weights(spec: GSVSpec) -> TangentWeights:
    r, s = spec.r, spec.s
    n = s - r
    zd = (0,) * n
    gl_r = tuple(
        ((i, j), RestrictedCharacter(_vadd(_unit(r, i), _unit(r, j, -1)), zd))
        for i in range(r) for j in range(r)
    )
    upper = tuple(
        ((i, k), RestrictedCharacter(_unit(r, i), _unit(n, k, -1)))
        for i in range(r) for k in range(n)
    )
    lower = tuple(
        ((k, i), RestrictedCharacter(_unit(r, i, -1), _unit(n, k)))
        for k in range(n) for i in range(r)
    )
    return TangentWeights(spec, gl_r, upper, lower)


def pairing_ok(tw: TangentWeights) -> bool:
    """gl(r) weights cancel in (i, j)/(j, i) pairs and the P and Q blocks are exact negatives."""
    gl = dict(tw.gl_r)
    for (i, j), w in gl.items():
        if i == j and not w.is_zero():
            return False
        if w + gl[(j, i)] != zero_restricted(tw.spec):
            return False
    lower = dict(tw.lower)
    for (i, k), w in tw.upper:
        if w + lower[(k, i)] != zero_restricted(tw.spec):
            return False
    return Counter(w for _, w in tw.upper) == Counter(-w for _, w in tw.lower)


def canonical_weight(spec: GSVSpec) -> RestrictedCharacter:
    """Sum of the tangent weights; raises unless it is zero and the pairing holds."""
    tw = tangent_weights(spec)
    total = tw.total()
    if not total.is_zero() or not pairing_ok(tw):
        raise NonTrivialCanonicalWeight(f"tangent weights sum to {total.as_list()}")
    return total


def polynomial_weight(p: Polynomial, spec: GSVSpec) -> RestrictedCharacter:
    """Restricted weight of a polynomial whose monomials all share one weight."""
    weights = set()
    for exps, _ in p.items():
        w = zero_restricted(spec)
        for v, e in exps.items():
            cw = restrict(coordinate_weight(v, spec), spec)
            for _ in range(e):
                w = w + cw
        weights.add(w)
    if len(weights) != 1:
        raise ValueError("polynomial is not a torus weight vector")
    return weights.pop()


def sigma_weight(spec: GSVSpec) -> RestrictedCharacter:
    """Weight of ``d(coords) / minor^r`` on the chart of the first r columns."""
    index_set = tuple(range(1, spec.r + 1))
    acc = zero_restricted(spec)
    for v in chart_free_coords(spec, index_set):
        acc = acc + restrict(coordinate_weight(v, spec), spec)
    m = polynomial_weight(minor_polynomial(index_set), spec)
    for _ in range(spec.r):
        acc = acc + m
    return -acc


def sigma_weight_check(spec: GSVSpec) -> bool:
    w = sigma_weight(spec)
    if not w.is_zero():
        raise NonTrivialSigmaWeight(f"sigma has weight {w.as_list()}")
    return w == canonical_weight(spec)


def base_point_weights(spec: GSVSpec) -> list[Character]:
    """Full-torus weights of the nonzero coordinates of the base point."""
    v = base_point(spec)
    out = []
    for var, val in v.assignment().items():
        if val != 0:
            out.append(coordinate_weight(var, spec))
    return out


def base_point_is_weight_vector(spec: GSVSpec) -> bool:
    return len(set(base_point_weights(spec))) == 1
