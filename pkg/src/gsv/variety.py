"""The affine variety GSV(r, s) = {(X, Y) : XY = I_r}.

Defining equations, membership of rational points, the rank of the defining
map, the affine charts ``U_I = {minor_I(X) != 0}`` and the Stiefel and
sphere special cases.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .errors import InvalidSpec, NotOnVariety, NotOrthonormalRows, ShapeMismatch
from .symalg import LocalizedElement, Polynomial, Variable, x, y
from .symmat import (
    QMatrix,
    SymMatrix,
    adjugate_solve,
    all_index_sets,
    generic_x,
    generic_y,
    qidentity,
    qmatmul,
    qmatrix,
    qshape,
    qtranspose,
    rank,
)


@dataclass(frozen=True)
class GSVSpec:
    r: int
    s: int

    def __post_init__(self):
        if not (isinstance(self.r, int) and isinstance(self.s, int)) or self.r < 1 or self.s < 1:
            raise InvalidSpec(f"r and s must be positive integers, got r={self.r}, s={self.s}")
        if self.r > self.s:
            raise InvalidSpec(f"need r <= s, got r={self.r}, s={self.s}")

    def to_json(self) -> dict:
        return {"r": self.r, "s": self.s}


@dataclass(frozen=True)
class Point:
    X: QMatrix
    Y: QMatrix

    def __init__(self, X, Y):
        object.__setattr__(self, "X", qmatrix(X))
        object.__setattr__(self, "Y", qmatrix(Y))

    @property
    def r(self) -> int:
        return len(self.X)

    @property
    def s(self) -> int:
        return len(self.X[0]) if self.X else 0

    def assignment(self) -> dict[Variable, Fraction]:
        """Values of every coordinate variable at this point."""
        vals = {x(i + 1, j + 1): v for i, row in enumerate(self.X) for j, v in enumerate(row)}
        vals.update({y(j + 1, i + 1): v for j, row in enumerate(self.Y) for i, v in enumerate(row)})
        return vals

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "s": self.s,
            "X": [[_qstr(v) for v in row] for row in self.X],
            "Y": [[_qstr(v) for v in row] for row in self.Y],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "Point":
        try:
            p = cls([[Fraction(v) for v in row] for row in obj["X"]],
                    [[Fraction(v) for v in row] for row in obj["Y"]])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ShapeMismatch(f"malformed point: {exc}") from exc
        if "r" in obj and "s" in obj:
            _check_shape(GSVSpec(int(obj["r"]), int(obj["s"])), p)
        return p

    @classmethod
    def loads(cls, text: str) -> "Point":
        return cls.from_json(json.loads(text))


def _qstr(v: Fraction) -> str:
    v = Fraction(v)
    return f"{v.numerator}/{v.denominator}"


def _check_shape(spec: GSVSpec, p: Point) -> None:
    if qshape(p.X) != (spec.r, spec.s) or qshape(p.Y) != (spec.s, spec.r):
        raise ShapeMismatch(
            f"point has X {qshape(p.X)}, Y {qshape(p.Y)}; expected {(spec.r, spec.s)}, {(spec.s, spec.r)}"
        )


@dataclass(frozen=True, eq=False)
class Chart:
    """The chart on which ``minor_I(X)`` is invertible and the Y-rows in ``I`` are solved."""

    spec: GSVSpec
    index_set: tuple
    free_coords: tuple
    solved: Mapping[Variable, LocalizedElement]

    def coordinates_at(self, p: Point) -> dict[Variable, Fraction]:
        vals = p.assignment()
        return {v: vals[v] for v in self.free_coords}


def defining_equations(spec: GSVSpec) -> list[list[Polynomial]]:
    """Entries of ``XY - I`` in the generic matrices."""
    r, s = spec.r, spec.s
    eqs = []
    for i in range(1, r + 1):
        row = []
        for k in range(1, r + 1):
            p = Polynomial.constant(-1 if i == k else 0)
            for j in range(1, s + 1):
                p = p + Polynomial.variable(x(i, j)) * Polynomial.variable(y(j, k))
            row.append(p)
        eqs.append(row)
    return eqs


def residual(spec: GSVSpec, p: Point) -> QMatrix:
    _check_shape(spec, p)
    XY = qmatmul(p.X, p.Y)
    I = qidentity(spec.r)
    return tuple(tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(XY, I))


def contains(spec: GSVSpec, p: Point) -> bool:
    return all(v == 0 for row in residual(spec, p) for v in row)


def require_on_variety(spec: GSVSpec, p: Point) -> None:
    res = residual(spec, p)
    for i, row in enumerate(res):
        for k, v in enumerate(row):
            if v != 0:
                raise NotOnVariety(
                    f"XY - I has entry ({i + 1},{k + 1}) = {v}", entry=(i + 1, k + 1), residual=v
                )


def dimension(spec: GSVSpec) -> int:
    return 2 * spec.r * spec.s - spec.r ** 2


def ambient_variables(spec: GSVSpec) -> list[Variable]:
    r, s = spec.r, spec.s
    return [x(i, j) for i in range(1, r + 1) for j in range(1, s + 1)] + [
        y(j, i) for j in range(1, s + 1) for i in range(1, r + 1)
    ]


@lru_cache(maxsize=None)
def _defining_jacobian(spec: GSVSpec) -> tuple:
    variables = ambient_variables(spec)
    eqs = [e for row in defining_equations(spec) for e in row]
    return tuple(tuple(e.derivative(v) for v in variables) for e in eqs)


def jacobian_rank_at(spec: GSVSpec, p: Point) -> int:
    """Rank of the r^2 x 2rs matrix of partials of ``XY - I`` at an on-variety point."""
    require_on_variety(spec, p)
    vals = p.assignment()
    return rank([[d.evaluate(vals) for d in row] for row in _defining_jacobian(spec)])


def _check_index_set(spec: GSVSpec, index_set: Sequence[int]) -> tuple:
    index_set = tuple(index_set)
    if len(index_set) != spec.r or list(index_set) != sorted(set(index_set)):
        raise ValueError(f"index set must be {spec.r} increasing column indices, got {index_set}")
    if not all(1 <= c <= spec.s for c in index_set):
        raise ValueError(f"column index out of range 1..{spec.s}: {index_set}")
    return index_set


def chart_free_coords(spec: GSVSpec, index_set: Sequence[int]) -> tuple:
    """All of X, then the Y-rows outside ``index_set``; no solving needed."""
    index_set = _check_index_set(spec, index_set)
    r, s = spec.r, spec.s
    free = [x(i, j) for i in range(1, r + 1) for j in range(1, s + 1)]
    free += [y(j, i) for j in range(1, s + 1) if j not in index_set for i in range(1, r + 1)]
    return tuple(free)


@lru_cache(maxsize=None)
def build_chart(spec: GSVSpec, index_set: tuple) -> Chart:
    """Solve the Y-rows in ``index_set`` as ``X_I^-1 (I - X_Ic Y_Ic)``."""
    index_set = _check_index_set(spec, index_set)
    r, s = spec.r, spec.s
    comp = [c for c in range(1, s + 1) if c not in index_set]
    X = generic_x(r, s)
    Y = generic_y(r, s)
    X_I = X.columns([c - 1 for c in index_set])
    rhs = SymMatrix.identity(r)
    if comp:
        X_c = X.columns([c - 1 for c in comp])
        Y_c = SymMatrix([Y.rows[c - 1] for c in comp])
        rhs = rhs - X_c @ Y_c
    sol = adjugate_solve(X_I, rhs)
    solved = {y(row, k + 1): sol[a, k] for a, row in enumerate(index_set) for k in range(r)}
    return Chart(spec, index_set, chart_free_coords(spec, index_set), solved)


def chart_atlas(spec: GSVSpec) -> list[Chart]:
    return [build_chart(spec, I) for I in all_index_sets(spec.r, spec.s)]


def chart_residual(chart: Chart) -> list[list[LocalizedElement]]:
    """``XY - I`` after substituting the solved Y-rows; zero for a correct chart."""
    return [[e.substitute(chart.solved) for e in row] for row in defining_equations(chart.spec)]


def chart_identity_holds(chart: Chart) -> bool:
    return all(e.is_zero() for row in chart_residual(chart) for e in row)


def stiefel_embed(X) -> Point:
    """The point ``(X, X^T)`` of GSV for a matrix with orthonormal rows."""
    X = qmatrix(X)
    if qmatmul(X, qtranspose(X)) != qidentity(len(X)):
        raise NotOrthonormalRows("X X^T is not the identity")
    return Point(X, qtranspose(X))


def rational_sphere_point(u: Sequence) -> tuple[Fraction, ...]:
    """Rational point of the unit n-sphere from ``u`` in Q^n (inverse stereographic projection)."""
    u = [Fraction(v) for v in u]
    n2 = sum(v * v for v in u)
    return tuple(2 * v / (n2 + 1) for v in u) + ((n2 - 1) / (n2 + 1),)
