"""Exact arithmetic kernel.

Sparse multivariate polynomials over the rationals in the matrix entries
``x{i}_{j}`` and ``y{j}_{i}``, and *localized elements*: fractions whose
denominator is a product of powers of maximal minors of the generic matrix
``X``.  Those are the only denominators that chart computations produce, so
equality can be decided by cross-multiplication without a gcd engine.

Coefficients are Python ``int`` or :class:`fractions.Fraction`; nothing in
this module touches floating point.
"""

from __future__ import annotations

import heapq
import itertools
import re
from math import isqrt
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Union

from .errors import NonMinorDenominator, NotDivisible, PolySyntaxError

Rational = Union[int, Fraction]

_KIND_CODE = {"x": 0, "y": 1}
_KIND_NAME = ("x", "y")


class Variable(NamedTuple):
    """A matrix entry: ``Variable("x", i, j)`` is x_ij, ``Variable("y", j, i)`` is y_ji."""

    kind: str
    row: int
    col: int

    @property
    def key(self) -> int:
        # Integer keys sort X before Y, then row-major.
        return (_KIND_CODE[self.kind] << 40) | (self.row << 20) | self.col

    def __str__(self) -> str:
        return f"{self.kind}{self.row}_{self.col}"


def x(i: int, j: int) -> Variable:
    return Variable("x", i, j)


def y(j: int, i: int) -> Variable:
    return Variable("y", j, i)


@lru_cache(maxsize=None)
def _var_of_key(key: int) -> Variable:
    return Variable(_KIND_NAME[key >> 40], (key >> 20) & 0xFFFFF, key & 0xFFFFF)


# A monomial is a Python int packing one 16-bit exponent slot per variable.
# The slot of x_ij / y_ij comes from the Cantor pairing of (i-1, j-1), so the
# encoding does not depend on the matrix sizes.  Bit 15 of every slot must stay
# clear; it serves as a guard bit for divisibility tests and overflow checks.
# The constant monomial is 0.
Monomial = int

_SLOT_BITS = 16
_SLOT_MASK = (1 << _SLOT_BITS) - 1


def _slot_of(kind: int, row: int, col: int) -> int:
    a, b = row - 1, col - 1
    return 2 * ((a + b) * (a + b + 1) // 2 + b) + kind


@lru_cache(maxsize=None)
def _shift_of_key(key: int) -> int:
    v = _var_of_key(key)
    return _SLOT_BITS * _slot_of(_KIND_CODE[v.kind], v.row, v.col)


@lru_cache(maxsize=None)
def _key_of_slot(slot: int) -> int:
    kind, z = slot & 1, slot >> 1
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    a = w - b
    return Variable(_KIND_NAME[kind], a + 1, b + 1).key


def _shift(v: Variable) -> int:
    return _shift_of_key(v.key)


def _encode(pairs) -> Monomial:
    return sum(e << _shift_of_key(k) for k, e in pairs)


@lru_cache(maxsize=1 << 18)
def _decode(m: Monomial) -> tuple:
    """(variable key, exponent) pairs sorted by key."""
    out = []
    slot = 0
    while m:
        e = m & _SLOT_MASK
        if e:
            out.append((_key_of_slot(slot), e))
        m >>= _SLOT_BITS
        slot += 1
    out.sort()
    return tuple(out)


@lru_cache(maxsize=None)
def _guard_slots(nslots: int) -> int:
    return sum(1 << (_SLOT_BITS * i + _SLOT_BITS - 1) for i in range(nslots))


def _guard(nbits: int) -> int:
    return _guard_slots(nbits // _SLOT_BITS + 1)


def _mono_div(a: Monomial, b: Monomial):
    """Return a / b, or None when b does not divide a."""
    if not b:
        return a
    g = _guard(max(a.bit_length(), b.bit_length()))
    d = (a | g) - b
    if d & g != g:
        return None
    return d ^ g


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in _decode(m))


@lru_cache(maxsize=1 << 18)
def _grlex_key(m: Monomial):
    # Ascending order of this key is descending graded-lex order.
    d = _decode(m)
    return (-sum(e for _, e in d), tuple((k, -e) for k, e in d))


def _check_overflow(terms) -> None:
    acc = 0
    for m in terms:
        acc |= m
    if acc & _guard(acc.bit_length()):
        raise OverflowError("exponent exceeds the packed monomial range")


def _div_coeff(a: Rational, b: Rational) -> Rational:
    if isinstance(a, int) and isinstance(b, int) and a % b == 0:
        return a // b
    q = Fraction(a) / Fraction(b)
    return q.numerator if q.denominator == 1 else q


class Polynomial:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Rational] | None = None):
        self._terms = {m: c for m, c in (terms or {}).items() if c != 0}
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def constant(cls, c: Rational) -> "Polynomial":
        return cls._raw({0: c} if c != 0 else {})

    @classmethod
    def variable(cls, v: Variable) -> "Polynomial":
        return cls._raw({1 << _shift(v): 1})

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[Rational, Mapping[Variable, int]]]) -> "Polynomial":
        """Build from ``(coefficient, {Variable: exponent})`` pairs; like terms are combined."""
        out: dict = {}
        for c, exps in terms:
            m = sum(e << _shift(v) for v, e in exps.items() if e)
            out[m] = out.get(m, 0) + c
        return cls(out)

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        """Yield ``({Variable: exponent}, coefficient)`` in canonical order."""
        for m in sorted(self._terms, key=_grlex_key):
            yield {_var_of_key(k): e for k, e in _decode(m)}, self._terms[m]

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self._terms.get(0, 0)

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=-1)

    def variables(self) -> set[Variable]:
        return {_var_of_key(k) for m in self._terms for k, _ in _decode(m)}

    def leading_term(self):
        m = min(self._terms, key=_grlex_key)
        return m, self._terms[m]

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        if not other._terms:
            return self
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._terms, other._terms
        if not a or not b:
            return Polynomial._raw({})
        if len(b) == 1 and 0 in b:
            c0 = b[0]
            return self if c0 == 1 else Polynomial._raw({m: c * c0 for m, c in a.items()})
        if len(a) == 1 and 0 in a:
            return other * self
        out: dict = {}
        get = out.get
        for ma, ca in a.items():
            for mb, cb in b.items():
                m = ma + mb
                out[m] = get(m, 0) + ca * cb
        _check_overflow(out)
        return Polynomial._raw({m: c for m, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return Polynomial._raw({m: _div_coeff(c, other) for m, c in self._terms.items()})
        return NotImplemented

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        return poly_exact_div(self, other)

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus and evaluation -----------------------------------------

    def derivative(self, v: Variable) -> "Polynomial":
        sh = _shift(v)
        unit = 1 << sh
        out: dict = {}
        for m, c in self._terms.items():
            e = (m >> sh) & _SLOT_MASK
            if e:
                nm = m - unit
                out[nm] = out.get(nm, 0) + c * e
        return Polynomial._raw({m: c for m, c in out.items() if c != 0})

    def evaluate(self, point: Mapping[Variable, Rational]) -> Rational:
        vals = {v.key: val for v, val in point.items()}
        total: Rational = 0
        for m, c in self._terms.items():
            t = c
            for k, e in _decode(m):
                try:
                    t = t * vals[k] ** e
                except KeyError:
                    raise KeyError(f"no value for variable {_var_of_key(k)}") from None
            total += t
        return total

    def specialize(self, point: Mapping[Variable, Rational]) -> "Polynomial":
        """Substitute rational values for some variables."""
        vals = {v.key: val for v, val in point.items()}
        out: dict = {}
        for m, c in self._terms.items():
            nm = m
            for k, e in _decode(m):
                if k in vals:
                    c = c * vals[k] ** e
                    nm -= e << _shift_of_key(k)
            if c != 0:
                out[nm] = out.get(nm, 0) + c
        return Polynomial._raw({m: c for m, c in out.items() if c != 0})

    def substitute(self, mapping: Mapping[Variable, "LocalizedElement | Polynomial"]) -> "LocalizedElement":
        """Replace variables by localized elements; unmapped variables stay as they are."""
        subs = {v.key: as_local(e) for v, e in mapping.items()}
        powers: dict = {}

        def power(k, e):
            pe = powers.get((k, e))
            if pe is None:
                pe = subs[k] ** e
                powers[(k, e)] = pe
            return pe

        total = LocalizedElement.zero()
        for m, c in self._terms.items():
            keep = m
            term = None
            for k, e in _decode(m):
                if k in subs:
                    term = power(k, e) if term is None else term * power(k, e)
                    keep -= e << _shift_of_key(k)
            head = Polynomial._raw({keep: c})
            total = total + (LocalizedElement(head) if term is None else term * head)
        return total

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Polynomial({format_poly(self)!r})"


def _as_poly(obj):
    if isinstance(obj, Polynomial):
        return obj
    if isinstance(obj, (int, Fraction)):
        return Polynomial.constant(obj)
    return NotImplemented


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def poly_exact_div(a: Polynomial, b: Polynomial) -> Polynomial:
    """Quotient of an exact division; raises :class:`NotDivisible` otherwise."""
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    bt = b._terms
    if len(bt) == 1:
        (mb, cb), = bt.items()
        out = {}
        for m, c in a._terms.items():
            q = _mono_div(m, mb)
            if q is None:
                raise NotDivisible("monomial divisor does not divide every term")
            out[q] = _div_coeff(c, cb)
        return Polynomial._raw(out)
    mb, cb = b.leading_term()
    rem = dict(a._terms)
    heap = [(_grlex_key(m), m) for m in rem]
    heapq.heapify(heap)
    quot: dict = {}
    while heap:
        _, m = heapq.heappop(heap)
        c = rem.get(m)
        if c is None:
            continue
        t = _mono_div(m, mb)
        if t is None:
            raise NotDivisible(f"leading monomial of remainder not divisible ({len(rem)} terms left)")
        qc = _div_coeff(c, cb)
        quot[t] = qc
        for mm, cc in bt.items():
            pm = t + mm
            old = rem.get(pm)
            new = (old or 0) - qc * cc
            if new == 0:
                if old is not None:
                    del rem[pm]
            else:
                if old is None:
                    heapq.heappush(heap, (_grlex_key(pm), pm))
                rem[pm] = new
    return Polynomial._raw(quot)


# -- minors of the generic X ---------------------------------------------

IndexSet = tuple  # sorted 1-based column indices


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def minor_polynomial(index_set: IndexSet) -> Polynomial:
    """Determinant of rows 1..r and columns ``index_set`` of the generic r x s matrix X."""
    r = len(index_set)
    terms: dict = {}
    for perm in itertools.permutations(range(r)):
        m = sum(1 << _shift(x(i + 1, index_set[perm[i]])) for i in range(r))
        terms[m] = _perm_sign(perm)
    return Polynomial._raw(terms)


@lru_cache(maxsize=None)
def _minor_power(index_set: IndexSet, e: int) -> Polynomial:
    return minor_polynomial(index_set) ** e


def _den_poly(den) -> Polynomial:
    p = Polynomial.constant(1)
    for index_set, e in den:
        p = p * _minor_power(index_set, e)
    return p


def factor_minor_product(p: Polynomial) -> tuple[Rational, dict]:
    """Write ``p`` as ``c * prod(minor_I ** e_I)``.

    Maximal minors of a generic matrix are irreducible and pairwise
    non-associate, so greedy trial division finds the factorization when it
    exists.  Raises :class:`NonMinorDenominator` otherwise.
    """
    if p.is_zero():
        raise ZeroDivisionError("zero has no minor factorization")
    if p.is_constant():
        return p.constant_value(), {}
    vs = p.variables()
    if any(v.kind != "x" for v in vs):
        raise NonMinorDenominator(f"{format_poly(p)} involves Y entries")
    r = max(v.row for v in vs)
    cols = sorted({v.col for v in vs})
    factors: dict = {}
    for index_set in itertools.combinations(cols, r):
        m = minor_polynomial(index_set)
        while p.degree() >= r:
            try:
                p = poly_exact_div(p, m)
            except NotDivisible:
                break
            factors[index_set] = factors.get(index_set, 0) + 1
    if not p.is_constant():
        raise NonMinorDenominator("denominator is not a product of maximal minors")
    return p.constant_value(), factors


# -- localized elements --------------------------------------------------


class LocalizedElement:
    """An element ``poly * prod(minor_I ** k_I)`` of the ring localized at the maximal minors.

    ``k_I`` may be negative; the negative part is the denominator.  Keeping
    minor powers factored lets identical factors cancel without any gcd, and
    equality is still decided by cross-multiplying to a polynomial identity.
    """

    __slots__ = ("poly", "exps", "_num")

    def __init__(self, numerator: Polynomial, den: Mapping[IndexSet, int] | Iterable = ()):
        if isinstance(numerator, (int, Fraction)):
            numerator = Polynomial.constant(numerator)
        items = den.items() if isinstance(den, Mapping) else den
        self.poly = numerator
        self.exps = () if numerator.is_zero() else tuple(
            sorted((tuple(k), -e) for k, e in items if e)
        )
        self._num = None

    @classmethod
    def _make(cls, poly: Polynomial, exps: Mapping[IndexSet, int]) -> "LocalizedElement":
        obj = cls.__new__(cls)
        obj.poly = poly
        obj.exps = () if poly.is_zero() else tuple(sorted((k, e) for k, e in exps.items() if e))
        obj._num = None
        return obj

    @classmethod
    def zero(cls) -> "LocalizedElement":
        return cls(Polynomial.constant(0))

    @classmethod
    def one(cls) -> "LocalizedElement":
        return cls(Polynomial.constant(1))

    @classmethod
    def minor(cls, index_set: IndexSet, e: int = 1) -> "LocalizedElement":
        """``minor_I ** e`` for any integer ``e`` (negative means a denominator)."""
        return cls._make(Polynomial.constant(1), {tuple(index_set): e})

    @property
    def numerator(self) -> Polynomial:
        if self._num is None:
            self._num = self.poly * _den_poly((k, e) for k, e in self.exps if e > 0)
        return self._num

    @property
    def den(self) -> tuple:
        return tuple((k, -e) for k, e in self.exps if e < 0)

    @property
    def denominator_factors(self) -> dict:
        return dict(self.den)

    def denominator(self) -> Polynomial:
        return _den_poly(self.den)

    def is_zero(self) -> bool:
        return self.poly.is_zero()

    def is_polynomial(self) -> bool:
        return all(e > 0 for _, e in self.exps)

    def is_constant(self) -> bool:
        return self.poly.is_constant() and not self.exps

    # -- arithmetic -------------------------------------------------------

    def _split(self, other: "LocalizedElement"):
        """Polynomials ``pa``, ``pb`` and shared exponents ``m`` with self = pa*M^m, other = pb*M^m."""
        da, db = dict(self.exps), dict(other.exps)
        common = {k: min(da.get(k, 0), db.get(k, 0)) for k in set(da) | set(db)}
        pa = self.poly * _den_poly((k, da.get(k, 0) - e) for k, e in common.items())
        pb = other.poly * _den_poly((k, db.get(k, 0) - e) for k, e in common.items())
        return pa, pb, common

    def __add__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.exps == other.exps:
            return LocalizedElement._make(self.poly + other.poly, dict(self.exps))
        pa, pb, common = self._split(other)
        return LocalizedElement._make(pa + pb, common)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedElement._make(-self.poly, dict(self.exps))

    def __sub__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        exps = dict(self.exps)
        for k, e in other.exps:
            exps[k] = exps.get(k, 0) + e
        return LocalizedElement._make(self.poly * other.poly, exps)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        return LocalizedElement._make(self.poly ** n, {k: e * n for k, e in self.exps})

    def __truediv__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero")
        c, factors = factor_minor_product(other.poly)
        exps = dict(self.exps)
        for k, e in other.exps:
            exps[k] = exps.get(k, 0) - e
        for k, e in factors.items():
            exps[k] = exps.get(k, 0) - e
        poly = self.poly if c == 1 else self.poly / c
        return LocalizedElement._make(poly, exps)

    def __rtruediv__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __eq__(self, other):
        other = as_local(other, strict=False)
        if other is NotImplemented:
            return NotImplemented
        if self.exps == other.exps:
            return self.poly == other.poly
        pa, pb, _ = self._split(other)
        return pa == pb

    __hash__ = None

    def reduced(self) -> "LocalizedElement":
        """Cancel denominator minors that divide the numerator."""
        poly = self.poly
        exps = dict(self.exps)
        for k, e in self.exps:
            if e >= 0:
                continue
            m = minor_polynomial(k)
            while exps[k] < 0 and poly.degree() >= len(k):
                try:
                    poly = poly_exact_div(poly, m)
                except NotDivisible:
                    break
                exps[k] += 1
        return LocalizedElement._make(poly, exps)

    def derivative(self, v: Variable) -> "LocalizedElement":
        dp = self.poly.derivative(v)
        if not self.exps:
            return LocalizedElement._make(dp, {})
        # d(p * prod m_k^e_k) = (p' prod m_k + p sum e_k m_k' prod_{j != k} m_j) * prod m_k^(e_k - 1)
        minors = [(k, e, minor_polynomial(k)) for k, e in self.exps]
        moving = [(k, e, m, m.derivative(v)) for k, e, m in minors]
        moving = [t for t in moving if not t[3].is_zero()]
        if not moving:
            return LocalizedElement._make(dp, dict(self.exps))
        prod_all = Polynomial.constant(1)
        for _, _, m, _ in moving:
            prod_all = prod_all * m
        poly = dp * prod_all
        for idx, (k, e, m, dm) in enumerate(moving):
            others = Polynomial.constant(e)
            for jdx, (_, _, mj, _) in enumerate(moving):
                if jdx != idx:
                    others = others * mj
            poly = poly + self.poly * dm * others
        exps = dict(self.exps)
        for k, _, _, _ in moving:
            exps[k] -= 1
        return LocalizedElement._make(poly, exps)

    def evaluate(self, point: Mapping[Variable, Rational]) -> Fraction:
        value = Fraction(self.poly.evaluate(point))
        for k, e in self.exps:
            mv = Fraction(minor_polynomial(k).evaluate(point))
            if mv == 0 and e < 0:
                raise ZeroDivisionError("point lies on a denominator minor")
            value *= mv ** e
        return value

    def __str__(self) -> str:
        if not self.exps:
            return format_poly(self.poly)

        def name(k, e):
            label = "M" + ("".join(map(str, k)) if all(c < 10 for c in k) else ",".join(map(str, k)))
            return label if e == 1 else f"{label}^{e}"

        ups = [name(k, e) for k, e in self.exps if e > 0]
        downs = [name(k, -e) for k, e in self.exps if e < 0]
        text = format_poly(self.poly)
        if ups:
            text = "*".join(ups) if text == "1" else "*".join(ups) + f"*({text})"
        elif downs:
            text = f"({text})"
        return text + (f"/({'*'.join(downs)})" if downs else "")

    def __repr__(self) -> str:
        return f"LocalizedElement({self})"


def as_local(obj, strict: bool = True):
    if isinstance(obj, LocalizedElement):
        return obj
    if isinstance(obj, Polynomial):
        return LocalizedElement(obj)
    if isinstance(obj, (int, Fraction)):
        return LocalizedElement(Polynomial.constant(obj))
    if strict:
        raise TypeError(f"cannot convert {type(obj).__name__} to LocalizedElement")
    return NotImplemented


def local_arith(a: LocalizedElement, b: LocalizedElement, op: str) -> LocalizedElement:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# -- text format ---------------------------------------------------------

def _format_mono(m: Monomial) -> str:
    out = []
    for k, e in _decode(m):
        v = str(_var_of_key(k))
        out.append(v if e == 1 else f"{v}^{e}")
    return "*".join(out)


def format_poly(p: Polynomial) -> str:
    """Canonical text: terms in descending graded-lex order."""
    if p.is_zero():
        return "0"
    pieces = []
    for m in sorted(p._terms, key=_grlex_key):
        c = Fraction(p._terms[m])
        mag = abs(c)
        if not m:
            body = str(mag)
        elif mag == 1:
            body = _format_mono(m)
        else:
            body = f"{mag}*{_format_mono(m)}"
        if not pieces:
            pieces.append(("-" if c < 0 else "") + body)
        else:
            pieces.append(("- " if c < 0 else "+ ") + body)
    return " ".join(pieces)


_TOKEN = re.compile(
    r"(?P<num>\d+(?:/\d+)?)|(?P<var>[xy])(?P<row>\d+)_(?P<col>\d+)|(?P<op>[-+*^()\u2212])"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        mt = _TOKEN.match(text, pos)
        if not mt:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        if mt.group("num") is not None:
            num, den = (mt.group("num").split("/") + ["1"])[:2]
            if int(den) == 0:
                raise PolySyntaxError("zero denominator", text, pos)
            tokens.append(("num", Fraction(int(num), int(den)), pos))
        elif mt.group("var") is not None:
            row, col = int(mt.group("row")), int(mt.group("col"))
            if row < 1 or col < 1:
                raise PolySyntaxError("indices start at 1", text, pos)
            tokens.append(("var", Variable(mt.group("var"), row, col), pos))
        else:
            op = mt.group("op")
            tokens.append(("op", "-" if op == "\u2212" else op, pos))
        pos = mt.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_poly(text: str) -> Polynomial:
    """Parse sums of ``*``/``^`` products of rationals, variables and parenthesised groups."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def factor() -> Polynomial:
        kind, val, at = take()
        if kind == "num":
            base = Polynomial.constant(val.numerator if val.denominator == 1 else val)
        elif kind == "var":
            base = Polynomial.variable(val)
        elif (kind, val) == ("op", "("):
            base = expr()
            kind, val, at = take()
            if (kind, val) != ("op", ")"):
                raise PolySyntaxError("missing ')'", text, at)
        else:
            raise PolySyntaxError("expected a number, variable or '('", text, at)
        if peek()[:2] == ("op", "^"):
            take()
            kind, val, at = take()
            if kind != "num" or val.denominator != 1:
                raise PolySyntaxError("exponent must be a nonnegative integer", text, at)
            base = base ** int(val)
        return base

    def term() -> Polynomial:
        p = factor()
        while peek()[:2] == ("op", "*"):
            take()
            p = p * factor()
        return p

    def expr() -> Polynomial:
        sign = 1
        if peek()[0] == "op" and peek()[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
        total = sign * term()
        while peek()[0] == "op" and peek()[1] in "+-":
            sign = -1 if take()[1] == "-" else 1
            total = total + sign * term()
        return total

    total = expr()
    kind, val, at = peek()
    if kind != "end":
        raise PolySyntaxError(f"unexpected token {val!r}", text, at)
    return total
