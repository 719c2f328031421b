"""Exact linear algebra over polynomials, localized elements and rationals.

Symbolic matrices hold :class:`~gsv.symalg.LocalizedElement` entries.  Plain
rational matrices are tuples of tuples of :class:`~fractions.Fraction` and go
through the ``q*`` helpers, :func:`rank` and :func:`kernel_basis`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Sequence

from .errors import ShapeMismatch, SingularSpecialization
from .symalg import (
    LocalizedElement,
    Polynomial,
    _den_poly,
    _perm_sign,
    as_local,
    factor_minor_product,
    poly_exact_div,
    x,
    y,
)

COFACTOR_MAX_DIM = 4

QMatrix = tuple  # tuple of row tuples of Fraction


@dataclass(frozen=True)
class SymMatrix:
    rows: tuple

    def __init__(self, rows: Sequence[Sequence]):
        data = tuple(tuple(as_local(e) for e in row) for row in rows)
        if data and len({len(r) for r in data}) != 1:
            raise ShapeMismatch("rows of unequal length")
        object.__setattr__(self, "rows", data)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def columns(self, cols: Sequence[int]) -> "SymMatrix":
        """Submatrix of the given 0-based columns."""
        return SymMatrix([[row[c] for c in cols] for row in self.rows])

    def transpose(self) -> "SymMatrix":
        return SymMatrix(list(zip(*self.rows)))

    def __matmul__(self, other: "SymMatrix") -> "SymMatrix":
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for row in self.rows:
            new_row = []
            for j in range(other.ncols):
                acc = LocalizedElement.zero()
                for k, a in enumerate(row):
                    b = other.rows[k][j]
                    if not a.is_zero() and not b.is_zero():
                        acc = acc + a * b
                new_row.append(acc)
            out.append(new_row)
        return SymMatrix(out)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} vs {other.shape}")
        return SymMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix) or self.shape != other.shape:
            return NotImplemented if not isinstance(other, SymMatrix) else False
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    __hash__ = None

    def evaluate(self, point) -> QMatrix:
        return tuple(tuple(e.evaluate(point) for e in row) for row in self.rows)

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_rational(cls, m) -> "SymMatrix":
        return cls([[Fraction(v) for v in row] for row in m])


def generic_x(r: int, s: int) -> SymMatrix:
    return SymMatrix([[Polynomial.variable(x(i, j)) for j in range(1, s + 1)] for i in range(1, r + 1)])


def generic_y(r: int, s: int) -> SymMatrix:
    return SymMatrix([[Polynomial.variable(y(j, i)) for i in range(1, r + 1)] for j in range(1, s + 1)])


# -- determinants --------------------------------------------------------


def det_cofactor(M: SymMatrix) -> LocalizedElement:
    """Laplace expansion along the first row."""
    if M.nrows != M.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    return _cofactor(M.rows)


def _cofactor(rows) -> LocalizedElement:
    n = len(rows)
    if n == 0:
        return LocalizedElement.one()
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = LocalizedElement.zero()
    for j, a in enumerate(rows[0]):
        if a.is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = a * _cofactor(sub)
        total = total + term if j % 2 == 0 else total - term
    return total


def bareiss(rows: list[list], exact_div: Callable, is_zero: Callable, one) -> tuple:
    """Fraction-free elimination over an integral domain, in place.

    Returns ``(rank, det_or_none, sign)``.  ``det`` is the determinant for a
    square matrix of full rank and ``None`` otherwise.  The pivot at each
    step is the first nonzero entry in the current column.
    """
    n, m = len(rows), len(rows[0]) if rows else 0
    prev = one
    sign = 1
    r = 0
    for c in range(m):
        if r == n:
            break
        piv = next((i for i in range(r, n) if not is_zero(rows[i][c])), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        p = rows[r][c]
        same = p == prev
        prev_one = prev == one
        for i in range(r + 1, n):
            row = rows[i]
            b = row[c]
            prow = rows[r]
            if is_zero(b):
                if not same:
                    for j in range(c + 1, m):
                        if not is_zero(row[j]):
                            row[j] = exact_div(p * row[j], prev)
            else:
                for j in range(c + 1, m):
                    t = p * row[j] if is_zero(prow[j]) else p * row[j] - b * prow[j]
                    row[j] = t if prev_one or is_zero(t) else exact_div(t, prev)
            row[c] = 0 * b
        prev = p
        r += 1
    if n == m and r == n:
        d = rows[n - 1][n - 1] if n else one
        return r, (d if sign == 1 else -d), sign
    return r, None, sign


def _poly_zero(p) -> bool:
    return p.is_zero()


def det_bareiss(M: SymMatrix) -> LocalizedElement:
    """Clear each row's denominator, eliminate fraction-free, divide the cleared product back."""
    if M.nrows != M.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    n = M.nrows
    if n == 0:
        return LocalizedElement.one()
    total_den: dict = {}
    rows = []
    for row in M.rows:
        row_den: dict = {}
        for e in row:
            for k, ex in e.den:
                row_den[k] = max(row_den.get(k, 0), ex)
        cleared = []
        for e in row:
            d = dict(e.den)
            scale = _den_poly((k, ex - d.get(k, 0)) for k, ex in row_den.items())
            cleared.append(e.numerator * scale)
        for k, ex in row_den.items():
            total_den[k] = total_den.get(k, 0) + ex
        rows.append(cleared)
    _, d, _ = bareiss(rows, poly_exact_div, _poly_zero, Polynomial.constant(1))
    if d is None:
        return LocalizedElement.zero()
    return LocalizedElement(d, total_den).reduced()


def _peel_singletons(rows: list[list]) -> tuple[LocalizedElement, list[list]]:
    """Laplace-expand along rows and columns holding a single nonzero entry.

    Returns ``(factor, core)`` with ``det(rows) == factor * det(core)``.
    """
    factor = LocalizedElement.one()
    sign = 1
    while rows:
        n = len(rows)
        hit = None
        for i, row in enumerate(rows):
            nz = [j for j, e in enumerate(row) if not e.is_zero()]
            if len(nz) <= 1:
                hit = (i, nz[0] if nz else None)
                break
        if hit is None:
            for j in range(n):
                nz = [i for i in range(n) if not rows[i][j].is_zero()]
                if len(nz) <= 1:
                    hit = (nz[0] if nz else None, j)
                    break
        if hit is None:
            break
        i, j = hit
        if i is None or j is None:
            return LocalizedElement.zero(), []
        factor = factor * rows[i][j]
        if (i + j) % 2:
            sign = -sign
        rows = [row[:j] + row[j + 1:] for k, row in enumerate(rows) if k != i]
    return (factor if sign == 1 else -factor), rows


def _components(rows: list[list]) -> list[tuple[list[int], list[int]]]:
    """Connected components of the bipartite row/column graph of nonzero entries."""
    n = len(rows)
    parent = list(range(2 * n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i, row in enumerate(rows):
        for j, e in enumerate(row):
            if not e.is_zero():
                parent[find(i)] = find(n + j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), ([], []))[0].append(i)
    for j in range(n):
        groups.setdefault(find(n + j), ([], []))[1].append(j)
    return sorted(groups.values(), key=lambda g: (g[0] or [n])[0])


def _core_det(rows: list[list]) -> LocalizedElement:
    if len(rows) <= COFACTOR_MAX_DIM:
        return _cofactor(rows)
    comps = _components(rows)
    if len(comps) == 1:
        return det_bareiss(SymMatrix(rows))
    if any(len(r) != len(c) for r, c in comps):
        return LocalizedElement.zero()
    row_order = [i for r, _ in comps for i in r]
    col_order = [j for _, c in comps for j in c]
    total = LocalizedElement.one()
    for r, c in comps:
        total = total * _core_det([[rows[i][j] for j in c] for i in r])
    sign = _perm_sign(row_order) * _perm_sign(col_order)
    return total if sign == 1 else -total


def det(M: SymMatrix) -> LocalizedElement:
    """Exact determinant.

    Singleton rows and columns are expanded first and the remaining core is
    split into independent diagonal blocks.  Blocks go to cofactor expansion
    up to ``COFACTOR_MAX_DIM`` and to Bareiss above it.
    """
    if M.nrows != M.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    if M.nrows <= COFACTOR_MAX_DIM:
        return det_cofactor(M)
    factor, core = _peel_singletons([list(r) for r in M.rows])
    if factor.is_zero():
        return factor
    return factor * _core_det(core)


def minor(X: SymMatrix, index_set: Sequence[int]) -> Polynomial:
    """Determinant of the square submatrix of ``X`` on the (1-based) columns ``index_set``."""
    if len(index_set) != X.nrows:
        raise ShapeMismatch(f"index set of size {len(index_set)} for {X.nrows} rows")
    if list(index_set) != sorted(set(index_set)) or not all(1 <= c <= X.ncols for c in index_set):
        raise ValueError(f"invalid index set {index_set}")
    d = det(X.columns([c - 1 for c in index_set]))
    if not d.is_polynomial():
        raise TypeError("minor of a matrix with denominators")
    return d.numerator


def minor_value(X: QMatrix, index_set: Sequence[int]) -> Fraction:
    """``minor_I`` of a rational matrix, columns 1-based."""
    return qdet([[row[c - 1] for c in index_set] for row in X])


def adjugate(M: SymMatrix) -> SymMatrix:
    n = M.nrows
    if n == 1:
        return SymMatrix([[1]])
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [row[:j] + row[j + 1:] for k, row in enumerate(M.rows) if k != i]
            c = det(SymMatrix(sub))
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return SymMatrix(out)


def adjugate_solve(M: SymMatrix, B: SymMatrix) -> SymMatrix:
    """Return ``M^-1 B`` with every entry written over ``det(M)``.

    ``det(M)`` must be a nonzero constant times a product of maximal minors so
    the result stays in the localized ring.
    """
    if M.nrows != M.ncols or M.ncols != B.nrows:
        raise ShapeMismatch(f"cannot solve {M.shape} against {B.shape}")
    d = det(M)
    if d.is_zero():
        raise SingularSpecialization("matrix has zero determinant")
    if not d.is_polynomial():
        raise TypeError("adjugate_solve expects polynomial entries")
    c, factors = factor_minor_product(d.numerator)
    adj_b = adjugate(M) @ B
    out = []
    for row in adj_b.rows:
        out.append([LocalizedElement((e.numerator / c) if c != 1 else e.numerator,
                                     _merge(e.den, factors)) for e in row])
    return SymMatrix(out)


def _merge(den, factors) -> dict:
    out = dict(den)
    for k, e in factors.items():
        out[k] = out.get(k, 0) + e
    return out


# -- rational matrices ---------------------------------------------------


def qmatrix(rows) -> QMatrix:
    return tuple(tuple(Fraction(v) for v in row) for row in rows)


def qidentity(n: int) -> QMatrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def qzeros(n: int, m: int) -> QMatrix:
    return tuple(tuple(Fraction(0) for _ in range(m)) for _ in range(n))


def qshape(A: QMatrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def qmatmul(A: QMatrix, B: QMatrix) -> QMatrix:
    if qshape(A)[1] != len(B):
        raise ShapeMismatch(f"cannot multiply {qshape(A)} by {qshape(B)}")
    cols = list(zip(*B))
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols) for row in A)


def qtranspose(A: QMatrix) -> QMatrix:
    return tuple(zip(*A))


def qdet(A: QMatrix) -> Fraction:
    n, m = qshape(A)
    if n != m:
        raise ShapeMismatch("determinant of a non-square matrix")
    if n == 0:
        return Fraction(1)
    rows = [[Fraction(v) for v in r] for r in A]
    _, d, _ = bareiss(rows, lambda a, b: a / b, lambda v: v == 0, Fraction(1))
    return Fraction(0) if d is None else Fraction(d)


def qinverse(A: QMatrix) -> QMatrix:
    """Gauss-Jordan inverse; raises :class:`SingularSpecialization` for singular input."""
    n, m = qshape(A)
    if n != m:
        raise ShapeMismatch("inverse of a non-square matrix")
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if piv is None:
            raise SingularSpecialization("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [v / p for v in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[c])]
    return tuple(tuple(row[n:]) for row in aug)


def _as_qrows(M) -> list[list[Fraction]]:
    if isinstance(M, SymMatrix):
        rows = []
        for row in M.rows:
            if not all(e.is_constant() for e in row):
                raise TypeError("expected a matrix of rational constants")
            rows.append([Fraction(e.numerator.constant_value()) for e in row])
        return rows
    return [[Fraction(v) for v in row] for row in M]


def rank(M) -> int:
    """Exact rank; rows are scaled to integers and eliminated fraction-free."""
    rows = _as_qrows(M)
    if not rows or not rows[0]:
        return 0
    irows = []
    for row in rows:
        den = lcm(*(v.denominator for v in row))
        irows.append([int(v * den) for v in row])
    r, _, _ = bareiss(irows, lambda a, b: a // b, lambda v: v == 0, 1)
    return r


def rref(M) -> tuple[list[list[Fraction]], list[int]]:
    rows = _as_qrows(M)
    n = len(rows)
    m = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows, pivots


def kernel_basis(M) -> list[tuple[Fraction, ...]]:
    """Basis of the right null space.

    Each vector is scaled to a primitive integer vector whose first nonzero
    entry is positive, so the basis is deterministic.
    """
    rows, pivots = rref(M)
    m = len(rows[0]) if rows else (M.ncols if isinstance(M, SymMatrix) else 0)
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * m
        vec[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][f]
        den = lcm(*(v.denominator for v in vec))
        ints = [int(v * den) for v in vec]
        g = 0
        for v in ints:
            g = gcd(g, v)
        lead = next(v for v in ints if v != 0)
        scale = g if lead > 0 else -g
        basis.append(tuple(Fraction(v // scale) for v in ints))
    return basis


def is_invertible(A: QMatrix) -> bool:
    return qdet(A) != 0


def permutation_matrix(perm: Sequence[int]) -> QMatrix:
    """Matrix sending e_i to e_perm[i] (0-based permutation)."""
    n = len(perm)
    out = [[Fraction(0)] * n for _ in range(n)]
    for i, p in enumerate(perm):
        out[p][i] = Fraction(1)
    return tuple(tuple(r) for r in out)


def all_index_sets(r: int, s: int):
    return list(itertools.combinations(range(1, s + 1), r))
