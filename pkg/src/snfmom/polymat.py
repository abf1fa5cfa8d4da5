"""Dense matrices over :class:`~snfmom.polyring.Poly` and the exact kernels
used to certify diagonal factorizations.

The central routine is :func:`ldu_extract`: Doolittle elimination in the given
row/column order where every multiplier is an exact ring quotient.  When it
succeeds the input is ``L * diag(D) * U`` with unitriangular ``L`` and ``U``,
which is the evidence behind every Smith-normal-form claim in this package.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DivisionFailure,
    MultivariateInput,
    NoRingFactorization,
    NotAPermutation,
)
from .polyring import Poly, divides, exact_div, gcd_univariate, parse

DEFAULT_MINOR_BUDGET = 2_000_000

_ZERO = Poly.const(0)
_ONE = Poly.const(1)


def _p(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


class PolyMatrix:
    """Rectangular matrix of polynomials, treated as immutable."""

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, entries: Iterable[Iterable]):
        e = [[_p(x) for x in row] for row in entries]
        self.rows = len(e)
        self.cols = len(e[0]) if e else 0
        if any(len(r) != self.cols for r in e):
            raise DimensionMismatch("ragged rows")
        self._e = e

    @classmethod
    def build(cls, rows: int, cols: int, f: Callable[[int, int], Poly | int]) -> "PolyMatrix":
        return cls([[f(i, j) for j in range(cols)] for i in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls.build(n, n, lambda i, j: 1 if i == j else 0)

    @classmethod
    def diag(cls, d: Sequence, rows: int | None = None, cols: int | None = None) -> "PolyMatrix":
        rows = len(d) if rows is None else rows
        cols = rows if cols is None else cols
        return cls.build(rows, cols, lambda i, j: d[i] if i == j and i < len(d) else 0)

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        i, j = ij
        return self._e[i][j]

    def row(self, i: int) -> list[Poly]:
        return list(self._e[i])

    def tolist(self) -> list[list[Poly]]:
        return [list(r) for r in self._e]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix.build(self.cols, self.rows, lambda i, j: self._e[j][i])

    T = property(transpose)

    def map(self, f: Callable[[Poly], Poly]) -> "PolyMatrix":
        return PolyMatrix([[f(x) for x in r] for r in self._e])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self._e[i][j] for j in cols] for i in rows])

    def permuted(self, row_order: Sequence[int], col_order: Sequence[int]) -> "PolyMatrix":
        return self.submatrix(row_order, col_order)

    def flipped(self) -> "PolyMatrix":
        """Reverse both the row and the column order."""
        return self.submatrix(range(self.rows - 1, -1, -1), range(self.cols - 1, -1, -1))

    def diagonal(self) -> list[Poly]:
        return [self._e[i][i] for i in range(min(self.rows, self.cols))]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        return matmul(self, other)

    def __mul__(self, c) -> "PolyMatrix":
        return self.map(lambda x: x * c)

    __rmul__ = __mul__

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        return PolyMatrix.build(self.rows, self.cols, lambda i, j: self._e[i][j] + other._e[i][j])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} - {other.shape}")
        return PolyMatrix.build(self.rows, self.cols, lambda i, j: self._e[i][j] - other._e[i][j])

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    def first_difference(self, other: "PolyMatrix") -> tuple[int, int] | None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        for i in range(self.rows):
            for j in range(self.cols):
                if self._e[i][j] != other._e[i][j]:
                    return i, j
        return None

    def is_lower_unitriangular(self) -> bool:
        return all((self._e[i][j] == (1 if i == j else 0)) for i in range(self.rows)
                   for j in range(self.cols) if j >= i)

    def is_upper_unitriangular(self) -> bool:
        return self.transpose().is_lower_unitriangular()

    def to_json(self) -> list[list[str]]:
        return [[x.to_string() for x in r] for r in self._e]

    @classmethod
    def from_json(cls, data, laurent: Iterable[str] = ()) -> "PolyMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        return cls([[parse(s, laurent) for s in r] for r in data])

    def __repr__(self) -> str:
        return f"PolyMatrix({self.to_json()!r})"

    def __str__(self) -> str:
        cells = self.to_json()
        w = max((len(s) for r in cells for s in r), default=1)
        return "\n".join("[" + "  ".join(s.rjust(w) for s in r) + "]" for r in cells)


def matmul(A: PolyMatrix, B: PolyMatrix) -> PolyMatrix:
    if A.cols != B.rows:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    a, b = A._e, B._e
    out = []
    for i in range(A.rows):
        ai = a[i]
        row = []
        for j in range(B.cols):
            s = _ZERO
            for k in range(A.cols):
                x = ai[k]
                if x:
                    y = b[k][j]
                    if y:
                        s = s + x * y
            row.append(s)
        out.append(row)
    return PolyMatrix(out)


def det_bareiss(A: PolyMatrix) -> Poly:
    """Determinant by fraction-free elimination with row pivoting.

    Every division is exact (Sylvester's identity).  A column that is zero at
    and below the pivot position means the matrix is singular.
    """
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return _ONE
    M = A.tolist()
    sign = 1
    prev = _ONE
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return _ZERO
        pk = M[k][k]
        for i in range(k + 1, n):
            mik = M[i][k]
            row_i, row_k = M[i], M[k]
            for j in range(k + 1, n):
                num = row_i[j] * pk - mik * row_k[j]
                row_i[j] = num if prev == 1 else exact_div(num, prev)
            row_i[k] = _ZERO
        prev = pk
    d = M[n - 1][n - 1]
    return -d if sign < 0 else d


def det_cofactor(A: PolyMatrix) -> Poly:
    """Laplace expansion along the first row; an independent check for small sizes."""
    if A.rows != A.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    e = A._e

    def rec(rows: tuple[int, ...], cols: tuple[int, ...]) -> Poly:
        if not rows:
            return _ONE
        r0 = rows[0]
        total = _ZERO
        for k, c in enumerate(cols):
            x = e[r0][c]
            if x:
                sub = rec(rows[1:], cols[:k] + cols[k + 1:])
                total = total + x * sub if k % 2 == 0 else total - x * sub
        return total

    return rec(tuple(range(A.rows)), tuple(range(A.cols)))


@dataclass
class LduFactorization:
    """``A = L * diag_{rows x cols}(D) * U`` with unitriangular ``L`` and ``U``."""

    L: PolyMatrix
    D: list[Poly]
    U: PolyMatrix
    exact: bool = True

    def middle(self) -> PolyMatrix:
        return PolyMatrix.diag(self.D, self.L.rows, self.U.rows)

    def product(self) -> PolyMatrix:
        return self.L @ self.middle() @ self.U


def ldu_extract(A: PolyMatrix) -> LduFactorization:
    """Exact-division Doolittle elimination without pivoting.

    Raises :class:`NoRingFactorization` (with a 0-based ``position``) when a
    multiplier is not a ring element, or when a zero pivot faces a nonzero
    entry in its residual row or column.
    """
    m, n = A.rows, A.cols
    S = A.tolist()
    L = [[_ONE if i == j else _ZERO for j in range(m)] for i in range(m)]
    U = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]
    D: list[Poly] = []
    for k in range(min(m, n)):
        p = S[k][k]
        if not p:
            for i in range(k + 1, m):
                if S[i][k]:
                    raise NoRingFactorization(
                        f"zero pivot at ({k}, {k}) with nonzero entry below at ({i}, {k})", (i, k))
            for j in range(k + 1, n):
                if S[k][j]:
                    raise NoRingFactorization(
                        f"zero pivot at ({k}, {k}) with nonzero entry right at ({k}, {j})", (k, j))
            D.append(_ZERO)
            continue
        D.append(p)
        unit = p == 1
        for i in range(k + 1, m):
            x = S[i][k]
            if x:
                try:
                    L[i][k] = x if unit else exact_div(x, p)
                except DivisionFailure:
                    raise NoRingFactorization(
                        f"entry ({i}, {k}) = {x} is not a multiple of pivot {p}", (i, k)) from None
        for j in range(k + 1, n):
            x = S[k][j]
            if x:
                try:
                    U[k][j] = x if unit else exact_div(x, p)
                except DivisionFailure:
                    raise NoRingFactorization(
                        f"entry ({k}, {j}) = {x} is not a multiple of pivot {p}", (k, j)) from None
        for i in range(k + 1, m):
            lik = L[i][k]
            if not lik:
                continue
            Si, Sk = S[i], S[k]
            for j in range(k + 1, n):
                if Sk[j]:
                    Si[j] = Si[j] - lik * Sk[j]
    return LduFactorization(PolyMatrix(L), D, PolyMatrix(U), True)


def unitriangular_inverse(T: PolyMatrix) -> PolyMatrix:
    """Inverse of a lower or upper unitriangular matrix (no division needed)."""
    if not T.is_lower_unitriangular():
        if T.is_upper_unitriangular():
            return unitriangular_inverse(T.transpose()).transpose()
        raise ValueError("matrix is not unitriangular")
    n = T.rows
    e = T._e
    X = [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(i):
            s = _ZERO
            for k in range(j, i):
                if e[i][k] and X[k][j]:
                    s = s + e[i][k] * X[k][j]
            X[i][j] = -s
    return PolyMatrix(X)


def check_chain(D: Sequence) -> bool:
    """Each entry divides the next; zeros may only form a trailing block."""
    D = [_p(x) for x in D]
    for a, b in zip(D, D[1:]):
        if a.is_zero():
            if not b.is_zero():
                return False
            continue
        if not divides(a, b):
            return False
    return True


@dataclass
class SsnfCertificate:
    """Evidence that a matrix reaches ``diag(diagonal)`` by unimodular moves.

    ``perm[i]`` is the index of the source entry placed at position ``i``.
    ``sign_fix`` records that the ``diag(-1, 1, ..., 1)`` correction was used
    to bring both transformation determinants to 1 (odd permutation).
    ``unit`` is the product of the entry signs absorbed when matching the
    source diagonal to the target; ``-1`` means the target is an SNF whose
    determinant differs from the source by a sign.
    """

    diagonal: list[Poly]
    perm: list[int]
    sign_fix: bool
    chain_ok: bool
    unit: int = 1
    methods: dict = field(default_factory=dict)

    def diagonal_strings(self) -> list[str]:
        return [d.to_string() for d in self.diagonal]


def _perm_parity(perm: Sequence[int]) -> int:
    seen = [False] * len(perm)
    parity = 0
    for i in range(len(perm)):
        if not seen[i]:
            j, length = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            parity ^= (length - 1) & 1
    return -1 if parity else 1


def reorder_to_ssnf(D: Sequence, target: Sequence) -> SsnfCertificate:
    D = [_p(x) for x in D]
    target = [_p(x) for x in target]
    if len(D) != len(target):
        raise NotAPermutation(f"lengths differ: {len(D)} vs {len(target)}")
    used = [False] * len(D)
    perm: list[int] = []
    unit = 1
    for t in target:
        hit = next((k for k, d in enumerate(D) if not used[k] and d == t), None)
        s = 1
        if hit is None:
            hit = next((k for k, d in enumerate(D) if not used[k] and d == -t), None)
            s = -1
        if hit is None:
            raise NotAPermutation(f"target entry {t} has no partner in the source diagonal")
        used[hit] = True
        perm.append(hit)
        unit *= s
    odd = _perm_parity(perm) < 0
    return SsnfCertificate(list(target), perm, odd or unit < 0, check_chain(target), unit)


def minor_gcd_oracle(A: PolyMatrix, k_max: int | None = None,
                     budget: int = DEFAULT_MINOR_BUDGET) -> list[Poly]:
    """Determinantal divisors ``Delta_1 .. Delta_kmax`` of a univariate matrix."""
    vs = set()
    for r in A._e:
        for x in r:
            vs.update(x.variables())
    if len(vs) > 1:
        raise MultivariateInput(f"minor_gcd_oracle needs one variable, got {sorted(vs)}")
    kmax = min(A.rows, A.cols) if k_max is None else k_max
    if kmax > min(A.rows, A.cols):
        raise ValueError("k_max exceeds the matrix size")
    spent = 0
    out: list[Poly] = []
    for k in range(1, kmax + 1):
        g = _ZERO
        for rows in itertools.combinations(range(A.rows), k):
            for cols in itertools.combinations(range(A.cols), k):
                spent += 1
                if spent > budget:
                    raise BudgetExceeded(f"minor budget {budget} exhausted at k={k}")
                m = det_bareiss(A.submatrix(rows, cols)) if k > 1 else A._e[rows[0]][cols[0]]
                if m:
                    g = gcd_univariate(g, m)
                if g == 1:
                    break
            if g == 1:
                break
        out.append(g)
    return out


def snf_from_divisors(deltas: Sequence[Poly]) -> list[Poly]:
    """Successive quotients ``Delta_k / Delta_{k-1}``; zero once a divisor vanishes."""
    out = []
    prev = _ONE
    for d in deltas:
        if d.is_zero() or prev.is_zero():
            out.append(_ZERO)
        else:
            out.append(exact_div(d, prev))
        prev = d
    return out


def normalize_sign(p: Poly) -> Poly:
    """Return ``p`` or ``-p`` so that the graded-lex leading coefficient is positive."""
    if p.is_zero():
        return p
    s = p.to_string()
    return -p if s.startswith("-") else p
