"""Young-diagram generating-function matrices and their UDL factorizations.

A shape is a weakly decreasing tuple of row lengths; cell (i, j) is in row i,
column j, both 1-based, and carries the variable ``x_i_j``.  ``A_ij`` sums,
over all subpartitions mu of lambda(i, j), the product of the variables on
the cells of lambda(i, j) outside mu.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import BudgetExceeded, InvalidAnchor, Mismatch
from .polymat import (
    PolyMatrix,
    SsnfCertificate,
    check_chain,
    det_bareiss,
    ldu_extract,
    reorder_to_ssnf,
    unitriangular_inverse,
)
from .polyring import Poly, exact_div, substitute, var

Cell = tuple[int, int]

DEFAULT_CELL_BOUND = 30

_ZERO = Poly.const(0)
_ONE = Poly.const(1)


@dataclass(frozen=True)
class YoungShape:
    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows if int(r) > 0)
        if any(a < b for a, b in zip(rows, rows[1:])):
            raise ValueError(f"row lengths must weakly decrease: {self.rows}")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def parse(cls, text: str) -> "YoungShape":
        text = text.strip()
        return cls(tuple(int(t) for t in text.split(",") if t.strip())) if text else cls(())

    def __contains__(self, cell: Cell) -> bool:
        i, j = cell
        return 1 <= i <= len(self.rows) and 1 <= j <= self.rows[i - 1]

    def row_length(self, i: int) -> int:
        return self.rows[i - 1] if 1 <= i <= len(self.rows) else 0

    @property
    def size(self) -> int:
        return sum(self.rows)

    @property
    def diagonal(self) -> int:
        """d = max{k : lambda_k >= k}."""
        return sum(1 for k, r in enumerate(self.rows, 1) if r >= k)

    def cells(self) -> list[Cell]:
        return [(i, j) for i, r in enumerate(self.rows, 1) for j in range(1, r + 1)]

    def conjugate(self) -> "YoungShape":
        if not self.rows:
            return self
        return YoungShape(tuple(sum(1 for r in self.rows if r >= j)
                                for j in range(1, self.rows[0] + 1)))

    def __str__(self) -> str:
        return ",".join(map(str, self.rows))


def cell_var(cell: Cell) -> Poly:
    return var(f"x_{cell[0]}_{cell[1]}")


def lambda_ij(shape: YoungShape, i: int, j: int) -> frozenset[Cell]:
    """Cells (u, v) of the shape with u >= i and v >= j."""
    return frozenset((u, v) for u in range(i, len(shape.rows) + 1)
                     for v in range(j, shape.row_length(u) + 1))


def _rows_of(cells: Iterable[Cell]) -> tuple[int, list[int], int]:
    """Anchor row, row lengths and anchor column of a top-left justified region."""
    cells = set(cells)
    if not cells:
        return 0, [], 0
    u0 = min(u for u, _ in cells)
    v0 = min(v for _, v in cells)
    u1 = max(u for u, _ in cells)
    lengths = []
    for u in range(u0, u1 + 1):
        row = sorted(v for uu, v in cells if uu == u)
        if not row or row[0] != v0 or row[-1] - v0 + 1 != len(row):
            raise ValueError("cells do not form a top-left justified shape")
        lengths.append(len(row))
    if any(a < b for a, b in zip(lengths, lengths[1:])):
        raise ValueError("cells do not form a top-left justified shape")
    return u0, lengths, v0


def _weight(cells, var_of) -> Poly:
    out = _ONE
    for c in cells:
        out = out * var_of(c)
    return out


def skew_genfun(cells: Iterable[Cell], var_of=cell_var,
                bound: int | None = DEFAULT_CELL_BOUND) -> Poly:
    """Sum over subpartitions mu of the region of the product of x over region minus mu.

    Computed row by row: G_t(cap) sums over the part m_t <= cap of row t.
    ``bound`` caps the cell count (generic variables give exponentially many
    terms); pass None when the variables are specialized.
    """
    cells = list(cells)
    if bound is not None and len(cells) > bound:
        raise BudgetExceeded(f"region has {len(cells)} cells, bound is {bound}")
    u0, lengths, v0 = _rows_of(cells)
    if not lengths:
        return _ONE
    nxt: list[Poly] | None = None  # nxt[m] = G_{t+1}(m)
    for t in range(len(lengths) - 1, -1, -1):
        r = lengths[t]
        u = u0 + t
        # suffix[m] = product of x over cells m..r-1 of this row (0-based offsets)
        suffix = [_ONE] * (r + 1)
        for m in range(r - 1, -1, -1):
            suffix[m] = var_of((u, v0 + m)) * suffix[m + 1]
        cap_max = lengths[t - 1] if t > 0 else r
        cur = []
        acc = _ZERO
        for m in range(r + 1):
            acc = acc + suffix[m] * (nxt[min(m, len(nxt) - 1)] if nxt is not None else _ONE)
            cur.append(acc)
        cur += [acc] * (cap_max - r)
        nxt = cur
    return nxt[lengths[0]]


def skew_genfun_bruteforce(cells: Iterable[Cell], var_of=cell_var,
                           bound: int = DEFAULT_CELL_BOUND) -> Poly:
    """Enumerate every subpartition explicitly; the oracle for :func:`skew_genfun`."""
    cells = list(cells)
    if len(cells) > bound:
        raise BudgetExceeded(f"region has {len(cells)} cells, bound is {bound}")
    u0, lengths, v0 = _rows_of(cells)
    total = _ZERO
    parts: list[int] = []

    def rec(t: int, cap: int):
        nonlocal total
        if t == len(lengths):
            outside = [(u0 + s, v0 + c) for s, m in enumerate(parts)
                       for c in range(m, lengths[s])]
            total = total + _weight(outside, var_of)
            return
        for m in range(min(cap, lengths[t]) + 1):
            parts.append(m)
            rec(t + 1, m)
            parts.pop()

    rec(0, lengths[0] if lengths else 0)
    return total if lengths else _ONE


def a_matrix(shape: YoungShape, var_of=cell_var, bound: int | None = DEFAULT_CELL_BOUND) -> PolyMatrix:
    n = shape.diagonal + 1
    return PolyMatrix.build(
        n, n, lambda i, j: skew_genfun(lambda_ij(shape, i + 1, j + 1), var_of, bound))


@dataclass
class UdlFactorization:
    U: PolyMatrix
    D: list[Poly]
    L: PolyMatrix

    def product(self) -> PolyMatrix:
        return self.U @ PolyMatrix.diag(self.D) @ self.L


def _region_u(shape: YoungShape, i: int, k: int, shift: int = 0) -> list[Cell]:
    """{(u, v) in lambda : i <= u < k <= v + shift}."""
    return [(u, v) for (u, v) in shape.cells() if i <= u < k <= v + shift]


def _region_l(shape: YoungShape, k: int, j: int, shift: int = 0) -> list[Cell]:
    """{(u, v) in lambda : j <= v < k <= u + shift}."""
    return [(u, v) for (u, v) in shape.cells() if j <= v < k <= u + shift]


def udl_combinatorial(shape: YoungShape, var_of=cell_var,
                      bound: int | None = DEFAULT_CELL_BOUND) -> UdlFactorization:
    n = shape.diagonal + 1
    U = PolyMatrix.build(n, n, lambda i, k: skew_genfun(_region_u(shape, i + 1, k + 1), var_of, bound)
                         if i <= k else _ZERO)
    L = PolyMatrix.build(n, n, lambda k, j: skew_genfun(_region_l(shape, k + 1, j + 1), var_of, bound)
                         if j <= k else _ZERO)
    D = [_weight(lambda_ij(shape, k, k), var_of) for k in range(1, n + 1)]
    return UdlFactorization(U, D, L)


def verify_udl(shape: YoungShape, var_of=cell_var,
               bound: int | None = DEFAULT_CELL_BOUND) -> SsnfCertificate:
    """Check A = U D L, the flipped LDU extraction, P A Q = D and the SSNF chain."""
    A = a_matrix(shape, var_of, bound)
    f = udl_combinatorial(shape, var_of, bound)
    pos = A.first_difference(f.product())
    if pos is not None:
        raise Mismatch("A differs from U D L", {"entry": list(pos)})
    if not (f.U.is_upper_unitriangular() and f.L.is_lower_unitriangular()):
        raise Mismatch("U or L is not unitriangular")
    # J A J = (J U J)(J D J)(J L J) is an LDU factorization with D reversed
    ldu = ldu_extract(A.flipped())
    if ldu.D != f.D[::-1] or ldu.L != f.U.flipped() or ldu.U != f.L.flipped():
        raise Mismatch("flipped LDU extraction disagrees with the combinatorial factors")
    P, Q = unitriangular_inverse(f.U), unitriangular_inverse(f.L)
    if P @ A @ Q != PolyMatrix.diag(f.D):
        raise Mismatch("P A Q is not diagonal")
    # D_{k+1,k+1} divides D_kk because lambda(k+1,k+1) sits inside lambda(k,k)
    for a, b in zip(f.D[1:], f.D):
        exact_div(b, a)
    target = f.D[::-1]
    cert = reorder_to_ssnf(f.D, target)
    cert.methods.update({"construction": True, "ldu": True, "inverse": True})
    return cert


# -- rectangular anchors -----------------------------------------------------

@dataclass(frozen=True)
class RectAnchor:
    a: int
    b: int


def border_strip(shape: YoungShape) -> list[RectAnchor]:
    """Squares outside lambda running from the end of its first column to the end of its first row."""
    ell = len(shape.rows)
    top = shape.row_length(1)
    out = []
    for a in range(1, ell + 2):
        for b in range(1, top + 2):
            if _valid_anchor(shape, a, b):
                out.append(RectAnchor(a, b))
    return out


def _inside_or_rim(shape: YoungShape, i: int, j: int) -> bool:
    # row 0 and column 0 count as inside
    return i == 0 or j == 0 or (i, j) in shape


def _valid_anchor(shape: YoungShape, a: int, b: int) -> bool:
    return (a >= 1 and b >= 1 and (a, b) not in shape
            and _inside_or_rim(shape, a - 1, b - 1)
            and a <= len(shape.rows) + 1 and b <= shape.row_length(1) + 1)


def validate_anchor(shape: YoungShape, anchor: RectAnchor) -> None:
    if not _valid_anchor(shape, anchor.a, anchor.b):
        raise InvalidAnchor(f"({anchor.a}, {anchor.b}) is not in the border strip of {shape.rows}")


def rect_a_matrix(shape: YoungShape, anchor: RectAnchor, var_of=cell_var) -> PolyMatrix:
    validate_anchor(shape, anchor)
    return PolyMatrix.build(anchor.a, anchor.b,
                            lambda i, j: skew_genfun(lambda_ij(shape, i + 1, j + 1), var_of))


@dataclass
class RectReport:
    a: int
    b: int
    d: list[Poly]
    diagonal: list[Poly]
    det_P: Poly
    det_Q: Poly
    methods: dict = field(default_factory=dict)


def rect_factors(shape: YoungShape, anchor: RectAnchor, var_of=cell_var):
    a, b = anchor.a, anchor.b
    c = min(a, b)
    U = PolyMatrix.build(a, a, lambda i, k: skew_genfun(_region_u(shape, i + 1, k + 1, a - b), var_of)
                         if i <= k else _ZERO)
    L = PolyMatrix.build(b, b, lambda l, j: skew_genfun(_region_l(shape, l + 1, j + 1, b - a), var_of)
                         if j <= l else _ZERO)
    d = [_weight(lambda_ij(shape, a - i + 1, b - i + 1), var_of) for i in range(1, c + 1)]
    pos = {(a - i, b - i): d[i - 1] for i in range(1, c + 1)}
    D = PolyMatrix.build(a, b, lambda k, l: pos.get((k, l), _ZERO))
    return U, D, L, d


def _signed_flip(n: int, negated: set[int]) -> PolyMatrix:
    """Anti-diagonal permutation matrix with the listed rows negated."""
    return PolyMatrix.build(n, n, lambda i, j: (-1 if i in negated else 1) if i + j == n - 1 else 0)


def _flip_sign(n: int) -> int:
    return -1 if (n // 2) % 2 else 1


def _sign_fixes(a: int, b: int) -> tuple[set[int], set[int]]:
    """Rows of P and columns of Q to negate so both have determinant 1.

    Negating row 0 and column 0 together leaves the (1, 1) entry unchanged;
    a zero row (a > b) or zero column (a < b) absorbs a lone sign.
    """
    rows: set[int] = set()
    cols: set[int] = set()
    sa, sb = _flip_sign(a), _flip_sign(b)
    if a >= b:
        if sb < 0:
            rows, cols = {0}, {0}
            sa = -sa
        if sa < 0:
            rows ^= {a - 1}
    else:
        if sa < 0:
            rows, cols = {0}, {0}
            sb = -sb
        if sb < 0:
            cols ^= {b - 1}
    return rows, cols


def verify_rect_udl(shape: YoungShape, anchor: RectAnchor, var_of=cell_var) -> RectReport:
    """Check A(lambda, rho) = U D L and build P, Q of determinant 1 with P A Q the SSNF."""
    A = rect_a_matrix(shape, anchor, var_of)
    a, b = anchor.a, anchor.b
    U, D, L, d = rect_factors(shape, anchor, var_of)
    if not (U.is_upper_unitriangular() and L.is_lower_unitriangular()):
        raise Mismatch("U or L is not unitriangular")
    pos = A.first_difference(U @ D @ L)
    if pos is not None:
        raise Mismatch("A(lambda, rho) differs from U D L", {"entry": list(pos)})
    if not check_chain(d):
        raise Mismatch("d_1 | d_2 | ... | d_c fails", [x.to_string() for x in d])
    c = min(a, b)
    target = PolyMatrix.build(a, b, lambda i, j: d[i] if i == j and i < c else _ZERO)
    # reversing rows and columns moves d_i to position (i, i); signs keep determinants 1
    neg_rows, neg_cols = _sign_fixes(a, b)
    Ja = _signed_flip(a, neg_rows)
    Jb = _signed_flip(b, neg_cols).T
    P = Ja @ unitriangular_inverse(U)
    Q = unitriangular_inverse(L) @ Jb
    dP, dQ = det_bareiss(P), det_bareiss(Q)
    if dP != 1 or dQ != 1:
        raise Mismatch("transformation matrices do not have determinant 1",
                       {"det_P": dP.to_string(), "det_Q": dQ.to_string()})
    got = P @ A @ Q
    pos = got.first_difference(target)
    if pos is not None:
        raise Mismatch("P A Q is not the claimed Smith form", {"entry": list(pos)})
    diagonal = d + [_ZERO] * (max(a, b) - c)
    return RectReport(a, b, d, diagonal, dP, dQ, {"construction": True, "determinant_one": True})


# -- q-Catalan bridge --------------------------------------------------------

def staircase(n: int, variant: str) -> YoungShape:
    top = 2 * n - 1 if variant == "even" else 2 * n
    return YoungShape(tuple(range(top, 0, -1)))


@dataclass
class CatalanReport:
    n: int
    variant: str
    matrix: PolyMatrix
    diagonal: list[Poly]


def catalan_specialization(n: int, variant: str = "even") -> CatalanReport:
    """Staircase with every x_s = q, compared with the q-Catalan Hankel matrix.

    The staircase matrix is the Hankel matrix with rows and columns reversed.
    """
    from .families import family_spec
    from .moments import MomentFunctional, hankel

    if variant not in ("even", "odd"):
        raise ValueError("variant must be 'even' or 'odd'")
    if n > 5:
        raise BudgetExceeded("catalan specialization limited to n <= 5")
    q = var("q")
    shape = staircase(n, variant)
    A = a_matrix(shape, lambda c: q, None)
    H = hankel(MomentFunctional(family_spec("catalan_star")), n, variant)
    if A.flipped() != H:
        pos = A.flipped().first_difference(H)
        raise Mismatch("specialized staircase differs from the q-Catalan Hankel matrix",
                       {"entry": list(pos) if pos else None})
    cert = verify_udl(shape, lambda c: q, None)
    off = 0 if variant == "even" else 1
    claim = [q ** ((2 * k + off) * (2 * k + off - 1) // 2) for k in range(n + 1)]
    if cert.diagonal != claim:
        raise Mismatch("specialized SSNF diagonal differs from the corollary",
                       [x.to_string() for x in cert.diagonal])
    return CatalanReport(n, variant, A, claim)


def random_shape(rng, max_size: int = 12) -> YoungShape:
    """A uniformly random size in [0, max_size] split into random weakly decreasing parts."""
    size = rng.randint(0, max_size)
    rows: list[int] = []
    left = size
    cap = size
    while left:
        r = rng.randint(1, min(left, cap))
        rows.append(r)
        left -= r
        cap = r
    return YoungShape(tuple(rows))


def substitute_all(M: PolyMatrix, value: Poly, shape: YoungShape) -> PolyMatrix:
    bind = {f"x_{i}_{j}": value for i, j in shape.cells()}
    return M.map(lambda e: substitute(e, bind))
