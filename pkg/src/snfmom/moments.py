"""Three-term recurrences, their moment functionals and Hankel/Gram matrices.

A :class:`RecurrenceSpec` holds the sequences ``b_0, b_1, ...`` and
``lambda_1, lambda_2, ...`` of

    p_{n+1}(x) = (x - b_n) p_n(x) - lambda_n p_{n-1}(x),  p_{-1} = 0, p_0 = 1.

Moments are computed two ways: by powering the tridiagonal transfer operator
(:func:`moment`) and by enumerating weighted Motzkin paths
(:func:`motzkin_moment_oracle`).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

from .errors import BudgetExceeded, DegreeMismatch, Mismatch, NonzeroB, NotMonic, NotMonicWeights
from .polymat import (
    PolyMatrix,
    SsnfCertificate,
    check_chain,
    det_bareiss,
    ldu_extract,
    minor_gcd_oracle,
    normalize_sign,
    snf_from_divisors,
    unitriangular_inverse,
)
from .polyring import Poly, var
from .qnumbers import binom2, q_binomial, q_factorial, q_int

X = "x"
DEFAULT_PATH_BOUND = 16

_ZERO = Poly.const(0)
_ONE = Poly.const(1)


@dataclass(frozen=True)
class RecurrenceSpec:
    """The pair of generators ``b(n)`` (n >= 0) and ``lam(n)`` (n >= 1)."""

    b: Callable[[int], Poly]
    lam: Callable[[int], Poly]
    name: str = ""

    def b_at(self, n: int) -> Poly:
        return _as_poly(self.b(n))

    def lam_at(self, n: int) -> Poly:
        # lambda_0 = 0 by convention
        return _ZERO if n <= 0 else _as_poly(self.lam(n))

    def lam_product(self, k: int, start: int = 1) -> Poly:
        out = _ONE
        for i in range(start, k + 1):
            out = out * self.lam_at(i)
        return out


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


def symbolic_spec() -> RecurrenceSpec:
    """Generic RecurrenceSpec over Z[b0, b1, ..., l1, l2, ...]."""
    return RecurrenceSpec(lambda n: var(f"b{n}"), lambda n: var(f"l{n}"), "symbolic")


def symbolic_b0_spec() -> RecurrenceSpec:
    """Generic RecurrenceSpec with every b_n = 0, over Z[l1, l2, ...]."""
    return RecurrenceSpec(lambda n: _ZERO, lambda n: var(f"l{n}"), "symbolic_b0")


class MomentFunctional:
    """Moments ``mu_n`` of a spec, cached; safe for concurrent readers."""

    def __init__(self, spec: RecurrenceSpec):
        self.spec = spec
        self._mu: list[Poly] = [_ONE]
        self._lock = threading.Lock()

    def moments(self, upto: int) -> list[Poly]:
        if upto >= len(self._mu):
            with self._lock:
                if upto >= len(self._mu):
                    self._mu = _transfer_moments(self.spec, upto)
        return self._mu[: upto + 1]

    def moment(self, n: int) -> Poly:
        return self.moments(n)[n]

    def __getitem__(self, n: int) -> Poly:
        return self.moment(n)


def _transfer_moments(spec: RecurrenceSpec, N: int) -> list[Poly]:
    # v[h] = weighted count of length-t paths from height 0 ending at height h;
    # heights above N - t can never return to 0 in time and are dropped.
    top = N // 2
    b = [spec.b_at(h) for h in range(top + 1)]
    lam = [spec.lam_at(h) for h in range(top + 2)]
    v = [_ONE] + [_ZERO] * top
    mus = [_ONE]
    for t in range(1, N + 1):
        cap = min(t, N - t, top)
        w = []
        for h in range(cap + 1):
            s = _ZERO
            if h >= 1 and v[h - 1]:
                s = s + v[h - 1]
            if v[h] and b[h]:
                s = s + v[h] * b[h]
            if h + 1 <= top and v[h + 1] and lam[h + 1]:
                s = s + v[h + 1] * lam[h + 1]
            w.append(s)
        v = w + [_ZERO] * (top + 1 - len(w))
        mus.append(v[0])
    return mus


def moment(fn: MomentFunctional, n: int) -> Poly:
    return fn.moment(n)


def motzkin_paths(n: int):
    """Yield Motzkin paths of length n from 0 to 0 as height tuples."""
    path = [0]

    def rec(t: int):
        h = path[-1]
        if t == n:
            if h == 0:
                yield tuple(path)
            return
        for nh in (h + 1, h, h - 1):
            if 0 <= nh <= n - t - 1:
                path.append(nh)
                yield from rec(t + 1)
                path.pop()

    yield from rec(0)


def path_weight(path: Sequence[int], spec: RecurrenceSpec) -> Poly:
    """Product of b at level steps and lambda at down steps (from the upper height)."""
    w = _ONE
    for h0, h1 in zip(path, path[1:]):
        if h1 == h0:
            w = w * spec.b_at(h0)
        elif h1 == h0 - 1:
            w = w * spec.lam_at(h0)
    return w


def motzkin_moment_oracle(spec: RecurrenceSpec, n: int, bound: int = DEFAULT_PATH_BOUND) -> Poly:
    if n > bound:
        raise BudgetExceeded(f"path enumeration limited to n <= {bound}")
    total = _ZERO
    for path in motzkin_paths(n):
        total = total + path_weight(path, spec)
    return total


def poly_coeffs(spec: RecurrenceSpec, n: int) -> PolyMatrix:
    """Row i holds the coefficients of p_i(x) in the power basis, degrees 0..n."""
    rows: list[list[Poly]] = []
    prev: list[Poly] = []
    cur = [_ONE]
    rows.append(cur)
    for k in range(n):
        bk, lk = spec.b_at(k), spec.lam_at(k)
        nxt = [_ZERO] + cur
        for i, c in enumerate(cur):
            if c and bk:
                nxt[i] = nxt[i] - bk * c
        for i, c in enumerate(prev):
            if c and lk:
                nxt[i] = nxt[i] - lk * c
        prev, cur = cur, nxt
        rows.append(cur)
    return PolyMatrix([r + [_ZERO] * (n + 1 - len(r)) for r in rows])


def orthogonal_polys(spec: RecurrenceSpec, n: int) -> list[Poly]:
    """p_0(x), ..., p_n(x) as polynomials in the variable ``x``."""
    P = poly_coeffs(spec, n)
    x = var(X)
    return [sum((P[i, k] * x ** k for k in range(i + 1)), _ZERO) for i in range(n + 1)]


_SHIFTS = {"0": lambda i, j: i + j, "1": lambda i, j: i + j + 1,
           "even": lambda i, j: 2 * i + 2 * j, "odd": lambda i, j: 2 * i + 2 * j + 2}


def hankel(fn: MomentFunctional, n: int, shift: str | int = 0) -> PolyMatrix:
    idx = _SHIFTS[str(shift)]
    mus = fn.moments(idx(n, n))
    return PolyMatrix.build(n + 1, n + 1, lambda i, j: mus[idx(i, j)])


def _diagonal_witness(C: PolyMatrix, claimed: Sequence[Poly]):
    target = PolyMatrix.diag(claimed)
    pos = C.first_difference(target)
    if pos is None:
        return None
    i, j = pos
    return {"entry": [i, j], "got": C[i, j].to_string(), "expected": target[i, j].to_string()}


def divisors_agree(A: PolyMatrix, claimed: Sequence[Poly], budget: int | None = None) -> bool:
    """Compare Delta_k / Delta_{k-1} from the minor-gcd oracle with ``claimed`` up to sign."""
    kw = {} if budget is None else {"budget": budget}
    deltas = minor_gcd_oracle(A, len(claimed), **kw)
    got = snf_from_divisors(deltas)
    return [normalize_sign(g) for g in got] == [normalize_sign(c) for c in claimed]


def verify_hankel_snf(spec: RecurrenceSpec, n: int, minor_gcd: bool = False) -> SsnfCertificate:
    """Check P H P^t = diag(1, l1, l1 l2, ...) and that LDU extraction agrees."""
    fn = MomentFunctional(spec)
    H = hankel(fn, n, 0)
    P = poly_coeffs(spec, n)
    claimed = [spec.lam_product(k) for k in range(n + 1)]
    w = _diagonal_witness(P @ H @ P.T, claimed)
    if w:
        raise Mismatch("P H P^t is not the claimed diagonal", w)
    f = ldu_extract(H)
    if f.D != claimed:
        raise Mismatch("LDU diagonal differs from the claimed diagonal",
                       {"ldu": [d.to_string() for d in f.D]})
    if f.L != unitriangular_inverse(P):
        raise Mismatch("LDU lower factor is not the inverse coefficient matrix")
    methods = {"construction": True, "ldu": True}
    if minor_gcd:
        methods["minor_gcd"] = divisors_agree(H, claimed)
        if not methods["minor_gcd"]:
            raise Mismatch("determinantal divisors disagree", methods)
    return SsnfCertificate(claimed, list(range(n + 1)), False, check_chain(claimed), 1, methods)


@dataclass
class OrthogonalityResult:
    ok: bool
    witness: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.ok


def orthogonality_check(spec: RecurrenceSpec, n: int) -> OrthogonalityResult:
    """L(p_i p_j) = lambda_1 ... lambda_i delta_ij for all 0 <= i, j <= n."""
    fn = MomentFunctional(spec)
    P = poly_coeffs(spec, n)
    G = P @ hankel(fn, n, 0) @ P.T
    for i in range(n + 1):
        for j in range(n + 1):
            want = spec.lam_product(i) if i == j else _ZERO
            if G[i, j] != want:
                return OrthogonalityResult(False, (i, j))
    return OrthogonalityResult(True)


def odd_even_split(spec: RecurrenceSpec, check_upto: int = 16) -> tuple[RecurrenceSpec, RecurrenceSpec]:
    """Specs of e_n and o_n with p_{2n}(x) = e_n(x^2), p_{2n+1}(x) = x o_n(x^2)."""
    for k in range(check_upto + 1):
        if spec.b_at(k):
            raise NonzeroB(f"b_{k} = {spec.b_at(k)} is not zero")
    L = spec.lam_at
    even = RecurrenceSpec(lambda n: L(2 * n) + L(2 * n + 1),
                          lambda n: L(2 * n - 1) * L(2 * n),
                          f"{spec.name}:even")
    odd = RecurrenceSpec(lambda n: L(2 * n + 1) + L(2 * n + 2),
                         lambda n: L(2 * n) * L(2 * n + 1),
                         f"{spec.name}:odd")
    return even, odd


@dataclass
class EoReport:
    even_diagonal: list[Poly]
    odd_diagonal: list[Poly]
    interleave_ok: bool = True
    det_identity_ok: bool = True
    methods: dict = field(default_factory=dict)


def _check_shifted(H: PolyMatrix, P: PolyMatrix, claimed: list[Poly], label: str) -> None:
    w = _diagonal_witness(P @ H @ P.T, claimed)
    if w:
        raise Mismatch(f"{label}: P H P^t is not diagonal as claimed", w)
    f = ldu_extract(H)
    if f.D != claimed:
        raise Mismatch(f"{label}: LDU diagonal differs", [d.to_string() for d in f.D])


def verify_eo_theorem(spec: RecurrenceSpec, n: int) -> EoReport:
    even, odd = odd_even_split(spec)
    fn, fe, fo = MomentFunctional(spec), MomentFunctional(even), MomentFunctional(odd)
    mus = fn.moments(4 * n + 2)
    lam1 = spec.lam_at(1)
    for k in range(2 * n + 1):
        if mus[2 * k] != fe.moment(k):
            raise Mismatch(f"mu_{2 * k} differs from even moment {k}", k)
        if mus[2 * k + 2] != lam1 * fo.moment(k):
            raise Mismatch(f"mu_{2 * k + 2} differs from lambda_1 times odd moment {k}", k)
        if mus[2 * k + 1]:
            raise Mismatch(f"odd moment mu_{2 * k + 1} is nonzero", k)
    ed = [spec.lam_product(2 * k) for k in range(n + 1)]
    od = [spec.lam_product(2 * k + 1) for k in range(n + 1)]
    _check_shifted(hankel(fn, n, "even"), poly_coeffs(even, n), ed, "even")
    _check_shifted(hankel(fn, n, "odd"), poly_coeffs(odd, n), od, "odd")
    full = det_bareiss(hankel(fn, n, 0))
    left = det_bareiss(hankel(fn, n // 2, "even"))
    right = det_bareiss(hankel(fn, (n - 1) // 2, "odd")) if n >= 1 else _ONE
    if full != left * right:
        raise Mismatch("Hankel determinant does not split into even and odd parts", n)
    return EoReport(ed, od, True, True, {"construction": True, "ldu": True})


# -- generalized Gram matrices ----------------------------------------------

def _basis_coeffs(polys: Sequence[Poly], label: str) -> PolyMatrix:
    n = len(polys) - 1
    rows = []
    for i, p in enumerate(polys):
        cs = p.coeffs_in(X)
        if len(cs) - 1 != i:
            raise DegreeMismatch(f"{label}_{i} has degree {len(cs) - 1}, expected {i}")
        if cs[-1] != 1:
            raise NotMonic(f"{label}_{i} has leading coefficient {cs[-1]}")
        rows.append(cs + [_ZERO] * (n + 1 - len(cs)))
    return PolyMatrix(rows)


def gram_matrix(fn: MomentFunctional, Y: Sequence[Poly], Z: Sequence[Poly]) -> PolyMatrix:
    """(L(Y_i(x) Z_j(x)))_{i,j} via the bilinear expansion CY * H * CZ^t."""
    if len(Y) != len(Z):
        raise DegreeMismatch("Y and Z must have the same length")
    n = len(Y) - 1
    CY, CZ = _basis_coeffs(Y, "Y"), _basis_coeffs(Z, "Z")
    return CY @ hankel(fn, n, 0) @ CZ.T


def verify_generalized_gram(spec: RecurrenceSpec, Y: Sequence[Poly], Z: Sequence[Poly],
                            n: int | None = None) -> SsnfCertificate:
    if n is not None:
        Y, Z = Y[: n + 1], Z[: n + 1]
    n = len(Y) - 1
    G = gram_matrix(MomentFunctional(spec), Y, Z)
    claimed = [spec.lam_product(k) for k in range(n + 1)]
    f = ldu_extract(G)
    if f.D != claimed:
        raise Mismatch("Gram LDU diagonal differs from lambda products",
                       [d.to_string() for d in f.D])
    return SsnfCertificate(claimed, list(range(n + 1)), False, check_chain(claimed), 1,
                           {"ldu": True})


# -- Vandermonde-type matrices -----------------------------------------------

def vandermonde_matrix(g: Sequence[Sequence] | None, n: int, variant: str = "general") -> PolyMatrix:
    """Entry (i, j) = g_i([j]_q) with g_i(x) = sum_k A_ik a^k x^k.

    ``case_a`` uses A_ik = binom(i, k), i.e. (1 + a[j]_q)^i; ``case_b`` is
    ([j+1]_q)^i.
    """
    a = var("a")
    if variant == "case_b":
        return PolyMatrix.build(n + 1, n + 1, lambda i, j: q_int(j + 1) ** i)
    if variant == "case_a":
        g = [[comb(i, k) for k in range(i + 1)] for i in range(n + 1)]
    elif variant != "general":
        raise ValueError(f"unknown variant {variant!r}")
    if g is None or len(g) < n + 1:
        raise ValueError("general variant needs coefficient rows A_i0..A_ii for i = 0..n")
    A = [[_as_poly(c) for c in row] for row in g[: n + 1]]
    for i, row in enumerate(A):
        if len(row) != i + 1 or row[i] != 1:
            raise NotMonicWeights(f"row {i} must have length {i + 1} and A_ii = 1")
    qj = [q_int(j) for j in range(n + 1)]
    return PolyMatrix.build(
        n + 1, n + 1,
        lambda i, j: sum((A[i][k] * a ** k * qj[j] ** k for k in range(i + 1)), _ZERO))


def vandermonde_claim(n: int, variant: str = "general") -> list[Poly]:
    q, a = var("q"), var("a")
    if variant == "case_b":
        return [q ** binom2(k + 1) * q_factorial(k) for k in range(n + 1)]
    return [a ** k * q ** binom2(k) * q_factorial(k) for k in range(n + 1)]


def verify_vandermonde_snf(g: Sequence[Sequence] | None, n: int,
                           variant: str = "general") -> SsnfCertificate:
    V = vandermonde_matrix(g, n, variant)
    claimed = vandermonde_claim(n, variant)
    f = ldu_extract(V)
    if f.D != claimed:
        raise Mismatch("Vandermonde LDU diagonal differs from the claim",
                       [d.to_string() for d in f.D])
    return SsnfCertificate(claimed, list(range(n + 1)), False, check_chain(claimed), 1,
                           {"ldu": True})


def charlier_gram_bases(n: int, g: Sequence[Sequence] | None = None) -> tuple[list[Poly], list[Poly]]:
    """Bases Y_i, Z_j whose Gram matrix under the q-Charlier functional is (g_i([j]_q)).

    ``g`` defaults to the binomial weights of the (1 + a[j]_q)^i case.
    """
    from .families import family_spec, q_stirling

    spec = family_spec("charlier_msw")
    p = orthogonal_polys(spec, n)
    a = var("a")
    if g is None:
        g = [[comb(i, k) for k in range(i + 1)] for i in range(n + 1)]
    A = [[_as_poly(c) for c in row] for row in g]
    Z = [sum((q_binomial(j, u) * p[u] for u in range(j + 1)), _ZERO) for j in range(n + 1)]
    Y = []
    for i in range(n + 1):
        y = _ZERO
        for t in range(i + 1):
            coef = _ZERO
            for k in range(t, i + 1):
                coef = coef + A[i][k] * q_stirling(k, t) * a ** (k - t)
            y = y + coef * p[t]
        Y.append(y)
    return Y, Z


def verify_vandermonde_gram_identity(g: Sequence[Sequence] | None, n: int) -> bool:
    """(g_i([j]_q)) equals the Gram matrix of the Charlier bases, checked entrywise."""
    from .families import family_spec

    variant = "case_a" if g is None else "general"
    V = vandermonde_matrix(g, n, variant)
    Y, Z = charlier_gram_bases(n, g)
    G = gram_matrix(MomentFunctional(family_spec("charlier_msw")), Y, Z)
    return V == G
