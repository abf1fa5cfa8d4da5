"""Laurent biorthogonal polynomials, Schroeder-path moments and Toeplitz matrices.

The monic polynomials ``q_n(z)`` satisfy

    q_{n+1}(z) = (z - b_n) q_n(z) - z lambda_n q_{n-1}(z),

and the moment functional on Z[z, 1/z] is described by weighted Schroeder
paths: up (NE) and down (SE) steps advance half a unit, level (E) steps a full
unit.  Positive moments use the weights 1, 1/b_k, lambda_k/(b_{k-1} b_k);
negative moments use 1, b_k, lambda_k and must start with a level step.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import BudgetExceeded, Mismatch
from .families import q_schroeder
from .polymat import PolyMatrix, SsnfCertificate, check_chain, ldu_extract
from .polyring import Poly, exact_div, var

DEFAULT_PATH_BOUND = 10

_ZERO = Poly.const(0)
_ONE = Poly.const(1)


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly.const(x)


@dataclass(frozen=True)
class LaurentSpec:
    """Sequences b_0, b_1, ... (each a unit of the ring) and lambda_1, lambda_2, ..."""

    b: Callable[[int], Poly]
    lam: Callable[[int], Poly]
    name: str = ""

    def b_at(self, n: int) -> Poly:
        return _as_poly(self.b(n))

    def b_inv(self, n: int) -> Poly:
        return exact_div(_ONE, self.b_at(n))

    def lam_at(self, n: int) -> Poly:
        return _ZERO if n <= 0 else _as_poly(self.lam(n))


def symbolic_laurent_spec() -> LaurentSpec:
    """Generic LaurentSpec over Z[b0^+-1, b1^+-1, ..., l1, l2, ...]."""
    return LaurentSpec(lambda n: var(f"b{n}", laurent=True), lambda n: var(f"l{n}"),
                       "symbolic")


def schroeder_spec() -> LaurentSpec:
    """b_n = 1, lambda_n = q^(n-1); moments are the q-Schroeder numbers."""
    q = var("q")
    return LaurentSpec(lambda n: _ONE, lambda n: q ** (n - 1), "schroeder")


class ToeplitzFunctional:
    """Moments mu_n for all integers n, positive and negative sides cached separately."""

    def __init__(self, spec: LaurentSpec):
        self.spec = spec
        self._pos: dict[int, Poly] = {0: _ONE}
        self._neg: dict[int, Poly] = {0: _ONE}
        self._lock = threading.Lock()

    def moment(self, n: int) -> Poly:
        cache = self._pos if n >= 0 else self._neg
        k = abs(n)
        if k not in cache:
            with self._lock:
                if k not in cache:
                    vals = _transfer(self.spec, k, negative=n < 0)
                    for i, v in enumerate(vals):
                        cache.setdefault(i, v)
        return cache[k]

    __getitem__ = moment


def _weights(spec: LaurentSpec, top: int, negative: bool):
    if negative:
        level = [spec.b_at(h) for h in range(top + 1)]
        down = [_ZERO] + [spec.lam_at(h) for h in range(1, top + 1)]
    else:
        inv = [spec.b_inv(h) for h in range(top + 1)]
        level = inv
        down = [_ZERO] + [spec.lam_at(h) * inv[h - 1] * inv[h] for h in range(1, top + 1)]
    return level, down


def _transfer(spec: LaurentSpec, n: int, negative: bool) -> list[Poly]:
    """mu_0 .. mu_n (or mu_0, mu_-1, .., mu_-n) by a half-step transfer recursion."""
    top = n
    level, down = _weights(spec, top, negative)
    # f[t][h]: weight of path prefixes covering t half-units that end at height h
    steps = 2 * n
    f = [[_ZERO] * (top + 1) for _ in range(steps + 1)]
    f[0][0] = _ONE
    for t in range(steps):
        for h in range(top + 1):
            w = f[t][h]
            if not w:
                continue
            if h + 1 <= top:
                f[t + 1][h + 1] = f[t + 1][h + 1] + w
            if h >= 1:
                f[t + 1][h - 1] = f[t + 1][h - 1] + w * down[h]
            if t + 2 <= steps:
                f[t + 2][h] = f[t + 2][h] + w * level[h]
    if not negative:
        return [f[2 * k][0] for k in range(n + 1)]
    # a negative moment starts with a level step at height 0
    return [_ONE] + [level[0] * f[2 * (k - 1)][0] for k in range(1, n + 1)]


def schroder_moment(fn: ToeplitzFunctional, n: int) -> Poly:
    return fn.moment(n)


def schroder_paths(n: int) -> Iterator[tuple[str, ...]]:
    """Schroeder paths of horizontal length n from height 0 back to height 0."""
    steps: list[str] = []

    def rec(half: int, h: int):
        if half == 2 * n:
            if h == 0:
                yield tuple(steps)
            return
        rem = 2 * n - half
        if h + 1 <= rem - 1:
            steps.append("NE")
            yield from rec(half + 1, h + 1)
            steps.pop()
        if rem >= 2 and h <= rem - 2:
            steps.append("E")
            yield from rec(half + 2, h)
            steps.pop()
        if h >= 1:
            steps.append("SE")
            yield from rec(half + 1, h - 1)
            steps.pop()

    yield from rec(0, 0)


def path_weight(steps: Sequence[str], spec: LaurentSpec, bar: bool = False) -> Poly:
    """Product of step weights along a path; ``bar`` selects the negative-moment weights."""
    h = 0
    w = _ONE
    for s in steps:
        if s == "NE":
            h += 1
        elif s == "E":
            w = w * (spec.b_at(h) if bar else spec.b_inv(h))
        elif s == "SE":
            lam = spec.lam_at(h)
            w = w * (lam if bar else lam * spec.b_inv(h - 1) * spec.b_inv(h))
            h -= 1
        else:
            raise ValueError(f"unknown step {s!r}")
    return w


def schroder_moment_oracle(spec: LaurentSpec, n: int, bound: int = DEFAULT_PATH_BOUND) -> Poly:
    """mu_n by explicit path enumeration."""
    k = abs(n)
    if k > bound:
        raise BudgetExceeded(f"Schroeder path enumeration limited to |n| <= {bound}")
    total = _ZERO
    for path in schroder_paths(k):
        if n < 0 and path[0] != "E":
            continue
        total = total + path_weight(path, spec, bar=n < 0)
    return total


def q_coeffs(spec: LaurentSpec, n: int) -> PolyMatrix:
    """Row m holds the coefficients of q_m(z), degrees 0..n."""
    rows = [[_ONE]]
    prev: list[Poly] = []
    cur = [_ONE]
    for k in range(n):
        bk, lk = spec.b_at(k), spec.lam_at(k)
        nxt = [_ZERO] + cur
        for i, c in enumerate(cur):
            nxt[i] = nxt[i] - bk * c
        for i, c in enumerate(prev):
            if lk:
                nxt[i + 1] = nxt[i + 1] - lk * c
        prev, cur = cur, nxt
        rows.append(cur)
    return PolyMatrix([r + [_ZERO] * (n + 1 - len(r)) for r in rows])


def partner_coeffs(spec: LaurentSpec, n: int) -> PolyMatrix:
    """Row m holds the coefficients of the partner polynomial p_m(z)."""
    Q = q_coeffs(spec, n + 1)
    rows = []
    unit = _ONE
    for m in range(n + 1):
        unit = unit * spec.b_at(m)
        denom = -unit if m % 2 == 0 else unit
        row = []
        for j in range(n + 1):
            if j > m:
                row.append(_ZERO)
                continue
            num = Q[m + 1, m - j]
            if m - 1 - j >= 0:
                num = num - Q[m, m - 1 - j]
            row.append(exact_div(num, denom))
        rows.append(row)
    return PolyMatrix(rows)


def toeplitz_matrix(fn: ToeplitzFunctional, n: int) -> PolyMatrix:
    return PolyMatrix.build(n + 1, n + 1, lambda i, j: fn.moment(i - j))


def toeplitz_claim(spec: LaurentSpec, n: int) -> list[Poly]:
    """(-1)^k lambda_1 ... lambda_k / (b_1 ... b_k) for k = 0..n."""
    out = []
    num, den = _ONE, _ONE
    for k in range(n + 1):
        if k:
            num = num * spec.lam_at(k)
            den = den * spec.b_at(k)
        d = exact_div(num, den)
        out.append(-d if k % 2 else d)
    return out


@dataclass
class BiorthogonalityResult:
    ok: bool
    witness: tuple | None = None

    def __bool__(self) -> bool:
        return self.ok


def verify_biorthogonality(spec: LaurentSpec, n: int) -> BiorthogonalityResult:
    """Check L(z^m q_k(1/z)) = 0 for m < k and L(p_m(z) q_k(1/z)) = claim_k delta_mk."""
    fn = ToeplitzFunctional(spec)
    Q = q_coeffs(spec, n)
    for k in range(n + 1):
        for m in range(k):
            val = sum((Q[k, l] * fn.moment(m - l) for l in range(k + 1)), _ZERO)
            if val:
                return BiorthogonalityResult(False, ("orth", m, k))
    P = partner_coeffs(spec, n)
    G = P @ toeplitz_matrix(fn, n) @ Q.T
    claim = toeplitz_claim(spec, n)
    for m in range(n + 1):
        for k in range(n + 1):
            want = claim[k] if m == k else _ZERO
            if G[m, k] != want:
                return BiorthogonalityResult(False, ("biorth", m, k))
    return BiorthogonalityResult(True)


def verify_toeplitz_snf(spec: LaurentSpec, n: int) -> SsnfCertificate:
    fn = ToeplitzFunctional(spec)
    T = toeplitz_matrix(fn, n)
    P, Q = partner_coeffs(spec, n), q_coeffs(spec, n)
    claimed = toeplitz_claim(spec, n)
    C = P @ T @ Q.T
    pos = C.first_difference(PolyMatrix.diag(claimed))
    if pos is not None:
        i, j = pos
        raise Mismatch("P T Q^t is not the claimed diagonal",
                       {"entry": [i, j], "got": C[i, j].to_string()})
    f = ldu_extract(T)
    if f.D != claimed:
        raise Mismatch("LDU diagonal of T differs from the claim",
                       [d.to_string() for d in f.D])
    return SsnfCertificate(claimed, list(range(n + 1)), False, check_chain(claimed), 1,
                           {"construction": True, "ldu": True})


def schroder_hankel_like(n: int) -> PolyMatrix:
    """The displayed q-Schroeder matrix: R_{i-j} on and below the diagonal, R_{j-i-1} above."""
    R = [q_schroeder(k) for k in range(n + 1)]
    return PolyMatrix.build(n + 1, n + 1, lambda i, j: R[i - j] if i >= j else R[j - i - 1])
