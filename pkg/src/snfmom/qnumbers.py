"""q-integers, q-factorials and Gaussian binomials as polynomials."""
from __future__ import annotations

from functools import lru_cache
from math import comb

from .polyring import Poly, exact_div, var


def q_int(n: int, q: Poly | None = None) -> Poly:
    """[n]_q = 1 + q + ... + q^(n-1); zero for n <= 0."""
    q = var("q") if q is None else q
    out = Poly.const(0)
    term = Poly.const(1)
    for _ in range(max(n, 0)):
        out = out + term
        term = term * q
    return out


def q_factorial(n: int, q: Poly | None = None) -> Poly:
    out = Poly.const(1)
    for k in range(1, n + 1):
        out = out * q_int(k, q)
    return out


def q_double_factorial(n: int, q: Poly | None = None) -> Poly:
    """[2n-1]!!_q = [1]_q [3]_q ... [2n-1]_q."""
    out = Poly.const(1)
    for k in range(1, n + 1):
        out = out * q_int(2 * k - 1, q)
    return out


@lru_cache(maxsize=None)
def _qbinom_q(j: int, u: int) -> Poly:
    num = Poly.const(1)
    for t in range(u):
        num = num * q_int(j - t)
    return exact_div(num, q_factorial(u))


def q_binomial(j: int, u: int, q: Poly | None = None) -> Poly:
    """Gaussian binomial [j]_q [j-1]_q ... [j-u+1]_q / [u]!_q by exact division."""
    if u < 0 or u > j:
        return Poly.const(0)
    if q is None:
        return _qbinom_q(j, u)
    num = Poly.const(1)
    for t in range(u):
        num = num * q_int(j - t, q)
    return exact_div(num, q_factorial(u, q))


def two_base_int(n: int, r: Poly, s: Poly) -> Poly:
    """[n]_{r,s} = (r^n - s^n)/(r - s) = sum of r^i s^(n-1-i)."""
    out = Poly.const(0)
    for i in range(max(n, 0)):
        out = out + r ** i * s ** (n - 1 - i)
    return out


def binom2(k: int) -> int:
    return comb(k, 2) if k >= 2 else 0
