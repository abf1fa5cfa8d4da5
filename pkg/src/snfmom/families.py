"""Named orthogonal-polynomial families, closed-form moments and statistic oracles.

Each family name maps to a :class:`~snfmom.moments.RecurrenceSpec`.  The
combinatorial generating functions (set partitions by blocks and crossings,
matchings by crossings and nestings, permutations by weak excedances and
crossings) are computed by brute-force enumeration so they can serve as
independent checks on the transfer-matrix moments.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterator, Sequence

from .errors import BudgetExceeded, NoClosedForm
from .moments import RecurrenceSpec
from .polyring import Poly, var
from .qnumbers import binom2, q_double_factorial, q_factorial, q_int, two_base_int

_ZERO = Poly.const(0)
_ONE = Poly.const(1)

# Enumeration bounds; the CLI may override them through --max-enum.
BOUNDS = {"partitions": 10, "permutations": 8, "matchings": 12}


def _check_bound(kind: str, n: int, bound: int | None) -> None:
    limit = BOUNDS[kind] if bound is None else bound
    if n > limit:
        raise BudgetExceeded(f"{kind} enumeration limited to n <= {limit}, got n={n}")


# -- family specs ------------------------------------------------------------

def _q():
    return var("q")


def _catalan_star() -> RecurrenceSpec:
    q = _q()
    return RecurrenceSpec(lambda n: _ZERO, lambda n: q ** (n - 1), "catalan_star")


def _motzkin() -> RecurrenceSpec:
    q = _q()
    return RecurrenceSpec(lambda n: _ONE, lambda n: q ** (n - 1), "motzkin")


def _charlier_msw() -> RecurrenceSpec:
    q, a = _q(), var("a")
    return RecurrenceSpec(lambda n: a * q ** n + q_int(n),
                          lambda n: a * q ** (n - 1) * q_int(n), "charlier_msw")


def _charlier_ksz() -> RecurrenceSpec:
    a = var("a")
    return RecurrenceSpec(lambda n: a + q_int(n), lambda n: a * q_int(n), "charlier_ksz")


def _matchings() -> RecurrenceSpec:
    q = _q()
    return RecurrenceSpec(lambda n: _ONE, lambda n: q ** (n - 1) * q_int(n), "matchings")


def _hermite_pm() -> RecurrenceSpec:
    q = _q()
    return RecurrenceSpec(lambda n: _ZERO, lambda n: q ** (n - 1) * q_int(n), "hermite_pm")


def _laguerre_wex() -> RecurrenceSpec:
    y = var("y")
    return RecurrenceSpec(lambda n: y * q_int(n + 1) + q_int(n),
                          lambda n: y * q_int(n) ** 2, "laguerre_wex")


OCTABASIC_VARS = ("a", "b", "r", "s", "t", "u", "p", "q", "v", "w")


def _octabasic() -> RecurrenceSpec:
    a, b, r, s, t, u, p, q, v, w = (var(x) for x in OCTABASIC_VARS)
    return RecurrenceSpec(
        lambda n: a * two_base_int(n + 1, r, s) + b * two_base_int(n, t, u),
        lambda n: a * b * two_base_int(n, p, q) * two_base_int(n, v, w),
        "octabasic")


def _factorial() -> RecurrenceSpec:
    q = _q()
    return RecurrenceSpec(lambda n: q ** n * (q_int(n + 1) + q_int(n)),
                          lambda n: q ** (2 * n - 1) * q_int(n) ** 2, "factorial")


def _double_factorial_even() -> RecurrenceSpec:
    q = _q()

    def b(n: int) -> Poly:
        # the q^(2n-1)[2n]_q term vanishes at n = 0
        first = q ** (2 * n - 1) * q_int(2 * n) if n > 0 else _ZERO
        return first + q ** (2 * n) * q_int(2 * n + 1)

    return RecurrenceSpec(b, lambda n: q ** (4 * n - 3) * q_int(2 * n - 1) * q_int(2 * n),
                          "double_factorial_even")


_BUILDERS = {
    "catalan_star": _catalan_star,
    "motzkin": _motzkin,
    "charlier_msw": _charlier_msw,
    "charlier_ksz": _charlier_ksz,
    "matchings": _matchings,
    "hermite_pm": _hermite_pm,
    "laguerre_wex": _laguerre_wex,
    "octabasic": _octabasic,
    "factorial": _factorial,
    "double_factorial_even": _double_factorial_even,
}

FAMILY_NAMES = tuple(_BUILDERS)


def family_spec(name: str) -> RecurrenceSpec:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILY_NAMES)}") from None


def corollary_diagonal(name: str, n: int) -> list[Poly]:
    """The closed-form Hankel SSNF diagonal for a family, written independently of lambda."""
    q, a, y = _q(), var("a"), var("y")
    forms = {
        "catalan_star": lambda k: q ** binom2(k),
        "motzkin": lambda k: q ** binom2(k),
        "charlier_msw": lambda k: a ** k * q ** binom2(k) * q_factorial(k),
        "charlier_ksz": lambda k: a ** k * q_factorial(k),
        "matchings": lambda k: q ** binom2(k) * q_factorial(k),
        "hermite_pm": lambda k: q ** binom2(k) * q_factorial(k),
        "laguerre_wex": lambda k: y ** k * q_factorial(k) ** 2,
        "factorial": lambda k: q ** (k * k) * q_factorial(k) ** 2,
        "double_factorial_even": lambda k: q ** binom2(2 * k) * q_factorial(2 * k),
    }
    if name not in forms:
        raise NoClosedForm(f"no closed-form diagonal recorded for {name}")
    return [forms[name](k) for k in range(n + 1)]


# -- closed forms ------------------------------------------------------------

@lru_cache(maxsize=None)
def q_catalan(n: int) -> Poly:
    """C_n(q) from C_{m+1} = sum_k q^k C_k C_{m-k}."""
    if n == 0:
        return _ONE
    q = _q()
    m = n - 1
    return sum((q ** k * q_catalan(k) * q_catalan(m - k) for k in range(m + 1)), _ZERO)


def q_motzkin(n: int) -> Poly:
    return sum((comb(n, 2 * k) * q_catalan(k) for k in range(n // 2 + 1)), _ZERO)


@lru_cache(maxsize=None)
def q_stirling(n: int, k: int) -> Poly:
    if k < 0 or k > n:
        return _ZERO
    if n == 0:
        return _ONE
    return q_stirling(n - 1, k - 1) + q_int(k) * q_stirling(n - 1, k)


def bell_msw(n: int) -> Poly:
    a = var("a")
    return sum((q_stirling(n, k) * a ** k for k in range(n + 1)), _ZERO)


def q_schroeder(n: int) -> Poly:
    """Large q-Schroeder number R_n(q) = sum_k binom(n+k, n-k) C_k(q)."""
    return sum((comb(n + k, n - k) * q_catalan(k) for k in range(n + 1)), _ZERO)


# -- set partitions ----------------------------------------------------------

def set_partitions(n: int) -> Iterator[list[list[int]]]:
    """All set partitions of {1..n} via restricted growth strings."""
    if n == 0:
        yield []
        return
    rgs = [0] * n

    def rec(i: int, top: int):
        if i == n:
            blocks: list[list[int]] = [[] for _ in range(top + 1)]
            for elem, blk in enumerate(rgs, 1):
                blocks[blk].append(elem)
            yield blocks
            return
        for v in range(top + 2):
            rgs[i] = v
            yield from rec(i + 1, max(top, v))

    rgs[0] = 0
    yield from rec(1, 0)


def partition_arcs(blocks: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    arcs = []
    for blk in blocks:
        s = sorted(blk)
        arcs.extend(zip(s, s[1:]))
    return arcs


def count_crossings(arcs: Sequence[tuple[int, int]]) -> int:
    """Pairs of arcs (a, b), (c, d) with a < c < b < d."""
    return sum(1 for (a, b), (c, d) in combinations(sorted(arcs), 2) if a < c < b < d)


def partition_stats(blocks: Sequence[Sequence[int]]) -> tuple[int, int]:
    """(number of blocks, number of crossings of the upper arc diagram)."""
    return len(blocks), count_crossings(partition_arcs(blocks))


def bell_ksz(n: int, bound: int | None = None) -> Poly:
    _check_bound("partitions", n, bound)
    a, q = var("a"), _q()
    counts: dict[tuple[int, int], int] = {}
    for pi in set_partitions(n):
        key = partition_stats(pi)
        counts[key] = counts.get(key, 0) + 1
    return sum((c * a ** k * q ** cr for (k, cr), c in counts.items()), _ZERO)


# -- matchings ---------------------------------------------------------------

def matchings(n: int, perfect_only: bool = False) -> Iterator[list[tuple[int, int]]]:
    """Partial (or perfect) matchings of {1..n} as lists of pairs."""

    def rec(free: tuple[int, ...]):
        if not free:
            yield []
            return
        first, rest = free[0], free[1:]
        if not perfect_only:
            yield from rec(rest)
        for idx, partner in enumerate(rest):
            for m in rec(rest[:idx] + rest[idx + 1:]):
                yield [(first, partner)] + m

    yield from rec(tuple(range(1, n + 1)))


def matching_stats(m: Sequence[tuple[int, int]]) -> tuple[int, int]:
    """(crossings, nestings) of a matching."""
    cr = ne = 0
    for (i, j), (k, l) in combinations(sorted(m), 2):
        if i < k < j < l:
            cr += 1
        elif i < k < l < j:
            ne += 1
    return cr, ne


def matching_genfun(n: int, perfect_only: bool = False, bound: int | None = None) -> Poly:
    _check_bound("matchings", n, bound)
    q = _q()
    counts: dict[int, int] = {}
    for m in matchings(n, perfect_only):
        cr, ne = matching_stats(m)
        counts[cr + 2 * ne] = counts.get(cr + 2 * ne, 0) + 1
    return sum((c * q ** e for e, c in counts.items()), _ZERO)


def match_closed_form(n: int) -> Poly:
    return sum((comb(n, 2 * k) * q_double_factorial(k) for k in range(n // 2 + 1)), _ZERO)


def perfect_match_closed_form(n: int) -> Poly:
    return _ZERO if n % 2 else q_double_factorial(n // 2)


# -- permutations ------------------------------------------------------------

def weak_excedances(sigma: Sequence[int]) -> int:
    """#{i : i <= sigma(i)} for sigma given as the 1-based images sigma(1..n)."""
    return sum(1 for i, s in enumerate(sigma, 1) if i <= s)


def perm_crossings(sigma: Sequence[int]) -> int:
    """Pairs (i, j) with j < i <= s(j) < s(i), plus pairs with j > i > s(j) > s(i)."""
    n = len(sigma)
    s = (0,) + tuple(sigma)
    total = 0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if j < i <= s[j] < s[i]:
                total += 1
            if j > i > s[j] > s[i]:
                total += 1
    return total


def perm_from_cycles(cycles: Sequence[Sequence[int]], n: int) -> tuple[int, ...]:
    img = list(range(n + 1))
    for cyc in cycles:
        for x, y in zip(cyc, list(cyc[1:]) + [cyc[0]]):
            img[x] = y
    return tuple(img[1:])


def perm_genfun(n: int, bound: int | None = None) -> Poly:
    """W_n(y, q) = sum over S_n of y^wex q^cr."""
    _check_bound("permutations", n, bound)
    y, q = var("y"), _q()
    counts: dict[tuple[int, int], int] = {}
    for sigma in permutations(range(1, n + 1)):
        key = (weak_excedances(sigma), perm_crossings(sigma))
        counts[key] = counts.get(key, 0) + 1
    return sum((c * y ** w * q ** cr for (w, cr), c in counts.items()), _ZERO)


# -- dispatch ----------------------------------------------------------------

def closed_form_moment(name: str, n: int, bound: int | None = None) -> Poly:
    """An independently computed mu_n for the named family."""
    if name == "catalan_star":
        return _ZERO if n % 2 else q_catalan(n // 2)
    if name == "motzkin":
        return q_motzkin(n)
    if name == "charlier_msw":
        return bell_msw(n)
    if name == "charlier_ksz":
        return bell_ksz(n, bound)
    if name == "matchings":
        return match_closed_form(n)
    if name == "hermite_pm":
        return perfect_match_closed_form(n)
    if name == "laguerre_wex":
        return perm_genfun(n, bound)
    if name == "factorial":
        return q_factorial(n)
    if name == "double_factorial_even":
        return q_double_factorial(n)
    if name == "octabasic":
        raise NoClosedForm("the general octabasic family has no closed-form moment here")
    raise ValueError(f"unknown family {name!r}")


def enumeration_moment(name: str, n: int, bound: int | None = None) -> Poly:
    """A statistic-enumeration value of mu_n where one exists, else the closed form."""
    if name == "matchings":
        return matching_genfun(n, False, bound)
    if name == "hermite_pm":
        return matching_genfun(n, True, bound)
    return closed_form_moment(name, n, bound)
