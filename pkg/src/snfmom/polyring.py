"""Sparse multivariate polynomials with arbitrary-precision integer coefficients.

Variables live in a process-wide registry that hands out a slot index per name.
A monomial is packed into a single Python int: the exponent of the variable in
slot ``i`` is the signed digit ``i`` of the number in base ``2**32``.  Multiplying
monomials is then integer addition, and comparing the packed ints is a lex
monomial order, which is all the division algorithm needs.

Negative exponents are allowed only on variables declared Laurent-invertible
for a given polynomial (``Poly.laurent``); the set propagates through ring
operations.
"""
from __future__ import annotations

import heapq
import math
import re
import threading
from typing import Iterable, Mapping, Union

from .errors import DivisionFailure, LaurentEscape, MultivariateInput, ParseError

__all__ = [
    "Poly",
    "var",
    "const",
    "parse",
    "exact_div",
    "divides",
    "substitute",
    "gcd_univariate",
    "evaluate",
]

_W = 32
_HALF = 1 << (_W - 1)
_BASE = 1 << _W
_MASK = _BASE - 1
_NAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class _Registry:
    def __init__(self) -> None:
        self.names: list[str] = []
        self.index: dict[str, int] = {}
        self.guard = 0
        self.lock = threading.Lock()

    def slot(self, name: str) -> int:
        i = self.index.get(name)
        if i is not None:
            return i
        if not _NAME_RE.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        with self.lock:
            i = self.index.get(name)
            if i is None:
                i = len(self.names)
                self.names.append(name)
                self.index[name] = i
                self.guard |= 1 << (_W * i + _W - 1)
        return i


_REG = _Registry()


def _encode(exps: Mapping[str, int]) -> int:
    m = 0
    for name, e in exps.items():
        if e:
            if not -_HALF < e < _HALF:
                raise OverflowError(f"exponent {e} out of range")
            m += e << (_W * _REG.slot(name))
    return m


def _decode(m: int) -> dict[int, int]:
    out = {}
    i = 0
    while m:
        d = m & _MASK
        if d >= _HALF:
            d -= _BASE
        if d:
            out[i] = d
        m = (m - d) >> _W
        i += 1
    return out


def _nonneg_diff(m: int, n: int) -> bool:
    # SWAR check that every exponent of m is >= the matching exponent of n;
    # both must have all exponents nonnegative.
    g = _REG.guard
    return ((m | g) - n) & g == g


def _has_negative(m: int) -> bool:
    return any(e < 0 for e in _decode(m).values())


Scalar = Union["Poly", int]


class Poly:
    """Immutable polynomial; ``terms`` maps packed monomials to nonzero ints."""

    __slots__ = ("_t", "laurent", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None,
                 laurent: Iterable[str] = frozenset()):
        t = {m: c for m, c in (terms or {}).items() if c}
        self._t = t
        self.laurent = frozenset(laurent)
        self._hash = None
        if t and not self.laurent:
            for m in t:
                if _has_negative(m):
                    raise LaurentEscape("negative exponent on a non-Laurent variable")

    @classmethod
    def _raw(cls, t: dict, laurent: frozenset) -> "Poly":
        p = object.__new__(cls)
        p._t = t
        p.laurent = laurent
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c: int) -> "Poly":
        return cls._raw({0: c} if c else {}, frozenset())

    @classmethod
    def var(cls, name: str, laurent: bool = False) -> "Poly":
        return cls._raw({1 << (_W * _REG.slot(name)): 1},
                        frozenset([name]) if laurent else frozenset())

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[int, Mapping[str, int]]],
                   laurent: Iterable[str] = frozenset()) -> "Poly":
        """Build from ``(coefficient, {name: exponent})`` pairs."""
        laurent = frozenset(laurent)
        t: dict[int, int] = {}
        for c, exps in terms:
            for name, e in exps.items():
                if e < 0 and name not in laurent:
                    raise LaurentEscape(f"{name} is not Laurent-invertible")
            m = _encode(exps)
            t[m] = t.get(m, 0) + c
        return cls._raw({m: c for m, c in t.items() if c}, laurent)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict[int, int]:
        return dict(self._t)

    def items(self) -> list[tuple[dict[str, int], int]]:
        names = _REG.names
        return [({names[i]: e for i, e in _decode(m).items()}, c)
                for m, c in self._t.items()]

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_value(self) -> int:
        if not self.is_constant():
            raise ValueError("not a constant")
        return self._t.get(0, 0)

    def is_monomial_term(self) -> bool:
        return len(self._t) == 1

    def is_unit(self) -> bool:
        """True for ±(monomial in Laurent variables only)."""
        if len(self._t) != 1:
            return False
        (m, c), = self._t.items()
        if c not in (1, -1):
            return False
        names = _REG.names
        return all(names[i] in self.laurent for i in _decode(m))

    def variables(self) -> list[str]:
        seen: set[int] = set()
        for m in self._t:
            seen.update(_decode(m))
        return sorted(_REG.names[i] for i in seen)

    def degree(self, name: str | None = None) -> int:
        """Total degree, or degree in ``name``; -1 for the zero polynomial."""
        if not self._t:
            return -1
        if name is None:
            return max(sum(_decode(m).values()) for m in self._t)
        i = _REG.slot(name)
        return max(_decode(m).get(i, 0) for m in self._t)

    def coeffs_in(self, name: str) -> list["Poly"]:
        """Coefficients of ``name**0, name**1, ...`` as polynomials in the other variables."""
        i = _REG.slot(name)
        shift = _W * i
        buckets: dict[int, dict[int, int]] = {}
        for m, c in self._t.items():
            e = _decode(m).get(i, 0)
            if e < 0:
                raise ValueError(f"negative power of {name}")
            buckets.setdefault(e, {})[m - (e << shift)] = c
        if not buckets:
            return []
        return [Poly._raw(buckets.get(e, {}), self.laurent)
                for e in range(max(buckets) + 1)]

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, int):
            return Poly.const(other)
        return NotImplemented

    def _join(self, other: "Poly") -> frozenset:
        a, b = self.laurent, other.laurent
        if a is b or not b:
            return a
        if not a:
            return b
        return a | b

    def __add__(self, other: Scalar) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        r = dict(a)
        for m, c in b.items():
            v = r.get(m, 0) + c
            if v:
                r[m] = v
            else:
                del r[m]
        return Poly._raw(r, self._join(other))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw({m: -c for m, c in self._t.items()}, self.laurent)

    def __sub__(self, other: Scalar) -> "Poly":
        other = self._lift(other)
        if other is NotImplemented:
            return other
        r = dict(self._t)
        for m, c in other._t.items():
            v = r.get(m, 0) - c
            if v:
                r[m] = v
            else:
                del r[m]
        return Poly._raw(r, self._join(other))

    def __rsub__(self, other: Scalar) -> "Poly":
        return (-self) + other

    def __mul__(self, other: Scalar) -> "Poly":
        if isinstance(other, int):
            if not other:
                return Poly._raw({}, self.laurent)
            return Poly._raw({m: c * other for m, c in self._t.items()}, self.laurent)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self._t, other._t
        lau = self._join(other)
        if not a or not b:
            return Poly._raw({}, lau)
        if len(a) < len(b):
            a, b = b, a
        if len(b) == 1:
            (m2, c2), = b.items()
            return Poly._raw({m + m2: c * c2 for m, c in a.items()}, lau)
        r: dict[int, int] = {}
        get = r.get
        for m2, c2 in b.items():
            for m1, c1 in a.items():
                k = m1 + m2
                r[k] = get(k, 0) + c1 * c2
        return Poly._raw({m: c for m, c in r.items() if c}, lau)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            if not self.is_unit():
                raise DivisionFailure("negative power of a non-unit")
            (m, c), = self._t.items()
            return Poly._raw({-m * (-e): c ** (-e)}, self.laurent)
        if len(self._t) == 1:
            (m, c), = self._t.items()
            return Poly._raw({m * e: c ** e}, self.laurent)
        result = Poly._raw({0: 1}, self.laurent)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._t == ({0: other} if other else {})
        if isinstance(other, Poly):
            return self._t == other._t
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def __floordiv__(self, other: Scalar) -> "Poly":
        return exact_div(self, other)

    # -- text -------------------------------------------------------------
    def to_string(self) -> str:
        if not self._t:
            return "0"
        names = _REG.names
        decoded = [({names[i]: e for i, e in _decode(m).items()}, c)
                   for m, c in self._t.items()]
        allvars = sorted({v for d, _ in decoded for v in d})

        def key(item):
            d = item[0]
            return (sum(d.values()), tuple(d.get(v, 0) for v in allvars))

        decoded.sort(key=key, reverse=True)
        parts = []
        for k, (d, c) in enumerate(decoded):
            mono = "*".join(v if d[v] == 1 else f"{v}^{d[v]}" for v in sorted(d))
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    __str__ = to_string

    def __repr__(self) -> str:
        return f"Poly({self.to_string()!r})"


def var(name: str, laurent: bool = False) -> Poly:
    return Poly.var(name, laurent)


def const(c: int) -> Poly:
    return Poly.const(c)


def _as_poly(p: Scalar) -> Poly:
    return p if isinstance(p, Poly) else Poly.const(p)


# -- exact division ----------------------------------------------------------

def _laurent_normalize(t: dict[int, int], slots: list[int]) -> tuple[dict[int, int], int]:
    """Shift so every Laurent slot has minimum exponent 0; return (terms, shift)."""
    mins = {i: None for i in slots}
    for m in t:
        d = _decode(m)
        for i in slots:
            e = d.get(i, 0)
            if mins[i] is None or e < mins[i]:
                mins[i] = e
    shift = sum((-(mins[i] or 0)) << (_W * i) for i in slots)
    if not shift:
        return t, 0
    return {m + shift: c for m, c in t.items()}, shift


def _divide_nonneg(p: dict[int, int], d: dict[int, int]) -> dict[int, int]:
    lm = max(d)
    lc = d[lm]
    rest = [(m, c) for m, c in d.items() if m != lm]
    r = dict(p)
    heap = [-m for m in r]
    heapq.heapify(heap)
    q: dict[int, int] = {}
    while r:
        m = -heapq.heappop(heap)
        c = r.get(m)
        if c is None:
            continue
        if not _nonneg_diff(m, lm):
            raise DivisionFailure("leading monomial not divisible")
        qc, rem = divmod(c, lc)
        if rem:
            raise DivisionFailure("leading coefficient not divisible")
        mq = m - lm
        q[mq] = qc
        del r[m]
        for md, cd in rest:
            k = mq + md
            old = r.get(k)
            if old is None:
                r[k] = -qc * cd
                heapq.heappush(heap, -k)
            else:
                v = old - qc * cd
                if v:
                    r[k] = v
                else:
                    del r[k]
    return q


def exact_div(p: Scalar, d: Scalar) -> Poly:
    """Return ``c`` with ``c * d == p`` or raise :class:`DivisionFailure`."""
    p, d = _as_poly(p), _as_poly(d)
    if not d._t:
        raise ZeroDivisionError("division by the zero polynomial")
    lau = p._join(d)
    if not p._t:
        return Poly._raw({}, lau)
    if len(d._t) == 1:
        (md, cd), = d._t.items()
        out = {}
        for m, c in p._t.items():
            qc, rem = divmod(c, cd)
            if rem:
                raise DivisionFailure(f"coefficient {c} not divisible by {cd}")
            out[m - md] = qc
        if md:
            names = _REG.names
            for m in out:
                for i, e in _decode(m).items():
                    if e < 0 and names[i] not in lau:
                        raise DivisionFailure("monomial quotient leaves the polynomial ring")
        return Poly._raw(out, lau)
    if lau:
        slots = [_REG.slot(n) for n in sorted(lau)]
        pt, sp = _laurent_normalize(p._t, slots)
        dt, sd = _laurent_normalize(d._t, slots)
        q = _divide_nonneg(pt, dt)
        off = sd - sp
        return Poly._raw({m + off: c for m, c in q.items()}, lau)
    return Poly._raw(_divide_nonneg(p._t, d._t), lau)


def divides(d: Scalar, p: Scalar) -> bool:
    """True iff ``p`` is an exact ring multiple of ``d`` (0 divides only 0)."""
    d, p = _as_poly(d), _as_poly(p)
    if d.is_zero():
        return p.is_zero()
    try:
        exact_div(p, d)
    except DivisionFailure:
        return False
    return True


# -- substitution and evaluation ---------------------------------------------

def substitute(p: Poly, bindings: Mapping[str, Scalar]) -> Poly:
    """Simultaneous substitution of variables by polynomials."""
    if not bindings:
        return p
    names = _REG.names
    bound = {_REG.slot(k): _as_poly(v) for k, v in bindings.items()}
    keep_lau = frozenset(n for n in p.laurent if _REG.slot(n) not in bound)
    for v in bound.values():
        keep_lau = keep_lau | v.laurent
    powcache: dict[tuple[int, int], Poly] = {}

    def power(i: int, e: int) -> Poly:
        key = (i, e)
        val = powcache.get(key)
        if val is None:
            b = bound[i]
            if e < 0:
                if not b.is_unit():
                    raise LaurentEscape(
                        f"negative power of {names[i]} bound to non-unit {b}")
                val = b ** e
            else:
                val = b ** e
            powcache[key] = val
        return val

    acc: dict[int, int] = {}
    out = Poly._raw({}, keep_lau)
    for m, c in p._t.items():
        d = _decode(m)
        free = 0
        factor = None
        for i, e in d.items():
            if i in bound:
                f = power(i, e)
                factor = f if factor is None else factor * f
            else:
                free += e << (_W * i)
        if factor is None:
            acc[free] = acc.get(free, 0) + c
        else:
            out = out + factor * Poly._raw({free: c}, keep_lau)
    if acc:
        out = out + Poly._raw({m: c for m, c in acc.items() if c}, keep_lau)
    return Poly._raw(dict(out._t), keep_lau)


def evaluate(p: Poly, values: Mapping[str, complex]):
    """Numeric value of ``p``; every variable present must be bound."""
    names = _REG.names
    total = 0
    for m, c in p._t.items():
        term = c
        for i, e in _decode(m).items():
            term *= values[names[i]] ** e
        total += term
    return total


# -- univariate gcd ----------------------------------------------------------

def _dense(p: Poly, name: str | None) -> list[int]:
    if p.is_zero():
        return []
    if name is None:
        return [p.constant_value()]
    return [c.constant_value() for c in p.coeffs_in(name)]


def _content(a: list[int]) -> int:
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return g


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _primitive(a: list[int]) -> list[int]:
    g = _content(a)
    return [c // g for c in a] if g > 1 else list(a)


def _prem(a: list[int], b: list[int]) -> list[int]:
    r = list(a)
    db = len(b) - 1
    lb = b[-1]
    while len(r) - 1 >= db and r:
        lr = r[-1]
        k = len(r) - 1 - db
        r = [c * lb for c in r]
        for j, bj in enumerate(b):
            r[j + k] -= lr * bj
        _trim(r)
    return r


def gcd_univariate(p: Scalar, r: Scalar) -> Poly:
    """Greatest common divisor in Z[v] with positive leading coefficient."""
    p, r = _as_poly(p), _as_poly(r)
    vs = sorted(set(p.variables()) | set(r.variables()))
    if len(vs) > 1:
        raise MultivariateInput(f"gcd_univariate got variables {vs}")
    name = vs[0] if vs else None
    a, b = _dense(p, name), _dense(r, name)
    if not a and not b:
        return Poly.const(0)
    if not a or not b:
        g = a or b
    else:
        cont = math.gcd(_content(a), _content(b))
        a, b = _primitive(a), _primitive(b)
        if len(a) < len(b):
            a, b = b, a
        while b:
            rem = _trim(_prem(a, b))
            a, b = b, (_primitive(rem) if rem else [])
        g = [c * cont for c in _primitive(a)]
    if g[-1] < 0:
        g = [-c for c in g]
    if len(g) == 1:
        return Poly.const(g[0])
    x = Poly.var(name)
    out = Poly.const(0)
    for e, c in enumerate(g):
        if c:
            out = out + c * x ** e
    return out


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*^]))")


def parse(text: str, laurent: Iterable[str] = ()) -> Poly:
    """Parse ``term (± term)*`` as produced by :meth:`Poly.to_string`."""
    laurent = frozenset(laurent)
    toks: list[tuple[str, str, int]] = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if not m:
            while stripped[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {stripped[pos]!r}", pos)
        kind = m.lastgroup
        toks.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    if not toks:
        raise ParseError("empty input", 0)
    k = 0

    def peek():
        return toks[k] if k < len(toks) else ("end", "", len(text))

    terms: list[tuple[int, dict[str, int]]] = []
    sign = 1
    first = True
    while True:
        kind, val, at = peek()
        if kind == "op" and val in "+-":
            if val == "-":
                sign = -sign
            k += 1
            kind, val, at = peek()
        elif not first:
            raise ParseError("expected '+' or '-'", at)
        first = False
        coeff = 1
        exps: dict[str, int] = {}
        seen_factor = False
        if kind == "int":
            coeff = int(val)
            k += 1
            seen_factor = True
            kind, val, at = peek()
            if kind == "op" and val == "*":
                k += 1
                kind, val, at = peek()
                if kind != "name":
                    raise ParseError("expected variable after '*'", at)
        while kind == "name":
            name = val
            k += 1
            e = 1
            kind, val, at = peek()
            if kind == "op" and val == "^":
                k += 1
                kind, val, at = peek()
                neg = False
                if kind == "op" and val == "-":
                    neg = True
                    k += 1
                    kind, val, at = peek()
                if kind != "int":
                    raise ParseError("expected integer exponent", at)
                e = -int(val) if neg else int(val)
                if e < 0 and name not in laurent:
                    raise ParseError(f"negative exponent on non-Laurent variable {name}", at)
                k += 1
                kind, val, at = peek()
            exps[name] = exps.get(name, 0) + e
            seen_factor = True
            if kind == "op" and val == "*":
                k += 1
                kind, val, at = peek()
                if kind != "name":
                    raise ParseError("expected variable after '*'", at)
        if not seen_factor:
            raise ParseError("expected a term", at)
        terms.append((sign * coeff, exps))
        sign = 1
        if kind == "end":
            break
    return Poly.from_terms(terms, laurent)
