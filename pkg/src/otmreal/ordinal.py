"""Cantor normal form ordinals below epsilon_0 and the ordinal pairing function.

An :class:`Ordinal` is an immutable tuple of ``(exponent, coefficient)`` terms
with strictly decreasing exponents.  Plain ``int`` values are accepted wherever
an ordinal is expected and are coerced on the fly.

The pairing function orders pairs by ``(max(a, b), a, b)`` lexicographically
and sends each pair to its rank in that order::

    >>> pair(1, 2), pair(2, 1)
    (Ordinal(5), Ordinal(7))
    >>> unpair(pair(OMEGA, 3))
    (Ordinal('w'), Ordinal(3))
"""

from __future__ import annotations

import re
from enum import Enum
from functools import lru_cache
from math import isqrt
from typing import Callable, Iterable, Union

__all__ = [
    "Ordinal", "OrdinalOverflow", "OrdinalSyntaxError", "Cmp",
    "ZERO", "ONE", "OMEGA", "cmp", "add", "mul", "sub", "pair", "unpair",
    "omega_power", "parse_ordinal", "as_ordinal", "format_ordinal", "MAX_HEIGHT",
]

# exponent nesting allowed before construction fails
MAX_HEIGHT = 32


class OrdinalOverflow(ArithmeticError):
    pass


class OrdinalSyntaxError(ValueError):
    pass


class Cmp(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


OrdLike = Union["Ordinal", int]


class Ordinal:
    __slots__ = ("terms", "_fin", "_hash", "_height")

    def __init__(self, terms: Iterable[tuple["Ordinal", int]] = ()):
        terms = tuple((as_ordinal(e), int(c)) for e, c in terms)
        prev = None
        for e, c in terms:
            if c < 1:
                raise ValueError(f"coefficient must be positive, got {c}")
            if prev is not None and _cmp(e, prev) >= 0:
                raise ValueError("exponents must be strictly decreasing")
            prev = e
        self._set(terms)

    def _set(self, terms):
        self.terms = terms
        if not terms:
            self._fin = 0
        elif len(terms) == 1 and terms[0][0]._fin == 0:
            self._fin = terms[0][1]
        else:
            self._fin = None
        self._height = 1 + max((e._height for e, _ in terms), default=-1)
        if self._height > MAX_HEIGHT:
            raise OrdinalOverflow(f"exponent nesting exceeds {MAX_HEIGHT}")
        self._hash = None

    @classmethod
    def _raw(cls, terms) -> "Ordinal":
        o = cls.__new__(cls)
        o._set(tuple(terms))
        return o

    @staticmethod
    def of(n: int) -> "Ordinal":
        o = _FINITE.get(n)
        if o is not None:
            return o
        if n < 0:
            raise ValueError("ordinals are non-negative")
        o = Ordinal.__new__(Ordinal)
        o.terms = ((ZERO, n),)
        o._fin, o._height, o._hash = n, 1, None
        if len(_FINITE) < 1 << 18:
            _FINITE[n] = o
        return o

    # -- inspection -------------------------------------------------------
    @property
    def is_finite(self) -> bool:
        return self._fin is not None

    def __int__(self) -> int:
        if self._fin is None:
            raise ValueError(f"{self} is not finite")
        return self._fin

    __index__ = __int__

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero

    @property
    def lead_exponent(self) -> "Ordinal":
        return self.terms[0][0] if self.terms else ZERO

    @property
    def last_exponent(self) -> "Ordinal":
        return self.terms[-1][0] if self.terms else ZERO

    def split(self) -> tuple["Ordinal", int]:
        """Return ``(limit_part, n)`` with ``self == limit_part + n``."""
        if self._fin is not None:
            return ZERO, self._fin
        if self.is_successor:
            return Ordinal._raw(self.terms[:-1]), self.terms[-1][1]
        return self, 0

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise ValueError(f"{self} has no predecessor")
        lim, n = self.split()
        return add(lim, n - 1)

    # -- protocol ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, int):
            return self._fin == other
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._fin) if self._fin is not None else hash(self.terms)
        return self._hash

    def __lt__(self, other):
        f, g = self._fin, _fin_of(other)
        if f is not None and g is not None:
            return f < g
        return _cmp(self, as_ordinal(other)) < 0

    def __le__(self, other):
        f, g = self._fin, _fin_of(other)
        if f is not None and g is not None:
            return f <= g
        return _cmp(self, as_ordinal(other)) <= 0

    def __gt__(self, other):
        f, g = self._fin, _fin_of(other)
        if f is not None and g is not None:
            return f > g
        return _cmp(self, as_ordinal(other)) > 0

    def __ge__(self, other):
        f, g = self._fin, _fin_of(other)
        if f is not None and g is not None:
            return f >= g
        return _cmp(self, as_ordinal(other)) >= 0

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __sub__(self, other):
        return sub(other, self)

    def __bool__(self):
        return bool(self.terms)

    def __str__(self):
        return format_ordinal(self)

    def __repr__(self):
        if self._fin is not None:
            return f"Ordinal({self._fin})"
        return f"Ordinal({str(self)!r})"


ZERO = Ordinal._raw(())
_FINITE: dict[int, Ordinal] = {0: ZERO}
ONE = Ordinal.of(1)
OMEGA = Ordinal._raw(((ONE, 1),))


def _fin_of(x):
    if type(x) is Ordinal:
        return x._fin
    if type(x) is int:
        return x
    return None


def as_ordinal(x: OrdLike) -> Ordinal:
    if type(x) is Ordinal:
        return x
    if type(x) is int:
        return Ordinal.of(x)
    if isinstance(x, Ordinal):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Ordinal.of(x)
    if isinstance(x, str):
        return parse_ordinal(x)
    raise TypeError(f"cannot interpret {x!r} as an ordinal")


def omega_power(e: OrdLike, c: int = 1) -> Ordinal:
    """omega^e * c"""
    e = as_ordinal(e)
    if c == 0:
        return ZERO
    return Ordinal._raw(((e, c),))


def _cmp(a: Ordinal, b: Ordinal) -> int:
    if a._fin is not None and b._fin is not None:
        return (a._fin > b._fin) - (a._fin < b._fin)
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        r = _cmp(ea, eb)
        if r:
            return r
        if ca != cb:
            return 1 if ca > cb else -1
    return (len(a.terms) > len(b.terms)) - (len(a.terms) < len(b.terms))


def cmp(a: OrdLike, b: OrdLike) -> Cmp:
    return Cmp(_cmp(as_ordinal(a), as_ordinal(b)))


def add(a: OrdLike, b: OrdLike) -> Ordinal:
    f, g = _fin_of(a), _fin_of(b)
    if f is not None and g is not None:
        return Ordinal.of(f + g)
    a, b = as_ordinal(a), as_ordinal(b)
    if a._fin is not None and b._fin is not None:
        return Ordinal.of(a._fin + b._fin)
    if not b.terms:
        return a
    lead, lc = b.terms[0]
    keep = []
    for e, c in a.terms:
        r = _cmp(e, lead)
        if r > 0:
            keep.append((e, c))
        elif r == 0:
            keep.append((e, c + lc))
            return Ordinal._raw(keep + list(b.terms[1:]))
        else:
            break
    return Ordinal._raw(keep + list(b.terms))


def mul(a: OrdLike, b: OrdLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if a._fin is not None and b._fin is not None:
        return Ordinal.of(a._fin * b._fin)
    if not a.terms or not b.terms:
        return ZERO
    lead, lc = a.terms[0]
    out = ZERO
    for e, c in b.terms:
        if e.is_zero:
            # (w^l*lc + rest) * c  =  w^l*(lc*c) + rest
            part = Ordinal._raw(((lead, lc * c),) + a.terms[1:])
        else:
            part = Ordinal._raw(((add(lead, e), c),))
        out = add(out, part)
    return out


def sub(a: OrdLike, b: OrdLike) -> Ordinal:
    """The unique ``c`` with ``a + c == b``; requires ``a <= b``."""
    f, g = _fin_of(a), _fin_of(b)
    if f is not None and g is not None and f <= g:
        return Ordinal.of(g - f)
    a, b = as_ordinal(a), as_ordinal(b)
    if a._fin is not None and b._fin is not None:
        if a._fin > b._fin:
            raise ValueError(f"{a} > {b}")
        return Ordinal.of(b._fin - a._fin)
    if _cmp(a, b) > 0:
        raise ValueError(f"{a} > {b}")
    for i, ((ea, ca), (eb, cb)) in enumerate(zip(a.terms, b.terms)):
        if ea == eb and ca == cb:
            continue
        if ea == eb:
            return Ordinal._raw(((eb, cb - ca),) + b.terms[i + 1:])
        return Ordinal._raw(b.terms[i:])
    return Ordinal._raw(b.terms[len(a.terms):])


# -- pairing ----------------------------------------------------------------
#
# Block mu (pairs with max exactly mu) has order type mu*2+1, so the rank of
# the first pair with max m is S(m) = sum_{mu<m} (mu*2+1).  S is evaluated
# one CNF term of m at a time:
#   S(0 + w^e)        = w^g(e)                         (e >= 1)
#   S(L + w^e)        = S(L) + w^(lead(L)+e)          (L > 0, e >= 1)
#   S(L + n)          = S(L) + L*(2n) + n             (L infinite)
#   S(n)              = n^2

def _g(e: Ordinal) -> Ordinal:
    if e._fin is not None:
        return Ordinal.of(2 * e._fin - 1)
    if e.is_successor:
        prev = e.predecessor()
        return add(mul(prev, 2), 1)
    gamma = Ordinal._raw(e.terms[:-1])
    k, kc = e.terms[-1]
    gamma = add(gamma, omega_power(k, kc - 1))
    return add(mul(gamma, 2), omega_power(k))


@lru_cache(maxsize=65536)
def _square_rank(m: Ordinal) -> Ordinal:
    if m._fin is not None:
        return Ordinal.of(m._fin * m._fin)
    total = ZERO
    left = ZERO
    for e, c in m.terms:
        if e.is_zero:
            total = add(total, add(mul(left, 2 * c), c))
        elif left.is_zero:
            total = add(total, omega_power(_g(e)))
            if c > 1:
                total = add(total, omega_power(add(e, e), c - 1))
        else:
            total = add(total, omega_power(add(left.lead_exponent, e), c))
        left = add(left, omega_power(e, c))
    return total


def pair(a: OrdLike, b: OrdLike) -> Ordinal:
    a, b = as_ordinal(a), as_ordinal(b)
    if a._fin is not None and b._fin is not None:
        x, y = a._fin, b._fin
        m = max(x, y)
        return Ordinal.of(m * m + x if x < m else m * m + m + y)
    m = a if a >= b else b
    base = _square_rank(m)
    if a < m:
        return add(base, a)
    return add(base, add(m, b))


def _max_sat(pred: Callable[[Ordinal], bool], hi: Ordinal) -> Ordinal:
    """Largest ``x <= hi`` with ``pred(x)``.

    ``pred`` must hold at 0, be closed downwards and be closed under
    suprema; the answer is built one CNF term at a time.
    """
    x = ZERO
    cap = hi.lead_exponent
    while True:
        step = add(x, 1)
        if step > hi or not pred(step):
            return x
        base = x
        e = _max_sat(lambda d: (t := add(base, omega_power(d))) <= hi and pred(t), cap)
        ok = lambda k: (t := add(base, omega_power(e, k))) <= hi and pred(t)
        lo, top = 1, 2
        while ok(top):
            lo, top = top, top * 2
        while top - lo > 1:
            mid = (lo + top) // 2
            if ok(mid):
                lo = mid
            else:
                top = mid
        x = add(base, omega_power(e, lo))
        cap = e


def unpair(o: OrdLike) -> tuple[Ordinal, Ordinal]:
    o = as_ordinal(o)
    if o._fin is not None:
        n = o._fin
        m = isqrt(n)
        r = n - m * m
        if r < m:
            return Ordinal.of(r), Ordinal.of(m)
        return Ordinal.of(m), Ordinal.of(r - m)
    m = _max_sat(lambda x: _square_rank(x) <= o, o)
    r = sub(_square_rank(m), o)
    if r < m:
        return r, m
    return m, sub(m, r)


# -- text syntax ------------------------------------------------------------

def format_ordinal(o: Ordinal) -> str:
    if o._fin is not None:
        return str(o._fin)
    parts = []
    for e, c in o.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        if e == ONE:
            s = "w"
        elif e.is_finite or e == OMEGA:
            s = f"w^{e}"
        else:
            s = f"w^({e})"
        parts.append(s if c == 1 else f"{s}*{c}")
    return "+".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+)|(w)|(\^)|(\*)|(\+)|(\()|(\)))")


def parse_ordinal(text: str) -> Ordinal:
    """Parse canonical CNF text such as ``w^2*3+w+5`` or ``w^(w+1)``."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise OrdinalSyntaxError(f"bad ordinal syntax at {pos}: {text!r}")
        kind = m.lastindex
        toks.append((kind, m.group(kind), pos))
        pos = m.end()
    toks.append((0, "", len(text)))
    i = 0

    def peek():
        return toks[i][0]

    def take(kind):
        nonlocal i
        if toks[i][0] != kind:
            raise OrdinalSyntaxError(f"unexpected {toks[i][1]!r} at {toks[i][2]} in {text!r}")
        i += 1
        return toks[i - 1][1]

    def expr():
        terms = [term()]
        while peek() == 5:
            take(5)
            terms.append(term())
        for (e1, _), (e2, _) in zip(terms, terms[1:]):
            if _cmp(e1, e2) <= 0:
                raise OrdinalSyntaxError(f"not in Cantor normal form: {text!r}")
        return Ordinal._raw([t for t in terms if t[1]])

    def term():
        if peek() == 1:
            n = int(take(1))
            if n == 0 and len(toks) > 2:
                raise OrdinalSyntaxError(f"zero term in sum: {text!r}")
            return (ZERO, n)
        take(2)
        e = ONE
        if peek() == 3:
            take(3)
            if peek() == 6:
                take(6)
                e = expr()
                take(7)
            elif peek() == 1:
                e = Ordinal.of(int(take(1)))
            else:
                take(2)
                e = OMEGA
            if e.is_zero:
                raise OrdinalSyntaxError(f"w^0 is not canonical: {text!r}")
        c = 1
        if peek() == 4:
            take(4)
            c = int(take(1))
            if c < 1:
                raise OrdinalSyntaxError(f"zero coefficient: {text!r}")
        return (e, c)

    if text == "0":
        return ZERO
    result = expr()
    take(0)
    return result
