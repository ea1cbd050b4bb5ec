"""Sets coded as sets of ordinals.

A hereditarily finite set is a ``frozenset`` of hereditarily finite sets.  Its
code lists the ordinal ``pair(i, j)`` for every membership ``f(i) in f(j)``
under an enumeration ``f`` of ``{x} | tc(x)`` with ``f(0) == x``.

Codes of infinite sets cannot be listed; they carry a membership predicate
(:class:`PredExpr`) over the pair ordinal instead.  Only ``omega`` is built
that way here.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .ordinal import (
    OMEGA, ZERO, Ordinal, add, format_ordinal, pair,
    parse_ordinal, unpair,
)

SetValue = frozenset

EMPTY: SetValue = frozenset()


class SetCodeError(ValueError):
    pass


class NotFinitary(SetCodeError):
    pass


class IllFounded(SetCodeError):
    pass


class InvalidCode(SetCodeError):
    pass


# -- hereditarily finite sets ----------------------------------------------

def hf(*elems: SetValue) -> SetValue:
    return frozenset(elems)


@lru_cache(maxsize=None)
def von_neumann(n: int) -> SetValue:
    out = EMPTY
    for _ in range(n):
        out = out | {out}
    return out


@lru_cache(maxsize=None)
def rank(x: SetValue) -> int:
    return max((rank(y) + 1 for y in x), default=0)


@lru_cache(maxsize=None)
def canon_key(x: SetValue) -> tuple:
    """Total order on HF sets: rank first, then sorted element keys."""
    return (rank(x), tuple(sorted(canon_key(y) for y in x)))


def canonical(xs: Iterable[SetValue]) -> list[SetValue]:
    return sorted(xs, key=canon_key)


@lru_cache(maxsize=None)
def tc(x: SetValue) -> SetValue:
    out = set(x)
    for y in x:
        out |= tc(y)
    return frozenset(out)


@lru_cache(maxsize=None)
def universe(n: int) -> tuple[SetValue, ...]:
    """V_n in canonical order (V_4 has 16 elements)."""
    if n == 0:
        return ()
    prev = universe(n - 1)
    subsets = [frozenset(c) for k in range(len(prev) + 1) for c in combinations(prev, k)]
    return tuple(canonical(subsets))


def union_of(x: SetValue) -> SetValue:
    return frozenset(z for y in x for z in y)


def successor_of(x: SetValue) -> SetValue:
    return x | {x}


def kpair(a: SetValue, b: SetValue) -> SetValue:
    return frozenset({frozenset({a}), frozenset({a, b})})


def format_set(x: SetValue) -> str:
    return "{" + ",".join(format_set(y) for y in canonical(x)) + "}"


# -- predicates over one ordinal variable ----------------------------------

class PredExpr:
    """Expression over the ordinal variable; ``evaluate`` is total."""

    def evaluate(self, g: Ordinal):
        raise NotImplementedError


@dataclass(frozen=True)
class Var(PredExpr):
    def evaluate(self, g):
        return g

    def __str__(self):
        return "g"


@dataclass(frozen=True)
class Const(PredExpr):
    value: Ordinal

    def evaluate(self, g):
        return self.value

    def __str__(self):
        return format_ordinal(self.value)


@dataclass(frozen=True)
class Left(PredExpr):
    arg: PredExpr

    def evaluate(self, g):
        return unpair(self.arg.evaluate(g))[0]

    def __str__(self):
        return f"left({self.arg})"


@dataclass(frozen=True)
class Right(PredExpr):
    arg: PredExpr

    def evaluate(self, g):
        return unpair(self.arg.evaluate(g))[1]

    def __str__(self):
        return f"right({self.arg})"


@dataclass(frozen=True)
class AddConst(PredExpr):
    arg: PredExpr
    const: Ordinal

    def evaluate(self, g):
        return add(self.arg.evaluate(g), self.const)

    def __str__(self):
        return f"({self.arg}+{format_ordinal(self.const)})"


@dataclass(frozen=True)
class Lt(PredExpr):
    lhs: PredExpr
    rhs: PredExpr

    def evaluate(self, g):
        return self.lhs.evaluate(g) < self.rhs.evaluate(g)

    def __str__(self):
        return f"{self.lhs}<{self.rhs}"


@dataclass(frozen=True)
class Eq(PredExpr):
    lhs: PredExpr
    rhs: PredExpr

    def evaluate(self, g):
        return self.lhs.evaluate(g) == self.rhs.evaluate(g)

    def __str__(self):
        return f"{self.lhs}={self.rhs}"


@dataclass(frozen=True)
class And(PredExpr):
    parts: tuple

    def evaluate(self, g):
        return all(p.evaluate(g) for p in self.parts)

    def __str__(self):
        return "(" + " & ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Or(PredExpr):
    parts: tuple

    def evaluate(self, g):
        return any(p.evaluate(g) for p in self.parts)

    def __str__(self):
        return "(" + " | ".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class Not(PredExpr):
    arg: PredExpr

    def evaluate(self, g):
        return not self.arg.evaluate(g)

    def __str__(self):
        return f"~{self.arg}"


@dataclass(frozen=True)
class At(PredExpr):
    """Evaluate ``pred`` with the variable bound to the value of ``arg``."""
    pred: PredExpr
    arg: PredExpr

    def evaluate(self, g):
        return self.pred.evaluate(self.arg.evaluate(g))

    def __str__(self):
        return f"[{self.pred}]@{self.arg}"


# -- codes -----------------------------------------------------------------

@dataclass(frozen=True)
class SetCode:
    bound: Ordinal
    members: Optional[tuple[Ordinal, ...]] = None
    pred: Optional[PredExpr] = None
    label: str = field(default="", compare=False)

    @property
    def is_explicit(self) -> bool:
        return self.members is not None

    def contains(self, g: Ordinal) -> bool:
        if self.members is not None:
            return g in self._member_set()
        return bool(self.pred.evaluate(g))

    def _member_set(self):
        try:
            return self.__dict__["_ms"]
        except KeyError:
            ms = frozenset(self.members)
            object.__setattr__(self, "_ms", ms)
            return ms

    def __str__(self):
        if self.members is None:
            return f"code(bound={format_ordinal(self.bound)}, <{self.label or self.pred}>)"
        body = ",".join(format_ordinal(m) for m in self.members)
        return f"code(bound={format_ordinal(self.bound)}, {{{body}}})"


def encode_enumeration(order: Sequence[SetValue]) -> SetCode:
    """Code of ``order[0]`` under the enumeration ``f(i) = order[i]``."""
    index = {v: i for i, v in enumerate(order)}
    if len(index) != len(order):
        raise ValueError("enumeration repeats a set")
    members = []
    for j, y in enumerate(order):
        for z in y:
            members.append(pair(index[z], j))
    return SetCode(Ordinal.of(len(order)), tuple(sorted(members)))


@lru_cache(maxsize=None)
def encode(x: SetValue) -> SetCode:
    return encode_enumeration([x] + canonical(tc(x)))


def _graph(c: SetCode) -> dict[int, list[int]]:
    if not c.is_explicit:
        raise NotFinitary(f"{c} is schematic")
    bound = c.bound
    children: dict[int, list[int]] = {}
    for g in c.members:
        i, j = unpair(g)
        if not (i < bound and j < bound):
            raise InvalidCode(f"member {g} = pair({i},{j}) exceeds bound {bound}")
        children.setdefault(int(j), []).append(int(i))
    return children


@lru_cache(maxsize=4096)
def decode(c: SetCode) -> SetValue:
    children = _graph(c)
    done: dict[int, SetValue] = {}
    active: set[int] = set()

    def value(k: int) -> SetValue:
        if k in done:
            return done[k]
        if k in active:
            raise IllFounded(f"index {k} lies on a membership cycle")
        active.add(k)
        v = frozenset(value(i) for i in children.get(k, ()))
        active.discard(k)
        done[k] = v
        return v

    return value(0)


def _scan_limit(cap: int) -> int:
    return 4 * cap + 16


def _schematic_members(c: SetCode, k: int, limit: int) -> list[int]:
    out = []
    for i in range(limit):
        if not i < c.bound:
            break
        if c.pred.evaluate(pair(i, k)):
            out.append(i)
    return out


def _schematic_value(c: SetCode, k: int, limit: int, memo: dict, active: set) -> SetValue:
    if k in memo:
        return memo[k]
    if k in active:
        raise IllFounded(f"index {k} lies on a membership cycle")
    active.add(k)
    v = frozenset(_schematic_value(c, i, limit, memo, active)
                  for i in _schematic_members(c, k, limit))
    active.discard(k)
    memo[k] = v
    return v


@lru_cache(maxsize=1024)
def _elements(c: SetCode, cap: int) -> tuple[SetCode, ...]:
    if c.is_explicit:
        return tuple(encode(y) for y in canonical(decode(c))[:cap])
    limit = _scan_limit(cap)
    memo: dict = {}
    out = []
    for i in range(1, limit):
        if len(out) >= cap or not i < c.bound:
            break
        if c.pred.evaluate(pair(i, 0)):
            out.append(encode(_schematic_value(c, i, limit, memo, set())))
    return tuple(out)


def elements(c: SetCode, cap: int = 20) -> list[SetCode]:
    """Codes of members of the coded set, at most ``cap`` of them.

    Schematic codes are scanned over finite indices only, in increasing order.
    """
    return list(_elements(c, cap))


def members(c: SetCode, cap: int = 20) -> list[SetCode]:
    """All member codes of an explicit code; at most ``cap`` for a schematic one."""
    return list(_elements(c, _ALL if c.is_explicit else cap))


_ALL = 1 << 30


def element_values(c: SetCode, cap: int = 20) -> list[SetValue]:
    return [decode(e) for e in _elements(c, cap)]


def is_equal(c1: SetCode, c2: SetCode) -> bool:
    return decode(c1) == decode(c2)


def is_member(c1: SetCode, c2: SetCode) -> bool:
    return decode(c1) in decode(c2)


def search_member(c1: SetCode, c2: SetCode, cap: int) -> Optional[bool]:
    """Membership allowing a schematic right side; ``None`` when undecided."""
    if c2.is_explicit:
        return is_member(c1, c2)
    v = decode(c1)
    found = element_values(c2, cap)
    if v in found:
        return True
    return False if len(found) < cap else None


OMEGA_PRED = (lambda a, b: Or((
    And((Eq(b, Const(ZERO)), Lt(Const(ZERO), a), Lt(a, Const(OMEGA)))),
    And((Lt(Const(ZERO), a), Lt(a, b), Lt(b, Const(OMEGA)))),
)))(Left(Var()), Right(Var()))


def make_omega() -> SetCode:
    """Schematic code of omega: f(0) = omega, f(1+n) = n."""
    return SetCode(OMEGA, None, OMEGA_PRED, label="omega")


_ARITY = {"pair_set": 2, "union": 1, "singleton": 1, "successor": 1,
          "kuratowski_pair": 2, "omega": 0}


def construct(kind: str, args: Sequence[SetCode] = ()) -> SetCode:
    if kind not in _ARITY:
        raise ValueError(f"unknown construction {kind!r}")
    if len(args) != _ARITY[kind]:
        raise TypeError(f"{kind} takes {_ARITY[kind]} argument(s), got {len(args)}")
    if kind == "omega":
        return make_omega()
    vals = [decode(a) for a in args]
    if kind == "pair_set":
        out = frozenset(vals)
    elif kind == "union":
        out = union_of(vals[0])
    elif kind == "singleton":
        out = frozenset(vals)
    elif kind == "successor":
        out = successor_of(vals[0])
    else:
        out = kpair(*vals)
    return encode(out)


def set_of_codes(codes: Iterable[SetCode]) -> SetCode:
    return encode(frozenset(decode(c) for c in codes))


# -- text ------------------------------------------------------------------

def parse_set(text: str) -> SetValue:
    """Parse ``{}``, ``{A,B,...}`` and ``ord(n)`` literals."""
    text = text.strip()
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def item() -> SetValue:
        nonlocal pos
        skip()
        if text.startswith("ord(", pos):
            end = text.index(")", pos)
            n = int(text[pos + 4:end])
            pos = end + 1
            return von_neumann(n)
        if pos >= len(text) or text[pos] != "{":
            raise ValueError(f"expected '{{' at {pos} in {text!r}")
        pos += 1
        skip()
        elems = []
        if pos < len(text) and text[pos] == "}":
            pos += 1
            return EMPTY
        while True:
            elems.append(item())
            skip()
            if pos < len(text) and text[pos] == ",":
                pos += 1
                continue
            if pos < len(text) and text[pos] == "}":
                pos += 1
                return frozenset(elems)
            raise ValueError(f"expected ',' or '}}' at {pos} in {text!r}")

    v = item()
    skip()
    if pos != len(text):
        raise ValueError(f"trailing input at {pos} in {text!r}")
    return v


def parse_code_literal(text: str) -> SetCode:
    """Set literals (``{}``, ``ord(3)``, ``omega``) or ``code(bound=..., {...})``."""
    text = text.strip()
    if text == "omega":
        return make_omega()
    m = re.fullmatch(r"code\(\s*bound\s*=\s*([^,]+?)\s*,\s*\{([^}]*)\}\s*\)", text)
    if m:
        bound = parse_ordinal(m.group(1))
        body = m.group(2).strip()
        members = [parse_ordinal(t) for t in body.split(",")] if body else []
        return SetCode(bound, tuple(sorted(set(members))))
    return encode(parse_set(text))


def as_code(x) -> SetCode:
    if isinstance(x, SetCode):
        return x
    if isinstance(x, frozenset):
        return encode(x)
    if isinstance(x, str):
        return parse_code_literal(x)
    raise TypeError(f"cannot interpret {x!r} as a set code")
