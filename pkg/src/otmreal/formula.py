"""The language of set theory: syntax trees, parser, and a truth evaluator.

Terms are plain identifier strings.  Whether an identifier is a parameter or
a variable is decided by the environment it is evaluated in: names bound in
the ``Env`` are parameters, anything else is a variable.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Mapping, Optional

from .config import DEFAULT, CheckCfg
from .setcode import (
    SetCode, decode, encode, members as members_of, is_equal, search_member,
    universe,
)

Env = Mapping[str, SetCode]


class Formula:
    __slots__ = ()

    def __str__(self):
        return show(self)


@dataclass(frozen=True)
class In(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Falsum(Formula):
    pass


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class BoundedForall(Formula):
    var: str
    bound: str
    body: Formula


@dataclass(frozen=True)
class BoundedExists(Formula):
    var: str
    bound: str
    body: Formula


FALSUM = Falsum()


def Not(phi: Formula) -> Formula:
    return Implies(phi, FALSUM)


VERUM = Not(FALSUM)


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def is_not(phi: Formula) -> bool:
    return isinstance(phi, Implies) and phi.right == FALSUM


ATOMS = (In, Eq, Falsum)
QUANTIFIERS = (Forall, Exists, BoundedForall, BoundedExists)


def unbound(phi: Formula) -> Formula:
    """Spell a bounded quantifier out as its unbounded definition."""
    if isinstance(phi, BoundedForall):
        return Forall(phi.var, Implies(In(phi.var, phi.bound), phi.body))
    if isinstance(phi, BoundedExists):
        return Exists(phi.var, And(In(phi.var, phi.bound), phi.body))
    return phi


# -- parsing ---------------------------------------------------------------

class FormulaSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKENS = re.compile(r"\s*(?:(->)|([A-Za-z_][A-Za-z0-9_']*)|([.|&~()=]))")
_KEYWORDS = {"forall", "exists", "in", "false"}


def _tokenize(text: str) -> list[tuple[str, int]]:
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKENS.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        out.append((tok, m.start(m.lastindex)))
        pos = m.end()
    out.append(("", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def pos(self) -> int:
        return self.toks[self.i][1]

    def take(self, expect: Optional[str] = None) -> str:
        tok = self.peek()
        if expect is not None and tok != expect:
            raise FormulaSyntaxError(f"expected {expect!r}, found {tok or 'end of input'!r}", self.pos())
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", tok or "-") or tok in _KEYWORDS:
            raise FormulaSyntaxError(f"expected identifier, found {tok or 'end of input'!r}", self.pos())
        return self.take()

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok in ("forall", "exists"):
            self.take()
            var = self.ident()
            bound = None
            if self.peek() == "in":
                self.take()
                bound = self.ident()
            self.take(".")
            body = self.formula()
            if tok == "forall":
                return Forall(var, body) if bound is None else BoundedForall(var, bound, body)
            return Exists(var, body) if bound is None else BoundedExists(var, bound, body)
        if tok == "(":
            self.take()
            inner = self.formula()
            self.take(")")
            return inner
        if tok == "false":
            self.take()
            return FALSUM
        left = self.ident()
        op = self.peek()
        if op == "in":
            self.take()
            return In(left, self.ident())
        if op == "=":
            self.take()
            return Eq(left, self.ident())
        raise FormulaSyntaxError(f"expected 'in' or '=', found {op or 'end of input'!r}", self.pos())


def parse(text: str) -> Formula:
    p = _Parser(text)
    phi = p.formula()
    if p.peek() != "":
        raise FormulaSyntaxError(f"unexpected {p.peek()!r}", p.pos())
    return phi


# -- printing ----------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3}


def show(phi: Formula, prec: int = 0) -> str:
    if isinstance(phi, In):
        return f"{phi.left} in {phi.right}"
    if isinstance(phi, Eq):
        return f"{phi.left} = {phi.right}"
    if isinstance(phi, Falsum):
        return "false"
    if is_not(phi):
        return "~ " + show(phi.left, 4)
    if isinstance(phi, QUANTIFIERS):
        kw = "forall" if isinstance(phi, (Forall, BoundedForall)) else "exists"
        head = f"{kw} {phi.var}"
        if isinstance(phi, (BoundedForall, BoundedExists)):
            head += f" in {phi.bound}"
        s = f"{head}. {show(phi.body)}"
        return f"({s})" if prec > 0 else s
    p = _PREC[type(phi)]
    sym = {Implies: "->", Or: "|", And: "&"}[type(phi)]
    if isinstance(phi, Implies):
        s = f"{show(phi.left, p + 1)} -> {show(phi.right, p)}"
    else:
        s = f"{show(phi.left, p)} {sym} {show(phi.right, p + 1)}"
    return f"({s})" if prec > p else s


# -- syntax utilities --------------------------------------------------------

def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, (In, Eq)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Falsum):
        return frozenset()
    if isinstance(phi, (And, Or, Implies)):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return free_vars(phi.body) - {phi.var}
    return (free_vars(phi.body) - {phi.var}) | {phi.bound}


def names(phi: Formula) -> frozenset[str]:
    """Every identifier occurring in ``phi``, bound or free."""
    if isinstance(phi, (In, Eq)):
        return frozenset((phi.left, phi.right))
    if isinstance(phi, Falsum):
        return frozenset()
    if isinstance(phi, (And, Or, Implies)):
        return names(phi.left) | names(phi.right)
    out = names(phi.body) | {phi.var}
    if isinstance(phi, (BoundedForall, BoundedExists)):
        out |= {phi.bound}
    return out


_fresh_counter = itertools.count()


def fresh(avoid, stem: str = "v") -> str:
    while True:
        name = f"{stem}_{next(_fresh_counter)}"
        if name not in avoid:
            return name


def subst(phi: Formula, var: str, name: str) -> Formula:
    """Replace free occurrences of ``var`` by ``name``, renaming binders that would capture it."""
    if var == name:
        return phi
    if isinstance(phi, In):
        return In(name if phi.left == var else phi.left, name if phi.right == var else phi.right)
    if isinstance(phi, Eq):
        return Eq(name if phi.left == var else phi.left, name if phi.right == var else phi.right)
    if isinstance(phi, Falsum):
        return phi
    if isinstance(phi, (And, Or, Implies)):
        return type(phi)(subst(phi.left, var, name), subst(phi.right, var, name))
    bounded = isinstance(phi, (BoundedForall, BoundedExists))
    bound = phi.bound if bounded else None
    if bounded and bound == var:
        bound = name
    if phi.var == var:
        return type(phi)(phi.var, bound, phi.body) if bounded else phi
    v, body = phi.var, phi.body
    if v == name and var in free_vars(body):
        nv = fresh(names(body) | {name, var})
        body = subst(body, v, nv)
        v = nv
    body = subst(body, var, name)
    return type(phi)(v, bound, body) if bounded else type(phi)(v, body)


def closure(phi: Formula, params=()) -> Formula:
    """Universal closure over free names that are not parameters (sorted)."""
    out = phi
    for v in sorted(free_vars(phi) - set(params), reverse=True):
        out = Forall(v, out)
    return out


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, ATOMS):
        return True
    if isinstance(phi, (And, Or, Implies)):
        return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)
    return False


def is_delta0(phi: Formula) -> bool:
    if isinstance(phi, ATOMS):
        return True
    if isinstance(phi, (And, Or, Implies)):
        return is_delta0(phi.left) and is_delta0(phi.right)
    if isinstance(phi, (BoundedForall, BoundedExists)):
        return is_delta0(phi.body)
    return False


def nnf(phi: Formula) -> Formula:
    """Classical negation normal form; negation only in front of atoms."""
    if isinstance(phi, ATOMS):
        return phi
    if is_not(phi):
        if isinstance(phi.left, ATOMS):
            return phi
        return bar(phi.left)
    if isinstance(phi, Implies):
        return Or(bar(phi.left), nnf(phi.right))
    if isinstance(phi, (And, Or)):
        return type(phi)(nnf(phi.left), nnf(phi.right))
    if isinstance(phi, (Forall, Exists)):
        return type(phi)(phi.var, nnf(phi.body))
    return type(phi)(phi.var, phi.bound, nnf(phi.body))


def bar(phi: Formula) -> Formula:
    """Classical negation of ``phi`` in negation normal form."""
    if isinstance(phi, ATOMS):
        return Not(phi)
    if is_not(phi):
        return nnf(phi.left)
    if isinstance(phi, Implies):
        return And(nnf(phi.left), bar(phi.right))
    if isinstance(phi, And):
        return Or(bar(phi.left), bar(phi.right))
    if isinstance(phi, Or):
        return And(bar(phi.left), bar(phi.right))
    if isinstance(phi, Forall):
        return Exists(phi.var, bar(phi.body))
    if isinstance(phi, Exists):
        return Forall(phi.var, bar(phi.body))
    if isinstance(phi, BoundedForall):
        return BoundedExists(phi.var, phi.bound, bar(phi.body))
    return BoundedForall(phi.var, phi.bound, bar(phi.body))


def has_unbounded(phi: Formula) -> bool:
    if isinstance(phi, ATOMS):
        return False
    if isinstance(phi, (And, Or, Implies)):
        return has_unbounded(phi.left) or has_unbounded(phi.right)
    if isinstance(phi, (Forall, Exists)):
        return True
    return has_unbounded(phi.body)


# -- truth -------------------------------------------------------------------

class Truth(Enum):
    TRUE = "True"
    FALSE = "False"
    INCONCLUSIVE = "Inconclusive"

    def __str__(self):
        return self.value


T, F, I = Truth.TRUE, Truth.FALSE, Truth.INCONCLUSIVE


class UnboundParameter(KeyError):
    pass


def test_universe(env: Env, cfg: CheckCfg = DEFAULT) -> list[SetCode]:
    """Codes that unbounded quantifiers range over: V_rank plus explicit env codes."""
    vals = list(universe(cfg.universe_rank))
    seen = set(vals)
    for c in env.values():
        if c.is_explicit:
            v = decode(c)
            if v not in seen:
                seen.add(v)
                vals.append(v)
    return [encode(v) for v in vals]


test_universe.__test__ = False  # not a pytest test


def _lookup(env: Env, name: str) -> SetCode:
    try:
        return env[name]
    except KeyError:
        raise UnboundParameter(name) from None


def _and(vals: Iterator[Truth]) -> Truth:
    out = T
    for v in vals:
        if v is F:
            return F
        if v is I:
            out = I
    return out


def _or(vals: Iterator[Truth]) -> Truth:
    out = F
    for v in vals:
        if v is T:
            return T
        if v is I:
            out = I
    return out


def eval_truth(phi: Formula, env: Env, cfg: CheckCfg = DEFAULT) -> Truth:
    """Classical truth of ``phi`` with its names read through ``env``.

    Bounded quantifiers over explicit codes are exact.  Unbounded quantifiers
    range over :func:`test_universe`, so a verdict on such a formula is only
    relative to that universe (see :func:`has_unbounded`).  A quantifier
    bounded by a schematic code yields ``INCONCLUSIVE`` unless a sampled
    element settles it.
    """
    top = dict(env)
    universe_codes = None

    def ev(phi: Formula, env: dict) -> Truth:
        nonlocal universe_codes
        if isinstance(phi, Falsum):
            return F
        if isinstance(phi, In):
            a, b = _lookup(env, phi.left), _lookup(env, phi.right)
            if not a.is_explicit:
                return I
            r = search_member(a, b, 4 * cfg.element_cap)
            return I if r is None else (T if r else F)
        if isinstance(phi, Eq):
            a, b = _lookup(env, phi.left), _lookup(env, phi.right)
            if a.is_explicit and b.is_explicit:
                return T if is_equal(a, b) else F
            return T if a == b else I
        if isinstance(phi, And):
            return _and(ev(p, env) for p in (phi.left, phi.right))
        if isinstance(phi, Or):
            return _or(ev(p, env) for p in (phi.left, phi.right))
        if isinstance(phi, Implies):
            a = ev(phi.left, env)
            if a is F:
                return T
            b = ev(phi.right, env)
            if b is T:
                return T
            return F if a is T and b is F else I
        if isinstance(phi, (BoundedForall, BoundedExists)):
            bound = _lookup(env, phi.bound)
            members = members_of(bound, cfg.element_cap)
            vals = (ev(phi.body, {**env, phi.var: m}) for m in members)
            if isinstance(phi, BoundedForall):
                r = _and(vals)
                return I if r is T and not bound.is_explicit else r
            r = _or(vals)
            return I if r is F and not bound.is_explicit else r
        if universe_codes is None:
            universe_codes = test_universe(top, cfg)
        vals = (ev(phi.body, {**env, phi.var: m}) for m in universe_codes)
        return _and(vals) if isinstance(phi, Forall) else _or(vals)

    return ev(phi, top)
