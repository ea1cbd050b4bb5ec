"""Checking the realizability relation at desk scale.

The clauses for atoms, conjunction, disjunction and the existential
quantifier are decided exactly (up to the truth of the formulas reached).
Implications and unbounded universal quantifiers are checked on samples:
candidate realizers of the antecedent drawn by :func:`enumerate_realizers`,
and instances drawn from the test universe.  A ``Refuted`` verdict always
comes with a concrete failing path; ``Verified`` says how it was obtained.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Iterable, Iterator, Mapping, Optional, Union

from ..config import DEFAULT, CheckCfg
from ..formula import (
    And, BoundedExists, BoundedForall, Exists, Falsum, Forall, Formula, Implies,
    Or, Truth, closure, eval_truth, is_quantifier_free, show,
    test_universe,
)
from ..setcode import SetCode, decode, elements, format_set, members, rank, search_member
from .core import (
    TRIVIAL, Conj, ProgPair, ProgramFailure, Realizer, RealizerError,
    Tagged, apply, inst_forall, native, open_exists, prog,
)

Env = Mapping[str, SetCode]


# -- verdicts ------------------------------------------------------------------

@dataclass(frozen=True)
class Verified:
    total: bool
    rank: int = 0
    samples: int = 0

    def __str__(self):
        if self.total:
            return "VERIFIED[total]"
        return f"VERIFIED[universe=V{self.rank},samples={self.samples}]"


@dataclass(frozen=True)
class Refuted:
    witness: str

    def __str__(self):
        return f"REFUTED: {self.witness}"


@dataclass(frozen=True)
class Inconclusive:
    reason: str

    def __str__(self):
        return f"INCONCLUSIVE: {self.reason}"


Verdict = Union[Verified, Refuted, Inconclusive]


def describe(c: SetCode) -> str:
    if c.is_explicit:
        x = decode(c)
        # printed size grows exponentially with rank
        return format_set(x) if rank(x) <= 5 else f"<set of rank {rank(x)}>"
    return c.label or str(c)


class _Where:
    """Location suffix for messages, rendered only when a message is built."""

    def __init__(self, env: Env):
        self.env = env

    def __str__(self):
        if not self.env:
            return ""
        return " at " + ", ".join(f"{k}={describe(v)}" for k, v in sorted(self.env.items()))



# -- realizers obtained from truth -----------------------------------------------

def _freeze(env: Env) -> tuple:
    return tuple(sorted(env.items()))


def domain(env: Env, cfg: CheckCfg) -> list[SetCode]:
    """Codes that unbounded quantifiers range over for a given environment."""
    out = list(test_universe(env, cfg))
    for c in env.values():
        if not c.is_explicit:
            out.extend(elements(c, cfg.element_cap))
    seen, uniq = set(), []
    for c in out:
        key = decode(c)
        if key not in seen:
            seen.add(key)
            uniq.append(c)
    return uniq


def synthesize(phi: Formula, env: Env, cfg: CheckCfg = DEFAULT) -> Realizer:
    """A realizer for ``phi`` read off its truth, case by case.

    Atoms get the trivial realizer, disjunctions the first true disjunct, and
    everything with a quantifier or implication a program that continues the
    synthesis on its input.
    """
    if is_quantifier_free(phi):
        return TRIVIAL
    if isinstance(phi, And):
        return Conj(synthesize(phi.left, env, cfg), synthesize(phi.right, env, cfg))
    if isinstance(phi, Or):
        if eval_truth(phi.left, env, cfg) is not Truth.TRUE and \
                eval_truth(phi.right, env, cfg) is Truth.TRUE:
            return Tagged(1, synthesize(phi.right, env, cfg))
        return Tagged(0, synthesize(phi.left, env, cfg))
    return prog("auto", phi, _freeze(env))


def search_witness(phi: Union[Exists, BoundedExists], env: Env, cfg: CheckCfg) -> SetCode:
    if isinstance(phi, BoundedExists):
        pool = members(env[phi.bound], cfg.element_cap)
    else:
        pool = domain(env, cfg)
    fallback = None
    for b in pool:
        t = eval_truth(phi.body, {**env, phi.var: b}, cfg)
        if t is Truth.TRUE:
            return b
        if t is Truth.INCONCLUSIVE and fallback is None:
            fallback = b
    if fallback is None:
        raise ProgramFailure(f"no witness for {show(phi)}")
    return fallback


@native("auto")
def _auto(caps, alpha, cfg, *args):
    phi, frozen = caps
    env = dict(frozen)
    if isinstance(phi, Implies):
        return synthesize(phi.right, env, cfg)
    if isinstance(phi, (Forall, BoundedForall)):
        (a,) = args
        return synthesize(phi.body, {**env, phi.var: a}, cfg)
    if isinstance(phi, (Exists, BoundedExists)):
        b = search_witness(phi, env, cfg)
        return b, synthesize(phi.body, {**env, phi.var: b}, cfg)
    raise ProgramFailure(f"auto has nothing to run for {show(phi)}")


@native("id")
def _id(caps, alpha, cfg, r):
    return r


@native("const")
def _const(caps, alpha, cfg, *args):
    return caps[0]


@native("absurd")
def _absurd(caps, alpha, cfg, *args):
    return TRIVIAL


@native("witness")
def _witness(caps, alpha, cfg):
    return caps[0], caps[1]


@native("table")
def _table(caps, alpha, cfg, a):
    want = decode(a)
    for code, r in caps[0]:
        if decode(code) == want:
            return r
    raise ProgramFailure(f"no entry for {format_set(want)}")


# -- candidate enumeration -------------------------------------------------------

def _interleave(*streams: Iterable) -> Iterator:
    its = [iter(s) for s in streams]
    while its:
        nxt = []
        for it in its:
            try:
                yield next(it)
                nxt.append(it)
            except StopIteration:
                pass
        its = nxt


def _dedupe(xs: Iterable) -> Iterator:
    seen = set()
    for x in xs:
        if x not in seen:
            seen.add(x)
            yield x


def enumerate_realizers(phi: Formula, env: Optional[Env] = None, depth: Optional[int] = None,
                        cfg: CheckCfg = DEFAULT) -> list[Realizer]:
    """Candidate realizers shaped for ``phi``, at most ``cfg.sample_count``.

    False quantifier-free formulas (``false`` above all) get none.
    """
    env = dict(env or {})
    depth = cfg.enum_depth if depth is None else depth
    return list(islice(_dedupe(_enum(phi, env, depth, cfg)), cfg.sample_count))


def _enum(phi: Formula, env: dict, depth: int, cfg: CheckCfg) -> Iterator[Realizer]:
    if isinstance(phi, Falsum):
        return
    if is_quantifier_free(phi):
        if eval_truth(phi, env, cfg) is not Truth.FALSE:
            yield TRIVIAL
        return
    sub = max(depth - 1, 0)
    if isinstance(phi, And):
        rights = enumerate_realizers(phi.right, env, sub, cfg)
        for lft in enumerate_realizers(phi.left, env, sub, cfg):
            for rgt in rights:
                yield Conj(lft, rgt)
        return
    if isinstance(phi, Or):
        yield from _interleave(
            (Tagged(0, r) for r in enumerate_realizers(phi.left, env, sub, cfg)),
            (Tagged(1, r) for r in enumerate_realizers(phi.right, env, sub, cfg)))
        return
    yield prog("auto", phi, _freeze(env))
    if isinstance(phi, Implies):
        if phi.left == phi.right:
            yield prog("id")
        yield prog("absurd")
        if depth > 0:
            for r in enumerate_realizers(phi.right, env, sub, cfg):
                yield prog("const", r)
    elif isinstance(phi, (Forall, BoundedForall)):
        yield prog("absurd")
    elif depth > 0:
        if isinstance(phi, BoundedExists):
            pool = members(env[phi.bound], cfg.element_cap)
        else:
            pool = domain(env, cfg)
        for b in pool:
            for r in islice(_enum(phi.body, {**env, phi.var: b}, sub, cfg), 2):
                yield prog("witness", b, r)


# -- the checker -----------------------------------------------------------------

class Checker:
    """One checking session; memoizes sub-verdicts across a top-level call."""

    def __init__(self, cfg: CheckCfg = DEFAULT):
        self.cfg = cfg
        self.memo: dict = {}
        self._domains: dict = {}

    def sampled(self) -> Verified:
        return Verified(False, self.cfg.universe_rank, self.cfg.sample_count)

    def domain(self, env: Env) -> list[SetCode]:
        key = _freeze(env)
        if key not in self._domains:
            self._domains[key] = domain(env, self.cfg)
        return self._domains[key]

    def combine(self, results: Iterable[Verdict], total: bool = True) -> Verdict:
        pending = None
        for v in results:
            if isinstance(v, Refuted):
                return v
            if isinstance(v, Inconclusive):
                pending = pending or v
            elif not v.total:
                total = False
        if pending is not None:
            return pending
        return Verified(True) if total else self.sampled()

    def candidates(self, phi: Formula, env: Env, depth: int) -> list[tuple[Realizer, bool]]:
        out = []
        for c in enumerate_realizers(phi, env, depth, self.cfg):
            v = self.check(c, phi, env, max(depth - 1, 0))
            if isinstance(v, Verified):
                out.append((c, v.total))
        return out

    def check(self, r: Realizer, phi: Formula, env: Env, depth: int) -> Verdict:
        key = (r, phi, _freeze(env), depth)
        v = self.memo.get(key)
        if v is None:
            v = self.memo[key] = self._check(r, phi, env, depth)
        return v

    def _check(self, r: Realizer, phi: Formula, env: Env, depth: int) -> Verdict:
        cfg = self.cfg
        where = _Where(env)
        if is_quantifier_free(phi) and not isinstance(r, (Conj, Tagged)):
            t = eval_truth(phi, env, cfg)
            if t is Truth.TRUE:
                return Verified(True)
            if t is Truth.FALSE:
                return Refuted(f"{show(phi)} is false{where}")
            return Inconclusive(f"schematic: truth of {show(phi)} undecided{where}")
        if isinstance(phi, And):
            if not isinstance(r, Conj):
                return Refuted(f"{r} is not a pair, needed for {show(phi)}")
            return self.combine(self.check(x, p, env, depth)
                                for x, p in ((r.left, phi.left), (r.right, phi.right)))
        if isinstance(phi, Or):
            if not isinstance(r, Tagged) or r.tag not in (0, 1):
                return Refuted(f"{r} is not a tagged value, needed for {show(phi)}")
            return self.check(r.body, phi.right if r.tag else phi.left, env, depth)
        if not isinstance(r, ProgPair):
            return Refuted(f"{r} is not a program, needed for {show(phi)}")
        if isinstance(phi, Implies):
            return self._implies(r, phi, env, depth, where)
        if isinstance(phi, (Forall, BoundedForall)):
            return self._forall(r, phi, env, depth, where)
        return self._exists(r, phi, env, depth, where)

    def _implies(self, r, phi, env, depth, where) -> Verdict:
        results = []
        for c, exact in self.candidates(phi.left, env, depth):
            try:
                out = apply(r, c, self.cfg)
            except RealizerError as e:
                v = Refuted(f"applying to {c}{where}: {e}")
            else:
                v = self.check(out, phi.right, env, depth)
            if isinstance(v, Refuted) and not exact:
                v = Inconclusive(f"sampled-only: antecedent realizer {c} is checked on samples; {v.witness}")
            results.append(v)
            if isinstance(v, Refuted):
                break
        return self.combine(results, total=False)

    def _forall(self, r, phi, env, depth, where) -> Verdict:
        if isinstance(phi, BoundedForall):
            bound = env[phi.bound]
            pool = members(bound, self.cfg.element_cap)
            exact = bound.is_explicit
        else:
            pool = self.domain(env)
            exact = False

        def each():
            for a in pool:
                try:
                    out = inst_forall(r, a, self.cfg)
                except RealizerError as e:
                    yield Refuted(f"instance {phi.var}={describe(a)}{where}: {e}")
                    return
                yield self.check(out, phi.body, {**env, phi.var: a}, depth)

        return self.combine(each(), total=exact)

    def _exists(self, r, phi, env, depth, where) -> Verdict:
        try:
            b, out = open_exists(r, env, self.cfg)
        except RealizerError as e:
            return Refuted(f"opening {show(phi)}{where}: {e}")
        if isinstance(phi, BoundedExists):
            inside = search_member(b, env[phi.bound], 4 * self.cfg.element_cap) \
                if b.is_explicit else None
            if inside is False:
                return Refuted(f"witness {describe(b)} is not in {phi.bound}{where}")
            if inside is None:
                return Inconclusive(f"schematic: membership of witness {describe(b)} in {phi.bound}")
        return self.check(out, phi.body, {**env, phi.var: b}, depth)


def check(r: Realizer, phi: Formula, env: Optional[Env] = None, cfg: CheckCfg = DEFAULT) -> Verdict:
    """Check ``r`` against the universal closure of ``phi`` over names not in ``env``."""
    env = dict(env or {})
    return Checker(cfg).check(r, closure(phi, env), env, cfg.enum_depth)
