"""Realizers for set-theoretic axioms, and which axioms have them at all."""

from __future__ import annotations

from typing import Callable, Optional

from ..config import CheckCfg
from ..formula import (
    And, BoundedExists, BoundedForall, Eq, Exists, Forall, Formula, Iff, Implies, In,
    Truth, eval_truth, free_vars, is_delta0, parse, show, subst,
)
from ..ordinal import OMEGA
from ..otm import const_program, decider_program
from ..setcode import (
    SetCode, canon_key, construct, decode, encode, kpair, make_omega, members,
    set_of_codes, tc,
)
from .check import synthesize
from .core import (
    Conj, ProgramFailure, Realizer, TRIVIAL, Tagged, inst_forall, native, open_exists,
    otm_prog, prog, serialize,
)


class NonDelta0Instance(ValueError):
    pass


class NotRealizable(ValueError):
    pass


def _f(text: str) -> Formula:
    return parse(text)


# -- formulas -------------------------------------------------------------------

EMPTY_F = _f("exists x. forall y. ~ y in x")
EXTENSIONALITY_F = _f(
    "forall x. forall y. (forall z. (z in x -> z in y) & (z in y -> z in x)) -> x = y")
PAIRING_F = Forall("a", Forall("b", Exists("c", Forall(
    "z", Iff(_f("z in c"), _f("z = a | z = b"))))))
UNION_F = Forall("a", Exists("u", Forall(
    "z", Iff(_f("z in u"), _f("exists y in a. z in y")))))
SUCC_BODY = "y in s & (forall z in y. z in s) & (forall z in s. z in y | z = y)"
INFINITY_F = _f(
    f"exists w. (exists e in w. forall z in e. false) & (forall y in w. exists s in w. {SUCC_BODY})")

# "p is the ordered pair (y, z)": p = {{y}, {y, z}}
PAIR_OF = ("(forall s in p. y in s & (forall w in s. w = y | w = z))"
           " & (exists s in p. forall w in s. w = y) & (exists s in p. z in s)")
PAIR_OF2 = PAIR_OF.replace("p.", "q.").replace("in p", "in q").replace("z", "z2")
AC_ALT_F = _f(
    "forall x. (forall y in x. exists z in y. z = z) -> exists f."
    f" (forall y in x. exists p in f. exists z in y. {PAIR_OF})"
    f" & (forall p in f. exists y in x. exists z in y. {PAIR_OF})"
    f" & (forall p in f. forall q in f. forall y in x. forall z in y. forall z2 in y."
    f" ({PAIR_OF}) & ({PAIR_OF2}) -> z = z2)")
REGULARITY_F = _f("forall a. (exists y. y in a) -> exists y. y in a & (forall z in y. ~ z in a)")


def separation_formula(phi: Formula) -> Formula:
    return Forall("a", Exists("s", Forall("y", Iff(In("y", "s"), And(In("y", "a"), phi)))))


def collection_formula(phi: Formula) -> Formula:
    premise = BoundedForall("x", "X", Exists("y", phi))
    goal = Exists("Y", BoundedForall("x", "X", BoundedExists("y", "Y", phi)))
    return Forall("X", Implies(premise, goal))


def replacement_formula(phi: Formula) -> Formula:
    unique = Forall("w", Implies(subst(phi, "y", "w"), Eq("w", "y")))
    premise = BoundedForall("x", "X", Exists("y", And(phi, unique)))
    goal = Exists("Y", BoundedForall("x", "X", BoundedExists("y", "Y", phi)))
    return Forall("X", Implies(premise, goal))


def strong_collection_formula(phi: Formula) -> Formula:
    premise = BoundedForall("x", "X", Exists("y", phi))
    goal = Exists("Y", And(BoundedForall("x", "X", BoundedExists("y", "Y", phi)),
                           BoundedForall("y", "Y", BoundedExists("x", "X", phi))))
    return Forall("X", Implies(premise, goal))


def eps_induction_formula(phi: Formula) -> Formula:
    step = Forall("x", Implies(BoundedForall("y", "x", subst(phi, "x", "y")), phi))
    return Implies(step, Forall("x", phi))


def _need_delta0(phi: Formula, allowed: set[str]) -> Formula:
    if not is_delta0(phi):
        raise NonDelta0Instance(f"{show(phi)} is not a bounded formula")
    extra = free_vars(phi) - allowed
    if extra:
        raise NonDelta0Instance(f"{show(phi)} has unexpected free names {sorted(extra)}")
    return phi


# -- native programs --------------------------------------------------------------

@native("ax_empty")
def _empty(caps, alpha, cfg):
    x = encode(frozenset())
    return x, synthesize(EMPTY_F.body, {"x": x}, cfg)


@native("ax_ext")
def _ext(caps, alpha, cfg, *args):
    # x = y is atomic: once the antecedent holds, the trivial realizer does
    got = caps + args
    return prog("ax_ext", *got) if len(got) < 3 else TRIVIAL


@native("ax_pair")
def _pair(caps, alpha, cfg, a):
    if not caps:
        return prog("ax_pair", a)
    return prog("ax_pair_w", caps[0], a)


@native("ax_pair_w")
def _pair_w(caps, alpha, cfg):
    a, b = caps
    c = construct("pair_set", [a, b])
    body = PAIRING_F.body.body.body
    return c, synthesize(body, {"a": a, "b": b, "c": c}, cfg)


@native("ax_union")
def _union(caps, alpha, cfg, a):
    return prog("ax_union_w", a)


@native("ax_union_w")
def _union_w(caps, alpha, cfg):
    (a,) = caps
    u = construct("union", [a])
    return u, synthesize(UNION_F.body.body, {"a": a, "u": u}, cfg)


@native("ax_infinity")
def _infinity(caps, alpha, cfg):
    w = make_omega()
    first, _ = INFINITY_F.body.left, INFINITY_F.body.right
    return w, Conj(synthesize(first, {"w": w}, cfg), prog("ax_succ"))


@native("ax_succ")
def _succ(caps, alpha, cfg, y):
    s = construct("successor", [y])
    return prog("witness", s, synthesize(_f(SUCC_BODY), {"y": y, "s": s}, cfg))


@native("ax_sep")
def _sep(caps, alpha, cfg, a):
    phi, = caps
    keep = [y for y in members(a) if eval_truth(phi, {"y": y, "a": a}, cfg) is Truth.TRUE]
    s = set_of_codes(keep)
    body = separation_formula(phi).body.body
    return prog("witness", s, synthesize(body, {"a": a, "s": s}, cfg))


def _collect(phi: Formula, X: SetCode, premise: Realizer, cfg: CheckCfg, uniq: bool):
    """Run the premise on every x in X; the witnesses and their realizers."""
    out = []
    for x in members(X):
        b, r = open_exists(inst_forall(premise, x, cfg), None, cfg)
        if uniq:
            r = r.left
        out.append((x, b, r))
    return out


@native("ax_coll")
def _coll(caps, alpha, cfg, *args):
    phi, kind = caps[0], caps[1]
    got = caps[2:] + args
    if len(got) < 2:
        return prog("ax_coll", phi, kind, *got)
    X, premise = got
    rows = _collect(phi, X, premise, cfg, kind == "replacement")
    Y = set_of_codes(b for _, b, _ in rows)
    forward = prog("table", tuple((x, prog("witness", b, r)) for x, b, r in rows))
    if kind != "strong":
        return prog("witness", Y, forward)
    backward = prog("table", tuple((b, prog("witness", x, r)) for x, b, r in rows))
    return prog("witness", Y, Conj(forward, backward))


@native("ax_reg")
def _reg(caps, alpha, cfg, *args):
    got = caps + args
    if len(got) < 2:
        return prog("ax_reg", *got)
    a, _ = got
    elems = sorted(decode(a), key=canon_key)
    if not elems:
        raise ProgramFailure("regularity applied to the empty set")
    m = encode(elems[0])
    body = REGULARITY_F.body.right.body
    return prog("witness", m, synthesize(body, {"a": a, "y": m}, cfg))


# called once per set the recursion handles; tests hook it
eps_visits: Optional[Callable] = None


@native("ax_eps")
def _eps(caps, alpha, cfg, step):
    return prog("ax_eps_rec", step)


@native("ax_eps_rec")
def _eps_rec(caps, alpha, cfg, a):
    (step,) = caps
    x = decode(a)
    done: dict = {}
    for v in sorted(tc(frozenset([x])), key=canon_key):
        if eps_visits is not None:
            eps_visits(v)
        below = prog("table", tuple((encode(y), done[y]) for y in sorted(v, key=canon_key)))
        done[v] = apply_step(step, encode(v), below, cfg)
    return done[x]


def apply_step(step, code, below, cfg):
    from .core import apply
    return apply(inst_forall(step, code, cfg), below, cfg)


@native("ax_ac")
def _ac(caps, alpha, cfg, *args):
    got = caps + args
    if len(got) < 2:
        return prog("ax_ac", *got)
    x, premise = got
    pairs = []
    for y in members(x):
        z, _ = open_exists(inst_forall(premise, y, cfg), None, cfg)
        pairs.append(kpair(decode(y), decode(z)))
    f = encode(frozenset(pairs))
    body = AC_ALT_F.body.right.body
    return prog("witness", f, synthesize(body, {"x": x, "f": f}, cfg))


# -- the library -------------------------------------------------------------------

SEPARATION_INSTANCES = {"all": "y = y", "none": "~ y = y", "nonempty": "exists z in y. z = z"}
COLLECTION_INSTANCE = "x in y & (forall z in x. z in y) & (forall z in y. z in x | z = x)"
EPS_INSTANCE = "~ x in x"


def _instance(arg, default: str) -> Formula:
    if arg is None:
        return parse(default)
    return parse(arg) if isinstance(arg, str) else arg


def realize_axiom(name: str, instance=None) -> tuple[Formula, Realizer]:
    """Closed axiom formula and a realizer for it."""
    if name in ("empty", "kp_empty"):
        return EMPTY_F, prog("ax_empty")
    if name in ("extensionality", "kp_extensionality"):
        return EXTENSIONALITY_F, prog("ax_ext")
    if name in ("pairing", "kp_pairing"):
        return PAIRING_F, prog("ax_pair")
    if name in ("union", "kp_union"):
        return UNION_F, prog("ax_union")
    if name == "infinity":
        return INFINITY_F, prog("ax_infinity", alpha=OMEGA)
    if name in ("delta0_separation", "kp_delta0_separation"):
        phi = _need_delta0(_instance(instance, "y = y"), {"y", "a"})
        return separation_formula(phi), prog("ax_sep", phi)
    if name in ("collection", "replacement", "strong_collection", "kp_delta0_collection"):
        phi = _need_delta0(_instance(instance, COLLECTION_INSTANCE), {"x", "y"})
        kind = {"collection": "plain", "kp_delta0_collection": "plain"}.get(name, name)
        kind = "strong" if kind == "strong_collection" else kind
        build = {"plain": collection_formula, "replacement": replacement_formula,
                 "strong": strong_collection_formula}[kind]
        return build(phi), prog("ax_coll", phi, kind)
    if name == "regularity":
        return REGULARITY_F, prog("ax_reg")
    if name in ("eps_induction", "kp_foundation"):
        phi = _instance(instance, EPS_INSTANCE)
        if free_vars(phi) - {"x"}:
            raise ValueError(f"induction formula may only mention x: {show(phi)}")
        return eps_induction_formula(phi), prog("ax_eps")
    if name == "ac_alt":
        return AC_ALT_F, prog("ax_ac")
    if name == "reflexivity_otm":
        return REFLEXIVITY_F, otm_prog(const_program(_cells(TRIVIAL)))
    if name == "decide_empty_otm":
        return DECIDE_EMPTY_F, otm_prog(decider_program(
            _cells(Tagged(0, TRIVIAL)), _cells(Tagged(1, TRIVIAL))))
    if name in NOT_REALIZABLE:
        raise NotRealizable(f"{name}: {NOT_REALIZABLE[name]}")
    raise KeyError(f"unknown axiom {name!r}")


# `forall x. x = e | ~ x = e` with e the empty set: an OTM decides it by
# checking whether the code of x has any member at all
DECIDE_EMPTY_F = _f("forall x. x = e | ~ x = e")
DECIDE_EMPTY_ENV = {"e": encode(frozenset())}


# a program that ignores its input realizes any universal atomic truth
REFLEXIVITY_F = _f("forall x. x = x")


def _cells(r: Realizer) -> list[int]:
    return sorted(int(g) for g in serialize(r))


KP_AXIOMS = ("kp_extensionality", "kp_pairing", "kp_union", "kp_empty",
             "kp_delta0_separation", "kp_delta0_collection", "kp_foundation")

LIBRARY = ("empty", "extensionality", "pairing", "union", "infinity",
           "delta0_separation", "collection", "replacement", "strong_collection",
           "regularity", "eps_induction", "ac_alt") + KP_AXIOMS


# -- status table -------------------------------------------------------------------

REALIZABLE = {
    "empty": "the empty set is a fixed witness",
    "extensionality": "the conclusion is atomic",
    "pairing": "the pair set is built from the two codes",
    "union": "the union is built from the code",
    "infinity": "the code of omega is a fixed witness",
    "delta0_separation": "bounded formulas can be evaluated",
    "collection": "the premise is run on every element and the results collected",
    "replacement": "a special case of collection",
    "strong_collection": "collection, keeping only the produced witnesses",
    "regularity": "a member of least rank, read off the code (not absolutely)",
    "eps_induction": "recursion along membership, bottom up",
    "ac_alt": "the premise yields an element of each member",
    "kp": "every KP axiom is among the realizable ones above",
}

NOT_REALIZABLE = {
    "power_set": "a computation cannot produce a set of larger cardinality than its input",
    "full_separation": "unbounded truth is not computable from codes",
    "subset_collection": "some instances would produce power sets",
    "ac_first_form": "no computable choice of a set meeting each member exactly once",
    "wo": "well-orders of arbitrary sets are not computable",
}


def axiom_status() -> list[tuple[str, str, str]]:
    rows = [(k, "realizable", v) for k, v in REALIZABLE.items()]
    rows += [(k, "not realizable", v) for k, v in NOT_REALIZABLE.items()]
    return rows


def format_status() -> str:
    rows = axiom_status()
    w1 = max(len(r[0]) for r in rows)
    w2 = max(len(r[1]) for r in rows)
    return "\n".join(f"{a:<{w1}}  {b:<{w2}}  {c}" for a, b, c in rows) + "\n"
