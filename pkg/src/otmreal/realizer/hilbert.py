"""Intuitionistic Hilbert calculus and realizer extraction.

Schemas (``phi``, ``psi``, ``chi`` formulas, ``x`` a variable, ``t`` a name)::

    a1   phi -> (psi -> phi)
    a2   (phi -> (psi -> chi)) -> ((phi -> psi) -> (phi -> chi))
    a3   phi -> (psi -> phi & psi)
    a4   phi & psi -> phi
    a5   phi & psi -> psi
    a6   phi -> phi | psi
    a7   psi -> phi | psi
    a8   (phi -> chi) -> ((psi -> chi) -> (phi | psi -> chi))
    a9   (phi -> psi) -> ((phi -> ~psi) -> ~phi)
    a10  ~phi -> (phi -> psi)
    a11  (forall x. phi) -> phi[x:=t]
    a12  phi[x:=t] -> exists x. phi

Rules: modus ponens; from ``A -> B`` infer ``A -> forall x. B`` when ``x`` is
not free in ``A``; from ``A -> B`` infer ``(exists x. A) -> B`` when ``x`` is
not free in ``B``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

from ..config import DEFAULT, CheckCfg
from ..formula import (
    And, Exists, Forall, Formula, Implies, Not, Or, free_vars, parse, show,
    subst,
)
from ..setcode import EMPTY, SetCode, encode
from .core import (
    Conj, ProgramFailure, Quoted, Realizer, Tagged, apply, inst_forall,
    native, open_exists, prog, read_sexpr,
)


class IllTypedProof(ValueError):
    pass


@dataclass(frozen=True)
class Ax:
    schema: str
    args: tuple  # formulas, plus variable/term names for a11 and a12


@dataclass(frozen=True)
class Mp:
    major: "ProofTerm"
    minor: "ProofTerm"


@dataclass(frozen=True)
class Gen:
    var: str
    proof: "ProofTerm"


@dataclass(frozen=True)
class Exi:
    var: str
    proof: "ProofTerm"


ProofTerm = Union[Ax, Mp, Gen, Exi]

_ARITY = {"a1": 2, "a2": 3, "a3": 2, "a4": 2, "a5": 2, "a6": 2, "a7": 2,
          "a8": 3, "a9": 2, "a10": 2, "a11": 3, "a12": 3}


def axiom_formula(schema: str, args: tuple) -> Formula:
    if schema not in _ARITY:
        raise IllTypedProof(f"unknown axiom schema {schema!r}")
    if len(args) != _ARITY[schema]:
        raise IllTypedProof(f"{schema} takes {_ARITY[schema]} arguments, got {len(args)}")
    if schema in ("a11", "a12"):
        x, phi, t = args
        if not (isinstance(x, str) and isinstance(t, str) and isinstance(phi, Formula)):
            raise IllTypedProof(f"{schema} takes a variable, a formula and a name")
        inst = subst(phi, x, t)
        if schema == "a11":
            return Implies(Forall(x, phi), inst)
        return Implies(inst, Exists(x, phi))
    if not all(isinstance(a, Formula) for a in args):
        raise IllTypedProof(f"{schema} takes formulas")
    I = Implies
    if schema == "a1":
        p, q = args
        return I(p, I(q, p))
    if schema == "a2":
        p, q, c = args
        return I(I(p, I(q, c)), I(I(p, q), I(p, c)))
    if schema == "a3":
        p, q = args
        return I(p, I(q, And(p, q)))
    if schema == "a4":
        p, q = args
        return I(And(p, q), p)
    if schema == "a5":
        p, q = args
        return I(And(p, q), q)
    if schema == "a6":
        p, q = args
        return I(p, Or(p, q))
    if schema == "a7":
        p, q = args
        return I(q, Or(p, q))
    if schema == "a8":
        p, q, c = args
        return I(I(p, c), I(I(q, c), I(Or(p, q), c)))
    if schema == "a9":
        p, q = args
        return I(I(p, q), I(I(p, Not(q)), Not(p)))
    p, q = args
    return I(Not(p), I(p, q))


def conclusion(p: ProofTerm) -> Formula:
    """The formula proved by ``p``; raises :class:`IllTypedProof`."""
    if isinstance(p, Ax):
        return axiom_formula(p.schema, p.args)
    if isinstance(p, Mp):
        major, minor = conclusion(p.major), conclusion(p.minor)
        if not isinstance(major, Implies):
            raise IllTypedProof(f"modus ponens: {show(major)} is not an implication")
        if major.left != minor:
            raise IllTypedProof(f"modus ponens: premise {show(minor)} does not match {show(major.left)}")
        return major.right
    inner = conclusion(p.proof)
    rule = "gen" if isinstance(p, Gen) else "exi"
    if not isinstance(inner, Implies):
        raise IllTypedProof(f"{rule}: {show(inner)} is not an implication")
    if isinstance(p, Gen):
        if p.var in free_vars(inner.left):
            raise IllTypedProof(f"gen: side condition violated, {p.var} is free in {show(inner.left)}")
        return Implies(inner.left, Forall(p.var, inner.right))
    if p.var in free_vars(inner.right):
        raise IllTypedProof(f"exi: side condition violated, {p.var} is free in {show(inner.right)}")
    return Implies(Exists(p.var, inner.left), inner.right)


# -- text form ----------------------------------------------------------------

def proof_text(p: ProofTerm) -> str:
    if isinstance(p, Ax):
        parts = [f'"{show(a)}"' if isinstance(a, Formula) else a for a in p.args]
        return f"(ax {p.schema} {' '.join(parts)})"
    if isinstance(p, Mp):
        return f"(mp {proof_text(p.major)} {proof_text(p.minor)})"
    tag = "gen" if isinstance(p, Gen) else "exi"
    return f"({tag} {p.var} {proof_text(p.proof)})"


def _build(node) -> ProofTerm:
    if not isinstance(node, list) or not node:
        raise IllTypedProof(f"expected a proof form, got {node!r}")
    head = node[0]
    if head == "ax":
        schema = node[1]
        args = tuple(parse(a) if isinstance(a, Quoted) else str(a) for a in node[2:])
        return Ax(schema, args)
    if head == "mp" and len(node) == 3:
        return Mp(_build(node[1]), _build(node[2]))
    if head in ("gen", "exi") and len(node) == 3:
        cls = Gen if head == "gen" else Exi
        return cls(str(node[1]), _build(node[2]))
    raise IllTypedProof(f"malformed proof form ({head} ...)")


@lru_cache(maxsize=None)
def parse_proof(text: str) -> ProofTerm:
    nodes = read_sexpr(_strip_comments(text))
    if len(nodes) != 1:
        raise IllTypedProof(f"expected one proof, found {len(nodes)}")
    return _build(nodes[0])


def _strip_comments(text: str) -> str:
    return "\n".join(line.split(";", 1)[0] for line in text.splitlines())


def parse_corpus(text: str) -> dict[str, ProofTerm]:
    """``(def name <proof>)`` forms; a bare proof is named ``main``."""
    out = {}
    for node in read_sexpr(_strip_comments(text)):
        if isinstance(node, list) and node and node[0] == "def":
            out[str(node[1])] = _build(node[2])
        else:
            out["main" if "main" not in out else f"main{len(out)}"] = _build(node)
    return out


# -- axiom combinators ------------------------------------------------------------

def ax(schema: str, *args) -> tuple[Formula, Realizer]:
    """Formula and realizer of an axiom instance; formula arguments may be text."""
    args = tuple(parse(a) if isinstance(a, str) and schema not in ("a11", "a12") else a
                 for a in args)
    if schema in ("a11", "a12") and len(args) == 3 and isinstance(args[1], str):
        args = (args[0], parse(args[1]), args[2])
    phi = axiom_formula(schema, args)
    return phi, _axiom_realizer(Ax(schema, args), {})


def _axiom_realizer(p: Ax, sigma: Mapping[str, SetCode]) -> Realizer:
    s = p.schema
    if s in ("a11", "a12"):
        _, _, t = p.args
        code = sigma.get(t, encode(EMPTY))
        return prog("inst" if s == "a11" else "pack", code)
    return prog({"a1": "k", "a2": "s", "a3": "pairing", "a4": "fst", "a5": "snd",
                 "a6": "inl", "a7": "inr", "a8": "cases", "a9": "negintro",
                 "a10": "efq"}[s])


@native("k")
def _k(caps, alpha, cfg, r):
    return prog("const", r)


@native("s")
def _s(caps, alpha, cfg, f):
    return prog("s1", f)


@native("s1")
def _s1(caps, alpha, cfg, g):
    return prog("s2", caps[0], g)


@native("s2")
def _s2(caps, alpha, cfg, x):
    f, g = caps
    return apply(apply(f, x, cfg), apply(g, x, cfg), cfg)


@native("pairing")
def _pairing(caps, alpha, cfg, r):
    return prog("pairing1", r)


@native("pairing1")
def _pairing1(caps, alpha, cfg, r):
    return Conj(caps[0], r)


@native("fst")
def _fst(caps, alpha, cfg, r):
    if not isinstance(r, Conj):
        raise ProgramFailure("fst expects a pair")
    return r.left


@native("snd")
def _snd(caps, alpha, cfg, r):
    if not isinstance(r, Conj):
        raise ProgramFailure("snd expects a pair")
    return r.right


@native("inl")
def _inl(caps, alpha, cfg, r):
    return Tagged(0, r)


@native("inr")
def _inr(caps, alpha, cfg, r):
    return Tagged(1, r)


@native("cases")
def _cases(caps, alpha, cfg, f):
    return prog("cases1", f)


@native("cases1")
def _cases1(caps, alpha, cfg, g):
    return prog("cases2", caps[0], g)


@native("cases2")
def _cases2(caps, alpha, cfg, r):
    # route the disjunct to the matching branch
    if not isinstance(r, Tagged):
        raise ProgramFailure("case analysis expects a tagged value")
    return apply(caps[r.tag], r.body, cfg)


@native("negintro")
def _negintro(caps, alpha, cfg, f):
    return prog("negintro1", f)


@native("negintro1")
def _negintro1(caps, alpha, cfg, g):
    return prog("negintro2", caps[0], g)


@native("negintro2")
def _negintro2(caps, alpha, cfg, r):
    f, g = caps
    return apply(apply(g, r, cfg), apply(f, r, cfg), cfg)


@native("efq")
def _efq(caps, alpha, cfg, r):
    return prog("absurd")


@native("inst")
def _inst(caps, alpha, cfg, r):
    return inst_forall(r, caps[0], cfg)


@native("pack")
def _pack(caps, alpha, cfg, r):
    return prog("witness", caps[0], r)


# -- extraction ------------------------------------------------------------------

def _sigma_caps(sigma: Mapping[str, SetCode]) -> tuple:
    return tuple(sorted(sigma.items()))


def realize(p: ProofTerm, sigma: Mapping[str, SetCode], cfg: CheckCfg = DEFAULT) -> Realizer:
    """Realizer of ``conclusion(p)`` with its free variables read through ``sigma``."""
    if isinstance(p, Ax):
        return _axiom_realizer(p, sigma)
    if isinstance(p, Mp):
        # variables that modus ponens eliminates may take any value
        extra = {v: encode(EMPTY) for v in free_vars(conclusion(p.major)) if v not in sigma}
        full = {**sigma, **extra}
        return apply(realize(p.major, full, cfg), realize(p.minor, full, cfg), cfg)
    tag = "gen" if isinstance(p, Gen) else "exi"
    return prog(tag, proof_text(p.proof), p.var, _sigma_caps(sigma))


@native("gen")
def _gen(caps, alpha, cfg, r):
    return prog("gen1", *caps, r)


@native("gen1")
def _gen1(caps, alpha, cfg, a):
    text, x, sigma, r = caps
    return apply(realize(parse_proof(text), {**dict(sigma), x: a}, cfg), r, cfg)


@native("exi")
def _exi(caps, alpha, cfg, r):
    text, x, sigma = caps
    b, inner = open_exists(r, None, cfg)
    return apply(realize(parse_proof(text), {**dict(sigma), x: b}, cfg), inner, cfg)


@native("open")
def _open(caps, alpha, cfg, a):
    text, names, got = caps
    got = got + (a,)
    if len(got) < len(names):
        return prog("open", text, names, got)
    return realize(parse_proof(text), dict(zip(names, got)), cfg)


def extract(p: ProofTerm, cfg: CheckCfg = DEFAULT) -> tuple[Formula, Realizer]:
    """The proved formula and a realizer of its universal closure."""
    phi = conclusion(p)
    names = tuple(sorted(free_vars(phi)))
    if not names:
        return phi, realize(p, {}, cfg)
    return phi, prog("open", proof_text(p), names, ())
