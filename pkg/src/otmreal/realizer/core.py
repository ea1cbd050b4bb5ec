"""Realizer values, the program registry, and realizer codes.

A realizer is one of

* ``TrivialAtomic``: evidence for a true quantifier-free formula;
* ``Conj(left, right)``: a pair, for conjunctions;
* ``Tagged(tag, body)``: a disjunct choice;
* ``ProgPair(ref, alpha)``: a program with its ordinal parameter, for
  implications and quantifiers.

Programs are either native Python functions looked up by name in
:data:`REGISTRY` (with captured arguments), or genuine OTM programs run on
the simulator.  Both obey the same calling convention: an implication
realizer takes a realizer, a universal one takes a set code, and an
existential one takes nothing and returns a witness code with a realizer.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Callable, Union

from ..config import DEFAULT, CheckCfg
from ..formula import Formula, parse, show
from ..ordinal import ZERO, Ordinal, format_ordinal, pair, parse_ordinal, unpair
from ..otm import Halted, OtmProgram, Tape, assemble, run
from ..setcode import SetCode, make_omega, parse_code_literal


class RealizerError(Exception):
    pass


class NotAProgram(RealizerError, TypeError):
    pass


class ProgramFailure(RealizerError):
    """A program did not halt with a usable result."""


class NotSerializable(RealizerError, ValueError):
    pass


@dataclass(frozen=True)
class TrivialAtomic:
    pass


@dataclass(frozen=True)
class Conj:
    left: "Realizer"
    right: "Realizer"


@dataclass(frozen=True)
class Tagged:
    tag: int
    body: "Realizer"


@dataclass(frozen=True)
class Native:
    name: str
    captures: tuple = ()


@dataclass(frozen=True)
class OtmCode:
    prog: OtmProgram


@dataclass(frozen=True)
class ProgPair:
    ref: Union[Native, OtmCode]
    alpha: Ordinal = ZERO


Realizer = Union[TrivialAtomic, Conj, Tagged, ProgPair]
TRIVIAL = TrivialAtomic()

for _cls in (TrivialAtomic, Conj, Tagged, ProgPair):
    _cls.__str__ = lambda self: to_sexpr(self)


# -- registry ----------------------------------------------------------------

REGISTRY: dict[str, Callable] = {}


def native(name: str):
    """Register ``fn(caps, alpha, cfg, *args)`` under ``name``."""
    def deco(fn):
        if name in REGISTRY:
            raise ValueError(f"native program {name!r} registered twice")
        REGISTRY[name] = fn
        return fn
    return deco


def prog(name: str, *caps, alpha=ZERO) -> ProgPair:
    if name not in REGISTRY:
        raise KeyError(f"unknown native program {name!r}")
    return ProgPair(Native(name, tuple(caps)), alpha)


def otm_prog(program: OtmProgram, alpha=ZERO) -> ProgPair:
    return ProgPair(OtmCode(program), alpha)


def _is_realizer(x) -> bool:
    if isinstance(x, Conj):
        return _is_realizer(x.left) and _is_realizer(x.right)
    if isinstance(x, Tagged):
        return x.tag in (0, 1) and _is_realizer(x.body)
    return isinstance(x, (TrivialAtomic, ProgPair))


def _call_native(r: ProgPair, cfg: CheckCfg, *args):
    fn = REGISTRY.get(r.ref.name)
    if fn is None:
        raise ProgramFailure(f"unknown native program {r.ref.name!r}")
    try:
        return fn(r.ref.captures, r.alpha, cfg, *args)
    except RealizerError:
        raise
    except Exception as e:
        raise ProgramFailure(f"{r.ref.name}: {e}") from e


def _run_otm(r: ProgPair, inputs: list[Tape], cfg: CheckCfg) -> list[int]:
    out = run(r.ref.prog, inputs, r.alpha, cfg)
    if not isinstance(out, Halted):
        raise ProgramFailure(str(out))
    try:
        return out.output.finite_ones()
    except ValueError as e:
        raise ProgramFailure(f"output is not a realizer code: {e}") from e


def _need_program(r) -> ProgPair:
    if not isinstance(r, ProgPair):
        raise NotAProgram(f"{r} is not a program")
    return r


def _need_realizer(x, who: str):
    if not _is_realizer(x):
        raise ProgramFailure(f"{who} returned {x!r}, not a realizer")
    return x


def apply(r: Realizer, arg: Realizer, cfg: CheckCfg = DEFAULT) -> Realizer:
    """Run an implication realizer on a realizer of the antecedent."""
    r = _need_program(r)
    if isinstance(r.ref, Native):
        return _need_realizer(_call_native(r, cfg, arg), r.ref.name)
    ones = _run_otm(r, [Tape.from_set(serialize(arg))], cfg)
    return deserialize(ones)


def inst_forall(r: Realizer, a: SetCode, cfg: CheckCfg = DEFAULT) -> Realizer:
    """Run a universal realizer on the code of an instance."""
    r = _need_program(r)
    if isinstance(r.ref, Native):
        return _need_realizer(_call_native(r, cfg, a), r.ref.name)
    return deserialize(_run_otm(r, [Tape.from_code(a)], cfg))


def open_exists(r: Realizer, env=None, cfg: CheckCfg = DEFAULT) -> tuple[SetCode, Realizer]:
    """Run an existential realizer: the witness code and a realizer for the instance.

    Native programs carry their parameters as captures; OTM programs get the
    codes of ``env`` (sorted by name) on the tape.
    """
    r = _need_program(r)
    if isinstance(r.ref, Native):
        out = _call_native(r, cfg)
        if not (isinstance(out, tuple) and len(out) == 2 and isinstance(out[0], SetCode)):
            raise ProgramFailure(f"{r.ref.name} returned {out!r}, not a witness pair")
        return out[0], _need_realizer(out[1], r.ref.name)
    inputs = [Tape.from_code(c) for _, c in sorted((env or {}).items())]
    return split_witness(_run_otm(r, inputs, cfg))


def witness_output(code: SetCode, r: Realizer) -> frozenset:
    """Tape output of an existential program: code in slot 0, realizer in slot 1."""
    if not code.is_explicit:
        raise NotSerializable("schematic witness codes cannot be written out")
    return frozenset([pair(0, g) for g in code.members] + [pair(1, g) for g in serialize(r)])


def split_witness(ones) -> tuple[SetCode, Realizer]:
    code, rz = [], []
    for c in ones:
        i, g = unpair(c)
        if i == 0:
            code.append(g)
        elif i == 1:
            rz.append(g)
        else:
            raise ProgramFailure(f"cell {c} is outside the witness slots")
    idx = [x for g in code for x in unpair(g)]
    bound = max(idx, default=ZERO) + 1
    return SetCode(bound, tuple(sorted(code))), deserialize(rz)


# -- serialization -------------------------------------------------------------

def serialize(r: Realizer) -> frozenset:
    """Realizer code as a set of ordinals."""
    if isinstance(r, TrivialAtomic):
        return frozenset([ZERO])
    if isinstance(r, Conj):
        return frozenset([pair(1, pair(0, g)) for g in serialize(r.left)]
                         + [pair(1, pair(1, g)) for g in serialize(r.right)])
    if isinstance(r, Tagged):
        return frozenset([pair(2, r.tag)] + [pair(3, g) for g in serialize(r.body)])
    if isinstance(r, ProgPair):
        data = to_sexpr(r).encode()
        return frozenset(pair(4, pair(k, b)) for k, b in enumerate(data))
    raise NotSerializable(f"{r!r} is not a realizer")


def deserialize(cells) -> Realizer:
    cells = [c if isinstance(c, Ordinal) else Ordinal.of(c) for c in cells]
    if cells == [ZERO]:
        return TRIVIAL
    split = [unpair(c) for c in cells]
    heads = {int(i) if i.is_finite else -1 for i, _ in split}
    if heads == {1}:
        parts: dict[int, list] = {0: [], 1: []}
        for _, g in split:
            side, rest = unpair(g)
            if side not in (0, 1):
                raise NotSerializable(f"bad conjunction cell {g}")
            parts[int(side)].append(rest)
        if not parts[0] or not parts[1]:
            raise NotSerializable("conjunction code lacks a component")
        return Conj(deserialize(parts[0]), deserialize(parts[1]))
    if heads == {2, 3}:
        tags = [g for i, g in split if i == 2]
        if len(tags) != 1 or tags[0] not in (0, 1):
            raise NotSerializable(f"bad disjunct tag {tags}")
        return Tagged(int(tags[0]), deserialize([g for i, g in split if i == 3]))
    if heads == {4}:
        data = {}
        for _, g in split:
            k, b = unpair(g)
            data[int(k)] = int(b)
        if sorted(data) != list(range(len(data))) or max(data.values()) > 255:
            raise NotSerializable("program code is not a byte string")
        return from_sexpr(bytes(data[k] for k in range(len(data))).decode())
    raise NotSerializable(f"not a realizer code (tags {sorted(heads)})")


# -- textual form ---------------------------------------------------------------

def _q(s: str) -> str:
    return json.dumps(s)


def _code_text(c: SetCode) -> str:
    if c.is_explicit:
        return str(c)
    if c == make_omega():
        return "omega"
    raise NotSerializable(f"schematic code {c} has no text form")


def _cap(x) -> str:
    if isinstance(x, bool):
        raise NotSerializable("booleans are not captures")
    if isinstance(x, SetCode):
        return f"(set {_q(_code_text(x))})"
    if isinstance(x, Ordinal):
        return f"(ord {_q(format_ordinal(x))})"
    if isinstance(x, Formula):
        return f"(fml {_q(show(x))})"
    if isinstance(x, str):
        return f"(str {_q(x)})"
    if isinstance(x, int):
        return f"(int {x})"
    if isinstance(x, tuple):
        return "(tup" + "".join(" " + _cap(y) for y in x) + ")"
    if isinstance(x, OtmProgram):
        return f"(otm {_q(x.text())})"
    if _is_realizer(x):
        return f"(rz {to_sexpr(x)})"
    raise NotSerializable(f"cannot serialize capture {x!r}")


def to_sexpr(r: Realizer) -> str:
    if isinstance(r, TrivialAtomic):
        return "(triv)"
    if isinstance(r, Conj):
        return f"(conj {to_sexpr(r.left)} {to_sexpr(r.right)})"
    if isinstance(r, Tagged):
        return f"(tag {r.tag} {to_sexpr(r.body)})"
    if isinstance(r, ProgPair):
        if isinstance(r.ref, Native):
            ref = "(native " + _q(r.ref.name) + "".join(" " + _cap(c) for c in r.ref.captures) + ")"
        else:
            ref = f"(otm {_q(r.ref.prog.text())})"
        return f"(pp {ref} {_q(format_ordinal(r.alpha))})"
    raise NotSerializable(f"{r!r} is not a realizer")


_SEXPR_TOKEN = re.compile(r'\s*(?:(\()|(\))|("(?:[^"\\]|\\.)*")|([^\s()"]+))')


def read_sexpr(text: str):
    """Parse one S-expression into nested lists of atoms; strings keep a marker."""
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _SEXPR_TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise ValueError(f"unbalanced ')' at {pos}")
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(3):
            stack[-1].append(Quoted(json.loads(m.group(3))))
        else:
            stack[-1].append(m.group(4))
    if text[pos:].strip():
        raise ValueError(f"unexpected text at {pos}: {text[pos:pos + 20]!r}")
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    return stack[0]


class Quoted(str):
    """A string literal from S-expression text (as opposed to a bare atom)."""


def _uncap(node):
    kind, *rest = node
    if kind == "set":
        return parse_code_literal(rest[0])
    if kind == "ord":
        return parse_ordinal(rest[0])
    if kind == "fml":
        return parse(rest[0])
    if kind == "str":
        return str(rest[0])
    if kind == "int":
        return int(rest[0])
    if kind == "tup":
        return tuple(_uncap(x) for x in rest)
    if kind == "otm":
        return assemble(rest[0])
    if kind == "rz":
        return _unrz(rest[0])
    raise NotSerializable(f"unknown capture kind {kind!r}")


def _unrz(node) -> Realizer:
    kind = node[0]
    if kind == "triv":
        return TRIVIAL
    if kind == "conj":
        return Conj(_unrz(node[1]), _unrz(node[2]))
    if kind == "tag":
        return Tagged(int(node[1]), _unrz(node[2]))
    if kind == "pp":
        ref = node[1]
        if ref[0] == "native":
            r = Native(str(ref[1]), tuple(_uncap(c) for c in ref[2:]))
        elif ref[0] == "otm":
            r = OtmCode(assemble(ref[1]))
        else:
            raise NotSerializable(f"unknown program reference {ref[0]!r}")
        return ProgPair(r, parse_ordinal(node[2]))
    raise NotSerializable(f"unknown realizer form {kind!r}")


def from_sexpr(text: str) -> Realizer:
    nodes = read_sexpr(text)
    if len(nodes) != 1:
        raise NotSerializable("expected exactly one realizer")
    try:
        return _unrz(nodes[0])
    except (IndexError, ValueError, TypeError) as e:
        raise NotSerializable(str(e)) from e
