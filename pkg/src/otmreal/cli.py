"""Command-line interface: ``otmreal <command> ...``."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .config import DEFAULT, CheckCfg
from .formula import FormulaSyntaxError, Iff, Truth, eval_truth, parse, show
from .ordinal import ZERO, format_ordinal, pair, parse_ordinal, unpair
from .otm import LIBRARY, Halted, ProgramError, Tape, assemble, run
from .realizer import (
    IllTypedProof, NonDelta0Instance, NotRealizable, RealizerError, TRIVIAL, Verified,
    apply, check, enumerate_realizers, extract, format_status, from_sexpr, inst_forall,
    open_exists, parse_corpus, prog, realize_axiom,
)
from .realizer.axioms import DECIDE_EMPTY_ENV, collection_formula, _collect
from .setcode import SetCodeError, decode, encode, format_set, parse_code_literal, parse_set

CFG_KEYS = {f.name for f in dataclasses.fields(CheckCfg)}
FLAG_KEYS = {"universe_rank", "samples", "vm_steps", "trace"}
ALIASES = {"samples": "sample_count"}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not eq or not key:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key = ALIASES.get(key, key)
        if key == "trace":
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"{path}:{n}: trace must be a boolean")
            out[key] = value.lower() in ("true", "1", "yes")
        elif key in CFG_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise UsageError(f"{path}:{n}: {key} must be an integer") from None
        else:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
    return out


def resolve(args: argparse.Namespace) -> tuple[CheckCfg, bool]:
    """Settings from flags, then the config file, then defaults."""
    values = read_config(args.config) if args.config else {}
    for flag in ("universe_rank", "samples", "vm_steps"):
        v = getattr(args, flag)
        if v is not None:
            values[ALIASES.get(flag, flag)] = v
    if args.trace:
        values["trace"] = True
    trace = values.pop("trace", False)
    try:
        return DEFAULT.with_(**values), trace
    except ValueError as e:
        raise UsageError(str(e)) from None


def _bindings(lets: Sequence[str]) -> dict:
    env = {}
    for item in lets or ():
        name, eq, lit = item.partition("=")
        if not eq or not name.strip():
            raise UsageError(f"--let expects name=literal, got {item!r}")
        env[name.strip()] = parse_code_literal(lit)
    return env


def _input_tape(text: str) -> Tape:
    """``[lo,hi)`` interval, ``{o,...}`` cell list or ``code:<set literal>``."""
    text = text.strip()
    if text.startswith("code:"):
        return Tape.from_code(parse_code_literal(text[5:]))
    if text.startswith("[") and text.endswith(")"):
        lo, _, hi = text[1:-1].partition(",")
        return Tape.interval(parse_ordinal(lo), parse_ordinal(hi))
    if text.startswith("{") and text.endswith("}"):
        body = text[1:-1].strip()
        return Tape.from_set(parse_ordinal(t) for t in body.split(",")) if body else Tape()
    raise UsageError(f"cannot read tape {text!r}")


def _program_text(name: str) -> str:
    if name in LIBRARY and not Path(name).exists():
        return LIBRARY[name]
    return Path(name).read_text()


def shipped_corpus() -> str:
    return resources.files("otmreal.data").joinpath("corpus.proofs").read_text()


# -- commands ------------------------------------------------------------------------

def cmd_encode(args, cfg, trace) -> int:
    print(encode(parse_set(args.literal)))
    return 0


def cmd_decode(args, cfg, trace) -> int:
    print(format_set(decode(parse_code_literal(args.literal))))
    return 0


def cmd_pair(args, cfg, trace) -> int:
    if args.unpair:
        if len(args.ordinals) != 1:
            raise UsageError("--unpair takes one ordinal")
        a, b = unpair(parse_ordinal(args.ordinals[0]))
        print(f"{format_ordinal(a)} {format_ordinal(b)}")
        return 0
    if len(args.ordinals) != 2:
        raise UsageError("pair takes two ordinals")
    print(format_ordinal(pair(*(parse_ordinal(t) for t in args.ordinals))))
    return 0


def cmd_eval(args, cfg, trace) -> int:
    t = eval_truth(parse(args.formula), _bindings(args.let), cfg)
    print(t)
    return 0 if t is Truth.TRUE else 1


def cmd_run(args, cfg, trace) -> int:
    program = assemble(_program_text(args.program))
    inputs = [_input_tape(t) for t in args.input or ()]
    alpha = parse_ordinal(args.alpha) if args.alpha else ZERO
    out = run(program, inputs, alpha, cfg, trace=trace)
    for ev in out.trace:
        print(ev)
    print(out)
    return 0 if isinstance(out, Halted) else 1


def _verdict_exit(v) -> int:
    return 0 if isinstance(v, Verified) else 1


def cmd_check(args, cfg, trace) -> int:
    text = args.realizer
    if text.startswith("@"):
        text = Path(text[1:]).read_text()
    v = check(from_sexpr(text), parse(args.formula), _bindings(args.let), cfg)
    print(v)
    return _verdict_exit(v)


def cmd_extract(args, cfg, trace) -> int:
    text = Path(args.proofs).read_text() if args.proofs else shipped_corpus()
    proofs = parse_corpus(text)
    if args.name:
        if args.name not in proofs:
            raise UsageError(f"no proof named {args.name!r}")
        proofs = {args.name: proofs[args.name]}
    status = 0
    for name, p in proofs.items():
        phi, r = extract(p, cfg)
        v = check(r, phi, None, cfg)
        label = "" if len(proofs) == 1 else f"{name}: "
        print(f"{label}{show(phi)} {v}")
        status = status or _verdict_exit(v)
    return status


def cmd_axioms(args, cfg, trace) -> int:
    if not args.name:
        sys.stdout.write(format_status())
        return 0
    try:
        phi, r = realize_axiom(args.name, args.instance)
    except NotRealizable as e:
        print(f"refused: {e}")
        return 1
    print(show(phi))
    if not args.check:
        return 0
    env = DECIDE_EMPTY_ENV if args.name == "decide_empty_otm" else None
    v = check(r, phi, env, cfg)
    print(v)
    return _verdict_exit(v)


POWER_SET = Iff(parse("z in p"), parse("forall w in z. w in a"))


def demo_vacuous(cfg) -> int:
    from .formula import Exists, Forall, Implies
    pot = Forall("a", Exists("p", Forall("z", POWER_SET)))
    phi = Implies(pot, parse("false"))
    print(f"formula: {show(phi)}")
    cands = enumerate_realizers(pot, {}, cfg.enum_depth, cfg)
    kept = 0
    for c in cands:
        v = check(c, pot, None, cfg)
        kept += isinstance(v, Verified)
        print(f"  candidate {c}: {v}")
    print(f"candidates for the antecedent that survive: {kept}")
    v = check(prog("absurd"), phi, None, cfg)
    print(f"(absurd) on the implication: {v}")
    return _verdict_exit(v)


def demo_collection(cfg) -> int:
    phi = parse("x in y & (forall z in x. z in y) & (forall z in y. z in x | z = x)")
    X = parse_code_literal("ord(3)")
    premise = prog("auto", collection_formula(phi).body.left, (("X", X),))
    print(f"X = {format_set(decode(X))}")
    for x, b, _ in _collect(phi, X, premise, cfg, False):
        print(f"  x = {format_set(decode(x))}  ->  y = {format_set(decode(b))}")
    _, coll = realize_axiom("collection", phi)
    Y, _ = open_exists(apply(inst_forall(coll, X, cfg), premise, cfg), None, cfg)
    print(f"Y = {format_set(decode(Y))}")
    return 0


def demo_regularity(cfg) -> int:
    a = parse_code_literal("{{{}},{{{}}},{{},{{}}}}")
    first = parse_code_literal("{{{}}}")
    _, reg = realize_axiom("regularity")
    m, _ = open_exists(apply(inst_forall(reg, a, cfg), prog("witness", first, TRIVIAL), cfg),
                       None, cfg)
    print(f"a = {format_set(decode(a))}")
    print(f"least-rank member: {format_set(decode(m))}")
    return 0


DEMOS = {"vacuous-implication": demo_vacuous, "collection": demo_collection,
         "regularity": demo_regularity}


def cmd_demo(args, cfg, trace) -> int:
    return DEMOS[args.name](cfg)


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="otmreal",
                                description="Ordinal Turing machines and realizability for set theory.")
    p.add_argument("--config", help="key = value settings file")
    p.add_argument("--universe-rank", type=int, dest="universe_rank")
    p.add_argument("--samples", type=int)
    p.add_argument("--vm-steps", type=int, dest="vm_steps")
    p.add_argument("--trace", action="store_true", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("encode", help="code of a hereditarily finite set")
    s.add_argument("literal")
    s.set_defaults(fn=cmd_encode)
    s = sub.add_parser("decode", help="set denoted by a code")
    s.add_argument("literal")
    s.set_defaults(fn=cmd_decode)
    s = sub.add_parser("pair", help="ordinal pairing")
    s.add_argument("ordinals", nargs="+")
    s.add_argument("--unpair", action="store_true")
    s.set_defaults(fn=cmd_pair)
    s = sub.add_parser("eval", help="truth of a formula")
    s.add_argument("formula")
    s.add_argument("--let", action="append", metavar="NAME=SET")
    s.set_defaults(fn=cmd_eval)
    s = sub.add_parser("run", help="run a machine program (file or library name)")
    s.add_argument("program")
    s.add_argument("--input", action="append", metavar="TAPE")
    s.add_argument("--alpha")
    s.set_defaults(fn=cmd_run)
    s = sub.add_parser("check", help="check a realizer against a formula")
    s.add_argument("formula")
    s.add_argument("realizer", help="S-expression, or @file")
    s.add_argument("--let", action="append", metavar="NAME=SET")
    s.set_defaults(fn=cmd_check)
    s = sub.add_parser("extract", help="extract and check realizers from proofs")
    s.add_argument("proofs", nargs="?", help="proof file (default: shipped corpus)")
    s.add_argument("--name")
    s.set_defaults(fn=cmd_extract)
    s = sub.add_parser("axioms", help="status table, or one axiom")
    s.add_argument("name", nargs="?")
    s.add_argument("--check", action="store_true")
    s.add_argument("--instance", help="formula for a schema instance")
    s.set_defaults(fn=cmd_axioms)
    s = sub.add_parser("demo", help="worked examples")
    s.add_argument("name", choices=sorted(DEMOS))
    s.set_defaults(fn=cmd_demo)
    return p


ERRORS = (UsageError, SetCodeError, FormulaSyntaxError, ProgramError, IllTypedProof,
          NonDelta0Instance, RealizerError, KeyError, ValueError, OSError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg, trace = resolve(args)
        return args.fn(args, cfg, trace)
    except ERRORS as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
