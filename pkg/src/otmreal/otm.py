"""A desk-scale ordinal Turing machine.

The tape is indexed by ordinals and stored as a sorted tuple of runs:

* ``ONE``  -- every cell in ``[lo, hi)`` holds 1;
* ``WORD`` -- cell ``p`` in ``[lo, hi)`` holds ``word[(p - anchor) % len(word)]``;
* ``PRED`` -- cell ``p`` holds ``pred.evaluate(p)`` (inputs described by a predicate).

Cells outside every run hold 0.  Successor steps are ordinary Turing steps;
a Left move from 0 or from a limit position goes to 0.  Limit stages cannot
be reached by stepping, so the simulator recognises two patterns and jumps:

* exact repetition of a configuration (a stationary loop), and
* a translated sweep: the same state recurring ``delta`` cells further right
  over a tape that looks the same from the machine's point of view.

At the jump the state is the least state met cofinally, every cell is the
liminf of its values, and the head is the liminf of head positions taken at
the times the machine was in the limit state.  Anything else is reported as
:class:`LimitUndetected`; the simulator never guesses a limit configuration.
"""

from __future__ import annotations

import bisect
import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .config import DEFAULT, CheckCfg
from .ordinal import OMEGA, ZERO, Ordinal, add, as_ordinal, format_ordinal, pair, sub, unpair
from .setcode import (
    And, At, Const, Eq, Left, Lt, Not, NotFinitary, Or, PredExpr, Right, SetCode, Var,
)

ONE_RUN, WORD_RUN, PRED_RUN = "one", "word", "pred"

LEFT, RIGHT, STAY = "L", "R", "S"


# -- tape ------------------------------------------------------------------

@dataclass(frozen=True)
class Run:
    lo: Ordinal
    hi: Optional[Ordinal]  # None: unbounded
    kind: str
    word: tuple = ()
    anchor: Ordinal = ZERO
    pred: Optional[PredExpr] = None

    def covers(self, p: Ordinal) -> bool:
        return self.lo <= p and (self.hi is None or p < self.hi)

    def read(self, p: Ordinal) -> int:
        if self.kind == ONE_RUN:
            return 1
        if self.kind == WORD_RUN:
            return self.word[int(sub(self.anchor, p)) % len(self.word)]
        return 1 if self.pred.evaluate(p) else 0

    def clip(self, lo: Ordinal, hi: Optional[Ordinal]) -> Optional["Run"]:
        nlo = max(self.lo, lo)
        if self.hi is None:
            nhi = hi
        elif hi is None:
            nhi = self.hi
        else:
            nhi = min(self.hi, hi)
        if nhi is not None and not nlo < nhi:
            return None
        return Run(nlo, nhi, self.kind, self.word, self.anchor, self.pred)

    def __str__(self):
        hi = "inf" if self.hi is None else format_ordinal(self.hi)
        span = f"[{format_ordinal(self.lo)},{hi})"
        if self.kind == WORD_RUN:
            return span + "~" + "".join(map(str, self.word))
        if self.kind == PRED_RUN:
            return span + f"?{self.pred}"
        if self.hi is not None and self.hi == add(self.lo, 1):
            return format_ordinal(self.lo)
        return span


class Tape:
    __slots__ = ("runs", "_lows", "_hash")

    def __init__(self, runs: Iterable[Run] = ()):
        self.runs = _normalize(runs)
        self._lows = [r.lo for r in self.runs]
        self._hash = None

    # construction
    @classmethod
    def from_set(cls, cells: Iterable) -> "Tape":
        cells = sorted({as_ordinal(c) for c in cells})
        return cls(Run(c, add(c, 1), ONE_RUN) for c in cells)

    @classmethod
    def interval(cls, lo, hi) -> "Tape":
        lo, hi = as_ordinal(lo), (None if hi is None else as_ordinal(hi))
        if hi is not None and not lo < hi:
            return cls()
        return cls([Run(lo, hi, ONE_RUN)])

    @classmethod
    def from_pred(cls, pred: PredExpr) -> "Tape":
        return cls([Run(ZERO, None, PRED_RUN, pred=pred)])

    @classmethod
    def from_code(cls, code: SetCode) -> "Tape":
        if code.is_explicit:
            return cls.from_set(code.members)
        return cls.from_pred(code.pred)

    # access
    def _find(self, p: Ordinal) -> int:
        i = bisect.bisect_right(self._lows, p) - 1
        if i >= 0 and self.runs[i].covers(p):
            return i
        return -1

    def read(self, p) -> int:
        i = self._find(as_ordinal(p))
        return 0 if i < 0 else self.runs[i].read(p)

    def write(self, p: Ordinal, bit: int) -> "Tape":
        i = self._find(p)
        if i < 0:
            if not bit:
                return self
            return Tape(self.runs + (Run(p, add(p, 1), ONE_RUN),))
        run = self.runs[i]
        if run.read(p) == bit:
            return self
        nxt = add(p, 1)
        pieces = [x for x in (run.clip(run.lo, p), run.clip(nxt, run.hi)) if x is not None]
        if bit:
            pieces.append(Run(p, nxt, ONE_RUN))
        return Tape(self.runs[:i] + tuple(pieces) + self.runs[i + 1:])

    def overwrite(self, lo: Ordinal, hi: Ordinal, runs: Iterable[Run]) -> "Tape":
        """Replace the content of ``[lo, hi)`` by ``runs``."""
        keep = []
        for r in self.runs:
            left = r.clip(r.lo, lo) if r.lo < lo else None
            right = r.clip(hi, r.hi)
            if r.hi is not None and not lo < r.hi or not r.lo < hi:
                keep.append(r)
                continue
            keep.extend(x for x in (left, right) if x is not None)
        return Tape(keep + list(runs))

    def is_finite(self) -> bool:
        return all(r.hi is not None and r.hi.is_finite and r.kind != PRED_RUN for r in self.runs)

    def finite_ones(self) -> list[int]:
        if not self.is_finite():
            raise NotFinitary(f"tape {self} is not a finite set of naturals")
        out = []
        for r in self.runs:
            for p in range(int(r.lo), int(r.hi)):
                if r.read(Ordinal.of(p)):
                    out.append(p)
        return out

    def __eq__(self, other):
        return isinstance(other, Tape) and self.runs == other.runs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.runs)
        return self._hash

    def __str__(self):
        return "{" + ", ".join(str(r) for r in self.runs) + "}"

    __repr__ = __str__


def _normalize(runs: Iterable[Run]) -> tuple[Run, ...]:
    out: list[Run] = []
    for r in sorted(runs, key=lambda r: r.lo):
        if r.kind == WORD_RUN:
            if all(r.word):
                r = Run(r.lo, r.hi, ONE_RUN)
            elif not any(r.word):
                continue
        if out and out[-1].kind == ONE_RUN and r.kind == ONE_RUN and out[-1].hi == r.lo:
            out[-1] = Run(out[-1].lo, r.hi, ONE_RUN)
            continue
        out.append(r)
    return tuple(out)


# -- multiplexing ------------------------------------------------------------

def _slot_pred(t: Tape) -> PredExpr:
    parts = []
    g = Var()
    for r in t.runs:
        rng = [Not(Lt(g, Const(r.lo)))]
        if r.hi is not None:
            rng.append(Lt(g, Const(r.hi)))
        if r.kind == ONE_RUN:
            parts.append(And(tuple(rng)))
        elif r.kind == PRED_RUN:
            parts.append(And(tuple(rng) + (r.pred,)))
        else:
            raise NotFinitary("periodic runs cannot be multiplexed")
    return Or(tuple(parts))


def multiplex(inputs: Sequence[Tape]) -> Tape:
    """Put ``inputs[i]`` at cells ``pair(i, g)``."""
    if all(t.is_finite() for t in inputs):
        return Tape.from_set(pair(i, g) for i, t in enumerate(inputs) for g in t.finite_ones())
    g = Var()
    return Tape.from_pred(Or(tuple(
        And((Eq(Left(g), Const(Ordinal.of(i))), At(_slot_pred(t), Right(g))))
        for i, t in enumerate(inputs))))


def demultiplex(tape: Tape, n: int) -> list[Tape]:
    slots: list[list[Ordinal]] = [[] for _ in range(n)]
    for c in tape.finite_ones():
        i, g = unpair(c)
        if int(i) >= n:
            raise ValueError(f"cell {c} belongs to slot {i} >= {n}")
        slots[int(i)].append(g)
    return [Tape.from_set(s) for s in slots]


def alpha_tape(alpha) -> Tape:
    return Tape.interval(ZERO, as_ordinal(alpha))


# -- programs ----------------------------------------------------------------

class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class OtmProgram:
    states: int
    halt: int
    delta: tuple  # sorted ((state, sym), (new_state, write, move)) rows

    @property
    def table(self) -> dict:
        try:
            return self.__dict__["_table"]
        except KeyError:
            t = dict(self.delta)
            object.__setattr__(self, "_table", t)
            return t

    def text(self) -> str:
        lines = [f"states {self.states}", f"halt {self.halt}"]
        for (s, sym), (ns, w, mv) in self.delta:
            lines.append(f"{s} {sym} -> {ns} {w} {mv}")
        return "\n".join(lines) + "\n"


_ROW = re.compile(r"(\d+)\s+([01])\s*->\s*(\d+)\s+([01])\s+([LRS])")


def assemble(text: str) -> OtmProgram:
    states = halt = None
    rows = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("states"):
            states = int(line.split()[1])
        elif line.startswith("halt"):
            halt = int(line.split()[1])
        else:
            m = _ROW.fullmatch(line)
            if not m:
                raise ProgramError(f"line {lineno}: cannot parse {raw!r}")
            s, sym, ns, w, mv = m.groups()
            key = (int(s), int(sym))
            if key in rows:
                raise ProgramError(f"line {lineno}: duplicate row for {key}")
            rows[key] = (int(ns), int(w), mv)
    if states is None or halt is None:
        raise ProgramError("program needs 'states N' and 'halt H'")
    if not 0 <= halt < states:
        raise ProgramError(f"halt state {halt} outside 0..{states - 1}")
    for (s, _), (ns, _, _) in rows.items():
        if not (0 <= s < states and 0 <= ns < states):
            raise ProgramError(f"state out of range in row {s} -> {ns}")
        if s == halt:
            raise ProgramError(f"halt state {halt} must not have rows")
    missing = [(s, b) for s in range(states) if s != halt for b in (0, 1) if (s, b) not in rows]
    if missing:
        raise ProgramError(f"table is not total; missing rows {missing}")
    return OtmProgram(states, halt, tuple(sorted(rows.items())))


# -- configurations and outcomes -------------------------------------------------

@dataclass(frozen=True)
class OtmConfig:
    state: int
    head: Ordinal
    tape: Tape
    clock: Ordinal

    def key(self):
        return (self.state, self.head, self.tape)


@dataclass(frozen=True)
class TraceEvent:
    clock: Ordinal
    state: int
    head: Ordinal
    write: Optional[int]
    limit: bool = False

    def __str__(self):
        s = f"clock={format_ordinal(self.clock)} state={self.state} head={format_ordinal(self.head)}"
        if self.limit:
            return s + " LIMIT"
        return s + f" write={self.write}"


@dataclass(frozen=True)
class Halted:
    output: Tape
    clock: Ordinal
    trace: tuple = field(default=(), compare=False)

    def __str__(self):
        return f"HALTED clock={format_ordinal(self.clock)} output={self.output}"


@dataclass(frozen=True)
class BudgetExceeded:
    reason: str
    clock: Ordinal
    trace: tuple = field(default=(), compare=False)

    def __str__(self):
        return f"BUDGET-EXCEEDED ({self.reason}) clock={format_ordinal(self.clock)}"


@dataclass(frozen=True)
class LimitUndetected:
    clock: Ordinal
    trace: tuple = field(default=(), compare=False)

    def __str__(self):
        return f"LIMIT-UNDETECTED clock={format_ordinal(self.clock)}"


Outcome = Union[Halted, BudgetExceeded, LimitUndetected]


def initial_config(inputs: Sequence[Tape], alpha=ZERO) -> OtmConfig:
    return OtmConfig(0, ZERO, multiplex([alpha_tape(alpha)] + list(inputs)), ZERO)


def step(cfg: OtmConfig, prog: OtmProgram) -> OtmConfig:
    if cfg.state == prog.halt:
        raise ProgramError("halted configurations are terminal")
    sym = cfg.tape.read(cfg.head)
    ns, w, mv = prog.table[(cfg.state, sym)]
    tape = cfg.tape.write(cfg.head, w)
    head = cfg.head
    if mv == RIGHT:
        head = add(head, 1)
    elif mv == LEFT:
        head = ZERO if head.is_zero or head.is_limit else head.predecessor()
    return OtmConfig(ns, head, tape, add(cfg.clock, 1))


# -- limit detection -----------------------------------------------------------

def next_limit(clock: Ordinal) -> Ordinal:
    lim, _ = clock.split()
    return add(lim, OMEGA)


def cycle_limit(cycle: Sequence[OtmConfig]) -> tuple[int, Ordinal, Tape]:
    """Liminf state, head and tape for a configuration cycle repeated forever."""
    state = min(c.state for c in cycle)
    head = min(c.head for c in cycle if c.state == state)
    tape = cycle[0].tape
    touched = {c.head for c in cycle}
    for p in touched:
        tape = tape.write(p, min(c.tape.read(p) for c in cycle))
    return state, head, tape


def _block_boundary(tape: Tape, base: Ordinal) -> Optional[tuple[int, int]]:
    """Finite offset past which the block ``[base, base+w)`` is periodic, and the period.

    ``None`` when a predicate-described run reaches into the block.
    """
    end = add(base, OMEGA)
    bound, period = 0, 1
    for r in tape.runs:
        if r.hi is not None and not base < r.hi or not r.lo < end:
            continue
        if r.kind == PRED_RUN:
            return None
        for p in (r.lo, r.hi, r.anchor if r.kind == WORD_RUN else None):
            if p is not None and base <= p < end:
                bound = max(bound, int(sub(base, p)))
        if r.kind == WORD_RUN:
            period = math.lcm(period, len(r.word))
    return bound, period


def _one_offsets(tape: Tape, base: Ordinal, first: int) -> Optional[list]:
    """1-intervals of the block ``[base+first, base+w)`` as finite offsets.

    ``None`` if the block holds anything but plain runs of 1s.
    """
    end = add(base, OMEGA)
    lo_cut = add(base, first)
    out = []
    for r in tape.runs:
        if r.hi is not None and not lo_cut < r.hi or not r.lo < end:
            continue
        if r.kind != ONE_RUN:
            return None
        lo = max(int(sub(base, r.lo)) if base <= r.lo else 0, first)
        hi = None if r.hi is None or not r.hi < end else int(sub(base, r.hi))
        out.append((lo, hi))
    return out


def _sweep_limit(period: Sequence[OtmConfig], now: OtmConfig, base: Ordinal,
                 h0: int, h1: int, low: int):
    """Jump for a period whose heads all lie at ``base + n`` with ``n >= low``.

    Returns the limit ``(state, head, tape)``, or ``None``, or an int: the
    block offset of a mismatch lying ahead of the head.  No sweep can be
    recognised before the machine has worked its way up to that cell.
    """
    if h1 <= h0 or low == 0:
        # a Left move at the block start would not translate
        return None
    start = period[0]
    delta = h1 - h0
    first = low

    def same(q: int) -> bool:
        return start.tape.read(add(base, q)) == now.tape.read(add(base, q + delta))

    if not all(same(q) for q in range(first, h0 + 4)):
        return None
    a = _one_offsets(start.tape, base, first)
    b = _one_offsets(now.tape, base, first + delta)
    if a is not None and b is not None:
        shifted = [(lo - delta, None if hi is None else hi - delta) for lo, hi in b]
        if a != shifted:
            marks = {x for r in a for x in r} ^ {x for r in shifted for x in r}
            marks.discard(None)
            return min(marks, default=None)
    else:
        b0 = _block_boundary(start.tape, base)
        b1 = _block_boundary(now.tape, base)
        if b0 is None or b1 is None:
            return None
        horizon = max(b0[0], b1[0]) + delta + 2 * math.lcm(b0[1], b1[1]) + 2
        for q in range(h0 + 4, horizon + 1):
            if not same(q):
                return q
    state = min(c.state for c in period)
    word = tuple(now.tape.read(add(base, first + k)) for k in range(delta))
    lo = add(base, first + delta)
    end = add(base, OMEGA)
    tape = now.tape.overwrite(lo, end, [Run(lo, end, WORD_RUN, word, lo)])
    return state, end, tape


# -- running -------------------------------------------------------------------

def run(prog: OtmProgram, inputs: Sequence[Tape] = (), alpha=ZERO,
        cfg: CheckCfg = DEFAULT, trace: bool = False) -> Outcome:
    """Run ``prog`` on ``inputs`` with the ordinal parameter in slot 0."""
    return run_from(prog, initial_config(inputs, alpha), cfg, trace)


def run_from(prog: OtmProgram, conf: OtmConfig, cfg: CheckCfg = DEFAULT,
             trace: bool = False) -> Outcome:
    events: list[TraceEvent] = []
    steps = 0
    limits = 0
    hist: list[OtmConfig] = []
    heads: list[tuple[Ordinal, int]] = []  # head split as (limit base, finite offset)
    seen: dict = {}
    by_state: dict[int, deque] = {}
    offset = 0  # absolute index of hist[0]
    quiet = (None, 0)  # no sweep can match while the head is below this point

    def remember(c: OtmConfig):
        nonlocal hist, heads, offset
        if len(hist) >= 2 * cfg.vm_window:
            drop = len(hist) - cfg.vm_window
            hist, heads = hist[drop:], heads[drop:]
            offset += drop
        idx = offset + len(hist)
        hist.append(c)
        base, off = c.head.split()
        heads.append((base, int(off)))
        seen[c.key()] = idx
        by_state.setdefault(c.state, deque(maxlen=8)).append(idx)

    def reset(c: OtmConfig):
        nonlocal hist, heads, offset, quiet
        hist, heads, offset = [], [], 0
        quiet = (None, 0)
        seen.clear()
        by_state.clear()
        remember(c)

    reset(conf)
    while conf.state != prog.halt:
        if steps >= cfg.vm_steps:
            return LimitUndetected(conf.clock, tuple(events))
        written = prog.table[(conf.state, conf.tape.read(conf.head))][1]
        conf = step(conf, prog)
        if trace:
            # the configuration reached, and the symbol written on the way
            events.append(TraceEvent(conf.clock, conf.state, conf.head, written))
        steps += 1
        if conf.state == prog.halt:
            break
        low = max(offset, offset + len(hist) - cfg.vm_window)
        jump = origin = None
        prev = seen.get(conf.key())
        if prev is not None and prev >= low:
            cyc = hist[prev - offset:]
            jump, origin = cycle_limit(cyc), cyc[0]
        else:
            base, h1 = conf.head.split()
            h1 = int(h1)
            pos = len(hist)
            least = h1
            hints = []
            candidates = by_state.get(conf.state, ())
            if quiet[0] == base and h1 < quiet[1]:
                candidates = ()
            for k in reversed(candidates):
                if k < low:
                    break
                # extend the running minimum back to snapshot k
                while pos > k - offset:
                    pos -= 1
                    b, off = heads[pos]
                    if b != base:
                        least = -1
                        break
                    least = min(least, off)
                if least < 0:
                    break
                found = _sweep_limit(hist[pos:], conf, base, heads[pos][1], h1, least)
                if isinstance(found, int):
                    hints.append(found)
                elif found:
                    jump, origin = found, hist[pos]
                    break
            if jump is None and hints:
                quiet = (base, min(hints))
        if jump is None:
            remember(conf)
            continue
        limits += 1
        if limits > cfg.vm_limits:
            return BudgetExceeded("limit jumps", conf.clock, tuple(events))
        state, head, tape = jump
        conf = OtmConfig(state, head, tape, next_limit(origin.clock))
        if trace:
            events.append(TraceEvent(conf.clock, conf.state, conf.head, None, limit=True))
        reset(conf)
    return Halted(conf.tape, conf.clock, tuple(events))


# -- a small program library ---------------------------------------------------

HALTER = """\
# start state is the halt state
states 1
halt 0
"""

# writes 1s over [0, w); at the limit the cycle minimum (state 1) reads the
# blank cell w and halts
SWEEPER = """\
states 5
halt 4
0 0 -> 2 1 R
0 1 -> 2 1 R
2 0 -> 1 1 L
2 1 -> 1 1 L
1 0 -> 4 0 S
1 1 -> 3 1 R
3 0 -> 2 1 R
3 1 -> 2 1 R
"""

# plain right-sweeper: never leaves its loop, limit after limit
RIGHT_SWEEPER = """\
states 2
halt 1
0 0 -> 0 1 R
0 1 -> 0 1 R
"""

FLIPFLOP = """\
states 3
halt 2
0 0 -> 1 0 S
0 1 -> 1 1 S
1 0 -> 0 0 S
1 1 -> 0 1 S
"""

# binary counter with a marker in cell 0; never repeats and never sweeps
COUNTER = """\
states 4
halt 3
0 0 -> 1 1 R
0 1 -> 1 1 R
1 1 -> 1 0 R
1 0 -> 2 1 L
2 0 -> 2 0 L
2 1 -> 1 1 R
"""

LIBRARY = {
    "halter": HALTER,
    "sweeper": SWEEPER,
    "right-sweeper": RIGHT_SWEEPER,
    "flipflop": FLIPFLOP,
    "counter": COUNTER,
}


def library_program(name: str) -> OtmProgram:
    return assemble(LIBRARY[name])


def _writer_rows(start: int, cells: list[int], done: int) -> tuple[list[str], int]:
    """Rows that, from head 0 on a blank tape, set ``cells`` and go to ``done``."""
    rows, s, pos = [], start, 0
    todo = sorted(set(cells))
    for i, c in enumerate(todo):
        while pos < c:
            rows += [f"{s} 0 -> {s + 1} 0 R", f"{s} 1 -> {s + 1} 1 R"]
            s, pos = s + 1, pos + 1
        nxt = done if i == len(todo) - 1 else s + 1
        rows += [f"{s} 0 -> {nxt} 1 S", f"{s} 1 -> {nxt} 1 S"]
        s += 1
    if not todo:
        rows += [f"{s} 0 -> {done} 0 S", f"{s} 1 -> {done} 1 S"]
        s += 1
    return rows, s


def decider_program(if_blank: Iterable[int], if_marked: Iterable[int]) -> OtmProgram:
    """Erase a tape whose 1s all lie below w, then write one of two finite sets.

    One back-and-forth sweep sets each cell to 1 and erases it on the way
    back.  Successor stages always find a 1 under the head in the cycle's
    least state, so reading 0 there means the sweep has reached w.  The
    sweep runs in two copies, switching for good once an input 1 is seen;
    at w the surviving copy picks the output.
    """
    rows = [
        "0 0 -> 2 1 R", "0 1 -> 5 1 R",
        # unmarked copy: states 1 < 2 < 3
        "2 0 -> 1 1 L", "2 1 -> 4 1 L",
        "1 1 -> 3 0 R", "1 0 -> 7 0 L",
        "3 0 -> 2 1 R", "3 1 -> 2 1 R",
        # marked copy: states 4 < 5 < 6
        "5 0 -> 4 1 L", "5 1 -> 4 1 L",
        "4 1 -> 6 0 R",
        "6 0 -> 5 1 R", "6 1 -> 5 1 R",
    ]
    blank, nxt = _writer_rows(7, list(if_blank), -1)
    rows[rows.index("4 1 -> 6 0 R") + 1:rows.index("4 1 -> 6 0 R") + 1] = [f"4 0 -> {nxt} 0 L"]
    marked, end = _writer_rows(nxt, list(if_marked), -1)
    halt = end
    rows += blank + marked
    text = "\n".join(r.replace("-> -1 ", f"-> {halt} ") for r in rows)
    return assemble(f"states {halt + 1}\nhalt {halt}\n{text}\n")


def const_program(cells: Iterable[int]) -> OtmProgram:
    """Erase any finite input and leave exactly ``cells`` set."""
    cells = list(cells)
    return decider_program(cells, cells)
