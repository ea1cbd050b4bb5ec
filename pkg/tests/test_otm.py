import random
import time

import pytest

from otmreal.config import DEFAULT
from otmreal.ordinal import OMEGA, ZERO, Ordinal, add, parse_ordinal, pair
from otmreal.otm import (
    LIBRARY, BudgetExceeded, Halted, LimitUndetected, OtmConfig, ProgramError, Tape, alpha_tape,
    assemble, const_program, cycle_limit, decider_program, demultiplex, initial_config,
    library_program, multiplex, run, step,
)
from otmreal.setcode import encode, universe

W = OMEGA


def test_assemble():
    assert library_program("halter").states == 1
    assert library_program("right-sweeper").states == 2
    with pytest.raises(ProgramError):
        assemble("states 2\nhalt 1\n0 0 -> 0 1 R\n")
    with pytest.raises(ProgramError):
        assemble("states 2\nhalt 1\n0 0 -> 5 1 R\n0 1 -> 0 1 R\n")
    with pytest.raises(ProgramError):
        assemble("states 2\nhalt 1\n0 0 -> 0 1 X\n0 1 -> 0 1 R\n")


def test_step():
    rs = library_program("right-sweeper")
    c = step(initial_config([]), rs)
    assert (c.head, c.tape.read(0), c.clock) == (1, 1, 1)
    left = assemble("states 2\nhalt 1\n0 0 -> 1 0 L\n0 1 -> 1 1 L\n")
    assert step(OtmConfig(0, W, Tape(), W), left).head == ZERO
    assert step(OtmConfig(0, add(W, 3), Tape(), W), left).head == add(W, 2)
    with pytest.raises(ProgramError):
        step(OtmConfig(1, ZERO, Tape(), ZERO), left)


def test_halter_returns_input():
    out = run(library_program("halter"), [Tape.from_set([0, 3])])
    assert isinstance(out, Halted) and out.clock == 0
    assert str(out) == "HALTED clock=0 output={2, 10}"
    assert demultiplex(out.output, 2)[1] == Tape.from_set([0, 3])


def test_sweeper_halts_after_omega():
    out = run(library_program("sweeper"), trace=True)
    assert isinstance(out, Halted)
    assert out.clock == add(W, 1)
    assert out.output == Tape.interval(0, W)
    limits = [e for e in out.trace if e.limit]
    assert [(e.clock, e.state, e.head) for e in limits] == [(W, 1, W)]


def test_flipflop_limit_is_cycle_minimum():
    out = run(library_program("flipflop"), trace=True)
    assert isinstance(out, BudgetExceeded)
    limits = [e for e in out.trace if e.limit]
    assert len(limits) == DEFAULT.vm_limits
    assert all(e.state == 0 for e in limits)
    assert [e.clock for e in limits[:2]] == [W, W * 2]


def test_counter_is_not_fabricated():
    t = time.time()
    out = run(library_program("counter"), trace=True)
    assert time.time() - t < 10
    assert isinstance(out, LimitUndetected)
    assert not any(e.limit for e in out.trace)
    assert str(out) == "LIMIT-UNDETECTED clock=100000"


def test_trace_clocks_increase():
    for name in LIBRARY:
        out = run(library_program(name), trace=True, cfg=DEFAULT.with_(vm_steps=2000))
        clocks = [e.clock for e in out.trace]
        assert all(a < b for a, b in zip(clocks, clocks[1:])), name
        assert all(e.clock.is_limit for e in out.trace if e.limit)


def test_multiplex():
    assert multiplex([]) == Tape()
    assert multiplex([Tape.from_set([0])]) == Tape.from_set([0])
    rng = random.Random(2)
    for _ in range(50):
        xs = [Tape.from_set(rng.sample(range(30), rng.randint(0, 6))) for _ in range(rng.randint(1, 4))]
        assert demultiplex(multiplex(xs), len(xs)) == xs


def test_alpha_in_slot_zero():
    conf = initial_config([Tape.from_set([1])], parse_ordinal("5"))
    assert demultiplex(conf.tape, 2) == [alpha_tape(5), Tape.from_set([1])]
    conf = initial_config([], W)
    assert all(conf.tape.read(pair(0, n)) == 1 for n in range(40))
    assert conf.tape.read(pair(1, 0)) == 0


def test_determinism():
    for name in LIBRARY:
        cfg = DEFAULT.with_(vm_steps=3000)
        assert str(run(library_program(name), cfg=cfg)) == str(run(library_program(name), cfg=cfg))


# -- liminf -----------------------------------------------------------------------

def direct_liminf(cycle):
    state = min(c.state for c in cycle)
    head = min(c.head for c in cycle if c.state == state)
    cells = set().union(*(c.tape.finite_ones() for c in cycle))
    ones = {p for p in cells if all(c.tape.read(p) == 1 for c in cycle)}
    return state, head, ones


def random_cycle(rng):
    n = rng.randint(1, 6)
    base = set(rng.sample(range(8), rng.randint(0, 5)))
    heads = [rng.randrange(8) for _ in range(n)]
    out = []
    for i in range(n):
        ones = set(base)
        for h in heads:
            if rng.random() < 0.5:
                ones ^= {h}
        out.append(OtmConfig(rng.randrange(4), Ordinal.of(heads[i]), Tape.from_set(ones), Ordinal.of(i)))
    return out


def test_cycle_limit_matches_direct_liminf():
    rng = random.Random(7)
    for _ in range(2000):
        cyc = random_cycle(rng)
        state, head, tape = cycle_limit(cyc)
        want = direct_liminf(cyc)
        assert (state, head, set(tape.finite_ones())) == want


def random_program(rng, states=3):
    rows = [f"{s} {b} -> {rng.randrange(states)} {rng.randrange(2)} {rng.choice('LS')}"
            for s in range(states) for b in (0, 1)]
    return assemble(f"states {states + 1}\nhalt {states}\n" + "\n".join(rows) + "\n")


def test_first_limit_of_looping_programs():
    """Programs confined to a finite region loop; their first limit is the loop's liminf."""
    rng = random.Random(13)
    seen = 0
    while seen < 300:
        prog = random_program(rng)
        conf, hist, index = initial_config([]), [], {}
        while conf.key() not in index:
            index[conf.key()] = len(hist)
            hist.append(conf)
            conf = step(conf, prog)
        cyc = hist[index[conf.key()]:]
        out = run(prog, trace=True, cfg=DEFAULT.with_(vm_limits=1))
        first = next(e for e in out.trace if e.limit)
        state, head, _ = direct_liminf(cyc)
        assert (first.clock, first.state, first.head) == (W, state, head)
        seen += 1


# -- deciding and constant programs -------------------------------------------------

def test_decider_over_v4():
    prog = decider_program([6, 12], [7, 12])
    for x in universe(4):
        out = run(prog, [Tape.from_code(encode(x))])
        assert isinstance(out, Halted)
        want = [7, 12] if x else [6, 12]
        assert out.output.finite_ones() == want


def test_const_program_ignores_input():
    prog = const_program([0, 5])
    for x in universe(3):
        out = run(prog, [Tape.from_code(encode(x))], parse_ordinal("3"))
        assert out.output.finite_ones() == [0, 5]
