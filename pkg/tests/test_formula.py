import pytest
from hypothesis import given, settings, strategies as st

from otmreal.config import DEFAULT
from otmreal.formula import (
    FALSUM, And, BoundedExists, BoundedForall, Eq, Exists, Forall, FormulaSyntaxError, Implies,
    In, Not, Or, Truth, UnboundParameter, bar, closure, eval_truth, free_vars, is_delta0,
    is_quantifier_free, parse, show, subst,
)
from otmreal.setcode import EMPTY, encode, hf, make_omega, parse_code_literal, universe

from oracles import delta0_family, holds, v3_assignments


def codes(env):
    return {k: encode(v) for k, v in env.items()}


def test_parse_examples():
    assert parse("a in b") == In("a", "b")
    assert parse("~ (a = b)") == Implies(Eq("a", "b"), FALSUM)
    assert parse("forall x. exists y. x in y") == Forall("x", Exists("y", In("x", "y")))
    assert parse("a in b -> b in c -> c in d") == Implies(In("a", "b"), Implies(In("b", "c"), In("c", "d")))
    assert parse("~ a in b & c = d | false") == Or(And(Not(In("a", "b")), Eq("c", "d")), FALSUM)
    assert parse("forall x in a. x = x") == BoundedForall("x", "a", Eq("x", "x"))


@pytest.mark.parametrize("bad", ["a in", "forall . x", "a in b)", "(a in b", "a <= b", ""])
def test_parse_errors(bad):
    with pytest.raises(FormulaSyntaxError):
        parse(bad)


def test_free_vars_and_subst():
    assert free_vars(parse("forall x. x in y")) == {"y"}
    assert subst(parse("exists y. x in y"), "x", "a") == parse("exists y. a in y")
    # capture is avoided by renaming the binder
    s = subst(parse("exists y. x in y"), "x", "y")
    assert free_vars(s) == {"y"} and isinstance(s, Exists) and s.var != "y"
    assert free_vars(closure(parse("x in y & exists z. z = w"))) == frozenset()


def test_delta0_classification():
    assert is_delta0(parse("forall x in a. x = x"))
    assert not is_delta0(parse("forall x. x = x"))
    assert is_delta0(parse("a in b -> exists z in a. z in b"))
    assert is_quantifier_free(parse("a in b -> ~ b = c"))


def test_bar_examples():
    phi, psi = parse("a in b"), parse("b = c")
    assert bar(phi) == Not(phi)
    assert bar(And(phi, psi)) == Or(Not(phi), Not(psi))
    assert bar(Forall("x", In("x", "b"))) == Exists("x", Not(In("x", "b")))


def test_eval_examples():
    e = {"a": encode(EMPTY), "b": encode(hf(EMPTY))}
    assert eval_truth(parse("a in b"), e) is Truth.TRUE
    assert eval_truth(FALSUM, {}) is Truth.FALSE
    e = {"a": parse_code_literal("ord(2)"), "b": parse_code_literal("ord(3)")}
    assert eval_truth(parse("forall y in a. y in b"), e) is Truth.TRUE
    with pytest.raises(UnboundParameter):
        eval_truth(parse("a in q"), e)


def test_eval_over_omega():
    w = {"w": make_omega()}
    assert eval_truth(parse("exists e in w. forall z in e. false"), w) is Truth.TRUE
    # no finite scan can confirm a bounded universal over an infinite code
    assert eval_truth(parse("forall y in w. y = y"), w) is Truth.INCONCLUSIVE
    assert eval_truth(parse("forall y in w. ~ y in y"), w, DEFAULT) is not Truth.FALSE


def test_unbounded_quantifiers_range_over_universe():
    assert eval_truth(parse("exists x. forall y. ~ y in x"), {}) is Truth.TRUE
    assert eval_truth(parse("forall x. exists y. x in y"), {}) is Truth.FALSE  # V4 has no top


def test_family_agrees_with_brute_force():
    """Exhaustive: one parameter at depth 4, two parameters at depth 3."""
    checked = 0
    for names, depth in ((("a",), 4), (("a", "b"), 3)):
        envs = v3_assignments(names)
        for phi in delta0_family(depth, names):
            for env in envs:
                want = Truth.TRUE if holds(phi, env) else Truth.FALSE
                assert eval_truth(phi, codes(env)) is want, show(phi)
                checked += 1
    assert checked > 150_000


def test_bar_is_classical_negation_on_family():
    for names, depth in ((("a",), 3), (("a", "b"), 3)):
        for phi in delta0_family(depth, names):
            for env in v3_assignments(names):
                c = codes(env)
                assert holds(bar(phi), env) != holds(phi, env)
                assert eval_truth(bar(bar(phi)), c) is eval_truth(phi, c)


NAMES = ("a", "b", "c")


def formulas(depth=3):
    atom = st.builds(lambda k, s, t: k(s, t), st.sampled_from([In, Eq]),
                     st.sampled_from(NAMES), st.sampled_from(NAMES)) | st.just(FALSUM)

    def grow(sub):
        v = st.sampled_from(("x", "y"))
        n = st.sampled_from(NAMES)
        return (st.builds(And, sub, sub) | st.builds(Or, sub, sub) | st.builds(Implies, sub, sub)
                | st.builds(Forall, v, sub) | st.builds(Exists, v, sub)
                | st.builds(BoundedForall, v, n, sub) | st.builds(BoundedExists, v, n, sub))

    return st.recursive(atom, grow, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(formulas())
def test_print_parse_roundtrip(phi):
    assert parse(show(phi)) == phi


@settings(max_examples=200, deadline=None)
@given(formulas(), st.sampled_from(NAMES), st.sampled_from(("p", "x", "y")))
def test_subst_removes_variable(phi, var, name):
    if var != name:
        assert var not in free_vars(subst(phi, var, name))


def test_test_universe_is_v4():
    from otmreal.formula import test_universe as tu
    got = tu({}, DEFAULT)
    assert len(got) == 16 and got == [encode(x) for x in universe(4)]
