import random

import pytest
from hypothesis import given, settings, strategies as st

from otmreal.config import DEFAULT
from otmreal.formula import Truth, eval_truth, is_quantifier_free, parse
from otmreal.ordinal import pair
from otmreal.otm import const_program
from otmreal.realizer import (
    Conj, IllTypedProof, Inconclusive, NonDelta0Instance, NotAProgram, NotRealizable, Refuted,
    Tagged, TRIVIAL, Verified, apply, check, deserialize, enumerate_realizers, extract,
    from_sexpr, inst_forall, open_exists, parse_corpus, parse_proof, prog, realize_axiom,
    serialize, to_sexpr,
)
from otmreal.realizer import axioms
from otmreal.realizer.axioms import DECIDE_EMPTY_ENV, axiom_status, format_status
from otmreal.realizer.core import otm_prog
from otmreal.realizer.hilbert import ax
from otmreal.cli import shipped_corpus
from otmreal.setcode import (
    EMPTY, construct, decode, encode, hf, members, parse_code_literal, tc, universe, von_neumann,
)

from oracles import delta0_family, random_realizer_tree, v3_assignments

E = encode(EMPTY)


# -- values, application, serialization ---------------------------------------------

def test_apply_examples():
    assert apply(prog("id"), TRIVIAL) == TRIVIAL
    with pytest.raises(NotAProgram):
        apply(Conj(TRIVIAL, TRIVIAL), TRIVIAL)
    with pytest.raises(NotAProgram):
        inst_forall(Tagged(0, TRIVIAL), E)


def test_serialize_examples():
    assert serialize(TRIVIAL) == {0}
    assert serialize(Tagged(1, TRIVIAL)) == {pair(2, 1), pair(3, 0)}
    c = Conj(TRIVIAL, TRIVIAL)
    assert deserialize(serialize(c)) == c


def test_random_trees_roundtrip():
    rng = random.Random(1)
    for _ in range(500):
        r = random_realizer_tree(rng, rng.randint(1, 5))
        assert deserialize(serialize(r)) == r
        assert from_sexpr(to_sexpr(r)) == r


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 32), st.integers(1, 5))
def test_serialization_is_injective(seed, depth):
    rng = random.Random(seed)
    r, s = random_realizer_tree(rng, depth), random_realizer_tree(rng, depth)
    assert (serialize(r) == serialize(s)) == (r == s)


def test_ill_formed_native_output_is_a_failure():
    # a code fed to the pairing combinator ends up inside a Conj
    from otmreal.realizer import ProgramFailure
    half = apply(prog("pairing"), E)
    with pytest.raises(ProgramFailure, match="not a realizer"):
        apply(half, TRIVIAL)


# -- the checker -----------------------------------------------------------------------

def test_check_examples():
    assert str(check(TRIVIAL, parse("e = e"), {"e": E})) == "VERIFIED[total]"
    assert isinstance(check(Tagged(0, TRIVIAL), parse("e = e | false"), {"e": E}), Verified)
    v = check(Tagged(1, TRIVIAL), parse("e = e | false"), {"e": E})
    assert isinstance(v, Refuted)
    phi, r = realize_axiom("empty")
    assert str(check(r, phi)) == "VERIFIED[universe=V4,samples=32]"


def test_verdict_text():
    assert str(Refuted("x")) == "REFUTED: x"
    assert str(Inconclusive("y")) == "INCONCLUSIVE: y"


def test_enumerate_examples():
    assert enumerate_realizers(parse("false")) == []
    assert TRIVIAL in enumerate_realizers(parse("e = e"), {"e": E})
    both = enumerate_realizers(parse("(forall x. x = x) & (exists y. y = y)"))
    assert both and all(isinstance(r, Conj) for r in both)


def test_refutations_are_deterministic():
    phi, _ = realize_axiom("union")
    _, wrong = realize_axiom("pairing")
    first = check(wrong, phi)
    assert isinstance(first, Refuted)
    assert str(check(wrong, phi)) == str(first)


def test_clause_one_adequacy():
    for names, depth in ((("a",), 4), (("a", "b"), 3)):
        qf = [f for f in delta0_family(depth, names) if is_quantifier_free(f)]
        for env in v3_assignments(names):
            codes = {k: encode(v) for k, v in env.items()}
            for phi in qf:
                truth = eval_truth(phi, codes) is Truth.TRUE
                assert isinstance(check(TRIVIAL, phi, codes), Verified) == truth


# -- Hilbert combinators and extraction ----------------------------------------------

P = "forall x. exists y. ~ y in x"
Q = "exists z. forall w. ~ w in z"


def test_projection():
    _, a4 = ax("a4", P, Q)
    r1, r2 = prog("id"), prog("witness", E, TRIVIAL)
    assert apply(a4, Conj(r1, r2)) == r1


def test_case_analysis_routes_by_tag():
    _, a8 = ax("a8", "a in a", "b in b", "c = c | false")
    left, right = prog("const", Tagged(0, TRIVIAL)), prog("const", Tagged(1, TRIVIAL))
    routed = apply(apply(a8, left), right)
    assert apply(routed, Tagged(0, TRIVIAL)) == Tagged(0, TRIVIAL)
    assert apply(routed, Tagged(1, TRIVIAL)) == Tagged(1, TRIVIAL)


def test_ex_falso_is_vacuous():
    phi, r = ax("a10", "a in a", "a = b")
    assert isinstance(check(r, phi), Verified)


def test_k_and_skk():
    corpus = parse_corpus(shipped_corpus())
    phi, k = extract(corpus["k"])
    r1, r2 = prog("id"), prog("absurd")
    assert apply(apply(k, r1), r2) == r1
    phi, i = extract(corpus["skk"])
    assert phi == parse(f"({P}) -> ({P})")
    for r in (prog("id"), prog("auto", parse(P), ()), TRIVIAL):
        assert apply(i, r) == r


def test_side_conditions_are_named():
    with pytest.raises(IllTypedProof, match="gen: side condition"):
        extract(parse_proof('(gen x (ax a1 "x in a" "b = b"))'))
    with pytest.raises(IllTypedProof, match="exi: side condition"):
        extract(parse_proof('(exi x (ax a1 "x in a" "x = x"))'))
    with pytest.raises(IllTypedProof, match="modus ponens"):
        extract(parse_proof('(mp (ax a4 "a in a" "b in b") (ax a1 "a in a" "b in b"))'))


def test_corpus_is_sound():
    corpus = parse_corpus(shipped_corpus())
    assert len(corpus) >= 8 and {"k", "skk", "cases"} <= set(corpus)
    for name, p in corpus.items():
        phi, r = extract(p)
        assert isinstance(check(r, phi), Verified), name


# -- axioms --------------------------------------------------------------------------

def test_empty_opens_to_empty_set():
    _, r = realize_axiom("empty")
    b, _ = open_exists(r)
    assert b == E


def test_pairing_builds_the_pair():
    _, r = realize_axiom("pairing")
    a, b = encode(hf(EMPTY)), E
    c, _ = open_exists(inst_forall(inst_forall(r, a), b))
    assert c == construct("pair_set", [a, b])


def test_separation_filters():
    _, r = realize_axiom("delta0_separation", "y = y")
    a = parse_code_literal("ord(2)")
    s, _ = open_exists(inst_forall(r, a))
    assert s == encode(von_neumann(2))
    with pytest.raises(NonDelta0Instance):
        realize_axiom("delta0_separation", "exists z. z in y")


SUCC = "x in y & (forall z in x. z in y) & (forall z in y. z in x | z = x)"


def collect(phi_text, X):
    phi, r = realize_axiom("collection", phi_text)
    premise = prog("auto", phi.body.left, (("X", X),))
    Y, _ = open_exists(apply(inst_forall(r, X), premise))
    return Y


def test_collection_example():
    Y = collect(SUCC, parse_code_literal("ord(3)"))
    assert {von_neumann(n) for n in (1, 2, 3)} <= decode(Y)


@pytest.mark.parametrize("instance", [SUCC, "y = x", "x in y", "forall z in x. z in y"])
def test_collection_contract(instance):
    phi, r = realize_axiom("collection", instance)
    goal = parse(f"forall x in X. exists y in Y. {instance}")
    for X in map(encode, universe(4)):
        premise = prog("auto", phi.body.left, (("X", X),))
        if not isinstance(check(premise, phi.body.left, {"X": X}), Verified):
            continue
        Y, _ = open_exists(apply(inst_forall(r, X), premise))
        assert eval_truth(goal, {"X": X, "Y": Y}) is Truth.TRUE


def test_regularity_picks_least_rank():
    _, r = realize_axiom("regularity")
    a = parse_code_literal("{{{}},{{{}}},{{},{{}}}}")
    m, _ = open_exists(apply(inst_forall(r, a), prog("witness", members(a)[0], TRIVIAL)))
    assert decode(m) == hf(EMPTY)


def test_eps_induction_visits_each_set_once(monkeypatch):
    phi, r = realize_axiom("eps_induction")
    step = prog("auto", phi.left, ())
    for x in universe(4):
        visits = []
        monkeypatch.setattr(axioms, "eps_visits", visits.append)
        inst_forall(apply(r, step), encode(x))
        assert sorted(visits, key=repr) == sorted(tc(frozenset([x])), key=repr)
        assert len(visits) == len(set(visits))


def test_status_table():
    rows = {name: status for name, status, _ in axiom_status()}
    assert rows["power_set"] == "not realizable"
    assert rows["strong_collection"] == "realizable"
    assert rows["wo"] == "not realizable"
    assert sum(s == "not realizable" for s in rows.values()) == 5
    assert format_status().splitlines()[0].startswith("empty ")
    with pytest.raises(NotRealizable):
        realize_axiom("power_set")


# -- machine programs as realizers -----------------------------------------------------

def test_machine_realizers():
    cfg = DEFAULT.with_(universe_rank=3)
    phi, r = realize_axiom("decide_empty_otm")
    assert isinstance(check(r, phi, DECIDE_EMPTY_ENV, cfg), Verified)
    phi, r = realize_axiom("reflexivity_otm")
    assert isinstance(check(r, phi, None, cfg), Verified)
    assert inst_forall(r, encode(hf(EMPTY))) == TRIVIAL


def test_machine_realizer_refuted_when_wrong():
    # answers "not empty" for every input, so it fails at the empty set
    wrong = otm_prog(const_program(sorted(serialize(Tagged(1, TRIVIAL)))))
    phi, _ = realize_axiom("decide_empty_otm")
    v = check(wrong, phi, DECIDE_EMPTY_ENV, DEFAULT.with_(universe_rank=3))
    assert isinstance(v, Refuted)
