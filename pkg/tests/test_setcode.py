import random

import pytest

from otmreal.ordinal import OMEGA, Ordinal, pair, unpair
from otmreal.setcode import (
    EMPTY, IllFounded, NotFinitary, SetCode, canonical, construct, decode, elements, encode,
    encode_enumeration, format_set, hf, is_equal, is_member, kpair, make_omega, parse_code_literal,
    parse_set, rank, successor_of, tc, union_of, universe, von_neumann,
)

E = EMPTY
V4 = universe(4)


def test_encode_examples():
    assert str(encode(E)) == "code(bound=1, {})"
    assert str(encode(hf(E))) == "code(bound=2, {2})"
    assert str(encode(hf(E, hf(E)))) == "code(bound=3, {2,5,6})"


def test_decode_examples():
    assert decode(SetCode(Ordinal.of(1), ())) == E
    assert decode(SetCode(Ordinal.of(2), (Ordinal.of(2),))) == hf(E)
    with pytest.raises(IllFounded):
        decode(SetCode(Ordinal.of(1), (Ordinal.of(pair(0, 0)),)))


def test_universe_sizes():
    assert [len(universe(n)) for n in range(5)] == [0, 1, 2, 4, 16]


def test_roundtrip_v4_and_sampled_v5():
    for x in V4:
        assert decode(encode(x)) == x
    rng = random.Random(5)
    for x in rng.sample(list(universe(5)), 50):
        assert decode(encode(x)) == x


def permuted_code(x, rng):
    rest = canonical(tc(x))
    rng.shuffle(rest)
    return encode_enumeration([x] + rest)


def test_enumeration_independence():
    rng = random.Random(11)
    for x in V4:
        for _ in range(10):
            c = permuted_code(x, rng)
            assert is_equal(c, encode(x))
            assert decode(c) == x


def test_membership_and_equality():
    assert is_equal(encode(hf(E)), encode(hf(E)))
    assert is_member(encode(E), encode(hf(E)))
    assert not is_member(encode(hf(E)), encode(E))


def test_elements_examples():
    assert elements(encode(E), 10) == []
    got = [decode(c) for c in elements(encode(hf(E, hf(E))), 10)]
    assert sorted(got, key=rank) == [E, hf(E)]
    assert [decode(c) for c in elements(make_omega(), 3)] == [von_neumann(n) for n in range(3)]


@pytest.mark.parametrize("n", [1, 5, 20])
def test_omega_elements(n):
    assert [decode(c) for c in elements(make_omega(), n)] == [von_neumann(k) for k in range(n)]


def test_omega_is_schematic():
    w = make_omega()
    assert not w.is_explicit
    with pytest.raises(NotFinitary):
        decode(w)
    # f(0) = w and f(1+n) = n: n is a member of w, and k in n iff k < n
    for n in range(6):
        assert w.contains(pair(1 + n, 0))
        for k in range(6):
            assert w.contains(pair(1 + k, 1 + n)) == (k < n)


def test_construct_examples():
    assert construct("pair_set", [encode(E), encode(E)]) == encode(hf(E))
    assert construct("union", [encode(hf(hf(E)))]) == encode(hf(E))
    assert construct("successor", [encode(hf(E))]) == encode(hf(E, hf(E)))
    with pytest.raises(TypeError):
        construct("union", [])


def test_construct_agrees_with_set_operations():
    for a in V4:
        assert decode(construct("union", [encode(a)])) == union_of(a)
        assert decode(construct("successor", [encode(a)])) == successor_of(a)
        assert decode(construct("singleton", [encode(a)])) == hf(a)
        for b in V4:
            assert decode(construct("pair_set", [encode(a), encode(b)])) == hf(a, b)
            assert decode(construct("kuratowski_pair", [encode(a), encode(b)])) == kpair(a, b)


def test_tc():
    assert tc(E) == E
    assert tc(hf(hf(E))) == hf(hf(E), E)
    for x in V4:
        t = tc(x)
        assert all(z in t for y in t for z in y)
        assert x <= t


def adversarial_codes(rng, count):
    """Codes whose index graph reachable from 0 has a cycle."""
    out = []
    while len(out) < count:
        n = rng.randint(1, 5)
        cycle = rng.sample(range(n), rng.randint(1, n))
        edges = {pair(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))}
        # link the cycle into the root's reach
        if 0 not in cycle:
            edges.add(pair(cycle[0], 0))
        for _ in range(rng.randint(0, 4)):
            edges.add(pair(rng.randrange(n), rng.randrange(n)))
        out.append(SetCode(Ordinal.of(n), tuple(sorted(Ordinal.of(e) for e in edges))))
    return out


def test_decode_rejects_cycles():
    for c in adversarial_codes(random.Random(3), 20):
        with pytest.raises(IllFounded):
            decode(c)


def test_literals():
    assert parse_set("ord(3)") == von_neumann(3)
    assert format_set(parse_set("{ {}, {{}} }")) == "{{},{{}}}"
    assert parse_code_literal("code(bound=2,{2})") == encode(hf(E))
    assert parse_code_literal("omega") == make_omega()
    with pytest.raises(ValueError):
        parse_set("{{}")


def test_omega_bound():
    # every member indexes below the bound
    w = make_omega()
    assert w.bound == OMEGA
    for g in range(200):
        if w.contains(g):
            a, b = unpair(g)
            assert a < w.bound and b < w.bound
