from collections import Counter
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ensemble_lab.errors import AlphabetMismatch, NotInjective, Stalled, Starved
from ensemble_lab.prob import BINARY, Alphabet, RandomVariable, make_space, uniform_space
from ensemble_lab.rules import Injection, parse_injection, parse_rule, permutation
from ensemble_lab.streams import (
    cyclic,
    drain,
    filter_event,
    from_symbols,
    interleave,
    map_rv,
    product_stream,
    pseudo_ensemble,
    pseudo_ensemble_prefix,
    select,
    shuffle,
    take_prefix,
    von_neumann,
)

XYZ = Alphabet.of("xyz")
AB = Alphabet.of("ab")


def text(s, n=None):
    return "".join(take_prefix(s, n).symbols) if n is not None else "".join(drain(s).symbols)


def test_point_mass_stream():
    s = pseudo_ensemble(make_space("a", {"a": 1}), 3)
    assert text(s, 100) == "a" * 100


def test_zero_weight_never_emitted():
    p = pseudo_ensemble_prefix(make_space("ab", {"a": 1, "b": 0}), 9, 100_000)
    assert "b" not in p.symbols


def test_u2_seed_42_fixture():
    u2 = uniform_space("01")
    p = pseudo_ensemble_prefix(u2, 42, 10**6)
    ones = p.symbols.count("1")
    assert ones == 500297
    assert abs(F(ones, 10**6) - F(1, 2)) < F(2, 1000)
    assert p.text()[:4] == "1000"
    assert text(pseudo_ensemble(u2, 42), 4) == "1000"


def test_stream_and_block_agree(p3):
    a = take_prefix(pseudo_ensemble(p3, 5), 70_000).symbols
    b = pseudo_ensemble_prefix(p3, 5, 70_000).symbols
    assert a == b


def test_map_rv():
    s = "xzyzx"
    chi = RandomVariable.indicator(XYZ, "xy")
    assert text(map_rv(chi, from_symbols(XYZ, s))) == "10101"
    assert text(map_rv(RandomVariable.identity(XYZ), from_symbols(XYZ, s))) == s
    contract = RandomVariable.contraction(AB, "b", "a")
    assert text(map_rv(contract, from_symbols(AB, "abbab"))) == "aaaaa"
    with pytest.raises(AlphabetMismatch):
        map_rv(chi, from_symbols(AB, "ab"))


def test_filter_event():
    assert text(filter_event("yz", cyclic(XYZ, "xyz")), 6) == "yzyzyz"
    assert text(filter_event("xyz", from_symbols(XYZ, "xzy"))) == "xzy"
    s = filter_event("z", cyclic(XYZ, "xy"), budget=10_000)
    with pytest.raises(Starved) as e:
        take_prefix(s, 1)
    assert e.value.scanned == 10_000


def test_shuffle():
    abcd = Alphabet.of("abcdefgh")
    assert text(shuffle(parse_injection("identity"), from_symbols(abcd, "abcd"))) == "abcd"
    assert text(shuffle(parse_injection("k+1"), from_symbols(abcd, "abcd"))) == "bcd"
    assert text(shuffle(parse_injection("2k"), from_symbols(abcd, "abcdefgh"))) == "bdfh"
    bad = Injection("collide", lambda k: 1)
    with pytest.raises(NotInjective):
        take_prefix(shuffle(bad, cyclic(AB, "ab")), 2)


def test_select():
    s = "abcde"
    five = Alphabet.of(s)
    assert text(select(parse_rule("always"), from_symbols(five, s))) == s
    assert text(select(parse_rule("even-length"), from_symbols(five, s))) == "ace"
    xy = Alphabet.of("xy")
    assert text(select(parse_rule("ends-with:x"), cyclic(xy, "xy")), 3) == "yyy"
    with pytest.raises(Stalled):
        take_prefix(select(parse_rule("partial-after:2"), cyclic(xy, "xy")), 3)
    with pytest.raises(Starved):
        take_prefix(select(parse_rule("never"), cyclic(xy, "xy"), budget=50), 1)


def test_product_and_interleave():
    zeros, ones = cyclic(BINARY, "0"), cyclic(BINARY, "1")
    assert take_prefix(product_stream([zeros, ones]), 2).symbols == ("0|1", "0|1")
    assert take_prefix(product_stream([cyclic(AB, "ab")]), 2).symbols == ("a", "b")
    assert text(interleave(cyclic(BINARY, "0"), cyclic(BINARY, "1")), 6) == "010101"
    assert text(interleave(from_symbols(AB, "ab"), from_symbols(AB, "ab"))) == "aabb"
    with pytest.raises(AlphabetMismatch):
        interleave(cyclic(AB, "a"), cyclic(BINARY, "0"))


def test_von_neumann():
    assert text(von_neumann(from_symbols(BINARY, "0001101101"))) == "010"
    assert text(von_neumann(from_symbols(BINARY, "011001"))) == "010"
    with pytest.raises(Starved):
        take_prefix(von_neumann(cyclic(BINARY, "0"), budget=1000), 1)
    with pytest.raises(AlphabetMismatch):
        von_neumann(cyclic(AB, "a"))


def test_take_prefix(u2):
    assert take_prefix(pseudo_ensemble(u2, 1), 0).symbols == ()
    with pytest.raises(Starved):
        take_prefix(from_symbols(AB, "ab"), 3)


bits = st.text("01", max_size=60)
xyz_text = st.text("xyz", max_size=60)


@given(xyz_text)
def test_map_pushforward_counts(s):
    x = RandomVariable.from_mapping(XYZ, {"x": "0", "y": "1", "z": "0"})
    out = Counter(drain(map_rv(x, from_symbols(XYZ, s))).symbols)
    c = Counter(s)
    assert out["0"] == c["x"] + c["z"] and out["1"] == c["y"]


@given(xyz_text, st.sets(st.sampled_from("xyz"), min_size=1))
def test_filter_preserves_counts(s, b):
    out = Counter(drain(filter_event(b, from_symbols(XYZ, s))).symbols)
    c = Counter(s)
    assert all(out[a] == c[a] for a in b) and sum(out.values()) == sum(c[a] for a in b)


@given(st.permutations(range(1, 9)), st.text("ab", min_size=8, max_size=8))
def test_shuffle_permutation_law(perm, s):
    f = permutation(perm)
    out = drain(shuffle(f, from_symbols(AB, s))).symbols
    assert all(out[k - 1] == s[f(k) - 1] for k in range(1, 9))
    assert Counter(out) == Counter(s)


@given(xyz_text)
def test_select_always_is_identity(s):
    assert text(select(parse_rule("always"), from_symbols(XYZ, s))) == s


@given(bits)
def test_von_neumann_law(s):
    s = s[: len(s) // 2 * 2]
    out = text(von_neumann(from_symbols(BINARY, s)))
    pairs = [s[i : i + 2] for i in range(0, len(s), 2)]
    mism = [p for p in pairs if p[0] != p[1]]
    assert out == "".join(p[0] for p in mism)


@given(st.data())
def test_interleave_roundtrip(data):
    n = data.draw(st.integers(0, 30))
    a = data.draw(st.text("ab", min_size=n, max_size=n))
    b = data.draw(st.text("ab", min_size=n, max_size=n))
    merged = drain(interleave(from_symbols(AB, a), from_symbols(AB, b))).symbols
    odd = text(shuffle(parse_injection("2k-1"), from_symbols(AB, merged)))
    even = text(shuffle(parse_injection("2k"), from_symbols(AB, merged)))
    assert (odd, even) == (a, b)


@given(xyz_text)
def test_product_rv_equals_product_stream(s):
    x1 = RandomVariable.indicator(XYZ, "x")
    x2 = RandomVariable.from_mapping(XYZ, {"x": "a", "y": "b", "z": "a"})
    lhs = drain(map_rv(RandomVariable.product([x1, x2]), from_symbols(XYZ, s))).symbols
    rhs = drain(product_stream([map_rv(x1, from_symbols(XYZ, s)), map_rv(x2, from_symbols(XYZ, s))])).symbols
    assert lhs == rhs
