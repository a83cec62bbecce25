"""Acceptance criteria, one test and one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are printed with capture disabled, so plain ``-v`` shows them too.
"""

import math
import random
import time
from collections import Counter
from fractions import Fraction as F
from functools import lru_cache
from itertools import product

import pytest

from ensemble_lab.coding import (
    avg_length,
    build_dyadic_code,
    decode_bits,
    encode,
    is_abs_optimal,
    make_code,
    shannon_entropy,
)
from ensemble_lab.diagnostics import equivalence_distance, freq_table, incompressibility_proxy
from ensemble_lab.lambalgen import set_prob, vl_project, vl_sections
from ensemble_lab.mltest import TestLevel, open_measure
from ensemble_lab.prob import (
    Alphabet,
    RandomVariable,
    conditional_space,
    induced_space,
    make_space,
    product_space,
    string_prob,
    uniform_space,
)
from ensemble_lab.rules import BUILTIN_RULES, Injection, parse_injection, parse_rule, permutation
from ensemble_lab.secrecy import EncryptionScheme, is_perfectly_secret, otp_scheme, secrecy_under
from ensemble_lab.streams import (
    drain,
    filter_event,
    from_symbols,
    interleave,
    map_rv,
    pseudo_ensemble_prefix,
    shuffle,
    von_neumann,
)
from ensemble_lab.transforms import (
    map_preimage,
    select_preimage,
    shuffle_preimage,
    transform_condition,
)
from oracles import all_strings, antichains, random_scheme, spanning_messages
from test_transforms import brute_select_preimage

pytestmark = pytest.mark.acceptance

N = 10**6
U2 = uniform_space("01")
P3 = make_space("xyz", {"x": F(1, 2), "y": F(1, 3), "z": F(1, 6)})
TERNARY = make_space("012", {"0": F(1, 2), "1": F(1, 3), "2": F(1, 6)})
PAIRS = ("0|0", "0|1", "1|0", "1|1")


@pytest.fixture
def verdict(capsys):
    """Print one criterion line; returns the elapsed seconds since the fixture was created."""
    start = time.perf_counter()

    def emit(num, text, passed, tolerance, limit=None):
        elapsed = time.perf_counter() - start
        timing = f"{elapsed:.2f}s" + (f" / limit {limit}s" if limit else "")
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] criterion {num}: {text} ({tolerance}, {timing})")
        return elapsed

    return emit


# 1


def test_criterion_1_cylinder_measure(verdict):
    spaces = [
        make_space("a", {"a": 1}),
        U2,
        make_space("01", {"0": F(1, 3), "1": F(2, 3)}),
        make_space("01", {"0": 0, "1": 1}),
        P3,
        make_space("abc", {"a": F(3, 4), "b": 0, "c": F(1, 4)}),
        uniform_space("abc"),
    ]
    checked, bad = 0, []
    for space in spaces:
        for sigma in all_strings(space.alphabet.symbols, 4):
            expected = math.prod((space[a] for a in sigma), start=F(1))
            if open_measure(space, [sigma]) != expected:
                bad.append((space, sigma))
            checked += 1
    ok = not bad
    elapsed = verdict(1, f"lambda_P([sigma]) = P(sigma), {checked} strings, |sigma| <= 4, |Omega| <= 3", ok, "exact", 1)
    assert ok, bad[:3]
    assert elapsed < 1


# 2


def table_injection(table):
    return Injection("table", lambda k: table[k - 1])


def test_criterion_2_transforms(verdict):
    checks = 0
    for space in (U2, TERNARY):
        src = space.alphabet.symbols
        # map onto a two-letter alphabet, every function
        for images in product("ab", repeat=len(src)):
            x = RandomVariable.from_mapping(space.alphabet, dict(zip(src, images)), "ab")
            target = induced_space(x, space)
            for sigma in all_strings("ab", 3):
                assert open_measure(space, map_preimage(x, sigma)) == string_prob(target, sigma)
                checks += 1
        # shuffle by every injection table into 1..5
        for n in range(1, 4):
            for table in product(range(1, 6), repeat=n):
                if len(set(table)) < n:
                    continue
                f = table_injection(table)
                for sigma in product(src, repeat=n):
                    assert open_measure(space, shuffle_preimage(f, sigma, space.alphabet)) == string_prob(space, sigma)
                    checks += 1
        # condition on every nonempty event
        for k in range(1, len(src) + 1):
            for b in {frozenset(c) for c in product(src, repeat=k)}:
                pb = conditional_space(space, b)
                for sigma in all_strings(sorted(b), 3):
                    if not sigma:
                        continue
                    c = transform_condition(b, TestLevel(1, {sigma}), space, 5)
                    assert c.closed_form == string_prob(pb, sigma)
                    assert c.truncated_measure <= c.closed_form
                    checks += 1
        # select: DFS preimage against simulation, and the truncation bound
        for name in BUILTIN_RULES:
            rule = parse_rule(name)
            for sigma in all_strings(src, 3):
                if not sigma:
                    continue
                for depth in range(6):
                    pre = select_preimage(rule, sigma, space.alphabet, depth)
                    assert pre == brute_select_preimage(rule, sigma, space.alphabet, depth)
                    assert open_measure(space, pre) <= string_prob(space, sigma)
                    checks += 1
    elapsed = verdict(2, f"map/shuffle/condition/select exact over |sigma| <= 3, depth <= 5, {checks} checks", True, "exact", 10)
    assert elapsed < 10


# 3


def product_section(space1, space2, w_set, x):
    """Product measure of [W] intersected with (anything) x [x], by enumeration."""
    depth = max([len(x)] + [len(s) for s in w_set])
    total = F(0)
    for u in product(space1.alphabet.symbols, repeat=depth):
        for tail in product(space2.alphabet.symbols, repeat=depth - len(x)):
            v = tuple(x) + tail
            pair = tuple(f"{a}|{b}" for a, b in zip(u, v))
            if any(pair[: len(s)] == s for s in w_set):
                total += string_prob(space1, u) * string_prob(space2, v)
    return total


@lru_cache(maxsize=None)
def _sections(space1, space2, x):
    px = string_prob(space2, x)
    return [
        (tuple(f"{a}|{b}" for a, b in zip(u, x)), string_prob(space1, u) * px)
        for u in product(space1.alphabet.symbols, repeat=len(x))
    ]


def section_under(space1, space2, w_set, x):
    """RHS for sets of pair strings no longer than x: only first components vary."""
    return sum(
        (w for pair, w in _sections(space1, space2, x) if any(pair[:k] in w_set for k in range(len(x) + 1))),
        F(0),
    )


XS = list(all_strings("01", 2))


def random_prefix_free(rng, depth, size=5):
    words = {tuple(rng.choice(PAIRS) for _ in range(rng.randint(1, depth))) for _ in range(rng.randint(0, size))}
    return [s for s in words if not any(t != s and s[: len(t)] == t for t in words)]


def brute_h(v, x, space1):
    n = len(x)
    out = set()
    for w in product(space1.alphabet.symbols, repeat=n):
        pair = tuple(f"{a}|{b}" for a, b in zip(w, x))
        if any(len(s) <= n and pair[: len(s)] == s for s in v):
            out.add(w)
    return out


def test_criterion_3_van_lambalgen(verdict):
    sets = list(antichains(PAIRS, 2))
    assert len(sets) == 83522
    fwx = 0
    seen = set()
    for w in sets:
        for x in XS:
            ws = frozenset(s for s in w if len(s) <= len(x))
            if (ws, x) in seen:
                continue
            seen.add((ws, x))
            lhs = set_prob(U2, vl_project(ws, x)) * string_prob(U2, x)
            assert lhs == section_under(U2, U2, ws, x), (sorted(ws), x)
            fwx += 1
    rng = random.Random(20260101)
    biased = make_space("01", {"0": F(1, 3), "1": F(2, 3)})
    phdn = 0
    for _ in range(1000):
        s1, s2 = rng.choice([U2, biased]), rng.choice([U2, biased])
        v = random_prefix_free(rng, 4)
        d = rng.randint(1, 4)
        for x in all_strings("01", 3):
            sec = vl_sections(v, d, x, s1, s2)
            h = brute_h(v, x, s1)
            assert sec.h == h
            if not sec.in_s_d:
                assert sum((string_prob(s1, u) for u in h), F(0)) <= F(1, 2**d)
            assert sec.phdn_holds
            phdn += 1
    elapsed = verdict(
        3,
        f"F(W,x) identity on {fwx} (W, x) pairs over all {len(sets)} prefix-free W at depth 2 "
        f"(strings of W no longer than x); H_d(n) bound on {phdn} checks over 1000 random levels",
        True,
        "exact",
        30,
    )
    assert elapsed < 30


@pytest.mark.xfail(strict=True, reason="the identity needs W prefix-free with strings no longer than x")
def test_criterion_3_literal_w(verdict):
    """The statement read over every W at depth 2, with no length hypothesis, is false.

    Reports the first counterexample for each x; strings of W longer than x
    are the whole story, since the restricted check above covers the rest.
    """
    sets = list(antichains(PAIRS, 2))
    bad = {}
    for x in XS:
        for w in sets:
            lhs = set_prob(U2, vl_project(w, x)) * string_prob(U2, x)
            rhs = product_section(U2, U2, w, x)
            if lhs != rhs:
                bad[x] = (w, lhs, rhs)
                break
    shown = "; ".join(f"x={''.join(x) or 'empty'} W={w} lhs={l} rhs={r}" for x, (w, l, r) in bad.items())
    verdict("3 (literal W)", f"counterexamples for {len(bad)} of {len(XS)} x: {shown}", not bad, "exact")
    assert not bad


# 4


def test_criterion_4_lln_fixture(verdict):
    prefix = pseudo_ensemble_prefix(P3, 7, N)
    table = freq_table(prefix, P3.alphabet)
    dev = {a: abs(table.frequency(a) - w) for a, w in P3.items()}
    worst = max(dev.values())
    ok = worst < F(5, 1000)
    elapsed = verdict(4, f"P3 seed 7 n=10^6 max deviation {float(worst):.6f}", ok, "< 0.005", 5)
    assert ok
    assert elapsed < 5


# 5


def test_criterion_5_von_neumann(verdict):
    biased = make_space("01", {"0": F(3, 10), "1": F(7, 10)})
    prefix = pseudo_ensemble_prefix(biased, 11, N)
    out = drain(von_neumann(from_symbols(biased.alphabet, prefix.symbols)))
    ones = F(out.symbols.count("1"), len(out))
    expected = 2 * F(3, 10) * F(7, 10) * N / 2
    ok_freq = abs(ones - F(1, 2)) <= F(1, 100)
    ok_len = abs(len(out) - expected) <= expected * F(2, 100)
    elapsed = verdict(
        5,
        f"p=7/10 n=10^6: ones {float(ones):.5f}, length {len(out)} vs {int(expected)}",
        ok_freq and ok_len,
        "0.01 / 2%",
        5,
    )
    assert ok_freq and ok_len
    assert elapsed < 5


# 6


def test_criterion_6_filter(verdict):
    prefix = pseudo_ensemble_prefix(P3, 13, N)
    out = drain(filter_event("xy", from_symbols(P3.alphabet, prefix.symbols)))
    counts = Counter(out.symbols)
    target = conditional_space(P3, "xy")
    dev = max(abs(F(counts[a], len(out)) - target[a]) for a in "xy")
    ok = dev <= F(1, 100)
    verdict(6, f"filter {{x,y}} over 10^6 scanned, {len(out)} kept, max deviation {float(dev):.5f}", ok, "0.01")
    assert ok


# 7


def test_criterion_7_conditional_independence(verdict):
    space = product_space([U2, U2])
    alpha = space.alphabet
    prefix = pseudo_ensemble_prefix(space, 17, N)
    first = {"1|0", "1|1"}
    second = {"0|1", "1|1"}

    def distance(a, b):
        lhs = drain(map_rv(RandomVariable.indicator(alpha, a), from_symbols(alpha, prefix.symbols)))
        kept = filter_event(b, from_symbols(alpha, prefix.symbols))
        rhs = drain(map_rv(RandomVariable.indicator(kept.alphabet, a & b), kept))
        return equivalence_distance(lhs, rhs)[0]

    d_ind = distance(first, second)
    d_dep = distance(first, first)
    ok = d_ind < F(1, 100) and not d_dep < F(1, 100)
    verdict(7, f"independent pair distance {float(d_ind):.5f}, dependent pair (A = B) {float(d_dep):.5f}", ok, "< 0.01")
    assert ok


# 8


def dyadic_weight_sets(max_size):
    """Multisets of exponents k with sum 2^-k = 1, as sorted tuples."""
    out = []

    def rec(chosen, remaining, k):
        if remaining == 0:
            out.append(tuple(chosen))
            return
        if len(chosen) == max_size or k > max_size:
            return
        for j in range(k, max_size + 1):
            w = F(1, 2**j)
            if w <= remaining:
                rec(chosen + [j], remaining - w, j)

    rec([], F(1), 1)
    return out


def canonical_code(lengths):
    order = sorted(range(len(lengths)), key=lambda i: (lengths[i], i))
    words = [""] * len(lengths)
    value, prev = 0, lengths[order[0]]
    for n, i in enumerate(order):
        k = lengths[i]
        if n:
            value = (value + 1) << (k - prev)
        words[i] = format(value, f"0{k}b")
        prev = k
    return words


def test_criterion_8_coding(verdict):
    symbols = "abcdef"
    spaces = []
    for exps in dyadic_weight_sets(6):
        alpha = symbols[: len(exps)]
        spaces.append(make_space(alpha, {a: F(1, 2**k) for a, k in zip(alpha, exps)}))
    for exps in [(1, 2, 3, 3), (2, 2, 1), (3, 1, 3, 2)]:  # some unsorted assignments too
        alpha = symbols[: len(exps)]
        spaces.append(make_space(alpha, {a: F(1, 2**k) for a, k in zip(alpha, exps)}))
    built = 0
    for s in spaces:
        if len(s.alphabet) == 1:
            continue
        code = build_dyadic_code(s)
        h = shannon_entropy(s)
        assert is_abs_optimal(s, code).optimal
        assert h.exact is not None and avg_length(s, code) == h.exact
        built += 1
    # every prefix-free code with lengths <= 4 over these sources; lengths with
    # Kraft sum <= 1 are exactly the length profiles of prefix-free codes
    sources = [s for s in spaces if len(s.alphabet) <= 6] + [P3]
    codes = 0
    for s in sources:
        n = len(s.alphabet)
        h = shannon_entropy(s)
        for lengths in product(range(1, 5), repeat=n):
            if sum(F(1, 2**k) for k in lengths) > 1:
                continue
            code = make_code(dict(zip(s.alphabet, canonical_code(lengths))))
            length = avg_length(s, code)
            if h.exact is not None:
                assert length >= h.exact
            else:
                assert length >= F(h.lower)
            codes += 1
    elapsed = verdict(
        8,
        f"{built} dyadic spaces with 2 <= |Omega| <= 6 optimal with L = H; L >= H over {codes} codes",
        True,
        "exact",
        60,
    )
    assert elapsed < 60


@pytest.mark.xfail(strict=True, reason="a one-symbol space has H = 0 but every codeword has length >= 1")
def test_criterion_8_singleton(verdict):
    s = make_space("a", {"a": 1})
    code = build_dyadic_code(s)
    length, h = avg_length(s, code), shannon_entropy(s).exact
    ok = is_abs_optimal(s, code).optimal and length == h
    verdict("8 (|Omega| = 1)", f"space {{a:1}} builds C(a)={code['a']}, L = {length}, H = {h}", ok, "exact")
    assert ok


# 9


def test_criterion_9_incompressibility(verdict):
    src = make_space("abc", {"a": F(1, 2), "b": F(1, 4), "c": F(1, 4)})
    prefix = pseudo_ensemble_prefix(src, 23, N)
    optimal = build_dyadic_code(src)
    fixed = make_code({"a": "00", "b": "01", "c": "10"})
    r_opt = incompressibility_proxy(encode(optimal, prefix.symbols))
    r_fixed = incompressibility_proxy(encode(fixed, prefix.symbols))
    ok = r_opt >= 0.99 and r_fixed <= 0.85
    verdict(9, f"optimal code proxy {r_opt:.4f}, fixed 2-bit code proxy {r_fixed:.4f}", ok, ">= 0.99 / <= 0.85")
    assert ok


# 10


def perturbed_otp(m, key, delta):
    base = otp_scheme(m)
    weights = {k: F(1, m) for k in base.keys}
    other = base.keys.symbols[(base.keys.index(key) + 1) % m]
    weights[key] += delta
    weights[other] -= delta
    return EncryptionScheme(base.messages, base.keys, base.ciphers, make_space(base.keys, weights), base.enc, base.dec)


def test_criterion_10_secrecy(verdict):
    otp_ok = all(is_perfectly_secret(otp_scheme(m)).secret for m in range(1, 17))
    assert otp_ok
    rng = random.Random(10_000)
    secret = 0
    for _ in range(10_000):
        s = random_scheme(rng)
        uniform = is_perfectly_secret(s).secret
        spanning = all(secrecy_under(s, p).secret for p in spanning_messages(s.messages))
        assert uniform == spanning
        secret += uniform
    perturbed = 0
    for m in range(2, 17):
        for key in otp_scheme(m).keys:
            for delta in (F(1, 100), F(-1, 100)):
                v = is_perfectly_secret(perturbed_otp(m, key, delta))
                assert not v.secret
                mm, c, joint, prod = v.witness
                assert joint != prod
                perturbed += 1
    elapsed = verdict(
        10,
        f"OTP m=1..16 secret; 10^4 schemes ({secret} secret) agree on uniform vs spanning check; "
        f"{perturbed} perturbed OTPs fail with a witness",
        True,
        "exact",
        30,
    )
    assert elapsed < 30


# 11


def random_code(rng):
    n = rng.randint(1, 8)
    leaves = ["0", "1"]
    while len(leaves) < n + 1:
        leaf = leaves.pop(rng.randrange(len(leaves)))
        leaves += [leaf + "0", leaf + "1"]
    leaves.pop(rng.randrange(len(leaves)))  # leave one gap so not every code is complete
    rng.shuffle(leaves)
    return make_code(dict(zip("abcdefgh", leaves[:n])))


def test_criterion_11_roundtrips(verdict):
    rng = random.Random(11)
    ab = Alphabet.of("ab")
    prefixes = 0
    for _ in range(100):
        code = random_code(rng)
        syms = code.source.symbols
        for _ in range(1000):
            msg = tuple(rng.choice(syms) for _ in range(rng.randint(0, 30)))
            bits = encode(code, msg)
            assert decode_bits(code, bits) == (msg, "")
            prefixes += 1
    for _ in range(2000):
        n = rng.randint(0, 40)
        a = "".join(rng.choice("ab") for _ in range(n))
        b = "".join(rng.choice("ab") for _ in range(n))
        merged = drain(interleave(from_symbols(ab, a), from_symbols(ab, b))).symbols
        odd = "".join(drain(shuffle(parse_injection("2k-1"), from_symbols(ab, merged))).symbols)
        even = "".join(drain(shuffle(parse_injection("2k"), from_symbols(ab, merged))).symbols)
        assert (odd, even) == (a, b)
    for _ in range(2000):
        n = rng.randint(1, 12)
        perm = list(range(1, n + 1))
        rng.shuffle(perm)
        f = permutation(perm)
        s = "".join(rng.choice("ab") for _ in range(n))
        out = drain(shuffle(f, from_symbols(ab, s))).symbols
        assert all(out[k - 1] == s[f(k) - 1] for k in range(1, n + 1))
    verdict(11, f"decode(encode) on {prefixes} prefixes x 100 codes; interleave and shuffle laws on 2000 cases each", True, "exact")
