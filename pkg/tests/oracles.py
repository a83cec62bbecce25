"""Brute-force reference computations shared by several test modules."""

from fractions import Fraction as F
from itertools import product

from ensemble_lab.prob import string_prob


def cylinder_measure(space, strings):
    """Measure of the open set of ``strings`` by enumerating every string of the maximal length."""
    strings = [tuple(s) for s in strings]
    if not strings:
        return F(0)
    depth = max(len(s) for s in strings)
    total = F(0)
    for w in product(space.alphabet.symbols, repeat=depth):
        if any(w[: len(s)] == s for s in strings):
            total += string_prob(space, w)
    return total


def all_strings(alphabet, max_len):
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)


def antichains(symbols, depth, stem=()):
    """Every prefix-free set of strings over ``symbols`` of length <= depth, as lists."""
    yield []
    yield [stem]
    if len(stem) == depth:
        return
    options = [list(antichains(symbols, depth, stem + (a,))) for a in symbols]
    for choice in product(*options):
        merged = [w for part in choice for w in part]
        if merged:
            yield merged


def pair_cylinder_section(space1, space2, w_set, x):
    """Measure of the open set of ``w_set`` inside [empty x x], pair strings as symbol tuples."""
    n = len(x)
    total = F(0)
    for u in product(space1.alphabet.symbols, repeat=n):
        pair = tuple(f"{a}|{b}" for a, b in zip(u, x))
        if any(pair[: len(s)] == s for s in w_set):
            total += string_prob(space1, u) * string_prob(space2, x)
    return total


def random_scheme(rng, max_size=4, grid=6):
    """A random scheme with |M|, |K|, |C| <= max_size and key weights on a 1/grid-style lattice."""
    from ensemble_lab.prob import Alphabet, make_space
    from ensemble_lab.secrecy import scheme_from_enc

    nm, nk, nc = (rng.randint(1, max_size) for _ in range(3))
    msgs = Alphabet(tuple(f"m{i}" for i in range(nm)))
    keys = Alphabet(tuple(f"k{i}" for i in range(nk)))
    ciphers = Alphabet(tuple(f"c{i}" for i in range(nc)))
    raw = [rng.randint(0, grid) for _ in range(nk)]
    if not any(raw):
        raw[0] = 1
    weights = {k: F(r, sum(raw)) for k, r in zip(keys, raw)}
    if rng.random() < 0.3 and nc >= nm:
        # a shifted table, often secret
        enc = {(m, k): ciphers.symbols[(i + j) % nc] for i, m in enumerate(msgs) for j, k in enumerate(keys)}
    else:
        enc = {(m, k): rng.choice(ciphers.symbols) for m in msgs for k in keys}
    return scheme_from_enc(msgs, keys, ciphers, make_space(keys, weights), enc)


def spanning_messages(messages):
    """Point masses and two-point mixtures over a message alphabet."""
    from ensemble_lab.prob import make_space

    out = []
    syms = messages.symbols
    for i, a in enumerate(syms):
        out.append(make_space(messages, {m: F(int(m == a)) for m in syms}))
        for b in syms[i + 1 :]:
            for wa in (F(1, 2), F(1, 3)):
                out.append(make_space(messages, {m: wa if m == a else (1 - wa if m == b else F(0)) for m in syms}))
    return out
