"""Splitting tests on a product space into tests on its factors.

Pair strings are strings over the product alphabet, whose symbols are
``"a|b"``.  ``w x x`` below means the pair string zipping ``w`` and ``x``.
As text a pair string is either ``"01|10"`` (both components, one
character per symbol) or dot-separated pair symbols ``"0|1.1|0"``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import InvalidParameter, NotPrefixFreeLevel, UncertifiedOracleLevel
from .mltest import MLTestFamily, TestLevel, is_prefix_free, open_measure
from .prob import SEP, FiniteProbabilitySpace, as_string, join_symbols, string_prob
from .trie import PrefixTrie


def pair_string(s1, s2) -> tuple[str, ...]:
    s1, s2 = as_string(s1), as_string(s2)
    if len(s1) != len(s2):
        raise InvalidParameter(f"pair strings need equal lengths, got {len(s1)} and {len(s2)}")
    return tuple(join_symbols((a, b)) for a, b in zip(s1, s2))


def as_pair_string(w) -> tuple[str, ...]:
    if not isinstance(w, str):
        return tuple(w)
    if "." in w:
        return tuple(w.split("."))
    if w.count(SEP) == 1:
        s1, s2 = w.split(SEP)
        return pair_string(s1, s2)
    if not w:
        return ()
    raise InvalidParameter(f"cannot read {w!r} as a pair string")


@lru_cache(maxsize=4096)
def _split_symbol(sym: str) -> tuple[str, str]:
    parts = sym.split(SEP)
    if len(parts) != 2:
        raise InvalidParameter(f"{sym!r} is not a pair symbol")
    return parts[0], parts[1]


@lru_cache(maxsize=65536)
def _split(w: tuple[str, ...]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    pairs = [_split_symbol(sym) for sym in w]
    return tuple(a for a, _ in pairs), tuple(b for _, b in pairs)


def split_pair_string(w) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return _split(as_pair_string(w))


def vl_project(w: Iterable, x) -> frozenset[tuple[str, ...]]:
    """F(W, x): first components of pair strings in W whose second component is a prefix of x."""
    x = as_string(x)
    out = set()
    for s in w:
        s1, s2 = split_pair_string(s)
        if len(s2) <= len(x) and x[: len(s2)] == s2:
            out.add(s1)
    return frozenset(out)


def set_prob(space: FiniteProbabilitySpace, strings: Iterable) -> Fraction:
    """Sum of string probabilities (the measure of the open set when prefix-free)."""
    return sum((string_prob(space, s) for s in strings), Fraction(0))


class Sections(NamedTuple):
    in_s_d: bool
    projection: frozenset
    projection_prob: Fraction
    h: frozenset
    h_measure: Fraction
    bound: Fraction
    phdn_holds: bool


def _level_strings(v, d: int) -> frozenset:
    if isinstance(v, MLTestFamily):
        return v.level(d).strings
    if isinstance(v, TestLevel):
        return v.strings
    if isinstance(v, Mapping):
        lvl = v.get(d, ())
        return lvl.strings if isinstance(lvl, TestLevel) else frozenset(as_pair_string(s) for s in lvl)
    return frozenset(as_pair_string(s) for s in v)


def vl_sections(
    v, d: int, x, space1: FiniteProbabilitySpace, space2: FiniteProbabilitySpace
) -> Sections:
    """Decide ``x in S_d`` and build ``H_d(|x|)`` for the level ``V_d``.

    ``v`` may be an MLTestFamily, a mapping index -> strings, or the level
    itself.  ``V_d`` must be prefix-free.
    """
    x = space2.alphabet.check_string(as_string(x))
    vd = _level_strings(v, d)
    if not is_prefix_free(vd):
        raise NotPrefixFreeLevel(f"level {d} is not prefix-free")
    n = len(x)
    cut = [s for s in vd if len(s) <= n]
    for s in cut:
        s1, _ = split_pair_string(s)
        space1.alphabet.check_string(s1)
    f = vl_project(cut, x)
    pf = set_prob(space1, f)
    bound = Fraction(1, 2**d)
    in_s = bound < pf
    h = set()
    for stem in f:
        for tail in product(space1.alphabet.symbols, repeat=n - len(stem)):
            h.add(stem + tail)
    h = frozenset(h)
    hm = open_measure(space1, h)
    return Sections(in_s, f, pf, h, hm, bound, in_s or hm <= bound)


@dataclass(frozen=True)
class OracleIndexedLevel:
    """The sets ``U^sigma_n`` for one index ``n``, keyed by oracle prefix.

    ``produce`` is a mapping or a pure function.  :meth:`level` returns the
    union over all prefixes of ``sigma``, so extending the oracle prefix
    can only add strings.
    """

    produce: Mapping | Callable

    def _raw(self, sigma: tuple[str, ...]) -> frozenset:
        if callable(self.produce):
            got = self.produce(sigma)
        else:
            got = self.produce.get(sigma)
            if got is None:
                got = self.produce.get("".join(sigma), ())
        return frozenset(as_string(s) for s in got)

    def level(self, sigma) -> frozenset:
        sigma = as_string(sigma)
        out: set = set()
        for j in range(len(sigma) + 1):
            out |= self._raw(sigma[:j])
        return frozenset(out)


class OracleMerge(NamedTuple):
    strings: frozenset
    measure: Fraction
    bound: Fraction
    certified: bool
    sections: dict


def vl_oracle_merge(
    u: OracleIndexedLevel,
    space1: FiniteProbabilitySpace,
    space2: FiniteProbabilitySpace,
    n: int,
    k: int,
    check_sections: bool = True,
) -> OracleMerge:
    """G_n(k): pairs ``w x sigma`` of length k with some prefix of w in U^sigma_n.

    Each section must have measure < 2^-n; with ``check_sections=False``
    violations are only recorded in ``sections`` and the merged set is
    still built and measured.
    """
    bound = Fraction(1, 2**n)
    out = set()
    sections = {}
    for sigma in product(space2.alphabet.symbols, repeat=k):
        us = u.level(sigma)
        m = open_measure(space1, us)
        sections[sigma] = m
        if check_sections and not m < bound:
            raise UncertifiedOracleLevel(sigma, m, bound)
        trie = PrefixTrie(us)
        for w in product(space1.alphabet.symbols, repeat=k):
            if trie.has_prefix_of(w):
                out.add(pair_string(w, sigma))
    measure = Fraction(0)
    for s in out:
        w, sigma = split_pair_string(s)
        measure += string_prob(space1, w) * string_prob(space2, sigma)
    return OracleMerge(frozenset(out), measure, bound, measure < bound, sections)
