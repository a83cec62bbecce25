"""Symbol streams and the sequence operators that act on them.

A :class:`SymbolStream` is a single-consumer iterator over an alphabet that
remembers how it was produced.  Derived streams end when their source ends
(a finite source gives a finite result) and raise :class:`Starved` when a
scan budget runs out before the next output symbol appears.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import AlphabetMismatch, InvalidParameter, NotInjective, Stalled, Starved
from .prob import (
    BINARY,
    Alphabet,
    FiniteProbabilitySpace,
    RandomVariable,
    as_string,
    join_symbols,
    product_alphabet,
)
from .prng import splitmix64_block
from .rules import Injection, SelectionRule

DEFAULT_BUDGET = 1_000_000
_CHUNK = 1 << 16


class SymbolStream:
    """An iterator of symbols tagged with its alphabet and provenance."""

    def __init__(self, alphabet: Alphabet, source: Iterable[str], origin: str):
        self.alphabet = alphabet
        self.origin = origin
        self._it = iter(source)
        self.produced = 0

    def __iter__(self) -> Iterator[str]:
        return self

    def __next__(self) -> str:
        a = next(self._it)
        self.produced += 1
        return a

    def __repr__(self):
        return f"SymbolStream({self.origin}, produced={self.produced})"


@dataclass(frozen=True)
class FinitePrefix:
    symbols: tuple[str, ...]
    alphabet: Alphabet
    origin: str = ""

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def text(self, sep: str = "") -> str:
        return sep.join(self.symbols)

    def stream(self) -> SymbolStream:
        return SymbolStream(self.alphabet, self.symbols, self.origin or "prefix")


def from_symbols(alphabet: Alphabet, symbols, origin: str = "literal") -> SymbolStream:
    """A finite stream over explicit symbols, checked against the alphabet."""
    symbols = alphabet.check_string(symbols)
    return SymbolStream(alphabet, symbols, origin)


def cyclic(alphabet: Alphabet, pattern, origin: str | None = None) -> SymbolStream:
    """Repeat a finite pattern forever."""
    pattern = alphabet.check_string(pattern)
    if not pattern:
        raise InvalidParameter("cannot cycle an empty pattern")

    def gen():
        while True:
            yield from pattern

    return SymbolStream(alphabet, gen(), origin or f"cycle({''.join(pattern)})")


def _thresholds(space: FiniteProbabilitySpace) -> np.ndarray:
    # symbol i is drawn iff t[i-1] <= u < t[i] with u uniform on [0, 2**63)
    scale = 1 << 63
    cum = Fraction(0)
    out = []
    for _, w in list(space.items())[:-1]:
        cum += w
        out.append(ceil(cum * scale))
    return np.array(out, dtype=np.uint64)


def sample_indices(space: FiniteProbabilitySpace, seed: int, start: int, count: int) -> np.ndarray:
    """Symbol indices of draws ``start .. start+count-1`` of a pseudo-ensemble."""
    u = splitmix64_block(seed, start, count) >> np.uint64(1)
    return np.searchsorted(_thresholds(space), u, side="right")


def pseudo_ensemble(space: FiniteProbabilitySpace, seed: int) -> SymbolStream:
    """I.i.d. draws from ``space`` by exact inverse CDF over SplitMix64 output.

    Draw ``k`` uses the top 63 bits of SplitMix64 output ``k``; symbol ``i`` is
    chosen when those bits fall in ``[ceil(C[i-1] 2^63), ceil(C[i] 2^63))``
    with ``C`` the exact cumulative weights, so zero-weight symbols never occur.
    """
    symbols = np.array(space.alphabet.symbols, dtype=object)

    def gen():
        start = 0
        while True:
            idx = sample_indices(space, seed, start, _CHUNK)
            start += _CHUNK
            yield from symbols[idx].tolist()

    return SymbolStream(space.alphabet, gen(), f"pseudo_ensemble(seed={seed})")


def pseudo_ensemble_prefix(space: FiniteProbabilitySpace, seed: int, n: int) -> FinitePrefix:
    """The first ``n`` symbols of :func:`pseudo_ensemble`, computed in one block."""
    idx = sample_indices(space, seed, 0, n)
    symbols = np.array(space.alphabet.symbols, dtype=object)[idx]
    return FinitePrefix(tuple(symbols.tolist()), space.alphabet, f"pseudo_ensemble(seed={seed})[:{n}]")


def map_rv(x: RandomVariable, s: SymbolStream) -> SymbolStream:
    if x.source != s.alphabet:
        raise AlphabetMismatch(f"random variable source {x.source} differs from stream alphabet {s.alphabet}")
    mapping = dict(x.mapping)
    return SymbolStream(x.target, (mapping[a] for a in s), f"map({x.name or 'X'}, {s.origin})")


def filter_event(b: Iterable[str], s: SymbolStream, budget: int = DEFAULT_BUDGET) -> SymbolStream:
    """Keep only symbols in ``b``; ``budget`` bounds the scan gap between outputs."""
    members = frozenset(b)
    if not members:
        raise InvalidParameter("cannot filter on the empty event")
    sub = s.alphabet.subset(members)

    def gen():
        scanned = 0
        produced = 0
        gap = 0
        for a in s:
            scanned += 1
            if a in members:
                gap = 0
                produced += 1
                yield a
            else:
                gap += 1
                if gap >= budget:
                    raise Starved(scanned, produced, f"no symbol of {sorted(members)} in {budget} scanned")

    return SymbolStream(sub, gen(), f"filter({','.join(sub)}, {s.origin})")


def shuffle(f: Injection, s: SymbolStream) -> SymbolStream:
    """Output ``k`` is input ``f(k)``; input is buffered up to ``max f(1..k)``."""

    def gen():
        buf: list[str] = []
        used: dict[int, int] = {}
        k = 0
        while True:
            k += 1
            j = f(k)
            if not f.increasing:
                if j in used:
                    raise NotInjective(j, used[j], k)
                used[j] = k
            while len(buf) < j:
                try:
                    buf.append(next(s))
                except StopIteration:
                    return
            yield buf[j - 1]

    return SymbolStream(s.alphabet, gen(), f"shuffle({f.name}, {s.origin})")


def select(rule: SelectionRule, s: SymbolStream, budget: int = DEFAULT_BUDGET) -> SymbolStream:
    """Output ``k`` is the symbol following the ``k``-th YES prefix.

    The rule is consulted on the prefix of length ``l`` (starting at 0)
    before symbol ``l + 1`` is read.
    """

    def gen():
        prefix: list[str] = []
        produced = 0
        gap = 0
        while True:
            verdict = rule(prefix)
            if verdict is None:
                raise Stalled(len(prefix), rule.name)
            try:
                a = next(s)
            except StopIteration:
                return
            prefix.append(a)
            if verdict:
                gap = 0
                produced += 1
                yield a
            else:
                gap += 1
                if gap >= budget:
                    raise Starved(len(prefix), produced, f"rule {rule.name} said NO {budget} times in a row")

    return SymbolStream(s.alphabet, gen(), f"select({rule.name}, {s.origin})")


def product_stream(streams: Sequence[SymbolStream]) -> SymbolStream:
    streams = list(streams)
    if not streams:
        raise InvalidParameter("product of zero streams")
    alphabet = product_alphabet([s.alphabet for s in streams])
    origin = "product(" + ", ".join(s.origin for s in streams) + ")"
    return SymbolStream(alphabet, (join_symbols(t) for t in zip(*streams)), origin)


def interleave(a: SymbolStream, b: SymbolStream) -> SymbolStream:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("interleaved streams must share an alphabet")

    def gen():
        for x, y in zip(a, b):
            yield x
            yield y

    return SymbolStream(a.alphabet, gen(), f"interleave({a.origin}, {b.origin})")


def von_neumann(s: SymbolStream, budget: int = DEFAULT_BUDGET) -> SymbolStream:
    """Pair-block extractor: 01 -> 0, 10 -> 1, 00 and 11 -> nothing."""
    if s.alphabet != BINARY:
        raise AlphabetMismatch(f"von Neumann extraction needs alphabet {{0,1}}, got {s.alphabet}")

    def gen():
        scanned = 0
        produced = 0
        gap = 0
        it = iter(s)
        for x in it:
            try:
                y = next(it)
            except StopIteration:
                return
            scanned += 2
            if x != y:
                gap = 0
                produced += 1
                yield x
            else:
                gap += 2
                if gap >= budget:
                    raise Starved(scanned, produced, f"{budget} bits without a mismatched pair")

    return SymbolStream(BINARY, gen(), f"von_neumann({s.origin})")


def take_prefix(s: SymbolStream, n: int) -> FinitePrefix:
    if n < 0:
        raise InvalidParameter("prefix length must be nonnegative")
    out = []
    for _ in range(n):
        try:
            out.append(next(s))
        except StopIteration:
            raise Starved(len(out), len(out), f"stream ended after {len(out)} of {n} symbols") from None
    return FinitePrefix(tuple(out), s.alphabet, f"{s.origin}[:{n}]")


def drain(s: SymbolStream) -> FinitePrefix:
    """Everything a finite stream produces."""
    return FinitePrefix(tuple(s), s.alphabet, s.origin)


def prefix_of(alphabet: Alphabet, symbols, origin: str = "literal") -> FinitePrefix:
    return FinitePrefix(alphabet.check_string(as_string(symbols)), alphabet, origin)
