"""Exact finite probability spaces, events and random variables.

All arithmetic is done with :class:`fractions.Fraction`; floats are rejected
so that sum-to-one and independence checks are exact equalities.

Finite strings over an alphabet are tuples of symbols.  A plain ``str`` is
accepted anywhere a string is expected and is split one symbol per
character, which is convenient for single-character alphabets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    AlphabetMismatch,
    InvalidParameter,
    MissingWeight,
    NegativeWeight,
    SumNotOne,
    TooManyEvents,
    UnknownSymbol,
    ZeroConditionEvent,
)

SEP = "|"
MAX_EVENTS = 20

Event = frozenset


def as_string(s) -> tuple[str, ...]:
    if isinstance(s, str):
        return tuple(s)
    return tuple(s)


def to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(f"floating point weight {value!r} not allowed; use Fraction or 'p/q'")
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def join_symbols(parts: Sequence[str]) -> str:
    return SEP.join(parts)


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        symbols = tuple(self.symbols)
        if not symbols:
            raise InvalidParameter("an alphabet must be nonempty")
        if len(set(symbols)) != len(symbols):
            dup = next(s for s in symbols if symbols.count(s) > 1)
            raise InvalidParameter(f"duplicate symbol {dup!r} in alphabet")
        for s in symbols:
            if not isinstance(s, str) or not s:
                raise InvalidParameter(f"symbols must be nonempty strings, got {s!r}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "_members", frozenset(symbols))

    @classmethod
    def of(cls, symbols: Iterable[str] | str) -> "Alphabet":
        """Build a user alphabet; the tuple separator is reserved."""
        symbols = tuple(symbols)
        for s in symbols:
            if isinstance(s, str) and SEP in s:
                raise InvalidParameter(f"symbol {s!r} uses the reserved separator {SEP!r}")
        return cls(symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._members

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise UnknownSymbol(symbol) from None

    def check_string(self, s) -> tuple[str, ...]:
        s = as_string(s)
        for a in s:
            if a not in self._members:
                raise UnknownSymbol(a)
        return s

    def subset(self, members: Iterable[str]) -> "Alphabet":
        """Sub-alphabet with members kept in this alphabet's order."""
        members = frozenset(members)
        unknown = members - self._members
        if unknown:
            raise AlphabetMismatch(f"symbols {sorted(unknown)} are not in the alphabet")
        return Alphabet(tuple(s for s in self.symbols if s in members))

    def __repr__(self):
        return "Alphabet({" + ", ".join(self.symbols) + "})"


def product_alphabet(alphabets: Sequence[Alphabet]) -> Alphabet:
    return Alphabet(tuple(join_symbols(t) for t in itertools.product(*alphabets)))


BINARY = Alphabet(("0", "1"))


class FiniteProbabilitySpace:
    """A probability mass function on a finite alphabet with exact weights."""

    __slots__ = ("alphabet", "_weights")

    def __init__(self, alphabet: Alphabet, weights: Mapping[str, Fraction]):
        self.alphabet = alphabet
        self._weights = MappingProxyType(dict(weights))

    @property
    def weights(self) -> Mapping[str, Fraction]:
        return self._weights

    def __getitem__(self, symbol: str) -> Fraction:
        try:
            return self._weights[symbol]
        except KeyError:
            raise UnknownSymbol(symbol) from None

    def items(self):
        return ((a, self._weights[a]) for a in self.alphabet)

    def support(self) -> tuple[str, ...]:
        return tuple(a for a, w in self.items() if w)

    def check(self) -> bool:
        """Re-verify nonnegativity and the exact unit total."""
        return all(w >= 0 for _, w in self.items()) and sum(self._weights.values()) == 1

    def __eq__(self, other):
        if not isinstance(other, FiniteProbabilitySpace):
            return NotImplemented
        return self.alphabet == other.alphabet and dict(self._weights) == dict(other._weights)

    def __hash__(self):
        return hash((self.alphabet, tuple(self.items())))

    def __repr__(self):
        body = ", ".join(f"{a}: {w}" for a, w in self.items())
        return f"FiniteProbabilitySpace({{{body}}})"


def make_space(alphabet: Alphabet | Iterable[str], weights: Mapping[str, object]) -> FiniteProbabilitySpace:
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.of(alphabet)
    exact = {}
    for symbol, w in weights.items():
        if symbol not in alphabet:
            raise UnknownSymbol(symbol)
        exact[symbol] = to_fraction(w)
    missing = [a for a in alphabet if a not in exact]
    if missing:
        raise MissingWeight(missing)
    for a in alphabet:
        if exact[a] < 0:
            raise NegativeWeight(a, exact[a])
    total = sum(exact.values(), Fraction(0))
    if total != 1:
        raise SumNotOne(total)
    return FiniteProbabilitySpace(alphabet, exact)


def space_from_pairs(pairs: Mapping[str, object] | Iterable[tuple[str, object]]) -> FiniteProbabilitySpace:
    """Shorthand: the alphabet is taken from the keys in order."""
    pairs = dict(pairs)
    return make_space(Alphabet.of(pairs), pairs)


def uniform_space(alphabet: Alphabet | Iterable[str]) -> FiniteProbabilitySpace:
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.of(alphabet)
    w = Fraction(1, len(alphabet))
    return FiniteProbabilitySpace(alphabet, {a: w for a in alphabet})


def _event(space: FiniteProbabilitySpace, a: Iterable[str]) -> frozenset:
    members = frozenset(a)
    if not members <= space.alphabet._members:
        extra = sorted(members - space.alphabet._members)
        raise AlphabetMismatch(f"event members {extra} are not in the space's alphabet")
    return members


def event_prob(space: FiniteProbabilitySpace, a: Iterable[str]) -> Fraction:
    members = _event(space, a)
    return sum((space[s] for s in members), Fraction(0))


def string_prob(space: FiniteProbabilitySpace, s) -> Fraction:
    num = den = 1
    w = space.weights
    for a in as_string(s):
        try:
            q = w[a]
        except KeyError:
            raise UnknownSymbol(a) from None
        num *= q.numerator
        den *= q.denominator
    return Fraction(num, den)


def conditional_space(space: FiniteProbabilitySpace, b: Iterable[str]) -> FiniteProbabilitySpace:
    members = _event(space, b)
    pb = event_prob(space, members)
    if pb == 0:
        raise ZeroConditionEvent(f"cannot condition on an event of probability 0: {sorted(members)}")
    sub = space.alphabet.subset(members)
    return FiniteProbabilitySpace(sub, {a: space[a] / pb for a in sub})


def indicator_space(space: FiniteProbabilitySpace, a: Iterable[str]) -> FiniteProbabilitySpace:
    """The two-point space (P restricted to A): 1 with P(A), 0 otherwise."""
    pa = event_prob(space, a)
    return FiniteProbabilitySpace(BINARY, {"0": 1 - pa, "1": pa})


@dataclass(frozen=True)
class RandomVariable:
    source: Alphabet
    target: Alphabet
    mapping: Mapping[str, str]
    name: str = ""

    def __post_init__(self):
        mapping = dict(self.mapping)
        missing = [a for a in self.source if a not in mapping]
        if missing:
            raise AlphabetMismatch(f"random variable undefined on {missing}")
        extra = [a for a in mapping if a not in self.source]
        if extra:
            raise AlphabetMismatch(f"random variable defined outside its source: {extra}")
        for a, t in mapping.items():
            if t not in self.target:
                raise UnknownSymbol(t, "target alphabet")
        object.__setattr__(self, "mapping", MappingProxyType(mapping))

    def __call__(self, symbol: str) -> str:
        try:
            return self.mapping[symbol]
        except KeyError:
            raise UnknownSymbol(symbol, "random variable's source") from None

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.mapping.items())))

    def __eq__(self, other):
        if not isinstance(other, RandomVariable):
            return NotImplemented
        return (self.source, self.target, dict(self.mapping)) == (
            other.source,
            other.target,
            dict(other.mapping),
        )

    def preimage(self, t: str) -> tuple[str, ...]:
        return tuple(a for a in self.source if self.mapping[a] == t)

    @classmethod
    def from_mapping(cls, source, mapping: Mapping[str, str], target=None, name="") -> "RandomVariable":
        if not isinstance(source, Alphabet):
            source = Alphabet.of(source)
        if target is None:
            seen = dict.fromkeys(mapping[a] for a in source if a in mapping)
            target = Alphabet(tuple(seen))
        elif not isinstance(target, Alphabet):
            target = Alphabet(tuple(target))
        return cls(source, target, mapping, name)

    @classmethod
    def identity(cls, alphabet: Alphabet) -> "RandomVariable":
        return cls(alphabet, alphabet, {a: a for a in alphabet}, "identity")

    @classmethod
    def constant(cls, alphabet: Alphabet, value: str) -> "RandomVariable":
        return cls(alphabet, Alphabet((value,)), {a: value for a in alphabet}, f"const:{value}")

    @classmethod
    def indicator(cls, alphabet: Alphabet, event: Iterable[str]) -> "RandomVariable":
        members = frozenset(event)
        if not members <= alphabet._members:
            raise AlphabetMismatch(f"event {sorted(members)} not inside {alphabet}")
        label = ",".join(a for a in alphabet if a in members)
        return cls(
            alphabet, BINARY, {a: "1" if a in members else "0" for a in alphabet}, f"indicator:{label}"
        )

    @classmethod
    def contraction(cls, alphabet: Alphabet, b: str, a: str) -> "RandomVariable":
        """Replace every ``b`` by ``a``; the target drops ``b``."""
        if a == b or a not in alphabet or b not in alphabet:
            raise InvalidParameter(f"contraction {b}->{a} needs two distinct symbols of {alphabet}")
        target = Alphabet(tuple(s for s in alphabet if s != b))
        return cls(alphabet, target, {s: (a if s == b else s) for s in alphabet}, f"contract:{b}={a}")

    @classmethod
    def product(cls, rvs: Sequence["RandomVariable"]) -> "RandomVariable":
        rvs = list(rvs)
        if not rvs:
            raise InvalidParameter("product of zero random variables")
        source = rvs[0].source
        for x in rvs[1:]:
            if x.source != source:
                raise AlphabetMismatch("random variables in a product must share their source")
        target = product_alphabet([x.target for x in rvs])
        mapping = {a: join_symbols([x.mapping[a] for x in rvs]) for a in source}
        return cls(source, target, mapping, "x".join(x.name or "X" for x in rvs))


def induced_space(x: RandomVariable, space: FiniteProbabilitySpace) -> FiniteProbabilitySpace:
    if x.source != space.alphabet:
        raise AlphabetMismatch("random variable source differs from the space's alphabet")
    weights = {t: Fraction(0) for t in x.target}
    for a, w in space.items():
        weights[x.mapping[a]] += w
    return FiniteProbabilitySpace(x.target, weights)


def product_space(spaces: Sequence[FiniteProbabilitySpace]) -> FiniteProbabilitySpace:
    spaces = list(spaces)
    if not spaces:
        raise InvalidParameter("product of zero spaces")
    alphabet = product_alphabet([p.alphabet for p in spaces])
    weights = {}
    for combo in itertools.product(*(list(p.items()) for p in spaces)):
        w = Fraction(1)
        for _, wi in combo:
            w *= wi
        weights[join_symbols([a for a, _ in combo])] = w
    return FiniteProbabilitySpace(alphabet, weights)


class IndependenceVerdict(NamedTuple):
    independent: bool
    witness: tuple | None = None
    joint: Fraction | None = None
    product: Fraction | None = None


def events_independent(space: FiniteProbabilitySpace, events: Sequence[Iterable[str]]) -> IndependenceVerdict:
    """Check the product rule on every subcollection of size >= 2.

    The witness is the tuple of 1-based event indices of the first
    violating subcollection, smallest subcollections first.
    """
    sets = [_event(space, e) for e in events]
    if len(sets) > MAX_EVENTS:
        raise TooManyEvents(f"{len(sets)} events exceeds the cap of {MAX_EVENTS}")
    probs = [event_prob(space, e) for e in sets]
    for size in range(2, len(sets) + 1):
        for idx in itertools.combinations(range(len(sets)), size):
            inter = frozenset.intersection(*(sets[i] for i in idx))
            joint = event_prob(space, inter)
            prod = Fraction(1)
            for i in idx:
                prod *= probs[i]
            if joint != prod:
                return IndependenceVerdict(False, tuple(i + 1 for i in idx), joint, prod)
    return IndependenceVerdict(True)


def rvs_independent(space: FiniteProbabilitySpace, rvs: Sequence[RandomVariable]) -> IndependenceVerdict:
    """Independence as equality of the joint law with the product of marginals.

    The witness is the value tuple where the two laws differ.
    """
    rvs = list(rvs)
    for x in rvs:
        if x.source != space.alphabet:
            raise AlphabetMismatch("random variable source differs from the space's alphabet")
    joint = induced_space(RandomVariable.product(rvs), space)
    marginal = product_space([induced_space(x, space) for x in rvs])
    for combo in itertools.product(*(x.target for x in rvs)):
        key = join_symbols(combo)
        if joint[key] != marginal[key]:
            return IndependenceVerdict(False, combo, joint[key], marginal[key])
    return IndependenceVerdict(True)
