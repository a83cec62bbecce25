"""Martin-Löf P-tests as explicit level families with exact measures.

A level is a finite set of strings; its open set is the union of the
cylinders of its strings, and its Bernoulli measure is computed exactly
as the sum of string probabilities over the minimal (prefix-free) part.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, NamedTuple

import mpmath
import numpy as np

from .errors import AlphabetMismatch, DegenerateQ, EpsilonOutOfRange, InvalidParameter
from .prob import BINARY, FiniteProbabilitySpace, as_string, string_prob
from .trie import PrefixTrie


def _strings(strings: Iterable) -> frozenset[tuple[str, ...]]:
    return frozenset(as_string(s) for s in strings)


def prefix_free_reduce(strings: Iterable) -> frozenset[tuple[str, ...]]:
    """Drop every string that has a proper prefix in the set."""
    return frozenset(PrefixTrie(_strings(strings)).minimal())


def is_prefix_free(strings: Iterable) -> bool:
    strings = _strings(strings)
    return len(prefix_free_reduce(strings)) == len(strings)


def open_measure(space: FiniteProbabilitySpace, strings: Iterable) -> Fraction:
    """Exact Bernoulli measure of the open set generated by ``strings``."""
    strings = _strings(strings)
    for s in strings:
        space.alphabet.check_string(s)
    return sum((string_prob(space, s) for s in prefix_free_reduce(strings)), Fraction(0))


@dataclass(frozen=True)
class TestLevel:
    __test__ = False  # not a pytest class

    index: int
    strings: frozenset = field(default_factory=frozenset)
    measure_certificate: Fraction | None = None

    def __post_init__(self):
        if self.index < 1:
            raise InvalidParameter(f"test levels are indexed from 1, got {self.index}")
        object.__setattr__(self, "strings", _strings(self.strings))

    @property
    def bound(self) -> Fraction:
        return Fraction(1, 2**self.index)

    @property
    def certified(self) -> bool:
        return self.measure_certificate is not None and self.measure_certificate < self.bound

    def __len__(self):
        return len(self.strings)


class Certification(NamedTuple):
    level: TestLevel
    measure: Fraction
    bound: Fraction
    certified: bool


def certify_level(space: FiniteProbabilitySpace, level: TestLevel) -> Certification:
    """Certify ``measure < 2^-index`` exactly; equality counts as a violation."""
    measure = open_measure(space, level.strings)
    bound = level.bound
    return Certification(replace(level, measure_certificate=measure), measure, bound, measure < bound)


def member(level: TestLevel, prefix, alphabet=None) -> bool:
    """Whether the prefix already lies in the level's open set.

    ``False`` is provisional: a longer prefix may still enter the set.
    """
    prefix = as_string(prefix)
    if alphabet is None:
        alphabet = getattr(prefix, "alphabet", None)
    if alphabet is not None:
        for s in level.strings:
            for a in s:
                if a not in alphabet:
                    raise AlphabetMismatch(f"level string symbol {a!r} not in {alphabet}")
    return PrefixTrie(level.strings).has_prefix_of(prefix)


class MLTestFamily:
    """Explicit levels, or a generator producing level ``n`` on demand."""

    def __init__(
        self,
        space: FiniteProbabilitySpace,
        levels: Mapping[int, Iterable] | None = None,
        generator: Callable[[int], TestLevel] | None = None,
    ):
        self.space = space
        self._levels: dict[int, TestLevel] = {}
        for n, strings in (levels or {}).items():
            lvl = strings if isinstance(strings, TestLevel) else TestLevel(n, strings)
            for s in lvl.strings:
                space.alphabet.check_string(s)
            self._levels[n] = lvl
        self._generator = generator

    def level(self, n: int) -> TestLevel:
        if n not in self._levels:
            if self._generator is None:
                return TestLevel(n)
            self._levels[n] = self._generator(n)
        return self._levels[n]

    @property
    def indices(self) -> list[int]:
        return sorted(self._levels)

    def certify(self) -> dict[int, Certification]:
        out = {}
        for n in self.indices:
            cert = certify_level(self.space, self._levels[n])
            self._levels[n] = cert.level
            out[n] = cert
        return out

    def hits(self, prefix) -> list[int]:
        """Indices of materialized levels whose open set contains the prefix."""
        return [n for n in self.indices if member(self._levels[n], prefix)]


class ZeroProbabilityTest:
    """Every level is the set of strings containing a zero-weight symbol."""

    def __init__(self, space: FiniteProbabilitySpace):
        self.space = space
        self.zero = frozenset(a for a, w in space.items() if w == 0)
        self.positive = tuple(a for a, w in space.items() if w > 0)

    def member(self, prefix, n: int = 1) -> bool:
        return any(a in self.zero for a in as_string(prefix))

    def measure(self, n: int = 1) -> Fraction:
        return Fraction(0)

    def level(self, n: int, depth: int) -> TestLevel:
        """Minimal strings of the level up to ``depth``: positive symbols then a zero one."""
        out = set()
        if self.zero:
            frontier = [()]
            for _ in range(depth):
                nxt = []
                for s in frontier:
                    for z in self.zero:
                        out.add(s + (z,))
                    nxt.extend(s + (a,) for a in self.positive)
                frontier = nxt
        return TestLevel(n, out)

    def family(self, depth: int, levels: Iterable[int]) -> MLTestFamily:
        return MLTestFamily(self.space, {n: self.level(n, depth) for n in levels})


def zero_prob_test(space: FiniteProbabilitySpace) -> ZeroProbabilityTest:
    return ZeroProbabilityTest(space)


def _tail_bound(c: Fraction, m: int, dps: int):
    """2 e^{-c m} / (1 - e^{-c}) as an mpmath interval."""
    iv = mpmath.iv
    saved = iv.dps
    iv.dps = dps
    try:
        cc = iv.mpf(c.numerator) / c.denominator
        return 2 * iv.exp(-cc * m) / (1 - iv.exp(-cc))
    finally:
        iv.dps = saved


def growth(c: Fraction, n: int) -> int:
    """Least m >= 1 with 2 e^{-cm}/(1 - e^{-c}) < 2^-n, decided in interval arithmetic."""
    if c <= 0:
        raise InvalidParameter("c must be positive")
    target = mpmath.ldexp(mpmath.mpf(1), -n)

    def below(m: int) -> bool:
        dps = 40
        while True:
            val = _tail_bound(c, m, dps)
            if val.b < target:
                return True
            if val.a >= target:
                return False
            dps *= 2

    with mpmath.workdps(40):
        cf = mpmath.mpf(c.numerator) / c.denominator
        guess = (mpmath.log(2) * (n + 1) - mpmath.log(-mpmath.expm1(-cf))) / cf
    m = max(1, int(mpmath.floor(guess)))
    while not below(m):
        m += 1
    while m > 1 and below(m - 1):
        m -= 1
    return m


@dataclass(frozen=True)
class LLNTest:
    """The frequency test built from the Chernoff bound for a binary space.

    Level ``n`` is T_{f(n)}: prefixes whose running frequency of 1 leaves
    ``[r_left, r_right]`` at some length ``m >= f(n)``.
    """

    q: FiniteProbabilitySpace
    epsilon: Fraction
    r_left: Fraction
    r_right: Fraction
    c: Fraction

    def growth(self, n: int) -> int:
        return _cached_growth(self.c, n)

    def _outside(self, ones, m):
        rl, rr = self.r_left, self.r_right
        return (ones * rl.denominator < rl.numerator * m) | (ones * rr.denominator > rr.numerator * m)

    def member(self, prefix, n: int) -> bool:
        bits = np.fromiter((a == "1" for a in as_string(prefix)), dtype=np.int64)
        start = self.growth(n)
        if len(bits) < start:
            return False
        big = max(self.r_left.denominator, self.r_right.denominator, abs(self.r_right.numerator))
        ones = np.cumsum(bits)[start - 1 :]
        m = np.arange(start, len(bits) + 1, dtype=np.int64)
        if big * len(bits) < 2**62:
            return bool(self._outside(ones, m).any())
        return any(self._outside(int(o), int(k)) for o, k in zip(ones, m))

    def truncated_measure(self, n: int, depth: int) -> Fraction:
        """Exact measure of level ``n`` restricted to strings of length <= depth."""
        start = self.growth(n)
        p1, p0 = self.q["1"], self.q["0"]
        alive = {0: Fraction(1)}  # ones count -> probability of not having been caught yet
        caught = Fraction(0)
        for m in range(1, depth + 1):
            nxt: dict[int, Fraction] = {}
            for k, w in alive.items():
                nxt[k] = nxt.get(k, 0) + w * p0
                nxt[k + 1] = nxt.get(k + 1, 0) + w * p1
            alive = {}
            for k, w in nxt.items():
                if not w:
                    continue
                if m >= start and self._outside(k, m):
                    caught += w
                else:
                    alive[k] = w
        return caught


@lru_cache(maxsize=None)
def _cached_growth(c: Fraction, n: int) -> int:
    return growth(c, n)


def lln_test(q: FiniteProbabilitySpace, epsilon) -> LLNTest:
    """Build the law-of-large-numbers test for a binary space.

    The thresholds are the midpoints of the admissible open intervals:
    ``r_left = Q(1) - 3eps/2``, ``r_right = Q(1) + 3eps/2`` and
    ``c = eps^2 / (4 Q(0) Q(1))``.
    """
    if q.alphabet != BINARY:
        raise AlphabetMismatch("the LLN test is defined on the alphabet {0,1}")
    eps = Fraction(epsilon)
    q0, q1 = q["0"], q["1"]
    if not 0 < q1 < 1:
        raise DegenerateQ(f"Q(1) = {q1} leaves no room for fluctuations")
    if not 0 < eps <= q0 * q1:
        raise EpsilonOutOfRange(f"need 0 < eps <= Q(0)Q(1) = {q0 * q1}, got {eps}")
    c = eps**2 / (4 * q0 * q1)
    return LLNTest(q, eps, q1 - 3 * eps / 2, q1 + 3 * eps / 2, c)


def level_decimal(x: Fraction, digits: int = 12) -> str:
    if x == 0:
        return "0"
    with mpmath.workdps(digits + 5):
        return mpmath.nstr(mpmath.mpf(x.numerator) / x.denominator, digits)


__all__ = [
    "Certification",
    "LLNTest",
    "MLTestFamily",
    "TestLevel",
    "ZeroProbabilityTest",
    "certify_level",
    "growth",
    "is_prefix_free",
    "level_decimal",
    "lln_test",
    "member",
    "open_measure",
    "prefix_free_reduce",
    "zero_prob_test",
]
