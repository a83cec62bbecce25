"""Test transformations that carry a test for one ensemble to another.

Each transform takes the strings of a level and builds, per string, the
finite set of strings in the source space that the proof constructions
use.  Measures are exact; truncated enumerations under-approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterable

from .errors import AlphabetMismatch, EmptyStringInLevel, Stalled, ZeroConditionEvent
from .mltest import TestLevel, open_measure, prefix_free_reduce
from .prob import (
    Alphabet,
    FiniteProbabilitySpace,
    RandomVariable,
    as_string,
    event_prob,
    make_space,
    string_prob,
)
from .rules import Injection, SelectionRule


def _check_level(alphabet: Alphabet, level: TestLevel) -> None:
    for s in level.strings:
        for a in s:
            if a not in alphabet:
                raise AlphabetMismatch(f"level symbol {a!r} is not in {list(alphabet)}")


def map_preimage(x: RandomVariable, sigma) -> frozenset[tuple[str, ...]]:
    """All strings tau over the source with X(tau_i) = sigma_i for every i."""
    choices = [x.preimage(a) for a in as_string(sigma)]
    return frozenset(product(*choices))


def transform_map(x: RandomVariable, level: TestLevel, space: FiniteProbabilitySpace) -> TestLevel:
    """Pull a level over ``x.target`` back to the source alphabet."""
    if space.alphabet != x.source:
        raise AlphabetMismatch("space alphabet differs from the random variable source")
    _check_level(x.target, level)
    out: set = set()
    for s in level.strings:
        out |= map_preimage(x, s)
    return TestLevel(level.index, out, open_measure(space, out))


def shuffle_preimage(f: Injection, sigma, alphabet: Alphabet) -> frozenset[tuple[str, ...]]:
    """Strings tau of length max f(1..|sigma|) with tau(f(k)) = sigma(k)."""
    sigma = as_string(sigma)
    if not sigma:
        raise EmptyStringInLevel("the shuffle transform needs levels without the empty string")
    image = f.image(len(sigma))
    length = max(image)
    fixed = {j: a for j, a in zip(image, sigma)}
    free = [j for j in range(1, length + 1) if j not in fixed]
    out = set()
    for fill in product(alphabet.symbols, repeat=len(free)):
        pos = dict(fixed)
        pos.update(zip(free, fill))
        out.add(tuple(pos[j] for j in range(1, length + 1)))
    return frozenset(out)


def transform_shuffle(f: Injection, level: TestLevel, space: FiniteProbabilitySpace) -> TestLevel:
    _check_level(space.alphabet, level)
    out: set = set()
    for s in level.strings:
        out |= shuffle_preimage(f, s, space.alphabet)
    return TestLevel(level.index, out, open_measure(space, out))


def select_preimage(rule: SelectionRule, sigma, alphabet: Alphabet, depth: int) -> frozenset[tuple[str, ...]]:
    """Strings tau with |tau| <= depth from which ``rule`` selects exactly sigma.

    The last symbol of tau is the last selected one, so the result is
    prefix-free.  The empty string maps to ``{()}``.
    """
    sigma = as_string(sigma)
    if not sigma:
        return frozenset({()})
    out = set()
    stack: list[tuple[tuple[str, ...], int]] = [((), 0)]
    while stack:
        tau, c = stack.pop()
        if len(tau) >= depth:
            continue
        verdict = rule(tau)
        if verdict is None:
            raise Stalled(len(tau), rule.name)
        if verdict:
            nxt = tau + (sigma[c],)
            if c + 1 == len(sigma):
                out.add(nxt)
            else:
                stack.append((nxt, c + 1))
        else:
            for a in alphabet.symbols:
                stack.append((tau + (a,), c))
    return frozenset(out)


def transform_select(
    rule: SelectionRule, level: TestLevel, space: FiniteProbabilitySpace, depth: int
) -> tuple[TestLevel, Fraction]:
    """Truncated selection preimage of a level and its exact measure."""
    _check_level(space.alphabet, level)
    out: set = set()
    for s in level.strings:
        out |= select_preimage(rule, s, space.alphabet, depth)
    measure = open_measure(space, out)
    return TestLevel(level.index, out, measure), measure


@dataclass(frozen=True)
class ConditionTransform:
    """Result of conditioning a level on an event ``b``.

    ``merged`` is the symbol standing for all of ``Omega minus b`` in the
    space ``q`` (None when ``b`` is the whole alphabet).  ``patterns`` maps
    each minimal level string to its pattern ``a* s_1 a* s_2 ... a* s_L``.
    """

    q: FiniteProbabilitySpace
    merged: str | None
    patterns: dict
    closed_form: Fraction
    depth: int
    enumeration: frozenset
    truncated_measure: Fraction


def merged_space(space: FiniteProbabilitySpace, b: Iterable[str]) -> tuple[FiniteProbabilitySpace, str | None]:
    """Collapse the complement of ``b`` onto its first symbol."""
    members = frozenset(b)
    space.alphabet.subset(members)
    pb = event_prob(space, members)
    if pb == 0:
        raise ZeroConditionEvent(f"P({sorted(members)}) = 0")
    rest = [a for a in space.alphabet if a not in members]
    if not rest:
        return space, None
    a = rest[0]
    keep = tuple(s for s in space.alphabet if s in members or s == a)
    weights = {s: (1 - pb if s == a else space[s]) for s in keep}
    return make_space(Alphabet(keep), weights), a


def condition_pattern(sigma, merged: str | None) -> str:
    sigma = as_string(sigma)
    if merged is None:
        return "".join(sigma) or "λ"
    return "".join(f"{merged}*{s}" for s in sigma) or "λ"


def condition_closed_form(q: FiniteProbabilitySpace, merged: str | None, sigma) -> Fraction:
    sigma = as_string(sigma)
    base = string_prob(q, sigma)
    if merged is None:
        return base
    return base / (1 - q[merged]) ** len(sigma)


def condition_partial_sum(q: FiniteProbabilitySpace, merged: str | None, sigma, depth: int) -> Fraction:
    """Measure of the pattern strings with at most ``depth`` merged symbols in total."""
    sigma = as_string(sigma)
    base = string_prob(q, sigma)
    if merged is None or not sigma:
        return base
    qa = q[merged]
    L = len(sigma)
    return base * sum(comb(j + L - 1, L - 1) * qa**j for j in range(depth + 1))


def _compositions(total_max: int, parts: int):
    if parts == 0:
        yield ()
        return
    for k in range(total_max + 1):
        for rest in _compositions(total_max - k, parts - 1):
            yield (k,) + rest


def condition_enumerate(sigma, merged: str | None, depth: int) -> frozenset[tuple[str, ...]]:
    sigma = as_string(sigma)
    if merged is None:
        return frozenset({sigma})
    out = set()
    for ks in _compositions(depth, len(sigma)):
        s: tuple[str, ...] = ()
        for k, a in zip(ks, sigma):
            s += (merged,) * k + (a,)
        out.add(s)
    return frozenset(out)


def transform_condition(
    b: Iterable[str], level: TestLevel | Iterable, space: FiniteProbabilitySpace, depth: int
) -> ConditionTransform:
    """Carry a level for the conditional space ``P_b`` back to ``space``.

    Strings in the enumeration are over ``q``: the merged symbol stands
    for any symbol outside ``b``, so their ``q``-measure is the measure of
    the corresponding open set under ``space``.
    """
    members = frozenset(b)
    q, merged = merged_space(space, members)
    strings = level.strings if isinstance(level, TestLevel) else frozenset(as_string(s) for s in level)
    for s in strings:
        for a in s:
            if a not in members:
                raise AlphabetMismatch(f"level symbol {a!r} is outside the conditioning event")
    minimal = sorted(prefix_free_reduce(strings))
    patterns = {s: condition_pattern(s, merged) for s in minimal}
    closed = sum((condition_closed_form(q, merged, s) for s in minimal), Fraction(0))
    enum: set = set()
    for s in minimal:
        enum |= condition_enumerate(s, merged, depth)
    return ConditionTransform(q, merged, patterns, closed, depth, frozenset(enum), open_measure(q, enum))
