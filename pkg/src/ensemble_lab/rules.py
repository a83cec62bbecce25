"""Injections and selection rules from a small closed vocabulary.

Injections on the positive integers (used by shuffling)::

    identity | primes | perm:3,1,2 | <a>k[+-<b>]   e.g. k+1, 2k, 2k-1, 3k+2

Selection rules (YES/NO decided from the prefix read so far)::

    always | never | even-length | odd-length | length-mod:<m>:<r>
    ends-with:<sym> | not-ends-with:<sym> | run:<sym>:<k>
    partial-after:<n> | not:<rule>

``partial-after:<n>`` answers YES on prefixes shorter than ``n`` and is
undefined from then on; it exists to exercise stalling.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .errors import InvalidParameter, NotInjective


@dataclass(frozen=True)
class Injection:
    name: str
    fn: Callable[[int], int]
    increasing: bool = False

    def __call__(self, k: int) -> int:
        if k < 1:
            raise InvalidParameter(f"injections are defined on positive integers, got {k}")
        v = self.fn(k)
        if v < 1:
            raise InvalidParameter(f"{self.name}: f({k}) = {v} is not a positive integer")
        return v

    def image(self, n: int) -> list[int]:
        """``[f(1), ..., f(n)]``, raising NotInjective on a repeated value."""
        seen: dict[int, int] = {}
        out = []
        for k in range(1, n + 1):
            v = self(k)
            if v in seen:
                raise NotInjective(v, seen[v], k)
            seen[v] = k
            out.append(v)
        return out

    def __repr__(self):
        return f"Injection({self.name})"


def affine(a: int, b: int = 0) -> Injection:
    if b == 0:
        name = "k" if a == 1 else f"{a}k"
    else:
        name = f"{'' if a == 1 else a}k{b:+d}"
    return Injection(name, lambda k: a * k + b, increasing=a >= 1)


def identity() -> Injection:
    return Injection("identity", lambda k: k, increasing=True)


def _nth_prime(k: int, _cache=[2]) -> int:
    primes = _cache
    candidate = primes[-1]
    while len(primes) < k:
        candidate += 1
        if all(candidate % p for p in primes if p * p <= candidate):
            primes.append(candidate)
    return primes[k - 1]


def primes() -> Injection:
    return Injection("primes", _nth_prime, increasing=True)


def permutation(table: Sequence[int]) -> Injection:
    """A permutation of ``1..n`` given as ``[f(1), ..., f(n)]``; identity beyond."""
    table = tuple(int(v) for v in table)
    n = len(table)
    if sorted(table) != list(range(1, n + 1)):
        seen: dict[int, int] = {}
        for k, v in enumerate(table, 1):
            if v in seen:
                raise NotInjective(v, seen[v], k)
            seen[v] = k
        raise InvalidParameter(f"perm table must be a permutation of 1..{n}: {list(table)}")
    return Injection(
        "perm:" + ",".join(map(str, table)), lambda k: table[k - 1] if k <= n else k
    )


_AFFINE = re.compile(r"^\s*(\d*)\s*\*?\s*k\s*(?:([+-])\s*(\d+))?\s*$")


def parse_injection(text: str) -> Injection:
    text = text.strip()
    if text in ("identity", "id"):
        return identity()
    if text == "primes":
        return primes()
    if text.startswith("perm:"):
        try:
            table = [int(v) for v in text[5:].split(",") if v.strip()]
        except ValueError:
            raise InvalidParameter(f"bad permutation table {text!r}") from None
        return permutation(table)
    m = _AFFINE.match(text)
    if m:
        a = int(m.group(1)) if m.group(1) else 1
        b = int(m.group(3) or 0) * (-1 if m.group(2) == "-" else 1)
        return affine(a, b)
    raise InvalidParameter(f"unknown injection {text!r}")


@dataclass(frozen=True)
class SelectionRule:
    """Decides from a prefix whether the next symbol is selected.

    ``decide`` returns True (YES), False (NO) or None (undefined).
    It must only look at the prefix it is given.
    """

    name: str
    decide: Callable[[Sequence[str]], Optional[bool]]

    def __call__(self, prefix: Sequence[str]) -> Optional[bool]:
        return self.decide(prefix)

    def __repr__(self):
        return f"SelectionRule({self.name})"


def _run(sym: str, k: int):
    def decide(p):
        return len(p) >= k and all(a == sym for a in p[len(p) - k :])

    return decide


def _partial_after(n: int):
    def decide(p):
        return True if len(p) < n else None

    return decide


def _negate(rule: SelectionRule):
    def decide(p):
        v = rule.decide(p)
        return None if v is None else not v

    return decide


def parse_rule(text: str) -> SelectionRule:
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if text == "always":
            return SelectionRule(text, lambda p: True)
        if text == "never":
            return SelectionRule(text, lambda p: False)
        if text == "even-length":
            return SelectionRule(text, lambda p: len(p) % 2 == 0)
        if text == "odd-length":
            return SelectionRule(text, lambda p: len(p) % 2 == 1)
        if head == "length-mod":
            m, r = (int(v) for v in rest.split(":"))
            if m < 1:
                raise ValueError
            return SelectionRule(text, lambda p: len(p) % m == r)
        if head == "ends-with" and rest:
            return SelectionRule(text, lambda p: bool(p) and p[-1] == rest)
        if head == "not-ends-with" and rest:
            return SelectionRule(text, lambda p: not p or p[-1] != rest)
        if head == "run":
            sym, k = rest.rsplit(":", 1)
            return SelectionRule(text, _run(sym, int(k)))
        if head == "partial-after":
            return SelectionRule(text, _partial_after(int(rest)))
        if head == "not" and rest:
            return SelectionRule(text, _negate(parse_rule(rest)))
    except ValueError:
        raise InvalidParameter(f"bad parameters in selection rule {text!r}") from None
    raise InvalidParameter(f"unknown selection rule {text!r}")


BUILTIN_RULES = (
    "always",
    "never",
    "even-length",
    "odd-length",
    "length-mod:3:1",
    "ends-with:0",
    "not-ends-with:1",
    "run:1:2",
)
