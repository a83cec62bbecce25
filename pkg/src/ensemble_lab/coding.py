"""Instantaneous binary codes: audit, entropy, optimality, encode and decode."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

import mpmath

from .errors import (
    AlphabetMismatch,
    EmptyCodeword,
    InvalidParameter,
    NotDyadic,
    UnknownSymbol,
    UnparsableBits,
)
from .numeric import round_decimal
from .prob import BINARY, Alphabet, FiniteProbabilitySpace, as_string, make_space
from .streams import SymbolStream

ENTROPY_DIGITS = 50
FRESH = "$"


@dataclass(frozen=True)
class InstantaneousCode:
    source: Alphabet
    codewords: Mapping[str, str]

    def __post_init__(self):
        words = dict(self.codewords)
        missing = [a for a in self.source if a not in words]
        if missing:
            raise AlphabetMismatch(f"no codeword for {missing}")
        extra = [a for a in words if a not in self.source]
        if extra:
            raise AlphabetMismatch(f"codewords for symbols outside the source: {extra}")
        for a, w in words.items():
            if not w:
                raise EmptyCodeword(f"codeword of {a!r} is empty")
            if set(w) - {"0", "1"}:
                raise InvalidParameter(f"codeword of {a!r} is not binary: {w!r}")
        object.__setattr__(self, "codewords", {a: words[a] for a in self.source})

    def __getitem__(self, a: str) -> str:
        try:
            return self.codewords[a]
        except KeyError:
            raise UnknownSymbol(a, "code's source alphabet") from None

    def length(self, a: str) -> int:
        return len(self[a])

    def items(self):
        return self.codewords.items()


def make_code(words: Mapping[str, str] | Iterable[tuple[str, str]], source: Alphabet | None = None) -> InstantaneousCode:
    words = dict(words)
    return InstantaneousCode(source or Alphabet(tuple(words)), words)


class CodeAudit(NamedTuple):
    ok: bool
    kraft: Fraction
    duplicates: list  # (a, b) pairs with equal codewords
    prefix_violations: list  # (a, b) with C(a) a proper prefix of C(b)


def kraft_sum(code: InstantaneousCode) -> Fraction:
    return sum((Fraction(1, 2 ** len(w)) for _, w in code.items()), Fraction(0))


def validate_code(code: InstantaneousCode) -> CodeAudit:
    items = list(code.items())
    dups, prefix = [], []
    for i, (a, wa) in enumerate(items):
        for b, wb in items[i + 1 :]:
            if wa == wb:
                dups.append((a, b))
            elif wb.startswith(wa):
                prefix.append((a, b))
            elif wa.startswith(wb):
                prefix.append((b, a))
    return CodeAudit(not dups and not prefix, kraft_sum(code), dups, prefix)


def require_valid(code: InstantaneousCode) -> None:
    audit = validate_code(code)
    if audit.duplicates:
        a, b = audit.duplicates[0]
        raise InvalidParameter(f"{a!r} and {b!r} share codeword {code[a]!r}")
    if audit.prefix_violations:
        a, b = audit.prefix_violations[0]
        raise InvalidParameter(f"codeword {code[a]!r} of {a!r} is a prefix of {code[b]!r} of {b!r}")


def dyadic_exponent(w: Fraction) -> int | None:
    """k with w = 2^-k, or None."""
    if w <= 0 or w.numerator != 1:
        return None
    d = w.denominator
    if d & (d - 1):
        return None
    return d.bit_length() - 1


class Entropy(NamedTuple):
    exact: Fraction | None
    lower: Decimal
    upper: Decimal

    def __str__(self):
        return str(self.exact) if self.exact is not None else str(self.upper)


def shannon_entropy(space: FiniteProbabilitySpace) -> Entropy:
    """H(P) in bits, exact when every nonzero weight is dyadic.

    Otherwise ``lower <= H <= upper`` at 50 significant digits.
    """
    ks = [(w, dyadic_exponent(w)) for _, w in space.items() if w > 0]
    if all(k is not None for _, k in ks):
        h = sum((w * k for w, k in ks), Fraction(0))
        d = Decimal(h.numerator) / Decimal(h.denominator)
        return Entropy(h, d, d)
    iv = mpmath.iv
    saved = iv.dps
    iv.dps = ENTROPY_DIGITS + 10
    try:
        total = iv.mpf(0)
        for w, _ in ks:
            p = iv.mpf(w.numerator) / w.denominator
            total -= p * iv.log(p) / iv.log(2)
    finally:
        iv.dps = saved
    return Entropy(None, _round(total.a, ROUND_FLOOR), _round(total.b, ROUND_CEILING))


def _round(x, rounding) -> Decimal:
    return round_decimal(x, ENTROPY_DIGITS, rounding)


def _check_source(space: FiniteProbabilitySpace, code: InstantaneousCode) -> None:
    if space.alphabet.symbols != code.source.symbols and set(space.alphabet) != set(code.source):
        raise AlphabetMismatch(f"code source {list(code.source)} differs from {list(space.alphabet)}")


def avg_length(space: FiniteProbabilitySpace, code: InstantaneousCode) -> Fraction:
    _check_source(space, code)
    return sum((w * code.length(a) for a, w in space.items()), Fraction(0))


class Optimality(NamedTuple):
    optimal: bool
    offending: list  # (symbol, P(a), 2^-|C(a)|)
    zero_weight: list  # symbols with P(a) = 0, left out of the criterion


def is_abs_optimal(space: FiniteProbabilitySpace, code: InstantaneousCode) -> Optimality:
    """P(a) = 2^-|C(a)| for every symbol of positive weight.

    Zero-weight symbols are listed separately.  A code for a space with
    such a symbol can never be optimal: the positive-weight codewords would
    already exhaust the Kraft sum.
    """
    _check_source(space, code)
    bad, zero = [], []
    for a, w in space.items():
        target = Fraction(1, 2 ** code.length(a))
        if w == 0:
            zero.append(a)
        elif w != target:
            bad.append((a, w, target))
    return Optimality(not bad and not zero, bad, zero)


def build_dyadic_code(space: FiniteProbabilitySpace) -> InstantaneousCode:
    """Canonical code with |C(a)| = -log2 P(a), by increasing length then alphabet order.

    A single symbol of weight 1 gets the codeword ``0``.
    """
    lengths = {}
    for a, w in space.items():
        k = dyadic_exponent(w)
        if k is None:
            raise NotDyadic(f"P({a!r}) = {w} is not a power of 1/2")
        lengths[a] = k
    if len(lengths) == 1:
        (a,) = lengths
        return InstantaneousCode(space.alphabet, {a: "0"})
    order = sorted(space.alphabet, key=lambda a: (lengths[a], space.alphabet.index(a)))
    words = {}
    value, prev = 0, lengths[order[0]]
    for i, a in enumerate(order):
        k = lengths[a]
        if i:
            value = (value + 1) << (k - prev)
        words[a] = format(value, f"0{k}b")
        prev = k
    return InstantaneousCode(space.alphabet, words)


def encode_stream(code: InstantaneousCode, s) -> SymbolStream:
    require_valid(code)
    origin = getattr(s, "origin", "literal")

    def gen():
        for a in s:
            yield from code[a]

    return SymbolStream(BINARY, gen(), f"encode({origin})")


def encode(code: InstantaneousCode, symbols) -> str:
    return "".join(encode_stream(code, as_string(symbols)))


def _decoder_trie(code: InstantaneousCode) -> dict:
    root: dict = {}
    for a, w in code.items():
        node = root
        for bit in w:
            node = node.setdefault(bit, {})
        node[None] = a
    return root


class DecodedStream(SymbolStream):
    """Decoded symbols; ``remainder`` holds dangling bits once the input ends."""

    remainder: str = ""


def decode_stream(code: InstantaneousCode, bits) -> DecodedStream:
    require_valid(code)
    root = _decoder_trie(code)
    origin = getattr(bits, "origin", "literal")
    out = DecodedStream(code.source, (), f"decode({origin})")

    def gen() -> Iterator[str]:
        node, start, pending = root, 0, []
        for offset, bit in enumerate(bits):
            if not pending:
                start = offset
            node = node.get(bit)
            if node is None:
                raise UnparsableBits(start)
            pending.append(bit)
            if None in node:
                yield node[None]
                node, pending = root, []
        out.remainder = "".join(pending)

    out._it = gen()
    return out


def decode_bits(code: InstantaneousCode, bits) -> tuple[tuple[str, ...], str]:
    """Decode a finite bit string; returns (symbols, dangling remainder)."""
    stream = decode_stream(code, as_string(bits))
    symbols = tuple(stream)
    return symbols, stream.remainder


def code_q_space(code: InstantaneousCode) -> tuple[FiniteProbabilitySpace, str]:
    """Q(a) = 2^-|C(a)| plus a fresh symbol carrying 1 - Kraft sum."""
    require_valid(code)
    fresh = FRESH
    while fresh in code.source:
        fresh += FRESH
    weights = {a: Fraction(1, 2 ** len(w)) for a, w in code.items()}
    weights[fresh] = 1 - sum(weights.values())
    return make_space(Alphabet(code.source.symbols + (fresh,)), weights), fresh
