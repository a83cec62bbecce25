"""Finite-prefix diagnostics: frequencies, Chernoff bounds and proxies.

Counts are exact and deviations are compared to thresholds as exact
rationals, so every verdict is reproducible.  Only the Chernoff bound and
the default thresholds go through mpmath; both are rounded upward.
"""

from __future__ import annotations

import zlib
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

import mpmath
import numpy as np

from .errors import (
    AlphabetMismatch,
    DegenerateQ,
    EmptyPrefix,
    EpsilonOutOfRange,
    Inconclusive,
    InvalidParameter,
    LengthMismatch,
)
from .numeric import round_decimal
from .prob import BINARY, Alphabet, FiniteProbabilitySpace, as_string

DEFAULT_CONFIDENCE = Fraction(1, 10**6)
COMPRESSOR = "zlib level 9, raw deflate (wbits=-15), bits packed MSB first"
MIN_COMPRESS_BITS = 1024
_DIGITS = 25


def as_fraction(value) -> Fraction:
    """Thresholds may be given as Fraction, int, Decimal or decimal string."""
    if isinstance(value, float):
        value = repr(value)
    if isinstance(value, str):
        value = Decimal(value.strip()) if "/" not in value else Fraction(value.strip())
    return Fraction(value)


def fmt(value, digits: int = 8) -> str:
    """Short decimal rendering of a rational or Decimal."""
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        with localcontext() as ctx:
            ctx.prec = digits
            return str(Decimal(value.numerator) / Decimal(value.denominator))
    return str(value)


def _ceil_decimal(x, digits: int = _DIGITS) -> Decimal:
    return round_decimal(x, digits, ROUND_CEILING)


@dataclass(frozen=True)
class FrequencyTable:
    counts: Mapping[str, int]
    total: int
    alphabet: Alphabet | None = None

    def __getitem__(self, a: str) -> int:
        return self.counts.get(a, 0)

    def __add__(self, other: "FrequencyTable") -> "FrequencyTable":
        c = Counter(self.counts)
        c.update(other.counts)
        return FrequencyTable(dict(c), self.total + other.total, self.alphabet or other.alphabet)

    def frequency(self, a: str) -> Fraction:
        if self.total == 0:
            raise EmptyPrefix("frequency of an empty prefix")
        return Fraction(self[a], self.total)

    def symbols(self) -> list[str]:
        if self.alphabet is not None:
            extra = sorted(set(self.counts) - set(self.alphabet))
            return list(self.alphabet) + extra
        return sorted(self.counts)


def _symbols(prefix) -> tuple[str, ...]:
    return prefix.symbols if hasattr(prefix, "symbols") else as_string(prefix)


def freq_table(prefix, alphabet: Alphabet | None = None) -> FrequencyTable:
    symbols = _symbols(prefix)
    alphabet = alphabet or getattr(prefix, "alphabet", None)
    counts = Counter(symbols)
    if alphabet is not None:
        for a in alphabet:
            counts.setdefault(a, 0)
    return FrequencyTable(dict(counts), len(symbols), alphabet)


@dataclass(frozen=True)
class Verdict:
    check: str
    statistic: object
    threshold: object
    passed: bool | None
    formula: str
    note: str = ""


@dataclass
class DiagnosticReport:
    title: str
    provenance: str
    verdicts: list[Verdict] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v.passed is not False for v in self.verdicts)

    def failures(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.passed is False]


def _binary_weights(q: FiniteProbabilitySpace) -> tuple[Fraction, Fraction]:
    if q.alphabet != BINARY:
        raise AlphabetMismatch("expected a space over {0,1}")
    q0, q1 = q["0"], q["1"]
    if not 0 < q1 < 1:
        raise DegenerateQ(f"Q(1) = {q1}")
    return q0, q1


def chernoff_exponent(q1: Fraction, eps: Fraction, n: int) -> Fraction:
    return eps**2 * n / (2 * (1 - q1) * q1)


def chernoff_value(q1: Fraction, eps, n: int) -> Decimal:
    """2 exp(-eps^2 n / (2 q0 q1)) rounded up, for a success probability q1."""
    eps = as_fraction(eps)
    q0 = 1 - q1
    if not 0 < q1 < 1:
        raise DegenerateQ(f"Q(1) = {q1}")
    if not 0 < eps <= q0 * q1:
        raise EpsilonOutOfRange(f"need 0 < eps <= Q(0)Q(1) = {q0 * q1}, got {eps}")
    if n < 1:
        raise InvalidParameter(f"n must be at least 1, got {n}")
    e = chernoff_exponent(q1, eps, n)
    iv = mpmath.iv
    saved = iv.dps
    iv.dps = 40
    try:
        val = 2 * iv.exp(-(iv.mpf(e.numerator) / e.denominator))
        return _ceil_decimal(val.b)
    finally:
        iv.dps = saved


def chernoff_bound(q: FiniteProbabilitySpace, eps, n: int) -> Decimal:
    """Upper bound on P(|N_1/n - Q(1)| > eps) over strings of length n."""
    _, q1 = _binary_weights(q)
    return chernoff_value(q1, eps, n)


def default_epsilon(q1: Fraction, n: int, confidence=DEFAULT_CONFIDENCE) -> Fraction:
    """Smallest eps whose Chernoff bound at length n is ``confidence``, rounded up to 8 digits.

    Solves 2 exp(-eps^2 n / (2 q0 q1)) = confidence for eps.
    """
    if n < 1:
        raise EmptyPrefix("default thresholds need at least one symbol")
    conf = as_fraction(confidence)
    q0 = 1 - q1
    if q0 * q1 == 0:
        return Fraction(0)
    with mpmath.workdps(40):
        val = mpmath.sqrt(
            2 * mpmath.mpf(q0.numerator * q1.numerator) / (q0.denominator * q1.denominator)
            * mpmath.log(2 * mpmath.mpf(conf.denominator) / conf.numerator) / n
        )
        val *= 1 + mpmath.mpf(10) ** -30
    return Fraction(_ceil_decimal(val, 8))


def lln_report(space: FiniteProbabilitySpace, prefix, eps=None, confidence=DEFAULT_CONFIDENCE) -> DiagnosticReport:
    """Per-symbol frequency deviations against ``eps`` with Chernoff bounds attached.

    With ``eps=None`` each symbol gets the Chernoff-derived default at
    ``confidence``.  A zero-weight symbol that occurs, or any symbol other
    than the point mass of a degenerate space, fails regardless of eps.
    """
    table = freq_table(prefix, space.alphabet)
    n = table.total
    if n == 0:
        raise EmptyPrefix("lln_report needs a nonempty prefix")
    report = DiagnosticReport("lln", getattr(prefix, "origin", "") or "prefix", info={"n": n})
    fixed = None if eps is None else as_fraction(eps)
    point = [a for a, w in space.items() if w == 1]
    for a in table.symbols():
        w = space.weights.get(a, Fraction(0))
        if a not in space.alphabet:
            raise AlphabetMismatch(f"symbol {a!r} is not in the space's alphabet")
        count = table[a]
        if w == 0 and count:
            report.verdicts.append(
                Verdict(f"zero-weight {a}", count, 0, False, "N_a = 0 when P(a) = 0", "hard failure")
            )
        if point and a != point[0] and count:
            report.verdicts.append(
                Verdict(f"point-mass {point[0]}", count, 0, False, "only a occurs when P(a) = 1", f"foreign {a}")
            )
        dev = abs(Fraction(count, n) - w)
        threshold = fixed if fixed is not None else default_epsilon(w, n, confidence)
        note = ""
        if 0 < w < 1 and 0 < threshold <= w * (1 - w):
            note = f"chernoff {chernoff_value(w, threshold, n):.6E}"
        elif 0 < w < 1:
            note = "chernoff n/a: eps > P(a)(1-P(a))"
        report.verdicts.append(
            Verdict(f"deviation {a}", dev, threshold, dev <= threshold, "|N_a/n - P(a)| <= eps", note)
        )
    if fixed is None:
        report.info["confidence"] = fmt(as_fraction(confidence))
    return report


def _bits(prefix) -> np.ndarray:
    if isinstance(prefix, np.ndarray):
        bits = prefix.astype(np.uint8)
    else:
        symbols = _symbols(prefix)
        bits = np.frombuffer("".join(symbols).encode("ascii"), dtype=np.uint8) - ord("0")
        if len(bits) != len(symbols):
            raise AlphabetMismatch("compression proxy needs single-character bits")
    if bits.size and bits.max() > 1:
        raise AlphabetMismatch("compression proxy needs a prefix over {0,1}")
    return bits


def compressed_sizes(prefix) -> tuple[int, int, int]:
    """(bits, packed bytes, compressed bytes) under the pinned compressor."""
    bits = _bits(prefix)
    packed = np.packbits(bits).tobytes()
    comp = zlib.compressobj(9, zlib.DEFLATED, -15)
    out = comp.compress(packed) + comp.flush()
    return len(bits), len(packed), len(out)


def incompressibility_proxy(prefix) -> float:
    """Compressed size over packed size; about 1 for patternless bits.

    This is compressibility evidence only and says nothing definite about
    randomness.
    """
    n, raw, comp = compressed_sizes(prefix)
    if n < MIN_COMPRESS_BITS:
        raise Inconclusive(f"{n} bits is below the {MIN_COMPRESS_BITS}-bit minimum")
    return comp / raw


def compression_report(prefix, threshold=Fraction(9, 10)) -> DiagnosticReport:
    n, raw, comp = compressed_sizes(prefix)
    report = DiagnosticReport(
        "compress",
        getattr(prefix, "origin", "") or "prefix",
        info={"bits": n, "packed_bytes": raw, "compressed_bytes": comp, "compressor": COMPRESSOR},
    )
    if n < MIN_COMPRESS_BITS:
        report.verdicts.append(Verdict("ratio", None, threshold, None, "compressed/packed", "inconclusive"))
    else:
        ratio = Fraction(comp, raw)
        report.verdicts.append(
            Verdict("ratio", ratio, threshold, ratio >= threshold, "compressed/packed >= threshold", "proxy only")
        )
    return report


def independence_distance(prefixes: Sequence) -> tuple[Fraction, tuple]:
    """Max over value tuples of |joint freq - product of marginal freqs|, with the argmax."""
    seqs = [_symbols(p) for p in prefixes]
    if not seqs:
        raise InvalidParameter("need at least one prefix")
    n = len(seqs[0])
    if any(len(s) != n for s in seqs):
        raise LengthMismatch(f"prefix lengths differ: {[len(s) for s in seqs]}")
    if n == 0:
        raise EmptyPrefix("independence needs nonempty prefixes")
    joint = Counter(zip(*seqs))
    marg = [Counter(s) for s in seqs]
    best, arg = Fraction(-1), ()
    for t in product(*(sorted(m) for m in marg)):
        pm = Fraction(1)
        for m, a in zip(marg, t):
            pm *= Fraction(m[a], n)
        d = abs(Fraction(joint.get(t, 0), n) - pm)
        if d > best:
            best, arg = d, t
    return best, arg


def empirical_independence(prefixes: Sequence, eps) -> DiagnosticReport:
    dist, arg = independence_distance(prefixes)
    threshold = as_fraction(eps)
    report = DiagnosticReport(
        "indep",
        ", ".join(getattr(p, "origin", "") or f"prefix{i + 1}" for i, p in enumerate(prefixes)),
        info={"n": len(_symbols(prefixes[0])), "argmax": ",".join(arg)},
    )
    report.verdicts.append(
        Verdict(
            "joint vs product",
            dist,
            threshold,
            dist <= threshold,
            "max_t |f(t) - prod_i f_i(t_i)| <= eps",
            "L-infinity surrogate",
        )
    )
    return report


def equivalence_distance(a, b) -> tuple[Fraction, str]:
    alpha_a, alpha_b = getattr(a, "alphabet", None), getattr(b, "alphabet", None)
    if alpha_a is not None and alpha_b is not None and alpha_a != alpha_b:
        raise AlphabetMismatch(f"{list(alpha_a)} differs from {list(alpha_b)}")
    ta, tb = freq_table(a, alpha_a), freq_table(b, alpha_b)
    if ta.total == 0 or tb.total == 0:
        raise EmptyPrefix("equivalence needs nonempty prefixes")
    best, arg = Fraction(-1), ""
    for s in sorted(set(ta.counts) | set(tb.counts)):
        d = abs(ta.frequency(s) - tb.frequency(s))
        if d > best:
            best, arg = d, s
    return best, arg


def equivalence_check(a, b, eps) -> DiagnosticReport:
    dist, arg = equivalence_distance(a, b)
    threshold = as_fraction(eps)
    report = DiagnosticReport(
        "equiv",
        f"{getattr(a, 'origin', '') or 'a'} vs {getattr(b, 'origin', '') or 'b'}",
        info={"n_a": len(_symbols(a)), "n_b": len(_symbols(b)), "argmax": arg},
    )
    report.verdicts.append(
        Verdict("frequency gap", dist, threshold, dist <= threshold, "max_a |f_A(a) - f_B(a)| <= eps", "L-infinity surrogate")
    )
    return report

