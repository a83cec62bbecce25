"""Plain-text file formats read and written by the command line.

space file::

    # comment
    x 1/2
    y 1/3
    z 1/6

sequence file: symbols concatenated (single-character alphabets) or
whitespace separated; ``.bits`` files hold a binary sequence as an 8-byte
little-endian bit count followed by the bits packed MSB first.

test file::

    space u2.space
    level 1: 00 11
    level 2: 0 -

where ``-`` is the empty string and ``a.b.c`` spells multi-character
symbols (a lone pair symbol such as ``0|1`` needs no dots); otherwise
every character is one symbol.

code file: ``<symbol> <codeword>`` per line.

scheme file::

    keys:
    0 1/2
    1 1/2
    enc:
    <m> <k> <c>
"""

from __future__ import annotations

import re
import struct
from fractions import Fraction
from pathlib import Path

import numpy as np

from .coding import InstantaneousCode
from .errors import EnsembleLabError, FormatError
from .mltest import MLTestFamily, TestLevel
from .prob import BINARY, Alphabet, FiniteProbabilitySpace, make_space
from .secrecy import EncryptionScheme, scheme_from_enc
from .streams import FinitePrefix


def _lines(path):
    text = Path(path).read_text(encoding="utf-8")
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield i, line


def parse_fraction(text: str, line: int | None = None, source: str | None = None) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"bad probability {text!r}", line, source) from None


def read_space(path) -> FiniteProbabilitySpace:
    symbols, weights = [], {}
    for i, line in _lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("expected '<symbol> <probability>'", i, str(path))
        a, w = parts
        if a in weights:
            raise FormatError(f"symbol {a!r} listed twice", i, str(path))
        symbols.append(a)
        weights[a] = parse_fraction(w, i, str(path))
    if not symbols:
        raise FormatError("no symbols", None, str(path))
    try:
        return make_space(Alphabet.of(symbols), weights)
    except EnsembleLabError as e:
        raise FormatError(str(e), None, str(path)) from None


def write_space(space: FiniteProbabilitySpace, path) -> None:
    Path(path).write_text("".join(f"{a} {w}\n" for a, w in space.items()), encoding="utf-8")


def format_symbols(symbols, alphabet: Alphabet) -> str:
    if all(len(a) == 1 for a in alphabet):
        return "".join(symbols)
    return " ".join(symbols)


def write_sequence(prefix: FinitePrefix, path) -> None:
    path = Path(path)
    if path.suffix == ".bits":
        if prefix.alphabet != BINARY:
            raise FormatError(".bits files hold binary sequences only", None, str(path))
        bits = np.frombuffer("".join(prefix.symbols).encode("ascii"), dtype=np.uint8) - ord("0")
        path.write_bytes(struct.pack("<Q", len(bits)) + np.packbits(bits).tobytes())
        return
    path.write_text(format_symbols(prefix.symbols, prefix.alphabet) + "\n", encoding="utf-8")


def read_sequence(path, alphabet: Alphabet) -> FinitePrefix:
    path = Path(path)
    if path.suffix == ".bits":
        data = path.read_bytes()
        if len(data) < 8:
            raise FormatError("truncated .bits header", None, str(path))
        (n,) = struct.unpack("<Q", data[:8])
        bits = np.unpackbits(np.frombuffer(data[8:], dtype=np.uint8))
        if len(bits) < n:
            raise FormatError(f"header promises {n} bits, file has {len(bits)}", None, str(path))
        symbols = tuple(np.where(bits[:n] == 1, "1", "0").tolist())
        return FinitePrefix(symbols, BINARY, path.name)
    text = path.read_text(encoding="utf-8")
    tokens = text.split()
    if all(len(a) == 1 for a in alphabet):
        symbols = tuple("".join(tokens))
    else:
        symbols = tuple(tokens)
    for i, a in enumerate(symbols):
        if a not in alphabet:
            raise FormatError(f"symbol {a!r} at position {i} is not in {list(alphabet)}", None, str(path))
    return FinitePrefix(symbols, alphabet, path.name)


def parse_token(token: str) -> tuple[str, ...]:
    if token == "-":
        return ()
    if "." in token:
        return tuple(token.split("."))
    if "|" in token:
        return (token,)
    return tuple(token)


def format_token(s) -> str:
    s = tuple(s)
    if not s:
        return "-"
    if all(len(a) == 1 for a in s):
        return "".join(s)
    return ".".join(s)


_LEVEL = re.compile(r"^level\s+(\d+)\s*:(.*)$")


def read_test(path, space: FiniteProbabilitySpace | None = None) -> MLTestFamily:
    """Read a test file; its ``space`` line is resolved next to the file unless ``space`` is given."""
    path = Path(path)
    levels: dict[int, set] = {}
    for i, line in _lines(path):
        if line.startswith("space "):
            if space is None:
                space = read_space(path.parent / line.split(None, 1)[1])
            continue
        m = _LEVEL.match(line)
        if not m:
            raise FormatError("expected 'space <file>' or 'level <n>: <strings>'", i, str(path))
        n = int(m.group(1))
        if n < 1:
            raise FormatError("levels are numbered from 1", i, str(path))
        levels.setdefault(n, set()).update(parse_token(t) for t in m.group(2).split())
    if space is None:
        raise FormatError("no space given", None, str(path))
    try:
        return MLTestFamily(space, {n: TestLevel(n, s) for n, s in levels.items()})
    except EnsembleLabError as e:
        raise FormatError(str(e), None, str(path)) from None


def write_test(family: MLTestFamily, space_file: str, path) -> None:
    out = [f"space {space_file}"]
    for n in family.indices:
        out.append(f"level {n}: " + " ".join(format_token(s) for s in sorted(family.level(n).strings)))
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")


def read_code(path) -> InstantaneousCode:
    symbols, words = [], {}
    for i, line in _lines(path):
        parts = line.split()
        if len(parts) != 2:
            raise FormatError("expected '<symbol> <codeword>'", i, str(path))
        a, w = parts
        if a in words:
            raise FormatError(f"symbol {a!r} listed twice", i, str(path))
        symbols.append(a)
        words[a] = w
    if not symbols:
        raise FormatError("no codewords", None, str(path))
    try:
        return InstantaneousCode(Alphabet.of(symbols), words)
    except EnsembleLabError as e:
        raise FormatError(str(e), None, str(path)) from None


def write_code(code: InstantaneousCode, path) -> None:
    Path(path).write_text("".join(f"{a} {w}\n" for a, w in code.items()), encoding="utf-8")


def read_scheme(path) -> EncryptionScheme:
    section = None
    keys, weights = [], {}
    messages, ciphers, enc = [], [], {}
    for i, line in _lines(path):
        if line in ("keys:", "enc:"):
            section = line[:-1]
            continue
        parts = line.split()
        if section == "keys" and len(parts) == 2:
            keys.append(parts[0])
            weights[parts[0]] = parse_fraction(parts[1], i, str(path))
        elif section == "enc" and len(parts) == 3:
            m, k, c = parts
            if (m, k) in enc:
                raise FormatError(f"Enc({m}, {k}) given twice", i, str(path))
            enc[(m, k)] = c
            if m not in messages:
                messages.append(m)
            if c not in ciphers:
                ciphers.append(c)
        else:
            raise FormatError("expected 'keys:' lines '<k> <p>' or 'enc:' lines '<m> <k> <c>'", i, str(path))
    if not keys or not enc:
        raise FormatError("a scheme needs both a keys: and an enc: section", None, str(path))
    try:
        key_alpha = Alphabet.of(keys)
        for (m, k) in enc:
            if k not in key_alpha:
                raise FormatError(f"enc uses unknown key {k!r}", None, str(path))
        return scheme_from_enc(
            Alphabet.of(messages), key_alpha, Alphabet.of(ciphers), make_space(key_alpha, weights), enc
        )
    except FormatError:
        raise
    except EnsembleLabError as e:
        raise FormatError(str(e), None, str(path)) from None


def write_scheme(scheme: EncryptionScheme, path) -> None:
    out = ["keys:"]
    out += [f"{k} {w}" for k, w in scheme.key_space.items()]
    out.append("enc:")
    out += [f"{m} {k} {scheme.enc[(m, k)]}" for m in scheme.messages for k in scheme.keys]
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
