"""Finite symmetric encryption schemes and an exact perfect-secrecy check.

Secrecy is decided under uniform messages only.  For a correct scheme,
independence of message and ciphertext there is equivalent to
independence under every message distribution, because the ciphertext
distribution given a message, ``sum_k P_key(k) [Enc(m,k) = c]``, must then
be the same for every ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

from .errors import AlphabetMismatch, InvalidParameter
from .prob import Alphabet, FiniteProbabilitySpace, make_space, uniform_space


@dataclass(frozen=True)
class EncryptionScheme:
    messages: Alphabet
    keys: Alphabet
    ciphers: Alphabet
    key_space: FiniteProbabilitySpace
    enc: Mapping[tuple[str, str], str]
    dec: Mapping[tuple[str, str], str]

    def __post_init__(self):
        if self.key_space.alphabet != self.keys:
            raise AlphabetMismatch("key space alphabet differs from the key alphabet")
        for m in self.messages:
            for k in self.keys:
                c = self.enc.get((m, k))
                if c is None:
                    raise InvalidParameter(f"Enc({m}, {k}) is undefined")
                if c not in self.ciphers:
                    raise AlphabetMismatch(f"Enc({m}, {k}) = {c!r} is not a ciphertext symbol")
        for c in self.ciphers:
            for k in self.keys:
                m = self.dec.get((c, k))
                if m is None:
                    raise InvalidParameter(f"Dec({c}, {k}) is undefined")
                if m not in self.messages:
                    raise AlphabetMismatch(f"Dec({c}, {k}) = {m!r} is not a message symbol")


def scheme_from_enc(
    messages: Alphabet,
    keys: Alphabet,
    ciphers: Alphabet,
    key_space: FiniteProbabilitySpace,
    enc: Mapping[tuple[str, str], str],
) -> EncryptionScheme:
    """Derive Dec by inverting Enc per key.

    Ciphertexts no message reaches under a key decrypt to the first
    message; when two messages collide, the first one wins and
    :func:`validate_scheme` reports the other.
    """
    dec = {}
    for k in keys:
        for m in messages:
            c = enc.get((m, k))
            if c is not None:
                dec.setdefault((c, k), m)
        for c in ciphers:
            dec.setdefault((c, k), messages.symbols[0])
    return EncryptionScheme(messages, keys, ciphers, key_space, dict(enc), dec)


class SchemeAudit(NamedTuple):
    ok: bool
    witness: tuple[str, str] | None  # (m, k) with Dec(Enc(m,k),k) != m


def validate_scheme(scheme: EncryptionScheme) -> SchemeAudit:
    for m in scheme.messages:
        for k in scheme.keys:
            if scheme.dec[(scheme.enc[(m, k)], k)] != m:
                return SchemeAudit(False, (m, k))
    return SchemeAudit(True, None)


def cipher_profile(scheme: EncryptionScheme) -> dict[str, dict[str, Fraction]]:
    """m -> c -> sum_k P_key(k) [Enc(m,k) = c]."""
    out = {}
    for m in scheme.messages:
        row = {c: Fraction(0) for c in scheme.ciphers}
        for k, w in scheme.key_space.items():
            row[scheme.enc[(m, k)]] += w
        out[m] = row
    return out


class JointTable(NamedTuple):
    joint: dict  # (m, c) -> probability
    messages: dict  # m -> probability
    ciphers: dict  # c -> probability


def joint_distribution(scheme: EncryptionScheme, p_msg: FiniteProbabilitySpace) -> JointTable:
    """Distribution of (M, C) under p_msg x P_key."""
    if p_msg.alphabet != scheme.messages:
        raise AlphabetMismatch("message distribution is not over the message alphabet")
    prof = cipher_profile(scheme)
    joint = {}
    cm = {c: Fraction(0) for c in scheme.ciphers}
    for m, pm in p_msg.items():
        for c in scheme.ciphers:
            v = pm * prof[m][c]
            joint[(m, c)] = v
            cm[c] += v
    return JointTable(joint, dict(p_msg.items()), cm)


class SecrecyVerdict(NamedTuple):
    secret: bool
    witness: tuple | None  # (m, c, joint, product of marginals)


def secrecy_under(scheme: EncryptionScheme, p_msg: FiniteProbabilitySpace) -> SecrecyVerdict:
    table = joint_distribution(scheme, p_msg)
    for m in scheme.messages:
        for c in scheme.ciphers:
            j = table.joint[(m, c)]
            prod = table.messages[m] * table.ciphers[c]
            if j != prod:
                return SecrecyVerdict(False, (m, c, j, prod))
    return SecrecyVerdict(True, None)


def is_perfectly_secret(scheme: EncryptionScheme) -> SecrecyVerdict:
    return secrecy_under(scheme, uniform_space(scheme.messages))


class KeyBound(NamedTuple):
    keys: int  # keys of positive weight
    image: int  # max over keys of #{Enc(m,k)}
    holds: bool


def key_bound(scheme: EncryptionScheme) -> KeyBound:
    """Auxiliary check: a correct, perfectly secret scheme has at least |M| usable keys."""
    positive = [k for k, w in scheme.key_space.items() if w > 0]
    image = max(len({scheme.enc[(m, k)] for m in scheme.messages}) for k in scheme.keys)
    return KeyBound(len(positive), image, len(positive) >= image)


def otp_scheme(modulus: int) -> EncryptionScheme:
    """Messages, keys and ciphertexts are 0..m-1; Enc adds the key mod m."""
    if modulus < 1:
        raise InvalidParameter("modulus must be at least 1")
    z = Alphabet(tuple(str(i) for i in range(modulus)))
    enc = {(str(m), str(k)): str((m + k) % modulus) for m in range(modulus) for k in range(modulus)}
    dec = {(str(c), str(k)): str((c - k) % modulus) for c in range(modulus) for k in range(modulus)}
    return EncryptionScheme(z, z, z, uniform_space(z), enc, dec)


def point_mass(alphabet: Alphabet, a: str) -> FiniteProbabilitySpace:
    return make_space(alphabet, {s: Fraction(int(s == a)) for s in alphabet})
