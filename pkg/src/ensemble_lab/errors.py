"""Exception hierarchy shared by every ensemble_lab module."""

from fractions import Fraction


class EnsembleLabError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameter(EnsembleLabError, ValueError):
    pass


class NegativeWeight(EnsembleLabError, ValueError):
    def __init__(self, symbol: str, weight: Fraction):
        super().__init__(f"weight of {symbol!r} is negative: {weight}")
        self.symbol = symbol
        self.weight = weight


class SumNotOne(EnsembleLabError, ValueError):
    def __init__(self, total: Fraction):
        self.total = total
        self.deficit = abs(1 - total)
        super().__init__(f"weights sum to {total}, off by {self.deficit}")


class MissingWeight(EnsembleLabError, ValueError):
    def __init__(self, symbols):
        self.symbols = tuple(symbols)
        super().__init__(f"no weight given for {', '.join(map(repr, self.symbols))}")


class UnknownSymbol(EnsembleLabError, KeyError):
    def __init__(self, symbol: str, where: str = "alphabet"):
        self.symbol = symbol
        super().__init__(f"symbol {symbol!r} is not in the {where}")

    def __str__(self):
        return self.args[0]


class AlphabetMismatch(EnsembleLabError, ValueError):
    pass


class ZeroConditionEvent(EnsembleLabError, ValueError):
    pass


class TooManyEvents(EnsembleLabError, ValueError):
    pass


class Starved(EnsembleLabError):
    """A derived stream could not produce the requested symbol."""

    def __init__(self, scanned: int, produced: int = 0, reason: str = "budget exhausted"):
        self.scanned = scanned
        self.produced = produced
        self.reason = reason
        super().__init__(
            f"starved after scanning {scanned} symbols ({produced} produced): {reason}"
        )


class Stalled(EnsembleLabError):
    """A selection rule is undefined on a prefix it was asked about."""

    def __init__(self, prefix_length: int, rule: str = ""):
        self.prefix_length = prefix_length
        self.rule = rule
        super().__init__(f"selection rule {rule!r} undefined on prefix of length {prefix_length}")


class NotInjective(EnsembleLabError, ValueError):
    def __init__(self, index: int, first: int, second: int):
        self.index = index
        self.first = first
        self.second = second
        super().__init__(f"f({first}) = f({second}) = {index}")


class EpsilonOutOfRange(EnsembleLabError, ValueError):
    pass


class DegenerateQ(EnsembleLabError, ValueError):
    pass


class EmptyStringInLevel(EnsembleLabError, ValueError):
    pass


class NotPrefixFreeLevel(EnsembleLabError, ValueError):
    pass


class UncertifiedOracleLevel(EnsembleLabError, ValueError):
    def __init__(self, sigma, measure: Fraction, bound: Fraction):
        self.sigma = tuple(sigma)
        self.measure = measure
        self.bound = bound
        super().__init__(
            f"oracle section {''.join(self.sigma) or 'λ'} has measure {measure}, not < {bound}"
        )


class EmptyPrefix(EnsembleLabError, ValueError):
    pass


class Inconclusive(EnsembleLabError):
    pass


class LengthMismatch(EnsembleLabError, ValueError):
    pass


class NotDyadic(EnsembleLabError, ValueError):
    pass


class EmptyCodeword(EnsembleLabError, ValueError):
    pass


class UnparsableBits(EnsembleLabError, ValueError):
    def __init__(self, offset: int):
        self.offset = offset
        super().__init__(f"no codeword matches the bits at offset {offset}")


class FormatError(EnsembleLabError, ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
