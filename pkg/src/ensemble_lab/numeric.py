"""Directed rounding of mpmath values to Decimal."""

from __future__ import annotations

from decimal import Decimal, localcontext
from fractions import Fraction


def mp_fraction(x) -> Fraction:
    """The exact binary value of an mpf, or of a point-interval endpoint.

    Going through ``mpmath.mpf(x)`` instead would re-round to the working
    precision, which is 53 bits outside a precision block.
    """
    sign, man, exp, _ = x._mpi_[1] if hasattr(x, "_mpi_") else x._mpf_
    value = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -value if sign else value


def round_decimal(x, digits: int, rounding) -> Decimal:
    exact = mp_fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        ctx.rounding = rounding
        return Decimal(exact.numerator) / Decimal(exact.denominator)
