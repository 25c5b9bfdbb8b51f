"""Exact rational scalars and controlled-precision decimal rendering.

Every probability, odds value and lambda constant in the package is a
:class:`fractions.Fraction`.  This module adds the canonical ``"num/den"``
wire format, correctly rounded decimal rendering, and an ``e^{-x}``
evaluator with an explicit error bound.
"""

from __future__ import annotations

import math
import re
import sys
from contextlib import contextmanager
from decimal import ROUND_FLOOR, ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction

from .errors import InvalidInputError

Rational = Fraction

#: Extra decimal digits carried by transcendental evaluation.
GUARD_DIGITS = 10

_RATIONAL_RE = re.compile(r"\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?\Z")

_ROUNDING = {"half_even": ROUND_HALF_EVEN, "floor": ROUND_FLOOR}


@contextmanager
def _unlimited_int_digits():
    # Exact rationals here reach tens of thousands of digits; lift the
    # interpreter's int<->str conversion cap for the duration of a call.
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def rat_parse(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` into a normalized rational."""
    if not isinstance(text, str):
        raise InvalidInputError(f"expected a string of the form 'a/b', got {text!r}")
    match = _RATIONAL_RE.match(text)
    if match is None:
        raise InvalidInputError(f"malformed rational {text!r}: expected 'a/b' or 'a'")
    with _unlimited_int_digits():
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) is not None else 1
    if den == 0:
        raise InvalidInputError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def rat_to_string(x: Fraction) -> str:
    """Canonical ``"num/den"`` form; the denominator is omitted when it is 1."""
    x = Fraction(x)
    with _unlimited_int_digits():
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings; floats are rejected."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInputError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return rat_parse(value)
    raise InvalidInputError(f"not an exact rational: {value!r}")


def _format_scaled(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    whole, frac = divmod(abs(n), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def rat_to_decimal(x: Fraction, digits: int, rounding: str = "half_even") -> str:
    """Render ``x`` with exactly ``digits`` fractional digits.

    ``rounding`` is ``"half_even"`` (default) or ``"floor"``; the latter is
    used for lower bounds, which must never be rendered above their true value.
    """
    if digits < 1:
        raise InvalidInputError(f"digits must be >= 1, got {digits}")
    scaled = Fraction(x) * 10**digits
    if rounding == "half_even":
        n = round(scaled)
    elif rounding == "floor":
        n = math.floor(scaled)
    else:
        raise InvalidInputError(f"unknown rounding mode {rounding!r}")
    return _format_scaled(n, digits)


def decimal_to_string(value: Decimal, digits: int, rounding: str = "half_even") -> str:
    """Quantize a :class:`~decimal.Decimal` to ``digits`` places and format it."""
    if digits < 1:
        raise InvalidInputError(f"digits must be >= 1, got {digits}")
    if rounding not in _ROUNDING:
        raise InvalidInputError(f"unknown rounding mode {rounding!r}")
    with localcontext() as ctx:
        ctx.prec = max(ctx.prec, value.adjusted() + digits + 2)
        q = value.quantize(Decimal(f"1E-{digits}"), rounding=_ROUNDING[rounding])
    return f"{q:f}"


def exp_neg(x: Fraction, digits: int) -> Decimal:
    """``e^{-x}`` for rational ``x >= 0`` with absolute error below ``10**-digits``.

    The result carries ``digits + GUARD_DIGITS`` fractional digits; its
    absolute error is below ``10**-(digits + GUARD_DIGITS - 1)``.

    Method: halve the argument ``s`` times until it is at most 1/2, sum the
    alternating Taylor series in integer fixed point until the next term
    vanishes (for an alternating series with decreasing terms the tail is
    bounded by the first omitted term), then square ``s`` times.  Each
    squaring at most doubles the absolute error, so ``s*log10(2)`` extra
    digits are carried.
    """
    x = Fraction(x)
    if x < 0:
        raise InvalidInputError(f"exp_neg requires x >= 0, got {x}")
    if digits < 1:
        raise InvalidInputError(f"digits must be >= 1, got {digits}")
    places = digits + GUARD_DIGITS
    if x == 0:
        return _scaled_decimal(10**places, places)

    halvings = 0
    while x > Fraction(1, 2) * 2**halvings:
        halvings += 1
    precision = places + math.ceil(halvings * math.log10(2)) + 6
    one = 10**precision
    y = round(x * one / 2**halvings)

    # Integer truncation costs at most one unit per term.
    total = one
    term = one
    n = 1
    while term:
        term = term * y // (n * one)
        total += -term if n % 2 else term
        n += 1
    for _ in range(halvings):
        total = total * total // one

    shift = precision - places
    rounded = round(Fraction(total, 10**shift))
    return _scaled_decimal(rounded, places)


def _scaled_decimal(n: int, places: int) -> Decimal:
    # String construction is exact whatever the active decimal context.
    return Decimal(f"{n}E-{places}")
