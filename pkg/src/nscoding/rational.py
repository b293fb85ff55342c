"""Exact rational scalars used throughout the package.

Probabilities, kernel entries, LP coefficients and tensor cells are all
`fractions.Fraction` values, so every comparison downstream is exact.
This module only adds the text conventions on top of the stdlib type:
parsing of "p/q" / decimal / integer literals and the canonical "p/q"
rendering used by file formats and CLI reports.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

RationalLike = Union[Fraction, int, str]


def parse_rational(text: str) -> Fraction:
    """Parse a rational literal.

    Accepts "p/q" with integer p and positive integer q, plain integers
    ("7", "-3") and decimal strings ("0.25"); decimals convert exactly
    (the text never passes through binary floating point).

    Raises
    ------
    ValueError
        If the text is not a rational literal.
    ZeroDivisionError
        If the denominator is zero.
    """
    if not isinstance(text, str):
        raise ValueError(f"expected a string, got {type(text).__name__}")
    try:
        return Fraction(text.strip())
    except ZeroDivisionError:
        raise
    except (ValueError, TypeError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def as_rational(value: RationalLike) -> Fraction:
    """Coerce ints, strings and Fractions to Fraction (floats are rejected).

    Floats are deliberately not accepted: a float argument is almost
    always a bug in code that promises exact arithmetic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise ValueError(f"cannot use {type(value).__name__} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or just "p" when the denominator is 1."""
    value = as_rational(value)
    return str(value)


def to_float(value: RationalLike) -> float:
    """Nearest-double conversion, for display and float-mode consumers."""
    return float(as_rational(value))


def rational_ceil(value: Fraction) -> int:
    """Exact ceiling of a rational."""
    return -((-value.numerator) // value.denominator)


def rational_floor(value: Fraction) -> int:
    """Exact floor of a rational."""
    return value.numerator // value.denominator
