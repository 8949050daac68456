"""Scalar domains: exact rationals and finite floats.

Rational values are `fractions.Fraction` throughout: Python's Fraction already
keeps the canonical form this engine relies on (denominator > 0, gcd reduced,
arbitrary-precision integers), so the type is used directly rather than
wrapped. This module adds the "p/q" text-token protocol used by CSV and JSON
matrix ingestion and by every wire format.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ParseError

Rational = Fraction

RATIONAL_DOMAIN = "rational"
FLOAT_DOMAIN = "float"


def parse_rational(token) -> Fraction:
    """Parse a rational token: "p/q", "p", or an int.

    Floats are rejected: rational ingestion must stay exact, and a float
    entry almost always signals a file meant for the float domain.
    """
    if isinstance(token, bool):
        raise ParseError(f"not a rational token: {token!r}")
    if isinstance(token, int):
        return Fraction(token)
    if isinstance(token, Fraction):
        return token
    if isinstance(token, float):
        raise ParseError(
            f"float {token!r} in rational input; use the float domain explicitly"
        )
    if not isinstance(token, str):
        raise ParseError(f"not a rational token: {token!r}")
    text = token.strip()
    try:
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num.strip()), int(den.strip()))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational token {token!r}: {exc}") from exc


def format_rational(value: Fraction) -> str:
    """Canonical token: "p/q", or just "p" when the denominator is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_float(token) -> float:
    """Parse a float-domain token; accepts rational tokens too (lossy is fine
    in this direction)."""
    if isinstance(token, bool):
        raise ParseError(f"not a numeric token: {token!r}")
    if isinstance(token, (int, float)):
        value = float(token)
    elif isinstance(token, Fraction):
        value = float(token)
    elif isinstance(token, str):
        text = token.strip()
        try:
            value = float(Fraction(int(text.split("/")[0]), int(text.split("/")[1]))) \
                if "/" in text else float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad numeric token {token!r}: {exc}") from exc
    else:
        raise ParseError(f"not a numeric token: {token!r}")
    if not math.isfinite(value):
        raise ParseError(f"non-finite float entry: {token!r}")
    return value


def check_finite(value: float) -> float:
    if not math.isfinite(value):
        raise ParseError(f"non-finite float value: {value!r}")
    return value
