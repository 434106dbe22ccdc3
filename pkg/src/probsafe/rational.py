"""Exact rational parsing and rendering shared by every text format."""

import re
from fractions import Fraction

_RATIONAL = re.compile(r"^(\d+)/(\d+)$|^(\d+(?:\.\d*)?|\.\d+)$")


def parse_rational(text):
    """Parse ``n/m`` or a decimal literal into a Fraction; ValueError otherwise."""
    text = text.strip()
    m = _RATIONAL.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    if m.group(1) is not None:
        den = int(m.group(2))
        if den == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(m.group(1)), den)
    return Fraction(m.group(3))


def _decimal_digits(den):
    """Digits needed to write 1/den exactly as a decimal, or None."""
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    return max(twos, fives) if den == 1 else None


def format_rational(q):
    """Exact decimal when one exists (``0.2``, ``0.125``), else ``n/m``."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    digits = _decimal_digits(q.denominator)
    if digits is None:
        return f"{q.numerator}/{q.denominator}"
    sign = "-" if q < 0 else ""
    scaled = abs(q) * 10**digits
    whole, frac = divmod(int(scaled), 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}".rstrip("0")
