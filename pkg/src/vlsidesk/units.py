"""SI-suffixed quantity parsing and fixed-precision formatting."""

import re

from .errors import QuantityError

_SI = {
    "a": 1e-18, "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6,
    "m": 1e-3, "k": 1e3, "K": 1e3, "M": 1e6, "G": 1e9, "T": 1e12,
}

_QTY = re.compile(r"^\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)\s*([a-zA-Zµ]?)\s*$")


def parse_quantity(value):
    """Return ``value`` as a float in base units.

    Accepts plain numbers or strings with a single SI suffix: ``"50k"``,
    ``"20f"``, ``"0.05n"``. Unit names are not part of the syntax; case
    matters only where SI does (m vs M).
    """
    if isinstance(value, bool):
        raise QuantityError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _QTY.match(value)
        if m:
            mag, suffix = m.groups()
            if not suffix:
                return float(mag)
            if suffix in _SI:
                return float(mag) * _SI[suffix]
        raise QuantityError(f"cannot parse quantity {value!r}")
    raise QuantityError(f"expected a number or SI string, got {type(value).__name__}")


def format_number(x):
    """Format a float with 6 significant digits; integers pass through."""
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return x
    if isinstance(x, int):
        return x
    if x != x or x in (float("inf"), float("-inf")):
        return str(x)
    if x == int(x) and abs(x) < 1e15:
        # keep exact integral floats readable (192.0 -> 192)
        return int(x)
    return float(f"{x:.6g}")
