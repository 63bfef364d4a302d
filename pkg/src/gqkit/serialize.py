"""Deterministic JSON/CSV emission shared by every module.

Floats are written with 17 significant digits, mpmath numbers keep their
exponent (``1.0e-3600`` is valid JSON even though it underflows a double),
and dictionaries keep insertion order so identical inputs give identical
bytes.
"""

from __future__ import annotations

import contextlib
import io
import json
import math
import sys
from fractions import Fraction

import mpmath


@contextlib.contextmanager
def unlimited_int_digits():
    """Lift the int/str conversion cap (CPython >= 3.10.7) for huge integers."""
    getter = getattr(sys, "get_int_max_str_digits", None)
    if getter is None:
        yield
        return
    old = getter()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


def format_real(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, mpmath.mpf):
        if not mpmath.isfinite(x):
            raise ValueError(f"non-finite value {x}")
        if x == 0:
            return "0.0"
        # outside the normal double range: keep the mpmath exponent
        if not (1e-300 < abs(x) < 1e300):
            return mpmath.nstr(x, 17, min_fixed=1, max_fixed=0)
        x = float(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, float, Fraction, mpmath.mpf)):
        out.append(format_real(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(json.dumps(str(key)))
            out.append(":")
            _encode(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(",")
            _encode(value, out)
        out.append("]")
    elif isinstance(obj, (complex, mpmath.mpc)):
        _encode([obj.real, obj.imag], out)
    elif hasattr(obj, "to_json"):
        _encode(obj.to_json(), out)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    out: list[str] = []
    with unlimited_int_digits():
        _encode(obj, out)
    return "".join(out)


def loads(text: str):
    """Parse JSON keeping full precision: floats become mpmath numbers."""
    with unlimited_int_digits():
        return json.loads(text, parse_float=mpmath.mpf)


def write_csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    with unlimited_int_digits():
        for row in rows:
            buf.write(",".join(format_real(v) if not isinstance(v, str) else v for v in row) + "\n")
    return buf.getvalue()
