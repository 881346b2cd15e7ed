"""Report assembly and lossless JSON serialization.

Floats are printed with 17 significant digits so reports round-trip exactly;
grades are strings and are never upgraded during aggregation.
"""

from __future__ import annotations

import hashlib
import math
import os
from fractions import Fraction

from ..grading import Grade


def num_json(v):
    """Numbers for file output: integral rationals as ints, other rationals
    as 'p/q' strings, floats as floats."""
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    return float(v)


def poly_json(p) -> list:
    return [num_json(c) for c in p.coeffs]


def complex_json(z) -> list[float]:
    return [float(z.real), float(z.imag)]


def matrix_json(M) -> list[list[float]]:
    return [[float(v) for v in row] for row in M]


def grade_json(g: Grade) -> str:
    return str(g)


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"inf"' if v > 0 else '"-inf"'
    text = format(v, ".17g")
    if "." not in text and "e" not in text and "n" not in text and "i" not in text:
        text += ".0"
    return text


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def emit_json(obj, indent: int = 0) -> str:
    pad = "  " * indent
    child = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    if isinstance(obj, Fraction):
        return emit_json(num_json(obj), indent)
    if isinstance(obj, Grade):
        return f'"{obj.value}"'
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{child}"{_escape(str(k))}": {emit_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        flat = all(isinstance(v, (int, float, str, bool, Fraction)) or v is None for v in seq)
        if flat:
            return "[" + ", ".join(emit_json(v, indent + 1) for v in seq) + "]"
        items = [f"{child}{emit_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_atomic(path: str, text: str):
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def sha256_file(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
