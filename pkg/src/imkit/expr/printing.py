"""Render expression trees back to grammar-conforming text.

print followed by parse is structurally stable on normalized expressions.
Negative powers are rendered as divisions so the output stays inside the
surface grammar (which only admits literal integer exponents).
"""

from __future__ import annotations

from fractions import Fraction

from .nodes import Add, Const, Expr, Func, Mul, Param, Pow, Var

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_POW = 3
_PREC_ATOM = 4


def _fmt_number(value) -> str:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    return repr(float(value))


def _is_negative(e: Expr) -> bool:
    if isinstance(e, Const):
        return e.value < 0
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        return e.factors[0].value < 0
    return False


def _negated(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        c = Const(-e.factors[0].value)
        rest = e.factors[1:]
        if c.value == 1:
            return rest[0] if len(rest) == 1 else Mul(rest)
        return Mul((c,) + rest)
    raise ValueError("not a negative-prefixed term")


def to_string(e: Expr) -> str:
    return _fmt(e, 0)


def _fmt(e: Expr, context_prec: int) -> str:
    if isinstance(e, Var):
        return f"x{e.index}"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Const):
        text = _fmt_number(e.value)
        needs_parens = context_prec >= _PREC_MUL and (e.value < 0 or "/" in text or "." in text)
        return f"({text})" if needs_parens else text
    if isinstance(e, Func):
        return f"{e.name}({_fmt(e.arg, 0)})"
    if isinstance(e, Pow):
        if e.exponent < 0:
            return _fmt_quotient([], [(e.base, -e.exponent)], Fraction(1), context_prec)
        base = _fmt(e.base, _PREC_POW)
        if isinstance(e.base, (Add, Mul, Pow)):
            base = f"({_fmt(e.base, 0)})"
        return f"{base}^{e.exponent}"
    if isinstance(e, Mul):
        coeff = Fraction(1)
        num: list[tuple[Expr, int]] = []
        den: list[tuple[Expr, int]] = []
        for f in e.factors:
            if isinstance(f, Const):
                coeff = f.value  # normalized Mul carries at most one constant
            elif isinstance(f, Pow) and f.exponent < 0:
                den.append((f.base, -f.exponent))
            elif isinstance(f, Pow):
                num.append((f.base, f.exponent))
            else:
                num.append((f, 1))
        return _fmt_quotient(num, den, coeff, context_prec)
    if isinstance(e, Add):
        parts = [_fmt(e.terms[0], _PREC_ADD)]
        for t in e.terms[1:]:
            if _is_negative(t):
                parts.append(f" - {_fmt(_negated(t), _PREC_ADD + 1)}")
            else:
                parts.append(f" + {_fmt(t, _PREC_ADD + 1)}")
        text = "".join(parts)
        return f"({text})" if context_prec > _PREC_ADD else text
    raise TypeError(f"not an expression: {e!r}")


def _fmt_factor(base: Expr, k: int) -> str:
    if k == 1:
        return f"({_fmt(base, 0)})" if isinstance(base, (Add, Mul)) else _fmt(base, _PREC_MUL)
    base_s = f"({_fmt(base, 0)})" if isinstance(base, (Add, Mul, Pow, Const)) else _fmt(base, _PREC_POW)
    return f"{base_s}^{k}"


def _fmt_quotient(num, den, coeff, context_prec: int) -> str:
    sign = ""
    if isinstance(coeff, Fraction):
        if coeff < 0:
            sign = "-"
            coeff = -coeff
        cnum, cden = coeff.numerator, coeff.denominator
        num_parts = ([] if cnum == 1 and num else [str(cnum)]) + [_fmt_factor(b, k) for b, k in num]
        den_parts = ([] if cden == 1 else [str(cden)]) + [_fmt_factor(b, k) for b, k in den]
    else:
        if coeff < 0:
            sign = "-"
            coeff = -coeff
        num_parts = ([] if coeff == 1 and num else [repr(float(coeff))]) + [_fmt_factor(b, k) for b, k in num]
        den_parts = [_fmt_factor(b, k) for b, k in den]

    num_s = "*".join(num_parts) if num_parts else "1"
    if not den_parts:
        text = num_s
    elif len(den_parts) == 1:
        text = f"{num_s}/{den_parts[0]}"
    else:
        text = f"{num_s}/({'*'.join(den_parts)})"

    if sign:
        text = sign + text
        return f"({text})" if context_prec >= _PREC_MUL else text
    return f"({text})" if context_prec > _PREC_MUL else text
