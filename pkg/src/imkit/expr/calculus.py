"""Exact symbolic differentiation."""

from __future__ import annotations

from .nodes import Add, Const, Expr, Func, MINUS_ONE, Mul, ONE, Param, Pow, Var, ZERO
from .normalize import normalize


def _d(e: Expr, i: int) -> Expr:
    if isinstance(e, (Const, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == i else ZERO
    if isinstance(e, Add):
        return Add(tuple(_d(t, i) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        for j, f in enumerate(e.factors):
            terms.append(Mul(e.factors[:j] + (_d(f, i),) + e.factors[j + 1 :]))
        return Add(tuple(terms))
    if isinstance(e, Pow):
        # d(b^k) = k * b^(k-1) * db, valid for negative k as well
        return Mul((Const(e.exponent), Pow(e.base, e.exponent - 1), _d(e.base, i)))
    if isinstance(e, Func):
        da = _d(e.arg, i)
        if e.name == "exp":
            outer: Expr = Func("exp", e.arg)
        elif e.name == "ln":
            outer = Pow(e.arg, -1)
        elif e.name == "sin":
            outer = Func("cos", e.arg)
        else:  # cos
            outer = Mul((MINUS_ONE, Func("sin", e.arg)))
        return Mul((outer, da))
    raise TypeError(f"not an expression: {e!r}")


def differentiate(e: Expr, i: int) -> Expr:
    """Partial derivative with respect to state variable x_i, normalized."""
    if i < 1:
        raise ValueError("variable index must be >= 1")
    return normalize(_d(e, i))
