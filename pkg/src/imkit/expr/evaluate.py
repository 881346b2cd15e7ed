"""Numeric evaluation of expression trees (IEEE double, deterministic)."""

from __future__ import annotations

import math
from typing import Mapping, Sequence

from ..errors import ExprDomainError
from .nodes import Add, Const, Expr, Func, Mul, Param, Pow, Var


def powi(base: float, k: int) -> float:
    """Integer power by binary exponentiation.

    This is the reference semantics shared with the tape kernels; both the
    compiled and pure-Python integrators use the same multiplication order.
    """
    if k < 0:
        return 1.0 / powi(base, -k)
    result = 1.0
    b = base
    e = k
    while e:
        if e & 1:
            result *= b
        b *= b
        e >>= 1
    return result


def eval_expr(e: Expr, point: Sequence[float], params: Mapping[str, float] | None = None) -> float:
    """Evaluate at a state vector with all parameters bound.

    Raises ExprDomainError naming the offending subexpression for ln of a
    nonpositive argument or a division by zero.
    """
    from .printing import to_string

    def rec(node: Expr) -> float:
        if isinstance(node, Const):
            return float(node.value)
        if isinstance(node, Var):
            if node.index > len(point):
                raise ExprDomainError(f"state vector has no coordinate {node.index}", to_string(node))
            return float(point[node.index - 1])
        if isinstance(node, Param):
            if params is None or node.name not in params:
                raise ExprDomainError(f"unbound parameter {node.name!r}", to_string(node))
            return float(params[node.name])
        if isinstance(node, Add):
            return sum(rec(t) for t in node.terms)
        if isinstance(node, Mul):
            out = 1.0
            for f in node.factors:
                out *= rec(f)
            return out
        if isinstance(node, Pow):
            base = rec(node.base)
            if base == 0.0 and node.exponent < 0:
                raise ExprDomainError("division by zero", to_string(node))
            return powi(base, node.exponent)
        if isinstance(node, Func):
            a = rec(node.arg)
            if node.name == "exp":
                try:
                    return math.exp(a)
                except OverflowError:
                    return math.inf
            if node.name == "ln":
                if a <= 0.0:
                    raise ExprDomainError(f"ln of nonpositive value {a!r}", to_string(node))
                return math.log(a)
            if node.name == "sin":
                return math.sin(a)
            return math.cos(a)
        raise TypeError(f"not an expression: {node!r}")

    return rec(e)
