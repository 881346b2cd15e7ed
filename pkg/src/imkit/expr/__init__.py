"""Symbolic scalar-expression core: parsing, differentiation, zero tests."""

from .nodes import (
    Add,
    Const,
    Expr,
    Func,
    Mul,
    Param,
    Pow,
    Var,
    add,
    coerce,
    const,
    contains_state,
    cos,
    div,
    exp,
    ln,
    max_var_index,
    mul,
    neg,
    param,
    params_in,
    powi as pow_expr,
    shift_vars,
    sin,
    sub,
    subst_params,
    subst_vars,
    var,
    variables_in,
    walk,
    walk_exprs,
)
from .normalize import normalize
from .parser import parse
from .printing import to_string
from .calculus import differentiate
from .evaluate import eval_expr, powi
from .ratform import expand_simplify, is_provably_zero, rational_form
from .zerotest import (
    PROVEN_NONZERO_CONSTANT,
    PROVEN_ZERO,
    SAMPLED_NONZERO,
    SAMPLED_ZERO,
    ZeroStatus,
    is_zero,
    sample_params,
    sample_point,
    sample_values,
)

__all__ = [
    "Add",
    "Const",
    "Expr",
    "Func",
    "Mul",
    "Param",
    "Pow",
    "Var",
    "ZeroStatus",
    "add",
    "coerce",
    "const",
    "contains_state",
    "cos",
    "differentiate",
    "div",
    "eval_expr",
    "exp",
    "expand_simplify",
    "is_provably_zero",
    "is_zero",
    "ln",
    "max_var_index",
    "mul",
    "neg",
    "normalize",
    "param",
    "params_in",
    "parse",
    "pow_expr",
    "powi",
    "rational_form",
    "sample_params",
    "sample_point",
    "sample_values",
    "shift_vars",
    "sin",
    "sub",
    "subst_params",
    "subst_vars",
    "to_string",
    "var",
    "variables_in",
    "walk",
    "walk_exprs",
    "PROVEN_ZERO",
    "PROVEN_NONZERO_CONSTANT",
    "SAMPLED_ZERO",
    "SAMPLED_NONZERO",
]
